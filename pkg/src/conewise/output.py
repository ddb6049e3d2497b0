"""CSV and JSON emission with a reproducibility manifest.

CSV files start with the schema comment line ``# cwl-csv v1``; floats are
written with shortest round-trip repr so identical runs produce identical
bytes.  Every run directory gets a manifest recording the full
configuration, seeds and library version; re-running from a manifest
reproduces the data files bit-exactly (the manifest itself records wall
time and is excluded from that guarantee).
"""

from __future__ import annotations

import json
import os
import time
from dataclasses import dataclass, field

import numpy as np

CSV_SCHEMA = "# cwl-csv v1"


def _cell(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return "1" if x else "0"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return repr(float(x))
    return str(x)


def write_csv(path: str, header, rows) -> None:
    with open(path, "w") as fh:
        fh.write(CSV_SCHEMA + "\n")
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(_cell(x) for x in row) + "\n")


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, np.ndarray):
        return [_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    return obj


def write_json(path: str, obj) -> None:
    with open(path, "w") as fh:
        json.dump(_jsonable(obj), fh, indent=2, sort_keys=True)
        fh.write("\n")


@dataclass
class RunWriter:
    """Collects the artifacts of one experiment run in its own directory."""

    out_dir: str
    experiment: str
    config: dict
    seed: int
    outputs: dict = field(default_factory=dict)
    _t0: float = field(default_factory=time.monotonic)

    def __post_init__(self):
        os.makedirs(self.path(), exist_ok=True)

    def path(self, name: str | None = None) -> str:
        base = os.path.join(self.out_dir, self.experiment)
        return base if name is None else os.path.join(base, name)

    def csv(self, name: str, header, rows) -> str:
        p = self.path(name)
        write_csv(p, header, rows)
        self.outputs[name] = p
        return p

    def json(self, name: str, obj) -> str:
        p = self.path(name)
        write_json(p, obj)
        self.outputs[name] = p
        return p

    def curve_csv(self, name: str, curve) -> str:
        rows = zip(curve.tau, curve.q0, curve.stderr)
        return self.csv(name, ["tau", "q0", "stderr"], rows)

    def finish(self) -> str:
        from . import __version__

        manifest = {
            "experiment": self.experiment,
            "config": self.config,
            "seed": self.seed,
            "version": __version__,
            "csv_schema": CSV_SCHEMA.lstrip("# "),
            "outputs": {k: os.path.basename(v) for k, v in self.outputs.items()},
            "wall_time_s": round(time.monotonic() - self._t0, 3),
        }
        p = self.path("manifest.json")
        write_json(p, manifest)
        return p
