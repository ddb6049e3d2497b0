"""Finite-N cone-wise matrix dynamics.

The state is a unit direction plus an accumulated log norm: with spectral
edges like 2*sqrt(2) (or 0.05*sqrt(2)) over 1e4 steps the raw norm would
overflow (or underflow), so every step renormalizes and adds ln of the step
growth to a running total.  Two equivalent evolution routes exist:

* :func:`evolve` / :func:`evolve_multicone` -- literal per-step matrix
  products, recording signs, residence intervals, trapping and cycle
  diagnostics (the reference semantics);
* :func:`lyapunov_runs` -- an eigenbasis block route for long horizons:
  each matrix is diagonalized once, whole cone-residence stretches advance
  through cumulative eigenvalue powers, and basis changes happen only at
  cone switches.  Within floating-point limits both describe the same
  dynamics; the blocked route makes ensemble sweeps at N ~ 1e3, T ~ 1e4
  tractable.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import partial

import numpy as np
from scipy.linalg import eigh

from .ensembles import EnsembleSpec, sample_elliptic
from .errors import (
    CollapseUndefinedError,
    DegenerateDynamicsError,
    InvalidSpecError,
)
from .estimators import FitResult, fit_truncated_powerlaw
from .parallel import map_index_chunks
from .records import LyapunovSamples, PersistenceCurve, log_tau_grid
from .seeding import derive_seed, rng_from_seed

__all__ = [
    "Trajectory",
    "evolve",
    "evolve_multicone",
    "estimate_persistence_matrix",
    "ScalingCollapse",
    "scaling_collapse",
    "goe_family",
    "lyapunov_runs",
    "LyapunovRunSet",
    "ensemble_lyapunov",
    "TopEigenvalueCheck",
    "top_eigenvalue_check",
    "trapped_run_edge_pairs",
    "elliptic_persistence",
]


def _sign_with_coin(value: float, rng: np.random.Generator) -> int:
    """Sign of a component; exact zeros resolved by a fair coin from the
    run's stream (probability zero in float dynamics, handled anyway)."""
    if value > 0.0:
        return 1
    if value < 0.0:
        return -1
    return 1 if rng.random() < 0.5 else -1


def _runs_of(labels: np.ndarray) -> list[tuple[int, int]]:
    """Maximal constant runs of a label sequence as (label, length)."""
    runs = []
    if labels.size == 0:
        return runs
    start = 0
    for i in range(1, labels.size):
        if labels[i] != labels[start]:
            runs.append((int(labels[start]), i - start))
            start = i
    runs.append((int(labels[start]), labels.size - start))
    return runs


@dataclass
class Trajectory:
    """Renormalized orbit record of one cone-wise run."""

    horizon: int
    direction: np.ndarray  # final unit vector
    log_norm: np.ndarray  # cumulative ln ||v(t)|| / ||v(0)||, length T+1
    signs: np.ndarray  # sign of v_1(t), length T+1 (0 only for exact zeros)
    vbar1: np.ndarray  # sqrt(N) * first component of the unit direction
    cone_labels: np.ndarray  # matrix index applied at each step, length T
    residence_intervals: list  # closed (label, tau) runs
    open_interval: tuple  # final, possibly continuing (label, tau)
    trapped: bool
    cycle_detected: bool
    cycle_period: int | None
    meta: dict = field(default_factory=dict)

    @property
    def lyapunov(self) -> float:
        return float(self.log_norm[-1]) / self.horizon

    def interval_partition_ok(self) -> bool:
        total = sum(t for _, t in self.residence_intervals) + self.open_interval[1]
        return total == self.horizon


def _trap_window(T: int) -> int:
    return min(T, max(1000, T // 10))


def evolve_multicone(
    matrices,
    p: int,
    v0: np.ndarray,
    T: int,
    seed: int = 0,
    cycle_interval: int = 16,
    cycle_grid: float = 1e-6,
) -> Trajectory:
    """Cone-wise evolution where sign bits of the first p components select
    one of 2**p matrices (bit i set when component i is negative)."""
    if len(matrices) != 2**p:
        raise InvalidSpecError(f"need exactly {2**p} matrices for p = {p}, got {len(matrices)}")
    n = matrices[0].shape[0]
    if n < p:
        raise InvalidSpecError(f"dimension {n} too small for {p} sign components")
    for m in matrices:
        if m.shape != (n, n):
            raise InvalidSpecError("all matrices must share one square shape")
    v0 = np.asarray(v0, dtype=float)
    nrm0 = float(np.linalg.norm(v0))
    if nrm0 == 0.0 or T < 1:
        raise InvalidSpecError("need a nonzero start vector and T >= 1")
    rng = rng_from_seed(seed)
    v = v0 / nrm0
    sqrt_n = math.sqrt(n)

    log_norm = np.zeros(T + 1)
    signs = np.zeros(T + 1, dtype=np.int8)
    vbar1 = np.zeros(T + 1)
    labels = np.zeros(T, dtype=np.int64)
    signs[0] = np.sign(v[0])
    vbar1[0] = sqrt_n * v[0]

    seen: dict[bytes, int] = {}
    cycle_detected = False
    cycle_period = None
    w = np.empty(n)
    for t in range(T):
        idx = 0
        for comp in range(p):
            if _sign_with_coin(v[comp], rng) < 0:
                idx |= 1 << comp
        labels[t] = idx
        np.matmul(matrices[idx], v, out=w)
        nrm = float(np.linalg.norm(w))
        if nrm == 0.0:
            raise DegenerateDynamicsError(t)
        log_norm[t + 1] = log_norm[t] + math.log(nrm)
        v = w / nrm
        signs[t + 1] = np.sign(v[0])
        vbar1[t + 1] = sqrt_n * v[0]
        if not cycle_detected and (t + 1) % cycle_interval == 0:
            key = np.round(v / cycle_grid).astype(np.int64).tobytes()
            prev = seen.get(key)
            if prev is not None:
                cycle_detected = True
                cycle_period = (t + 1) - prev
            else:
                seen[key] = t + 1

    runs = _runs_of(labels)
    window = _trap_window(T)
    trapped = bool(np.all(labels[-window:] == labels[-1]))
    return Trajectory(
        horizon=T,
        direction=v,
        log_norm=log_norm,
        signs=signs,
        vbar1=vbar1,
        cone_labels=labels,
        residence_intervals=runs[:-1],
        open_interval=runs[-1],
        trapped=trapped,
        cycle_detected=cycle_detected,
        cycle_period=cycle_period,
        meta={"N": n, "p": p, "seed": seed},
    )


def evolve(A: np.ndarray, B: np.ndarray, v0: np.ndarray, T: int, seed: int = 0, **kw) -> Trajectory:
    """Two-cone evolution: A acts while the first component is positive,
    B while it is negative (exact zeros: fair coin)."""
    if A.shape != B.shape or A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise InvalidSpecError("A and B must be square matrices of one dimension")
    return evolve_multicone([A, B], 1, v0, T, seed=seed, **kw)


# -- persistence from matrix dynamics ---------------------------------------


def _first_sign_change(m: np.ndarray, v0: np.ndarray, horizon: int, rng) -> int:
    """Step of the first sign change of the first component, or horizon+1."""
    v = v0 / np.linalg.norm(v0)
    s0 = _sign_with_coin(v[0], rng)
    w = np.empty_like(v)
    for t in range(1, horizon + 1):
        np.matmul(m, v, out=w)
        nrm = float(np.linalg.norm(w))
        if nrm == 0.0:
            raise DegenerateDynamicsError(t)
        np.divide(w, nrm, out=v)
        if _sign_with_coin(v[0], rng) != s0:
            return t
    return horizon + 1


def _persistence_chunk(ensemble_a, ensemble_b, T, seed, start, stop):
    n_dim = ensemble_a.dimension
    times = np.empty(stop - start, dtype=np.int64)
    for i, r in enumerate(range(start, stop)):
        rng = rng_from_seed(derive_seed(seed, r, 0))
        v0 = rng.standard_normal(n_dim)
        s0 = _sign_with_coin(v0[0], rng)
        ens, slot = (ensemble_a, 1) if s0 > 0 else (ensemble_b, 2)
        m = ens.sample(derive_seed(seed, r, slot))
        times[i] = _first_sign_change(m, v0, T, rng)
    return times


def estimate_persistence_matrix(
    ensemble_a: EnsembleSpec,
    ensemble_b: EnsembleSpec,
    n_realizations: int,
    T: int,
    seed: int,
    grid: np.ndarray | None = None,
    threads: int = 1,
) -> PersistenceCurve:
    """Q0(tau) = fraction of fresh (matrix pair, start vector) draws whose
    first sign change falls after tau.

    Only the starting cone's matrix acts before the first change, so the
    other one is never materialized; seeds are assigned to both slots so the
    statistics are those of independent pair draws.  Results do not depend
    on ``threads`` (per-realization seeds are index-derived).
    """
    if ensemble_a.dimension != ensemble_b.dimension:
        raise InvalidSpecError("ensembles must share the dimension")
    times = map_index_chunks(
        partial(_persistence_chunk, ensemble_a, ensemble_b, T, seed),
        n_realizations,
        threads,
    )
    meta = {
        "source": "matrix",
        "ensembles": (ensemble_a.describe(), ensemble_b.describe()),
        "N": ensemble_a.dimension,
        "T": T,
        "seed": seed,
    }
    return PersistenceCurve.from_first_change_times(times, horizon=T, grid=grid, meta=meta)


def goe_family(center: float = 0.0, radius: float = 2.0):
    """Ensemble-pair factory N -> (A, B) of centered/shifted GOE recipes."""

    def make(n: int) -> tuple[EnsembleSpec, EnsembleSpec]:
        spec = EnsembleSpec.goe(n, center, radius)
        return spec, spec

    return make


@dataclass
class ScalingCollapse:
    """Rescaled finite-N persistence curves and their collapse quality."""

    n_values: list
    mu: float
    curves: list  # per-N PersistenceCurve
    u_grid: np.ndarray  # common rescaled-time grid (tau * N^{-2/3})
    rescaled_log10: np.ndarray  # len(N) x len(u): log10(Q0 * N^{2 mu/3})
    spread: np.ndarray  # per-u stdev of rescaled_log10 across N
    central_decade: tuple  # (u_lo, u_hi)
    spread_central: float  # max spread inside the central decade
    plateau: dict  # N -> rescaled late-time level c estimate

    def plateau_positive(self, n: int) -> bool:
        return self.plateau[n][0] > 0.0


def scaling_collapse(
    n_list,
    family,
    n_realizations: int,
    T: int,
    mu: float,
    seed: int,
    points_per_decade: int = 24,
    threads: int = 1,
) -> ScalingCollapse:
    """Measure Q0 at several N, rescale by (tau N^{-2/3}, Q0 N^{2 mu/3}) and
    quantify the collapse as the max cross-N spread of the rescaled curves.

    ``T`` is the horizon at the largest N; smaller sizes run to the same
    maximal rescaled time u = T * max(N)^{-2/3}.
    """
    n_list = sorted(int(n) for n in n_list)
    if len(n_list) < 3:
        raise CollapseUndefinedError("need at least 3 sizes for a collapse")
    if n_list[-1] < 8 * n_list[0]:
        raise CollapseUndefinedError("sizes must span at least a factor of 8")
    if mu <= 0:
        raise InvalidSpecError("rescaling exponent must be positive")
    n_max = n_list[-1]
    u_max = T * n_max ** (-2.0 / 3.0)
    curves = []
    for i, n in enumerate(n_list):
        horizon = max(4, int(math.ceil(u_max * n ** (2.0 / 3.0))))
        ens_a, ens_b = family(n)
        grid = log_tau_grid(horizon, points=120)
        curves.append(
            estimate_persistence_matrix(
                ens_a,
                ens_b,
                n_realizations,
                horizon,
                derive_seed(seed, i),
                grid=grid,
                threads=threads,
            )
        )

    logs_u, logs_q = [], []
    for n, curve in zip(n_list, curves):
        tau, q, _ = curve.positive_part()
        logs_u.append(np.log10(tau * n ** (-2.0 / 3.0)))
        logs_q.append(np.log10(q * n ** (2.0 * mu / 3.0)))
    lo = max(lu[0] for lu in logs_u)
    hi = min(lu[-1] for lu in logs_u)
    if hi - lo < 1.0:
        raise CollapseUndefinedError(
            f"rescaled curves overlap over only {hi - lo:.2f} decades; need >= 1"
        )
    n_pts = max(8, int(round((hi - lo) * points_per_decade)))
    u_grid_log = np.linspace(lo, hi, n_pts)
    rescaled = np.vstack(
        [np.interp(u_grid_log, lu, lq) for lu, lq in zip(logs_u, logs_q)]
    )
    spread = rescaled.std(axis=0, ddof=1)
    mid = 0.5 * (lo + hi)
    central = (mid - 0.5, mid + 0.5)
    in_central = (u_grid_log >= central[0]) & (u_grid_log <= central[1])
    spread_central = float(spread[in_central].max())

    plateau = {}
    for n, curve in zip(n_list, curves):
        q_last = float(curve.q0[-1])
        err_last = float(curve.stderr[-1])
        scale = n ** (2.0 * mu / 3.0)
        plateau[n] = (q_last * scale, err_last * scale)

    return ScalingCollapse(
        n_values=n_list,
        mu=mu,
        curves=curves,
        u_grid=10.0**u_grid_log,
        rescaled_log10=rescaled,
        spread=spread,
        central_decade=(10.0 ** central[0], 10.0 ** central[1]),
        spread_central=spread_central,
        plateau=plateau,
    )


# -- eigenbasis block route for long-horizon growth rates --------------------


@dataclass
class LyapunovRunSet:
    """Per-realization growth-rate estimates with trapping diagnostics."""

    samples: LyapunovSamples
    lam_tail: np.ndarray  # growth rate over the final window
    final_cone: np.ndarray  # cone index at the horizon
    nu_max_final: np.ndarray  # top eigenvalue of the final cone's matrix
    last_change: np.ndarray  # time of the last sign change (0 if none)
    n_switches: np.ndarray


def _lyapunov_single(
    mats: tuple[np.ndarray, np.ndarray],
    v0: np.ndarray,
    T: int,
    rng: np.random.Generator,
    tail_window: int,
    block: int,
    cycle_grid: float = 1e-6,
):
    """One run of the eigenbasis block evolution.

    Diagonalize both matrices once; while the sign is constant, first
    components for a whole block of steps come from cumulative eigenvalue
    powers; a basis-change matrix handles cone switches.  Directions are
    snapshotted (quantized) at every cone entry for cycle detection.
    """
    n = v0.size
    eigvals, eigvecs = [], []
    for m in mats:
        w, u = np.linalg.eigh(m)
        eigvals.append(w)
        eigvecs.append(u)
    # basis change: coords in 0-basis -> coords in 1-basis
    cross = eigvecs[1].T @ eigvecs[0]
    first_row = (eigvecs[0][0, :], eigvecs[1][0, :])
    caps = []
    for w in eigvals:
        top = float(np.max(np.abs(w)))
        caps.append(max(1, int(600.0 / max(abs(math.log(top)), 1e-3))) if top > 0 else block)

    v = v0 / np.linalg.norm(v0)
    s_cur = _sign_with_coin(v[0], rng)
    active = 0 if s_cur > 0 else 1
    w_coord = eigvecs[active].T @ v

    t = 0
    log_norm = 0.0
    last_change = 0
    n_switches = 0
    tail_t, tail_l = 0, 0.0
    tail_started = False
    seen: dict[bytes, int] = {}
    cycling = False
    cycle_period = None

    # blocks restart small after every switch and grow while the cone holds,
    # so rapid-alternation stretches do not pay full-block overhead
    k_next = 8
    while t < T:
        k = min(k_next, block, caps[active], T - t)
        nu = eigvals[active]
        powers = np.cumprod(np.broadcast_to(nu, (k, n)), axis=0)
        v1 = powers @ (first_row[active] * w_coord)
        if s_cur > 0:
            bad = v1 <= 0.0
        else:
            bad = v1 >= 0.0
        j = int(np.argmax(bad)) if bad.any() else -1
        adv = k if j < 0 else j + 1
        w_coord = w_coord * powers[adv - 1]
        # two-stage normalization: components can sit far below the level
        # where their squares are representable
        peak = float(np.max(np.abs(w_coord)))
        if peak == 0.0:
            raise DegenerateDynamicsError(t + adv)
        w_coord /= peak
        nrm = float(np.linalg.norm(w_coord))
        log_norm += math.log(peak) + math.log(nrm)
        w_coord /= nrm
        t += adv
        k_next = k if j >= 0 else min(4 * k, block)
        if j >= 0:
            value = float(v1[j])
            new_s = _sign_with_coin(value, rng) if value == 0.0 else (1 if value > 0 else -1)
            if new_s != s_cur:
                k_next = 8
                s_cur = new_s
                last_change = t
                n_switches += 1
                w_coord = cross @ w_coord if active == 0 else cross.T @ w_coord
                w_coord /= np.linalg.norm(w_coord)  # orthogonality round-off only
                active = 1 - active
                if not cycling:
                    key = np.round(w_coord / cycle_grid).astype(np.int64).tobytes()
                    prev = seen.get((active, key))
                    if prev is not None:
                        cycling = True
                        cycle_period = t - prev
                    else:
                        seen[(active, key)] = t
        if not tail_started and t >= T - tail_window:
            tail_t, tail_l = t, log_norm
            tail_started = True

    lam = log_norm / T
    lam_tail = (log_norm - tail_l) / (t - tail_t) if t > tail_t else lam
    window = _trap_window(T)
    trapped = (T - last_change) >= window
    nu_max_final = float(np.max(eigvals[active]))
    return lam, lam_tail, trapped, cycling, cycle_period, active, nu_max_final, last_change, n_switches


def _lyapunov_chunk(ensemble_a, ensemble_b, T, seed, tail_window, block, start, stop):
    n_dim = ensemble_a.dimension
    n = stop - start
    lam = np.empty(n)
    lam_tail = np.empty(n)
    trapped = np.zeros(n, dtype=bool)
    cycling = np.zeros(n, dtype=bool)
    final_cone = np.zeros(n, dtype=np.int8)
    nu_max_final = np.empty(n)
    last_change = np.zeros(n, dtype=np.int64)
    n_switches = np.zeros(n, dtype=np.int64)
    for i, r in enumerate(range(start, stop)):
        rng = rng_from_seed(derive_seed(seed, r, 0))
        v0 = rng.standard_normal(n_dim)
        a = ensemble_a.sample(derive_seed(seed, r, 1))
        b = ensemble_b.sample(derive_seed(seed, r, 2))
        (
            lam[i],
            lam_tail[i],
            trapped[i],
            cycling[i],
            _,
            final_cone[i],
            nu_max_final[i],
            last_change[i],
            n_switches[i],
        ) = _lyapunov_single((a, b), v0, T, rng, tail_window, block)
    return lam, lam_tail, trapped, cycling, final_cone, nu_max_final, last_change, n_switches


def lyapunov_runs(
    ensemble_a: EnsembleSpec,
    ensemble_b: EnsembleSpec,
    n_realizations: int,
    T: int = 10_000,
    seed: int = 0,
    tail_window: int = 2000,
    block: int = 192,
    threads: int = 1,
) -> LyapunovRunSet:
    """Ensemble of growth-rate runs with fresh matrices per realization."""
    if ensemble_a.dimension != ensemble_b.dimension:
        raise InvalidSpecError("ensembles must share the dimension")
    r1 = math.log(abs(ensemble_a.nu_plus))
    r2 = math.log(abs(ensemble_b.nu_plus))
    (
        lam,
        lam_tail,
        trapped,
        cycling,
        final_cone,
        nu_max_final,
        last_change,
        n_switches,
    ) = map_index_chunks(
        partial(_lyapunov_chunk, ensemble_a, ensemble_b, T, seed, tail_window, block),
        n_realizations,
        threads,
        chunk=32,
    )
    normalized = (lam - r1) / (r2 - r1) if r1 != r2 else np.zeros_like(lam)
    samples = LyapunovSamples(
        values=lam,
        normalized=normalized,
        trapped=trapped,
        cycling=cycling,
        meta={
            "source": "matrix",
            "ensembles": (ensemble_a.describe(), ensemble_b.describe()),
            "N": ensemble_a.dimension,
            "T": T,
            "seed": seed,
            "rates": (r1, r2),
            "n_samples": n_realizations,
        },
    )
    return LyapunovRunSet(
        samples=samples,
        lam_tail=lam_tail,
        final_cone=final_cone,
        nu_max_final=nu_max_final,
        last_change=last_change,
        n_switches=n_switches,
    )


def ensemble_lyapunov(
    ensemble_a: EnsembleSpec,
    ensemble_b: EnsembleSpec,
    n_realizations: int,
    T: int = 10_000,
    seed: int = 0,
) -> LyapunovSamples:
    """Growth-rate samples normalized by the two spectral-edge rates."""
    return lyapunov_runs(ensemble_a, ensemble_b, n_realizations, T, seed).samples


# -- top eigenvalue fluctuation checks ---------------------------------------


@dataclass
class TopEigenvalueCheck:
    """Largest-eigenvalue draws and their edge-fluctuation normalization
    sigma1 = (nu_max - nu_plus) N^{2/3} / gamma with gamma = nu_plus / 2."""

    n_dim: int
    nu_plus: float
    gamma: float
    nu_max: np.ndarray
    sigma1: np.ndarray

    def cdf(self, x) -> np.ndarray:
        s = np.sort(self.sigma1)
        return np.searchsorted(s, np.asarray(x, dtype=float), side="right") / s.size


def top_eigenvalue_check(ensemble: EnsembleSpec, n_draws: int, seed: int) -> TopEigenvalueCheck:
    """Sample the largest eigenvalue of a symmetric ensemble n_draws times."""
    nu_plus = ensemble.nu_plus  # raises for non-symmetric kinds
    n_dim = ensemble.dimension
    gamma = nu_plus / 2.0
    if gamma <= 0:
        raise InvalidSpecError("edge-fluctuation normalization needs nu_plus > 0")
    nu_max = np.empty(n_draws)
    for k in range(n_draws):
        m = ensemble.sample(derive_seed(seed, k))
        nu_max[k] = eigh(
            m, eigvals_only=True, subset_by_index=[n_dim - 1, n_dim - 1], check_finite=False
        )[0]
    sigma1 = (nu_max - nu_plus) * n_dim ** (2.0 / 3.0) / gamma
    return TopEigenvalueCheck(n_dim=n_dim, nu_plus=nu_plus, gamma=gamma, nu_max=nu_max, sigma1=sigma1)


def trapped_run_edge_pairs(
    ensemble_a: EnsembleSpec,
    ensemble_b: EnsembleSpec,
    n_runs: int,
    T: int = 10_000,
    seed: int = 0,
    tail_window: int = 2000,
) -> dict:
    """Matched edge fluctuations from trapped dynamics runs.

    For runs that stay in one cone through the final window (and settled
    early enough for the power iteration to converge), the tail growth rate
    should equal ln of the trapping matrix's top eigenvalue.  Both are
    returned in sigma1 normalization against the trapping cone's population
    edge, ready for a distribution-level comparison.
    """
    runs = lyapunov_runs(ensemble_a, ensemble_b, n_runs, T, seed, tail_window=tail_window)
    edges = np.array(
        [abs(ensemble_a.nu_plus), abs(ensemble_b.nu_plus)]
    )
    quiet = T - 2 * tail_window
    use = runs.samples.trapped & ~runs.samples.cycling & (runs.last_change <= quiet)
    cone = runs.final_cone[use]
    nu_plus = edges[cone]
    gamma = nu_plus / 2.0
    scale = ensemble_a.dimension ** (2.0 / 3.0) / gamma
    sigma_dyn = (np.exp(runs.lam_tail[use]) - nu_plus) * scale
    sigma_eig = (runs.nu_max_final[use] - nu_plus) * scale
    return {
        "sigma1_dynamics": sigma_dyn,
        "sigma1_eigenvalue": sigma_eig,
        "cone": cone,
        "n_trapped_used": int(np.count_nonzero(use)),
        "n_runs": n_runs,
    }


# -- elliptic interpolation ---------------------------------------------------


def _elliptic_chunk(N, rho, radius, T, base, start, stop):
    times = np.empty(stop - start, dtype=np.int64)
    for i, r in enumerate(range(start, stop)):
        rng = rng_from_seed(derive_seed(base, r, 0))
        v0 = rng.standard_normal(N)
        s0 = _sign_with_coin(v0[0], rng)
        slot = 1 if s0 > 0 else 2
        m = sample_elliptic(N, rho, radius, derive_seed(base, r, slot))
        times[i] = _first_sign_change(m, v0, T, rng)
    return times


def elliptic_persistence(
    N: int,
    rho_list,
    n_realizations: int,
    T: int,
    seed: int,
    radius: float = 2.0,
    window=None,
    grid: np.ndarray | None = None,
    threads: int = 1,
) -> list[dict]:
    """Per-rho survival curves with truncated power-law fits.

    Both cone matrices are drawn from the same entry-correlation ensemble;
    as with the symmetric estimator only the starting cone's matrix is
    realized.  Fit windows default to the data range with at least ~25
    survivors per point.
    """
    out = []
    for i, rho in enumerate(rho_list):
        if not 0.0 <= rho <= 1.0:
            raise InvalidSpecError(f"entry correlation must lie in [0, 1], got {rho}")
        base = derive_seed(seed, i)
        times = map_index_chunks(
            partial(_elliptic_chunk, N, rho, radius, T, base), n_realizations, threads
        )
        curve = PersistenceCurve.from_first_change_times(
            times,
            horizon=T,
            grid=grid,
            meta={"source": "matrix", "rho": rho, "N": N, "T": T, "seed": seed},
        )
        tau, q, err = curve.positive_part()
        if window is None:
            enough = q * n_realizations >= 25
            tau_hi = float(tau[enough][-1]) if np.any(enough) else float(tau[-1])
            tau_lo = 1.0 if tau_hi < 60 else 10.0
            win = (tau_lo, tau_hi)
        else:
            win = window
        fit = fit_truncated_powerlaw((tau, q), window=win, stderr=err)
        out.append({"rho": rho, "curve": curve, "fit": fit})
    return out
