"""Heavy-tailed renewal statistics of cone-residence times.

The matrix dynamics alternates residence intervals between the two cones.
Treating the intervals as iid draws from the discrete power law
``P(tau >= k) = (tau_min / k)**mu`` and accumulating per-interval log
growth ``g(tau)`` (truncating the interval that straddles the horizon)
turns the top growth rate ``lambda = Lambda / t`` into an occupation-time
functional.  For ``mu < 1`` its law converges to the two-edge Lamperti
density implemented here in closed form, with its Stieltjes-transform
identity as an independent cross-check; for ``mu > 1`` the rate
self-averages to ``(m1 + m2) / (2 m_tau)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad
from scipy.special import zeta

from .errors import DegenerateProcessError, InvalidSpecError
from .records import LyapunovSamples, PersistenceCurve, log_tau_grid
from .seeding import derive_seed, rng_from_seed
from .spectra import SpectralModel
from .spectral import g_array, log_moment_asymptotic

__all__ = [
    "LampertiParams",
    "RenewalConfig",
    "RenewalRun",
    "lamperti_pdf",
    "lamperti_cdf",
    "lamperti_cdf_quadrature",
    "stieltjes_rhs",
    "stieltjes_lhs",
    "sample_power_law_intervals",
    "interval_survival",
    "sample_renewal_lyapunov",
    "simulate_renewal_run",
    "self_averaging_value",
    "renewal_persistence_sanity",
]


@dataclass(frozen=True)
class LampertiParams:
    """Two-edge occupation-time law parameters: edge rates r1, r2 and tail
    exponent mu in (0, 1)."""

    r1: float
    r2: float
    mu: float

    def __post_init__(self):
        if not 0.0 < self.mu < 1.0:
            raise InvalidSpecError(f"tail exponent must lie strictly in (0, 1), got {self.mu}")
        if self.r1 == self.r2:
            raise InvalidSpecError("the density form needs distinct edge rates")

    @classmethod
    def from_edges(cls, nu_plus_a: float, nu_plus_b: float, mu: float) -> "LampertiParams":
        return cls(math.log(abs(nu_plus_a)), math.log(abs(nu_plus_b)), mu)

    @property
    def lo(self) -> float:
        return min(self.r1, self.r2)

    @property
    def hi(self) -> float:
        return max(self.r1, self.r2)

    @property
    def width(self) -> float:
        return self.hi - self.lo


def lamperti_pdf(params: LampertiParams, lam) -> np.ndarray:
    """Density of the two-edge occupation-time law.

    Vanishes outside [min(r1,r2), max(r1,r2)]; evaluates to +inf exactly at
    the edges (the density diverges like |lam - r_i|**(mu-1)), which callers
    must handle.
    """
    lam = np.asarray(lam, dtype=float)
    mu = params.mu
    z1 = np.abs(lam - params.r1)
    z2 = np.abs(lam - params.r2)
    out = np.zeros_like(lam)
    inside = (lam >= params.lo) & (lam <= params.hi)
    at_edge = inside & ((z1 == 0.0) | (z2 == 0.0))
    core = inside & ~at_edge
    zz1, zz2 = z1[core], z2[core]
    num = (zz1 * zz2) ** (mu - 1.0)
    den = zz1 ** (2 * mu) + zz2 ** (2 * mu) + 2.0 * (zz1 * zz2) ** mu * math.cos(mu * math.pi)
    out[core] = params.width * math.sin(mu * math.pi) / math.pi * num / den
    out[at_edge] = np.inf
    return out


def lamperti_cdf(params: LampertiParams, lam) -> np.ndarray:
    """Distribution function of the two-edge law, in closed form.

    Antiderivative of the density under R = ((1-x)/x)**mu with
    x = (lam - lo)/width:  CDF = (pi/2 - arctan((R + cos mu pi)/sin mu pi))
    / (pi mu).
    """
    lam = np.asarray(lam, dtype=float)
    mu = params.mu
    x = np.clip((lam - params.lo) / params.width, 0.0, 1.0)
    out = np.empty_like(x)
    lo_edge = x <= 0.0
    hi_edge = x >= 1.0
    mid = ~(lo_edge | hi_edge)
    with np.errstate(divide="ignore"):
        r = ((1.0 - x[mid]) / x[mid]) ** mu
    out[mid] = (
        math.pi / 2.0 - np.arctan((r + math.cos(mu * math.pi)) / math.sin(mu * math.pi))
    ) / (math.pi * mu)
    out[lo_edge] = 0.0
    out[hi_edge] = 1.0
    return out


def _cdf_half_quadrature(mu: float, x: float) -> float:
    """Integral of the unit-interval density from 0 to x <= 1/2, by quadrature
    with the edge substitution u = x**mu."""
    if x <= 0.0:
        return 0.0
    cmu = math.cos(mu * math.pi)

    def integrand(u: float) -> float:
        xx = u ** (1.0 / mu)
        z2 = 1.0 - xx
        num = (xx * z2) ** (mu - 1.0)
        den = xx ** (2 * mu) + z2 ** (2 * mu) + 2.0 * (xx * z2) ** mu * cmu
        pdf = math.sin(mu * math.pi) / math.pi * num / den
        return pdf * (1.0 / mu) * u ** (1.0 / mu - 1.0)

    val, _ = quad(integrand, 0.0, x**mu, epsabs=1e-12, epsrel=1e-10, limit=200)
    return val


def lamperti_cdf_quadrature(params: LampertiParams, lam: float) -> float:
    """CDF by endpoint-aware quadrature of the density (cross-check route)."""
    x = (float(lam) - params.lo) / params.width
    if x <= 0.0:
        return 0.0
    if x >= 1.0:
        return 1.0
    if x <= 0.5:
        return _cdf_half_quadrature(params.mu, x)
    return 1.0 - _cdf_half_quadrature(params.mu, 1.0 - x)


def stieltjes_rhs(params: LampertiParams, y: float) -> float:
    """Closed form of the Stieltjes transform of the two-edge law."""
    if y <= params.hi:
        raise InvalidSpecError(f"transform point must exceed max(r1, r2) = {params.hi}")
    mu = params.mu
    a, b = y - params.r1, y - params.r2
    return (a ** (mu - 1.0) + b ** (mu - 1.0)) / (a**mu + b**mu)


def stieltjes_lhs(params: LampertiParams, y: float) -> float:
    """Stieltjes transform by quadrature of the density against 1/(y - lam)."""
    if y <= params.hi:
        raise InvalidSpecError(f"transform point must exceed max(r1, r2) = {params.hi}")
    mu = params.mu
    width = params.width
    ytil = (y - params.lo) / width
    cmu = math.cos(mu * math.pi)
    smu = math.sin(mu * math.pi)

    def unit_pdf(xx: float) -> float:
        z2 = 1.0 - xx
        num = (xx * z2) ** (mu - 1.0)
        den = xx ** (2 * mu) + z2 ** (2 * mu) + 2.0 * (xx * z2) ** mu * cmu
        return smu / math.pi * num / den

    def piece(shifted_pole: float) -> float:
        # integral over x in [0, 1/2] of unit_pdf(x) / (shifted_pole - x)
        def integrand(u: float) -> float:
            xx = u ** (1.0 / mu)
            return unit_pdf(xx) / (shifted_pole - xx) * (1.0 / mu) * u ** (1.0 / mu - 1.0)

        val, _ = quad(integrand, 0.0, 0.5**mu, epsabs=1e-13, epsrel=1e-10, limit=300)
        return val

    # split at the midpoint and mirror the upper half (the density is
    # symmetric under x -> 1-x)
    lower = piece(ytil)
    upper = piece(1.0 - ytil)  # pole term flips sign: 1/(ytil-(1-w)) = -1/((1-ytil)-w)
    return (lower - upper) / width


def sample_power_law_intervals(rng: np.random.Generator, mu, tau_min: int, size) -> np.ndarray:
    """Discrete power-law residence times: P(tau >= k) = (tau_min/k)**mu.

    Inverse-CDF construction, exact in distribution; returns float64 (values
    can exceed any integer range for small mu).
    """
    u = 1.0 - rng.random(size)  # in (0, 1]
    with np.errstate(over="ignore"):
        # inf is a legitimate draw: longer than any horizon
        return np.floor(tau_min * u ** (-1.0 / np.asarray(mu, dtype=float)))


def interval_survival(mu: float, tau_min: int, k) -> np.ndarray:
    """Closed-form survival P(tau >= k) of the interval law."""
    k = np.asarray(k, dtype=float)
    return np.where(k <= tau_min, 1.0, (tau_min / np.maximum(k, tau_min)) ** mu)


@dataclass(frozen=True)
class RenewalConfig:
    """Alternating two-cone renewal simulation parameters.

    ``g_mode`` is either ``("linear", r1, r2)`` -- per-step rates, the
    long-interval limit -- or ``("spectral", specA, specB)`` -- exact
    per-interval log growth from the spectral moments.
    """

    mu1: float
    mu2: float
    tau_min: int
    horizon: int
    g_mode: tuple
    seed: int = 0

    def __post_init__(self):
        if self.mu1 <= 0 or self.mu2 <= 0:
            raise InvalidSpecError("tail exponents must be positive")
        if self.tau_min < 1:
            raise InvalidSpecError("tau_min must be >= 1")
        if self.horizon < 10 * self.tau_min:
            raise InvalidSpecError("horizon must be >= 10 * tau_min")
        if self.g_mode[0] not in ("linear", "spectral"):
            raise InvalidSpecError(f"unknown g mode {self.g_mode[0]!r}")
        if self.g_mode[0] == "spectral" and not all(
            isinstance(s, SpectralModel) for s in self.g_mode[1:3]
        ):
            raise InvalidSpecError("spectral g mode needs two spectral models")

    @classmethod
    def linear_rates(
        cls, mu1: float, mu2: float, r1: float, r2: float, tau_min: int, horizon: int, seed: int = 0
    ):
        return cls(mu1, mu2, tau_min, horizon, ("linear", float(r1), float(r2)), seed)

    @classmethod
    def exact_spectral(
        cls,
        mu1: float,
        mu2: float,
        spec_a: SpectralModel,
        spec_b: SpectralModel,
        tau_min: int,
        horizon: int,
        seed: int = 0,
    ):
        return cls(mu1, mu2, tau_min, horizon, ("spectral", spec_a, spec_b), seed)

    @property
    def rates(self) -> tuple[float, float]:
        """Long-interval growth rates (r1, r2) = edge log-eigenvalues."""
        if self.g_mode[0] == "linear":
            return self.g_mode[1], self.g_mode[2]
        a, b = self.g_mode[1], self.g_mode[2]
        return math.log(abs(a.nu_plus)), math.log(abs(b.nu_plus))


@dataclass
class RenewalRun:
    """One renewal realization: labeled intervals, the accumulated log
    growth, and the rate lambda = Lambda / horizon."""

    intervals: list  # (cone label 0/1, tau); the last entry is truncated
    lam_accumulator: float
    horizon: int

    @property
    def rate(self) -> float:
        return self.lam_accumulator / self.horizon

    def check_partition(self) -> bool:
        return sum(t for _, t in self.intervals) == self.horizon


class _GEval:
    """Vectorized per-interval log growth for one cone."""

    def __init__(self, cfg: RenewalConfig, which: int, table_max: int = 1 << 14):
        self.mode = cfg.g_mode[0]
        if self.mode == "linear":
            self.rate = cfg.g_mode[1 + which]
            self.spec = None
            self.table = None
        else:
            self.spec = cfg.g_mode[1 + which]
            self.rate = math.log(abs(self.spec.nu_plus))
            self.table_max = table_max
            self.table = g_array(self.spec, np.arange(1, table_max + 1))

    def __call__(self, taus: np.ndarray) -> np.ndarray:
        taus = np.asarray(taus, dtype=np.int64)
        if self.mode == "linear":
            return self.rate * taus.astype(float)
        out = np.empty(taus.shape, dtype=float)
        small = taus <= self.table_max
        out[small] = self.table[taus[small] - 1]
        big = ~small
        if np.any(big):
            fast = self.spec.family in ("beta", "atomic") or (
                self.spec.family == "semicircle" and self.spec.symmetric_about_zero
            )
            if fast:
                out[big] = g_array(self.spec, taus[big])
            else:
                # rare huge intervals on quadrature-backed spectra: the edge
                # asymptotics is accurate to O(1/tau) here
                out[big] = 0.5 * np.array(
                    [log_moment_asymptotic(self.spec, 2.0 * float(t)) for t in taus[big]]
                )
        return out


def sample_renewal_lyapunov(cfg: RenewalConfig, n_samples: int, chunk: int = 1024) -> LyapunovSamples:
    """Monte-Carlo top growth rates from the alternating renewal model.

    Per sample: the starting cone is a fair coin, labels then alternate
    strictly; residence times are drawn from the discrete power law of the
    active cone; per-interval log growth accumulates, with the interval that
    straddles the horizon contributing only its in-horizon part.
    """
    if n_samples < 1:
        raise InvalidSpecError("need at least one sample")
    rng = rng_from_seed(cfg.seed)
    g_eval = (_GEval(cfg, 0), _GEval(cfg, 1))
    mus = np.array([cfg.mu1, cfg.mu2])
    horizon = float(cfg.horizon)

    lam_total = np.zeros(n_samples)
    t_done = np.zeros(n_samples)
    start = rng.integers(0, 2, size=n_samples)  # starting cone label per sample
    k_done = np.zeros(n_samples, dtype=np.int64)  # completed intervals per sample
    active = np.arange(n_samples)

    while active.size:
        na = active.size
        # labels of the next `chunk` intervals for every active sample
        col = np.arange(chunk)
        labels = (start[active, None] + k_done[active, None] + col[None, :]) % 2
        taus = sample_power_law_intervals(rng, mus[labels], cfg.tau_min, (na, chunk))
        csum = t_done[active, None] + np.cumsum(taus, axis=1)
        crossed = csum >= horizon
        done = crossed.any(axis=1)
        if np.any(done):
            rows = np.nonzero(done)[0]
            kstar = np.argmax(crossed[rows], axis=1)  # first crossing column
            closed = col[None, :] < kstar[:, None]
            g_closed = np.zeros((rows.size, chunk))
            for which in (0, 1):
                m = closed & (labels[rows] == which)
                if np.any(m):
                    g_closed[m] = g_eval[which](taus[rows][m])
            idx = active[rows]
            lam_total[idx] += g_closed.sum(axis=1)
            # truncated final interval: only the part inside the horizon grows
            t_before = np.where(
                kstar > 0, csum[rows, np.maximum(kstar - 1, 0)], t_done[idx]
            )
            remain = (horizon - t_before).astype(np.int64)
            lab_fin = labels[rows, kstar]
            for which in (0, 1):
                m = lab_fin == which
                if np.any(m):
                    lam_total[idx[m]] += g_eval[which](remain[m])
            t_done[idx] = horizon
        if np.any(~done):
            rows = np.nonzero(~done)[0]
            idx = active[rows]
            g_open = np.zeros((rows.size, chunk))
            for which in (0, 1):
                m = labels[rows] == which
                if np.any(m):
                    g_open[m] = g_eval[which](taus[rows][m])
            lam_total[idx] += g_open.sum(axis=1)
            t_done[idx] = csum[rows, -1]
            k_done[idx] += chunk
        active = active[~done]

    values = lam_total / horizon
    r1, r2 = cfg.rates
    if r1 == r2:
        normalized = np.zeros_like(values)
    else:
        normalized = (values - r1) / (r2 - r1)
    meta = {
        "source": "renewal",
        "mu": (cfg.mu1, cfg.mu2),
        "tau_min": cfg.tau_min,
        "horizon": cfg.horizon,
        "rates": (r1, r2),
        "n_samples": n_samples,
        "seed": cfg.seed,
    }
    none = np.zeros(n_samples, dtype=bool)
    return LyapunovSamples(values=values, normalized=normalized, trapped=none, cycling=none, meta=meta)


def simulate_renewal_run(cfg: RenewalConfig, seed: int | None = None) -> RenewalRun:
    """Single renewal realization with full interval bookkeeping."""
    rng = rng_from_seed(cfg.seed if seed is None else seed)
    g_eval = (_GEval(cfg, 0), _GEval(cfg, 1))
    mus = (cfg.mu1, cfg.mu2)
    label = int(rng.integers(0, 2))
    t = 0
    lam = 0.0
    intervals = []
    while t < cfg.horizon:
        tau_f = float(sample_power_law_intervals(rng, mus[label], cfg.tau_min, ()))
        tau = int(min(tau_f, cfg.horizon - t))  # truncate the straddling interval
        lam += float(g_eval[label](np.array([tau]))[0])
        intervals.append((label, tau))
        t += tau
        label = 1 - label
    return RenewalRun(intervals=intervals, lam_accumulator=lam, horizon=cfg.horizon)


def self_averaging_value(
    spec_a: SpectralModel, spec_b: SpectralModel, mu: float, tau_min: int = 1
) -> float:
    """Deterministic large-time rate (m1 + m2) / (2 m_tau) for mu > 1.

    m_i = E[g_i(tau)] and m_tau = E[tau] over the discrete power law; the
    linear part of g is summed exactly through Hurwitz zeta values and the
    logarithmic remainder numerically with an integral tail estimate
    (relative accuracy ~1e-8).
    """
    if mu <= 1.0:
        raise DegenerateProcessError(
            f"mean residence time diverges for mu = {mu} <= 1; no self-averaging value"
        )
    if tau_min < 1:
        raise InvalidSpecError("tau_min must be >= 1")
    # E[tau] = (tau_min - 1) + tau_min^mu * Hurwitz_zeta(mu, tau_min)
    m_tau = (tau_min - 1.0) + tau_min**mu * float(zeta(mu, tau_min))

    k_max = 1 << 20
    ks = np.arange(tau_min, k_max + 1, dtype=np.int64)
    surv = (tau_min / ks.astype(float)) ** mu
    pk = surv - np.append(surv[1:], (tau_min / (k_max + 1.0)) ** mu)

    def m_of(spec: SpectralModel) -> float:
        rate = math.log(abs(spec.nu_plus))
        resid = g_array(spec, ks) - rate * ks.astype(float)
        main = rate * m_tau + float(np.dot(pk, resid))
        # tail of the residual sum: g(k) - r k -> c0 - (alpha+1)/2 ln(2k)
        if spec.alpha is not None:
            c0 = 0.5 * (log_moment_asymptotic(spec, 2.0 * k_max) - 2.0 * k_max * rate) + (
                0.5 * (spec.alpha + 1.0)
            ) * math.log(2.0 * k_max)
            beta = 0.5 * (spec.alpha + 1.0)
            s_tail = (tau_min / (k_max + 1.0)) ** mu
            log_term = s_tail * (math.log(2.0 * (k_max + 1.0)) + 1.0 / mu)
            main += s_tail * c0 - beta * log_term
        return main

    return (m_of(spec_a) + m_of(spec_b)) / (2.0 * m_tau)


def renewal_persistence_sanity(
    mu: float, tau_min: int, n: int, seed: int = 0, grid: np.ndarray | None = None
) -> PersistenceCurve:
    """Empirical interval survival from the sampler, for checking against
    the closed-form survival function."""
    if mu <= 0:
        raise InvalidSpecError("tail exponent must be positive")
    rng = rng_from_seed(seed)
    taus = sample_power_law_intervals(rng, mu, tau_min, n)
    horizon = int(min(taus.max(), 10 ** 7))
    grid = log_tau_grid(horizon) if grid is None else np.asarray(grid, dtype=np.int64)
    sorted_taus = np.sort(taus)
    # survival P(tau >= k): count samples >= k
    surv = taus.size - np.searchsorted(sorted_taus, grid, side="left")
    q = surv / taus.size
    err = np.sqrt(np.clip(q * (1 - q), 0, None) / taus.size)
    meta = {"source": "renewal-sanity", "mu": mu, "tau_min": tau_min, "n_samples": n}
    return PersistenceCurve(tau=grid, q0=q, stderr=err, meta=meta)
