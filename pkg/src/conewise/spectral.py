"""Moments and correlators of spectral densities.

Everything here is driven by the t-th moment ``f(t)`` of a
:class:`~conewise.spectra.SpectralModel`.  Moments are held in log space
with an explicit sign so that spectra with upper edge above 1 never
overflow and sign-symmetric spectra keep exactly vanishing odd moments.

Two routes compute ``f(t)``:

* closed forms for the Beta and centered-semicircle families (gamma ratios
  and Catalan numbers, exact to round-off), and
* a generic adaptive quadrature with the exponential edge substitution
  ``nu = nu_plus * exp(-s/t)``, used for shifted semicircles and tabulated
  densities (and available for cross-checks on every family).
"""

from __future__ import annotations

import functools
import math
import warnings

import numpy as np
from scipy.integrate import IntegrationWarning, quad
from scipy.special import betaln, gammaln

from .errors import DegenerateProcessError, InvalidSpecError, NumericalError
from .spectra import SpectralModel

__all__ = [
    "MomentFunction",
    "moment_f",
    "log_abs_moment",
    "log_abs_moment_quadrature",
    "moment_asymptotic",
    "correlator",
    "correlator_asymptotic",
    "g_function",
    "g_array",
    "effective_dimension",
    "theta_reference",
    "is_sign_symmetric",
    "persistence_exponent",
    "THETA_TABLE",
]

# Diffusion-equation persistence exponents theta(d) for integer dimensions.
THETA_TABLE: dict[int, float] = {
    1: 0.1205,
    2: 3.0 / 16.0,
    3: 0.2382,
    4: 0.2806,
    5: 0.3173,
}

_QUAD_RELTOL = 1e-9
_LOG_ZERO = -math.inf


def _check_quad(val: float, err: float, what: str) -> float:
    if val <= 0 or not math.isfinite(val):
        raise NumericalError(f"quadrature for {what} returned {val!r}")
    if err > max(_QUAD_RELTOL * abs(val), 1e-300):
        raise NumericalError(
            f"quadrature for {what} did not converge: value {val!r}, abs error {err!r}"
        )
    return val


def _log_piece_moment(dens, w_lo: float, w_hi: float, t: int, what: str) -> float:
    """log of integral of dens(w) * w**t over [w_lo, w_hi], 0 <= w_lo < w_hi."""
    if w_hi <= 0.0:
        return _LOG_ZERO
    w_lo = max(w_lo, 0.0)
    def safe(f):
        # integrable edge divergences can evaluate to inf/nan at points that
        # round onto the support boundary; those points carry no mass
        def g(x: float) -> float:
            y = f(x)
            return y if math.isfinite(y) else 0.0

        return g

    with warnings.catch_warnings():
        # the returned abserr is checked below, which is the honest gate
        warnings.simplefilter("ignore", IntegrationWarning)
        if t == 0:
            val, err = quad(safe(dens), w_lo, w_hi, epsabs=1e-14, epsrel=1e-12, limit=300)
            return math.log(_check_quad(val, err, what))
        # w = w_hi * exp(-s/t) concentrates the large-t mass near s = 0 and
        # flattens the w**t factor into exp(-s).
        s_max = math.inf if w_lo == 0.0 else t * math.log(w_hi / w_lo)
        s_max = min(s_max, 745.0)
        c = (t + 1.0) / t

        def integrand(s: float) -> float:
            return dens(w_hi * math.exp(-s / t)) * math.exp(-s * c)

        val, err = quad(safe(integrand), 0.0, s_max, epsabs=0.0, epsrel=1e-11, limit=400)
    _check_quad(val, err, what)
    return (t + 1.0) * math.log(w_hi) - math.log(t) + math.log(val)


def _signed_log_sum(la: float, sa: int, lb: float, sb: int) -> tuple[float, int]:
    """(log|x|, sign) of x = sa*exp(la) + sb*exp(lb)."""
    if sa == 0 or la == _LOG_ZERO:
        return lb, sb
    if sb == 0 or lb == _LOG_ZERO:
        return la, sa
    hi, lo = max(la, lb), min(la, lb)
    ratio = math.exp(lo - hi)
    if sa == sb:
        return hi + math.log1p(ratio), sa
    if ratio >= 1.0 - 1e-12:
        return _LOG_ZERO, 0  # cancellation to round-off: treat as exact zero
    s_hi = sa if la >= lb else sb
    return hi + math.log1p(-ratio), s_hi


def log_abs_moment_quadrature(spec: SpectralModel, t: int) -> tuple[float, int]:
    """(log|f(t)|, sign) by adaptive quadrature; generic but slower route."""
    if spec.is_atomic:
        raise InvalidSpecError("atomic spectra have no density to integrate")
    what = f"moment t={t} of {spec.describe()}"
    dens = lambda w: float(spec.density(w))
    log_pos = _LOG_ZERO
    if spec.nu_plus > 0:
        log_pos = _log_piece_moment(dens, max(spec.nu_minus, 0.0), spec.nu_plus, t, what)
    log_neg = _LOG_ZERO
    if spec.nu_minus < 0:
        dens_neg = lambda w: float(spec.density(-w))
        log_neg = _log_piece_moment(dens_neg, max(-spec.nu_plus, 0.0), -spec.nu_minus, t, what)
    sign_neg = 1 if t % 2 == 0 else -1
    return _signed_log_sum(log_pos, 1, log_neg, sign_neg)


def _log_catalan(k: int) -> float:
    return gammaln(2 * k + 1) - 2.0 * gammaln(k + 1) - math.log(k + 1)


class MomentFunction:
    """Cached access to the moments of one spectral model.

    The cache maps t to ``(log|f(t)|, sign)``.  Reads and writes are plain
    dict operations, safe under concurrent use from Python threads.
    """

    def __init__(self, spec: SpectralModel):
        self.spec = spec
        self._cache: dict[int, tuple[float, int]] = {}

    def log_f(self, t: int) -> tuple[float, int]:
        t = int(t)
        if t < 0:
            raise InvalidSpecError(f"moment order must be >= 0, got {t}")
        hit = self._cache.get(t)
        if hit is None:
            hit = self._compute(t)
            self._cache[t] = hit
        return hit

    def f(self, t: int) -> float:
        logf, sign = self.log_f(t)
        if sign == 0:
            return 0.0
        return sign * math.exp(logf)

    def _compute(self, t: int) -> tuple[float, int]:
        spec = self.spec
        if spec.family == "atomic":
            nu = spec.params[0]
            if t == 0:
                return 0.0, 1
            if nu == 0.0:
                return _LOG_ZERO, 0
            return t * math.log(abs(nu)), 1 if (nu > 0 or t % 2 == 0) else -1
        if spec.family == "beta":
            a = spec.params[0] / 2.0
            return betaln(a + t, a) - betaln(a, a), 1
        if spec.family == "semicircle" and spec.symmetric_about_zero:
            if t % 2 == 1:
                return _LOG_ZERO, 0
            k = t // 2
            radius = spec.params[1]
            return _log_catalan(k) + t * math.log(radius / 2.0), 1
        if spec.symmetric_about_zero and t % 2 == 1:
            return _LOG_ZERO, 0
        return log_abs_moment_quadrature(spec, t)


@functools.lru_cache(maxsize=128)
def _moment_table(spec: SpectralModel) -> MomentFunction:
    return MomentFunction(spec)


def log_moment_array(spec: SpectralModel, kmax: int) -> tuple[np.ndarray, np.ndarray]:
    """(log|f(k)|, sign) for k = 0..kmax, vectorized where closed forms exist."""
    ks = np.arange(kmax + 1)
    if spec.family == "beta":
        a = spec.params[0] / 2.0
        return betaln(a + ks, a) - betaln(a, a), np.ones(kmax + 1, dtype=np.int8)
    if spec.family == "semicircle" and spec.symmetric_about_zero:
        radius = spec.params[1]
        logs = np.full(kmax + 1, _LOG_ZERO)
        signs = np.zeros(kmax + 1, dtype=np.int8)
        even = ks[ks % 2 == 0]
        half = even // 2
        logs[even] = (
            gammaln(even + 1.0)
            - 2.0 * gammaln(half + 1.0)
            - np.log(half + 1.0)
            + even * math.log(radius / 2.0)
        )
        signs[even] = 1
        return logs, signs
    table = _moment_table(spec)
    logs = np.empty(kmax + 1)
    signs = np.empty(kmax + 1, dtype=np.int8)
    for k in range(kmax + 1):
        logs[k], signs[k] = table.log_f(k)
    return logs, signs


def log_abs_moment(spec: SpectralModel, t: int) -> tuple[float, int]:
    """(log|f(t)|, sign) through the per-model moment cache."""
    return _moment_table(spec).log_f(t)


def moment_f(spec: SpectralModel, t: int) -> float:
    """t-th moment of the density (may overflow to inf for nu_plus > 1)."""
    return _moment_table(spec).f(t)


def moment_asymptotic(spec: SpectralModel, t: float) -> float:
    """Large-t edge estimate K * Gamma(alpha+1) * nu_plus**(t+alpha+1) * t**-(alpha+1)."""
    return math.exp(log_moment_asymptotic(spec, t))


def log_moment_asymptotic(spec: SpectralModel, t: float) -> float:
    if spec.alpha is None or spec.edge_constant is None:
        raise InvalidSpecError(
            f"edge exponent undefined for {spec.describe()}; no moment asymptotics"
        )
    if t < 1:
        raise InvalidSpecError("asymptotic moment needs t >= 1")
    if spec.nu_plus <= 0:
        raise InvalidSpecError("asymptotic moment assumes a positive upper edge")
    a = spec.alpha
    return (
        math.log(spec.edge_constant)
        + gammaln(a + 1.0)
        + (t + a + 1.0) * math.log(spec.nu_plus)
        - (a + 1.0) * math.log(t)
    )


def correlator(spec: SpectralModel, t: int, s: int) -> float:
    """Normalized two-time correlation f(t+s) / sqrt(f(2t) f(2s))."""
    table = _moment_table(spec)
    l2t, s2t = table.log_f(2 * t)
    l2s, s2s = table.log_f(2 * s)
    if s2t <= 0 or s2s <= 0:
        raise DegenerateProcessError(
            f"vanishing variance at t={t if s2t <= 0 else s} for {spec.describe()}"
        )
    lnum, snum = table.log_f(t + s)
    if snum == 0:
        return 0.0
    val = snum * math.exp(lnum - 0.5 * (l2t + l2s))
    if abs(val) > 1.0 + 1e-6:
        raise NumericalError(
            f"correlator({t},{s}) = {val!r} breaks the Cauchy-Schwarz bound; "
            "moment quadrature too loose"
        )
    return float(np.clip(val, -1.0, 1.0))


def correlator_asymptotic(alpha: float, t: float, s: float) -> float:
    """(2 sqrt(ts) / (t+s)) ** (alpha+1), the late-time correlator."""
    if t <= 0 or s <= 0:
        raise InvalidSpecError("asymptotic correlator needs t, s > 0")
    return (2.0 * math.sqrt(t * s) / (t + s)) ** (alpha + 1.0)


def g_function(spec: SpectralModel, tau: int) -> float:
    """Per-interval log growth factor: g(tau) = 1/2 * ln f(2 tau)."""
    if tau < 1:
        raise InvalidSpecError(f"g is defined for tau >= 1, got {tau}")
    logf, sign = log_abs_moment(spec, 2 * int(tau))
    if sign <= 0:
        raise DegenerateProcessError(f"even moment vanished for {spec.describe()}")
    return 0.5 * logf


def g_array(spec: SpectralModel, taus: np.ndarray) -> np.ndarray:
    """Vectorized g(tau) over an integer array of residence times."""
    taus = np.asarray(taus, dtype=np.int64)
    if np.any(taus < 1):
        raise InvalidSpecError("g is defined for tau >= 1")
    if spec.family == "beta":
        a = spec.params[0] / 2.0
        return 0.5 * (betaln(a + 2 * taus, a) - betaln(a, a))
    if spec.family == "semicircle" and spec.symmetric_about_zero:
        radius = spec.params[1]
        k = taus.astype(np.float64)  # moment order 2*tau = 2k
        log_cat = gammaln(2 * k + 1) - 2.0 * gammaln(k + 1) - np.log(k + 1)
        return 0.5 * (log_cat + 2 * k * math.log(radius / 2.0))
    if spec.family == "atomic":
        nu = spec.params[0]
        if nu == 0.0:
            raise DegenerateProcessError("atomic spectrum at zero has no growth factor")
        return taus * math.log(abs(nu))
    return np.array([g_function(spec, int(t)) for t in taus])


def effective_dimension(alpha: float) -> float:
    """Diffusion dimension matching the late-time correlator: d = 2(alpha+1)."""
    if alpha <= -1:
        raise InvalidSpecError(f"edge exponent must exceed -1, got {alpha}")
    return 2.0 * (alpha + 1.0)


def theta_reference(d: int) -> float:
    """Tabulated diffusion persistence exponent theta(d), d in 1..5."""
    if d not in THETA_TABLE:
        raise InvalidSpecError(
            f"theta is tabulated for d in {sorted(THETA_TABLE)} only (no interpolation); got {d}"
        )
    return THETA_TABLE[d]


def is_sign_symmetric(spec: SpectralModel, tol: float = 1e-9) -> bool:
    """Detect sign-symmetry through the first odd moments.

    Uses the scale-free normalization |f(1)|/sqrt(f(2)) + |f(3)|/sqrt(f(6)),
    i.e. the t=0 correlators, so spectra with edges far from 1 are judged on
    the same footing.
    """
    if spec.is_atomic:
        return spec.params[0] == 0.0
    return abs(correlator(spec, 1, 0)) + abs(correlator(spec, 3, 0)) < tol


def persistence_exponent(spec: SpectralModel) -> float:
    """Predicted sign-persistence exponent for the renormalized first component.

    theta(2(alpha+1)) from the diffusion table, doubled when the spectrum is
    sign-symmetric (even- and odd-time subprocesses are then independent).
    """
    if spec.alpha is None:
        raise InvalidSpecError(f"edge exponent undefined for {spec.describe()}")
    if spec.alpha > 22:
        raise InvalidSpecError(
            "edge exponents above ~22 cross into the self-averaging regime and are "
            "outside the validated persistence table"
        )
    d = effective_dimension(spec.alpha)
    d_int = round(d)
    if abs(d - d_int) > 1e-9:
        raise InvalidSpecError(
            f"effective dimension {d} is not an integer in the tabulated range"
        )
    theta = theta_reference(d_int)
    return 2.0 * theta if is_sign_symmetric(spec) else theta
