"""
Brownian motion on model manifolds through its radial part.

With generator ``(1/2) Laplacian`` the distance to the pole solves

    dr = dW + (n-1)/2 * sigma'(r)/sigma(r) dt,

integrated here by Euler-Maruyama until the path leaves an annulus
``(a, b)``.  A path is stopped at the first step that lands outside, without
a bridge correction; the resulting bias is first order in ``sqrt(dt)`` near
the boundary and shrinks with ``dt``.

Random numbers come from a counter-based generator: the normal used at step
``k`` of path ``i`` is a function of ``(seed, i, k)`` only, so results do not
depend on how paths are split between workers.  Bits are produced with the
splitmix64 finaliser and turned into normals with Acklam's rational inverse
CDF (relative error about 1e-9).

The exact oracle is the scale function ``s(r) = int sigma^(1-n)``:
``P(hit b before a) = (s(r0) - s(a)) / (s(b) - s(a))``.
"""

import math
import threading
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace

import numba
import numpy as np

from . import quadrature
from .convergence import TailProbe
from .errors import ExcessiveCensoring
from .parabolicity import CapacityStatus, capacity_oracle

__all__ = [
    "SimConfig",
    "HitStats",
    "EscapeResult",
    "TrendReport",
    "simulate_annulus",
    "simulate_paths",
    "exact_hitting_probability",
    "escape_probability",
    "recurrence_monte_carlo",
    "normal_stream",
]

CENSOR_LIMIT = 0.01
DEFAULT_MAX_STEPS = 10_000_000
# ratio of successive relative drops in P(reach b) below which the trend is transient
TRANSIENT_DECAY_RATIO = 0.6

_U = np.uint64
_GOLDEN = _U(0x9E3779B97F4A7C15)
_M1 = _U(0xBF58476D1CE4E5B9)
_M2 = _U(0x94D049BB133111EB)


@numba.njit(inline="always")
def _mix(z):
    z = (z ^ (z >> _U(30))) * _M1
    z = (z ^ (z >> _U(27))) * _M2
    return z ^ (z >> _U(31))


_A = (-3.969683028665376e01, 2.209460984245205e02, -2.759285104469687e02,
      1.383577518672690e02, -3.066479806614716e01, 2.506628277459239e00)
_B = (-5.447609879822406e01, 1.615858368580409e02, -1.556989798598866e02,
      6.680131188771972e01, -1.328068155288572e01)
_C = (-7.784894002430293e-03, -3.223964580411365e-01, -2.400758277161838e00,
      -2.549732539343734e00, 4.374664141464968e00, 2.938163982698783e00)
_D = (7.784695709041462e-03, 3.224671290700398e-01, 2.445134137142996e00, 3.754408661907416e00)
_P_LOW = 0.02425


@numba.njit(inline="always")
def _tail_quantile(q):
    num = ((((_C[0] * q + _C[1]) * q + _C[2]) * q + _C[3]) * q + _C[4]) * q + _C[5]
    den = (((_D[0] * q + _D[1]) * q + _D[2]) * q + _D[3]) * q + 1.0
    return num / den


@numba.njit
def _inverse_normal(p):
    """Standard normal quantile for ``p`` in (0, 1)."""
    if p < _P_LOW:
        return _tail_quantile(math.sqrt(-2.0 * math.log(p)))
    if p > 1.0 - _P_LOW:
        return -_tail_quantile(math.sqrt(-2.0 * math.log(1.0 - p)))
    q = p - 0.5
    r = q * q
    num = (((((_A[0] * r + _A[1]) * r + _A[2]) * r + _A[3]) * r + _A[4]) * r + _A[5]) * q
    den = ((((_B[0] * r + _B[1]) * r + _B[2]) * r + _B[3]) * r + _B[4]) * r + 1.0
    return num / den


@numba.njit(inline="always")
def _path_key(seed, i):
    return _mix(seed ^ _mix(_U(i) * _GOLDEN + _GOLDEN))


@numba.njit(inline="always")
def _normal(key, k):
    bits = _mix(key + _U(k + 1) * _GOLDEN)
    u = (np.float64(bits >> _U(11)) + 0.5) * (1.0 / 9007199254740992.0)
    return _inverse_normal(u)


def normal_stream(seed, path, count):
    """The first ``count`` normals of a path's stream (for inspection and tests)."""
    return _normal_stream(_U(seed), path, count)


@numba.njit
def _normal_stream(seed, path, count):
    out = np.empty(count)
    key = _path_key(seed, path)
    for k in range(count):
        out[k] = _normal(key, k)
    return out


@numba.njit(nogil=True)
def _run_paths(drift, start, stop, seed, r0, a, b, dt, max_steps, scale,
               outcome, steps, elapsed, rmax):
    for i in range(start, stop):
        key = _path_key(seed, i)
        r = r0
        t = 0.0
        top = r0
        res = 0
        k = 0
        while k < max_steps:
            h = dt * (r / a) * (r / a) if scale else dt
            r = r + drift(r) * h + math.sqrt(h) * _normal(key, k)
            t += h
            k += 1
            if r > top:
                top = r
            if r <= a:
                res = -1
                break
            if r >= b:
                res = 1
                break
        outcome[i] = res
        steps[i] = k
        elapsed[i] = t
        rmax[i] = top


_DRIFT_CACHE = {}
_DRIFT_LOCK = threading.Lock()


@numba.njit(inline="always")
def _pp_eval(x, xs, cs):
    """Value and slope of a scipy-layout piecewise cubic at ``x``."""
    j = np.searchsorted(xs, x, side="right") - 1
    if j < 0:
        j = 0
    if j > len(xs) - 2:
        j = len(xs) - 2
    u = x - xs[j]
    v = ((cs[0, j] * u + cs[1, j]) * u + cs[2, j]) * u + cs[3, j]
    d = (3.0 * cs[0, j] * u + 2.0 * cs[1, j]) * u + cs[2, j]
    return v, d


def _compiled_drift(m):
    """Numba-compiled ``(n-1)/2 sigma'/sigma`` for the profile of ``m`` (cached)."""
    src, glb = m.sigma.emit_source("_sigma")
    key = (src, m.n, tuple((k, v.tobytes()) for k, v in sorted(glb.items())))
    with _DRIFT_LOCK:
        if key in _DRIFT_CACHE:
            return _DRIFT_CACHE[key]
        namespace = dict(glb, math=math, _pp_eval=_pp_eval)
        exec(src, namespace)
        sigma = numba.njit(inline="always")(namespace["_sigma"])
        half = 0.5 * (m.n - 1)

        @numba.njit
        def drift(r):
            v, d = sigma(r)
            return half * d / v

        _DRIFT_CACHE[key] = drift
        return drift


@dataclass(frozen=True)
class SimConfig:
    """Annulus simulation settings.

    ``scale_steps`` uses the step ``dt (r/a)^2``: a random time change that
    keeps the resolution constant in ``log r`` and leaves hitting
    probabilities unchanged, which makes wide annuli affordable.  Exit
    times are still reported in the original clock.
    """

    m: object
    r0: float
    inner: float
    outer: float
    dt: float = 1e-4
    paths: int = 100_000
    seed: int = 0
    max_steps: int = DEFAULT_MAX_STEPS
    scale_steps: bool = False
    workers: int = 1

    def __post_init__(self):
        if not self.inner > 0:
            raise ValueError("inner radius must be positive (the drift is singular at the pole)")
        if not self.inner <= self.r0 <= self.outer:
            raise ValueError(f"need inner <= r0 <= outer, got {self.inner}, {self.r0}, {self.outer}")
        if not self.inner < self.outer < self.m.r_max:
            raise ValueError(f"need inner < outer < r_max = {self.m.r_max}")
        if not self.dt > 0 or self.paths < 1 or self.max_steps < 1 or self.workers < 1:
            raise ValueError("dt, paths, max_steps and workers must be positive")
        if not 0 <= int(self.seed) < 2**64:
            raise ValueError("seed must fit in 64 unsigned bits")

    def replace(self, **changes):
        return replace(self, **changes)


@dataclass
class HitStats:
    p_outer: float
    stderr: float
    censored: int
    mean_exit_time: float
    paths: int
    resolved: int = None

    def to_dict(self):
        return dict(self.__dict__)


@dataclass
class PathRecord:
    """Per-path results: outcome (-1 inner, +1 outer, 0 censored), steps, time, max radius."""

    outcome: np.ndarray
    steps: np.ndarray
    elapsed: np.ndarray
    rmax: np.ndarray


def simulate_paths(cfg):
    """Run every path of ``cfg`` and return the per-path :class:`PathRecord`."""
    n = int(cfg.paths)
    rec = PathRecord(np.zeros(n, np.int8), np.zeros(n, np.int64), np.zeros(n), np.zeros(n))
    if cfg.r0 <= cfg.inner or cfg.r0 >= cfg.outer:
        rec.outcome[:] = -1 if cfg.r0 <= cfg.inner else 1
        rec.rmax[:] = cfg.r0
        return rec
    drift = _compiled_drift(cfg.m)
    args = (_U(int(cfg.seed)), float(cfg.r0), float(cfg.inner), float(cfg.outer), float(cfg.dt),
            int(cfg.max_steps), bool(cfg.scale_steps), rec.outcome, rec.steps, rec.elapsed, rec.rmax)
    bounds = np.linspace(0, n, min(cfg.workers, n) + 1).astype(int)
    if len(bounds) == 2:
        _run_paths(drift, 0, n, *args)
    else:
        with ThreadPoolExecutor(len(bounds) - 1) as pool:
            jobs = [pool.submit(_run_paths, drift, int(lo), int(hi), *args)
                    for lo, hi in zip(bounds[:-1], bounds[1:])]
            for job in jobs:
                job.result()
    return rec


def _stats(outer_hits, resolved, censored, times, paths):
    p = outer_hits / resolved if resolved else math.nan
    se = math.sqrt(p * (1.0 - p) / resolved) if resolved else math.nan
    mean_t = float(times.mean()) if times.size else math.nan
    return HitStats(float(p), float(se), int(censored), mean_t, int(paths), int(resolved))


def simulate_annulus(cfg):
    """Fraction of paths from ``r0`` that reach ``outer`` before ``inner``.

    Censored paths (budget exhausted) are excluded from ``p_outer`` and
    counted in ``censored``.

    Raises
    ------
    ExcessiveCensoring
        If more than 1% of the paths are censored; the partial statistics
        are attached to the exception.
    """
    rec = simulate_paths(cfg)
    done = rec.outcome != 0
    stats = _stats(int(np.count_nonzero(rec.outcome == 1)), int(done.sum()), int((~done).sum()),
                   rec.elapsed[done], cfg.paths)
    if stats.censored > CENSOR_LIMIT * cfg.paths:
        raise ExcessiveCensoring(
            f"{stats.censored} of {cfg.paths} paths exhausted {cfg.max_steps} steps; "
            "raise max_steps or dt", stats)
    return stats


def _inverse_area_power(m):
    n = m.n

    def integrand(s):
        with np.errstate(over="ignore"):
            return m.sigma(s) ** (1.0 - n)

    return integrand


def exact_hitting_probability(m, a, r0, b, tol=1e-10):
    """``P(hit b before a)`` from ``r0`` by quadrature of the scale function."""
    if not 0 < a <= r0 <= b:
        raise ValueError(f"need 0 < a <= r0 <= b, got {a}, {r0}, {b}")
    if r0 == a:
        return 0.0
    if r0 == b:
        return 1.0
    g = _inverse_area_power(m)
    num = quadrature.integrate(g, a, r0, epsrel=tol).value
    rest = quadrature.integrate(g, r0, b, epsrel=tol).value
    return num / (num + rest)


@dataclass
class EscapeResult:
    """``verdict`` is "Transient", "Recurrent" or "Inconclusive"; ``probability``
    is ``P(never hit B_a)`` (0 when recurrent, None when inconclusive)."""

    verdict: str
    probability: float = None
    tail: float = None

    def to_dict(self):
        return dict(self.__dict__)


def escape_probability(m, a, r0, probe=TailProbe()):
    """Probability that Brownian motion from radius ``r0`` never enters ``B_a``."""
    if not 0 < a < r0:
        raise ValueError(f"need 0 < a < r0, got {a}, {r0}")
    cap = capacity_oracle(m, a, probe)
    if cap.status is CapacityStatus.PARABOLIC:
        return EscapeResult("Recurrent", 0.0)
    if cap.status is CapacityStatus.INCONCLUSIVE:
        return EscapeResult("Inconclusive")
    near = quadrature.integrate(_inverse_area_power(m), a, r0, epsrel=1e-10).value
    return EscapeResult("Transient", near / cap.tail, cap.tail)


@dataclass
class TrendReport:
    """Hitting statistics as the outer radius grows.

    ``rows`` hold, per outer radius ``b``, the fraction of paths reaching
    ``b`` before the inner sphere, its standard error and ``p_inner = 1 -
    p_outer``.  The verdict compares successive relative drops of ``p_outer``:
    a recurrent motion keeps losing a steady share with every step of the
    sequence, a transient one settles on a positive limit so its drops shrink.
    """

    rows: list
    verdict: str
    fitted_limit: float = None
    monotone: bool = True
    drop_ratios: list = field(default_factory=list)
    oracle: str = None
    agrees: bool = None

    def to_dict(self):
        return dict(self.__dict__)


def _aitken(p):
    if len(p) < 3:
        return None
    d1, d2 = p[-2] - p[-3], p[-1] - p[-2]
    if d2 - d1 == 0:
        return float(p[-1])
    return float(min(max(p[-1] - d2 * d2 / (d2 - d1), 0.0), 1.0))


def recurrence_monte_carlo(cfg, b_sequence, probe=TailProbe()):
    """Simulate once out to ``max(b_sequence)`` and read off every smaller ``b``.

    A path reaches ``b`` before ``a`` exactly when its running maximum reaches
    ``b`` before it is stopped at ``a``, so one run serves the whole sequence.
    """
    bs = [float(b) for b in b_sequence]
    if not bs or any(b2 <= b1 for b1, b2 in zip(bs, bs[1:])):
        raise ValueError("b_sequence must be increasing")
    if bs[0] < cfg.r0:
        raise ValueError("every b must be at least r0")
    rec = simulate_paths(cfg.replace(outer=bs[-1]))
    rows, p_out, ses = [], [], []
    for b in bs:
        reached = rec.rmax >= b
        inner = (rec.outcome == -1) & ~reached
        resolved = int(np.count_nonzero(reached | inner))
        censored = cfg.paths - resolved
        st = _stats(int(np.count_nonzero(reached)), resolved, censored,
                    rec.elapsed[inner], cfg.paths)
        if censored > CENSOR_LIMIT * cfg.paths:
            raise ExcessiveCensoring(f"{censored} paths censored before deciding b = {b}", st)
        rows.append({"b": b, "p_outer": st.p_outer, "p_inner": 1.0 - st.p_outer,
                     "stderr": st.stderr, "censored": st.censored})
        p_out.append(st.p_outer)
        ses.append(st.stderr)

    monotone = all(p2 <= p1 + 4 * math.hypot(s1, s2)
                   for p1, p2, s1, s2 in zip(p_out, p_out[1:], ses, ses[1:]))
    drops = [1.0 - p2 / p1 if p1 > 0 else 0.0 for p1, p2 in zip(p_out, p_out[1:])]
    ratios = [d2 / d1 if d1 > 0 else math.inf for d1, d2 in zip(drops, drops[1:])]
    if not ratios:
        verdict = "undetermined"
    elif p_out[-1] == 0.0:
        verdict = "recurrent"
    else:
        verdict = "transient" if ratios[-1] <= TRANSIENT_DECAY_RATIO else "recurrent"
    limit = _aitken([1.0 - p for p in p_out])
    report = TrendReport(rows, verdict, limit, monotone, ratios)
    try:
        cap = capacity_oracle(cfg.m, cfg.inner, probe)
        report.oracle = {CapacityStatus.PARABOLIC: "recurrent",
                         CapacityStatus.NON_PARABOLIC: "transient"}.get(cap.status, "inconclusive")
        report.agrees = report.oracle == verdict
    except ValueError:
        pass
    return report
