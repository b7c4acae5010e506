"""
Spacelike hypersurfaces in GRW spacetimes ``I x_f F``.

Hypersurfaces are described pointwise by :class:`HypersurfacePointData`:
the time coordinate ``tau``, the mean curvature ``H = -(1/n) trace A``, the
squared gradient of ``tau`` and, for umbilic points, the factor ``lambda`` of
``A = lambda Id`` (so ``lambda = -H``).  With ``h = f'/f`` evaluated at ``tau``
the tangential Ricci curvature of the hypersurface is bounded below by

    (n-1) h^2 - (log f)'' |grad tau|^2 - n^2 H^2 / 4

once the fiber curvature term, ``|AY + (nH/2) Y|^2`` and
``-(n-2) (log f)'' g(Y, grad tau)^2`` are dropped; all three are nonnegative
when the fiber sectional curvature floor is nonnegative and ``(log f)'' <= 0``.
At umbilic points the middle term equals ``(lambda + nH/2)^2`` and is reported
separately, so the exact value over a flat fiber can be rebuilt.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .convergence import TailProbe
from .errors import FiberFloorNegative, NonFiniteError
from .funcs import Interval, ScalarFunction, hubble, log_second_derivative
from .parabolicity import Conclusion, CriterionReport, Hypothesis, corollary35_report, criterion_thm31

__all__ = [
    "GRWSpacetime",
    "HypersurfacePointData",
    "RicciBound",
    "LogConcavityReport",
    "NullConvergenceReport",
    "slice_point",
    "check_log_concavity",
    "check_meaf",
    "meaf_margin",
    "ricci_lower_bound",
    "check_null_convergence",
    "pipeline_thm43",
    "pipeline_prop44",
]

LOG_CONCAVITY_TOL = 1e-12
MEAF_TOL = 1e-12
UMBILIC_TOL = 1e-9


def _grid_over(interval, points=129):
    lo, hi = interval.lo, interval.hi
    if math.isfinite(lo) and math.isfinite(hi):
        grid = np.linspace(lo, hi, points)
    elif math.isfinite(lo):
        grid = lo + np.geomspace(1e-6, 50.0, points)
    elif math.isfinite(hi):
        grid = hi - np.geomspace(1e-6, 50.0, points)
    else:
        grid = np.linspace(-20.0, 20.0, points)
    return grid[interval.contains(grid)]


class GRWSpacetime:
    """The warped product ``-dt^2 + f(t)^2 g_F`` over ``I``.

    Parameters
    ----------
    f : ScalarFunction or str
        Warping function, positive on ``interval``.
    n : int
        Dimension of the fiber ``F`` (and of spacelike hypersurfaces), at least 2.
    fiber_sec_floor : float
        Lower bound on the sectional curvature of ``F``.
    interval : Interval, str or list, optional
        Time interval ``I``; defaults to the domain of ``f``.
    """

    def __init__(self, f, n, fiber_sec_floor=0.0, interval=None, name=None):
        if int(n) != n or n < 2:
            raise ValueError(f"fiber dimension must be an integer >= 2, got {n}")
        self.f = f if isinstance(f, ScalarFunction) else ScalarFunction.from_config(f)
        self.n = int(n)
        self.fiber_sec_floor = float(fiber_sec_floor)
        self.interval = self.f.domain if interval is None else Interval.parse(interval)
        self.name = name or f"GRW(f={self.f}, n={self.n})"
        grid = _grid_over(self.interval)
        try:
            values = self.f(grid)
        except NonFiniteError:
            # overflow somewhere on the grid: fall back to the points that evaluate
            values = np.array([self._value_or_inf(t) for t in grid])
        bad = np.nonzero(values <= 0)[0]
        if bad.size:
            raise ValueError(f"warping function {self.f} is not positive at t = {grid[bad[0]]}")

    def _value_or_inf(self, t):
        try:
            return self.f(t)
        except NonFiniteError:
            return math.inf

    def hubble(self, t):
        return hubble(self.f, t)

    def log_f2(self, t):
        return log_second_derivative(self.f, t)

    def default_grid(self):
        return _grid_over(self.interval)

    def __repr__(self):
        return (f"GRWSpacetime(f={str(self.f)!r}, n={self.n}, "
                f"fiber_sec_floor={self.fiber_sec_floor}, interval={self.interval})")


@dataclass(frozen=True)
class HypersurfacePointData:
    tau: float
    H: float
    grad_tau_sq: float = 0.0
    umbilic_lambda: float = None

    def __post_init__(self):
        if not self.grad_tau_sq >= 0:
            raise ValueError(f"|grad tau|^2 must be nonnegative, got {self.grad_tau_sq}")
        lam = self.umbilic_lambda
        if lam is not None and abs(lam + self.H) > UMBILIC_TOL * max(1.0, abs(self.H)):
            raise ValueError(f"umbilic point needs lambda = -H, got lambda={lam}, H={self.H}")

    @classmethod
    def from_config(cls, d):
        return cls(float(d["tau"]), float(d["H"]), float(d.get("grad_tau_sq", 0.0)),
                   None if d.get("umbilic_lambda") is None else float(d["umbilic_lambda"]))

    def to_dict(self):
        return {"tau": self.tau, "H": self.H, "grad_tau_sq": self.grad_tau_sq,
                "umbilic_lambda": self.umbilic_lambda}


def slice_point(st, tau):
    """Point data of the slice ``{t = tau}``: ``H = f'/f``, ``grad tau = 0``, ``lambda = -H``.

    With this orientation ``lambda + n H / 2 = ((n-2)/2) f'/f``.
    """
    h = st.hubble(tau)
    return HypersurfacePointData(float(tau), h, 0.0, -h)


@dataclass
class RicciBound:
    conservative: float
    umbilic_exact_extra: float = None
    log_f2: float = 0.0
    log_concave: bool = True

    def to_dict(self):
        return dict(self.__dict__)


def _require_tau(st, tau):
    if not st.interval.contains(tau):
        raise ValueError(f"tau = {tau} outside the interval {st.interval}")


def ricci_lower_bound(st, p):
    """Lower bound for ``Ric(Y, Y)`` over unit tangent ``Y`` at the point ``p``.

    Raises
    ------
    FiberFloorNegative
        If the fiber curvature floor is negative; the fiber term can then not be dropped.
    """
    if st.fiber_sec_floor < 0:
        raise FiberFloorNegative(f"fiber sectional curvature floor {st.fiber_sec_floor} < 0")
    _require_tau(st, p.tau)
    n, h, l2 = st.n, st.hubble(p.tau), st.log_f2(p.tau)
    conservative = (n - 1) * h * h - l2 * p.grad_tau_sq - n * n * p.H * p.H / 4.0
    extra = None
    if p.umbilic_lambda is not None:
        extra = (p.umbilic_lambda + n * p.H / 2.0) ** 2
    return RicciBound(conservative, extra, l2, l2 <= LOG_CONCAVITY_TOL)


def meaf_margin(st, p):
    """``4(n-1)/n^2 h^2 - H^2``; nonnegative where the mean-curvature condition holds."""
    _require_tau(st, p.tau)
    n = st.n
    return 4.0 * (n - 1) / (n * n) * st.hubble(p.tau) ** 2 - p.H * p.H


def check_meaf(st, p):
    """True when ``H^2 <= 4(n-1)/n^2 (f'/f)^2`` at the point (``H^2 <= (f'/f)^2`` for n = 2)."""
    return bool(meaf_margin(st, p) >= -MEAF_TOL)


@dataclass
class LogConcavityReport:
    ok: bool
    worst_t: float
    worst_value: float
    checked: int
    interpolated: bool

    def to_dict(self):
        return dict(self.__dict__)


def check_log_concavity(st, t_grid=None):
    """Check ``(log f)'' <= 1e-12`` on the grid and report the largest value.

    For tabulated warping functions ``interpolated`` is set: the cubic's
    second derivative is only piecewise linear, so the sign test inherits
    the interpolation.
    """
    grid = st.default_grid() if t_grid is None else np.asarray(t_grid, dtype=float)
    worst_t, worst = None, -math.inf
    for t in grid:
        _require_tau(st, t)
        v = st.log_f2(t)
        if v > worst:
            worst_t, worst = float(t), float(v)
    return LogConcavityReport(bool(worst <= LOG_CONCAVITY_TOL), worst_t, worst, len(grid), st.f.interpolated)


@dataclass
class NullConvergenceReport:
    ok: bool
    fiber_ok: bool
    log_concavity: LogConcavityReport

    def to_dict(self):
        return {"ok": self.ok, "fiber_ok": self.fiber_ok, "log_concavity": self.log_concavity.to_dict()}


def check_null_convergence(st, t_grid=None):
    """Sufficient condition for ``Ric(z, z) >= 0`` on null vectors: fiber floor >= 0 and ``(log f)'' <= 0``."""
    lc = check_log_concavity(st, t_grid)
    fiber_ok = st.fiber_sec_floor >= 0
    return NullConvergenceReport(fiber_ok and lc.ok, fiber_ok, lc)


def _lemma_hypotheses(st, samples, t_grid, complete, meaf_name):
    taus = [p.tau for p in samples]
    grid = np.unique(np.concatenate([st.default_grid() if t_grid is None else np.asarray(t_grid, float),
                                     np.asarray(taus, float)]))
    lc = check_log_concavity(st, grid)
    margins = [meaf_margin(st, p) for p in samples]
    bad = [p.to_dict() for p, mg in zip(samples, margins) if mg < -MEAF_TOL]
    return [
        Hypothesis("log_concave_warping", lc.ok, lc.to_dict()),
        Hypothesis("fiber_floor_nonneg", st.fiber_sec_floor >= 0, {"fiber_sec_floor": st.fiber_sec_floor}),
        Hypothesis(meaf_name, bool(samples) and not bad,
                   {"samples": len(samples), "failing": bad[:5],
                    "min_margin": min(margins) if margins else None}),
        Hypothesis("complete", bool(complete), {"source": "user assertion"}),
    ]


def pipeline_thm43(st, samples, m, sigma0, probe=TailProbe(), t_grid=None, complete=True, **thm31_options):
    """Transience of a hypersurface of dimension >= 3 in a GRW spacetime.

    The pointwise hypotheses (log-concave warping, nonnegative fiber floor,
    the mean-curvature condition at every sample) give ``Ric >= 0``; the
    global side runs the Ricci-free part of :func:`criterion_thm31` on the
    induced geometry ``m``.  Completeness is taken from ``complete``.
    """
    report = CriterionReport("thm43", [], Conclusion.NOT_APPLICABLE)
    if st.n == 2:
        report.notes.append("surfaces (n = 2) are covered by pipeline_prop44")
        return report
    if m.n != st.n:
        raise ValueError(f"induced model has dimension {m.n}, spacetime fiber has {st.n}")
    report.hypotheses = _lemma_hypotheses(st, samples, t_grid, complete, "mean_curvature_bound")
    if not report.all_passed:
        return report
    inner = criterion_thm31(m, sigma0, ricci_nonneg=True, probe=probe, **thm31_options)
    inner.hypotheses[0].detail["source"] = "mean curvature, log-concavity and fiber floor"
    report.hypotheses += inner.hypotheses
    report.conclusion = inner.conclusion
    report.violation_radius = inner.violation_radius
    report.notes += inner.notes
    return report


def pipeline_prop44(st, samples, sigma0, m=None, probe=TailProbe(), t_grid=None, complete=True):
    """Failure of the bound on a complete surface in a 3-dimensional GRW spacetime.

    The pointwise hypotheses give nonnegative Gaussian curvature; a complete
    surface with that property is parabolic, so no density floor ``sigma0``
    can satisfy the bound.  With the induced geometry ``m`` the violating
    radius is exhibited.
    """
    report = CriterionReport("prop44", [], Conclusion.NOT_APPLICABLE)
    if st.n != 2:
        report.notes.append("needs a surface (n = 2); use pipeline_thm43 for n >= 3")
        return report
    report.hypotheses = _lemma_hypotheses(st, samples, t_grid, complete, "hubble_bound")
    if not report.all_passed:
        return report
    report.conclusion = Conclusion.VIOLATION
    report.notes.append("complete surface with nonnegative Gaussian curvature, hence parabolic")
    if m is not None:
        cor = corollary35_report(m, sigma0, probe, ricci_nonneg=True)
        report.hypotheses += cor.hypotheses
        report.violation_radius = cor.violation_radius
        if cor.conclusion is not Conclusion.VIOLATION:
            report.notes.append("induced model is not parabolic by the capacity test; no radius exhibited")
    return report
