"""
The spacelike entropy bound ``S(B_R) <= Area(dB_R) / 4`` on model manifolds.

Entropy is either a constant density ``sigma0`` (``S = sigma0 Vol(B_R)``, the
extremal case of a density bounded below by ``sigma0``) or a radial
distribution ``S(R)``.  Planck units throughout; the factor 1/4 is exact.
"""

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq

from .convergence import TailProbe, classify_integral
from .errors import DomainError, NonFiniteError, SearchBudgetExceeded
from .funcs import ScalarFunction

__all__ = [
    "ConstantDensity",
    "RadialDistribution",
    "BoundReport",
    "VolumeFloorReport",
    "entropy_of_ball",
    "check_bound",
    "implied_volume_floor",
    "check_volume_floor",
    "entropy_l1_condition",
    "find_violation",
]

MIN_GRID = 64
# margins within this fraction of the larger side count as saturation, not violation
SATURATION_RTOL = 1e-9
ROOT_RTOL = 1e-13


@dataclass(frozen=True)
class ConstantDensity:
    """Entropy density equal to ``sigma0`` everywhere."""

    sigma0: float

    def __post_init__(self):
        if not self.sigma0 > 0 or not math.isfinite(self.sigma0):
            raise ValueError(f"entropy density must be positive and finite, got {self.sigma0}")

    def describe(self):
        return {"density": self.sigma0}


class RadialDistribution:
    """Entropy ``S(R)`` of the ball of radius ``R``; nonnegative and nondecreasing.

    The two properties are checked on ``validation_grid`` (clipped to the
    domain of ``S``).
    """

    def __init__(self, S, validation_grid=None):
        self.S = S if isinstance(S, ScalarFunction) else ScalarFunction.from_config(S)
        grid = np.geomspace(1e-3, 50.0, 64) if validation_grid is None else np.asarray(validation_grid, float)
        grid = grid[self.S.domain.contains(grid)]
        for R in grid:
            try:
                v, d1, _ = self.S.jet(R)
            except NonFiniteError:
                break
            if v < 0 or d1 < 0:
                raise ValueError(f"entropy distribution {self.S} must be nonnegative and "
                                 f"nondecreasing (at R={R}: S={v}, S'={d1})")

    def describe(self):
        return {"distribution": self.S.to_config()}

    def __repr__(self):
        return f"RadialDistribution({str(self.S)!r})"


def entropy_of_ball(spec, m, R):
    """Entropy contained in the ball of radius ``R`` about the pole."""
    if isinstance(spec, ConstantDensity):
        return spec.sigma0 * m.volume(R)
    if not 0 < R < m.r_max:
        raise DomainError(f"radius {R} outside (0, {m.r_max})")
    return float(spec.S(R))


def _entropies(spec, m, radii):
    if isinstance(spec, ConstantDensity):
        return spec.sigma0 * m.volumes(radii)
    return np.asarray(spec.S(np.asarray(radii, float)), dtype=float)


def _margin(spec, m, R):
    return float(m.area(R)) / 4.0 - entropy_of_ball(spec, m, R)


def _violated(lhs, rhs):
    return rhs - lhs < -SATURATION_RTOL * np.maximum(np.abs(lhs), np.abs(rhs))


@dataclass
class BoundReport:
    """Both sides of the bound on a radius grid.

    ``first_violation`` is the smallest radius where the margin
    ``Area/4 - S`` changes sign from nonnegative to negative, refined by root
    finding on the continuous margin.  When the bound already fails at the
    first grid radius it is that radius and ``bracketed`` is False.
    """

    radius_grid: np.ndarray
    lhs: np.ndarray
    rhs: np.ndarray
    margin: np.ndarray
    first_violation: float = None
    bracketed: bool = False

    @property
    def holds(self):
        return self.first_violation is None

    def to_dict(self):
        return {"holds": self.holds, "first_violation": self.first_violation,
                "bracketed": self.bracketed, "R": self.radius_grid.tolist(),
                "S": self.lhs.tolist(), "area_over_4": self.rhs.tolist(),
                "margin": self.margin.tolist()}


def _refine(spec, m, lo, hi):
    return brentq(lambda R: _margin(spec, m, R), lo, hi, xtol=1e-300, rtol=ROOT_RTOL, maxiter=500)


def check_bound(spec, m, R_lo, R_hi, n_grid=MIN_GRID):
    """Evaluate ``S(B_R)`` and ``Area(dB_R)/4`` on log-spaced radii in ``[R_lo, R_hi]``."""
    if not 0 < R_lo < R_hi < m.r_max:
        raise DomainError(f"need 0 < R_lo < R_hi < r_max, got {R_lo}, {R_hi}, {m.r_max}")
    radii = np.geomspace(R_lo, R_hi, max(int(n_grid), MIN_GRID))
    lhs = _entropies(spec, m, radii)
    rhs = m.area(radii) / 4.0
    if not (np.all(np.isfinite(lhs)) and np.all(np.isfinite(rhs))):
        raise NonFiniteError(f"entropy or area overflows on [{R_lo}, {R_hi}]")
    margin = rhs - lhs
    bad = _violated(lhs, rhs)
    report = BoundReport(radii, lhs, rhs, margin)
    if not bad.any():
        return report
    i = int(np.argmax(bad))
    if i == 0:
        report.first_violation = float(radii[0])
        return report
    report.first_violation = _refine(spec, m, radii[i - 1], radii[i])
    report.bracketed = True
    return report


def find_violation(spec, m, R_from=1e-3, R_budget=1e8, per_doubling=16):
    """Smallest radius where the bound fails, searching outward from ``R_from``.

    Scans doubling shells with ``per_doubling`` log-spaced radii each and
    refines the first sign change.

    Raises
    ------
    SearchBudgetExceeded
        If the bound holds on every scanned radius up to ``R_budget``.
    """
    limit = min(R_budget, m.r_max * (1 - 1e-12))
    lo = R_from
    prev_R = None
    while lo < limit:
        hi = min(2.0 * lo, limit)
        radii = np.geomspace(lo, hi, per_doubling + 1)
        try:
            lhs = _entropies(spec, m, radii)
        except NonFiniteError:
            break
        rhs = m.area(radii) / 4.0
        if np.any(~np.isfinite(lhs) | ~np.isfinite(rhs)):
            break
        bad = _violated(lhs, rhs)
        if bad.any():
            i = int(np.argmax(bad))
            left = radii[i - 1] if i > 0 else prev_R
            if left is None:
                return float(radii[0])
            return _refine(spec, m, left, radii[i])
        prev_R = hi
        lo = hi
    raise SearchBudgetExceeded(f"bound holds for every scanned radius in [{R_from}, {lo}]")


def implied_volume_floor(sigma0, R):
    """``exp(4 sigma0 R)``, the volume floor integrated from the bound.

    Overflow returns ``inf``; reports flag it.
    """
    if not sigma0 > 0 or R < 0:
        raise ValueError("need sigma0 > 0 and R >= 0")
    x = 4.0 * sigma0 * R
    return math.exp(x) if x < 709.78 else math.inf


@dataclass
class VolumeFloorReport:
    """Per-radius comparison of volumes with the exponential floor.

    ``holds_floor`` compares ``Vol(B_R)`` with ``exp(4 sigma0 R)`` literally;
    ``holds_differential`` checks ``4 sigma0 <= d/dR log Vol = Area/Vol``,
    the inequality the floor is integrated from.  The literal form always
    fails as ``R -> 0`` because the volume vanishes there; ``crossover`` is
    the smallest grid radius from which the literal floor holds at every
    larger grid radius (None if it fails at the last one).
    """

    sigma0: float
    radii: list
    volume: list
    floor: list
    floor_overflow: list
    holds_floor: list
    holds_differential: list
    crossover: float = None
    ok: bool = False

    def to_dict(self):
        return dict(self.__dict__)


def check_volume_floor(m, sigma0, R_grid):
    radii = np.sort(np.asarray(R_grid, dtype=float))
    vols = m.volumes(radii)
    areas = m.area(radii)
    floor = np.array([implied_volume_floor(sigma0, R) for R in radii])
    holds = vols >= floor
    with np.errstate(invalid="ignore", over="ignore"):
        diff_ok = 4.0 * sigma0 * vols <= areas * (1 + SATURATION_RTOL)
    crossover = None
    if holds.size and holds[-1]:
        fails = np.nonzero(~holds)[0]
        crossover = float(radii[fails[-1] + 1] if fails.size else radii[0])
    return VolumeFloorReport(
        float(sigma0), radii.tolist(), vols.tolist(), floor.tolist(),
        np.isinf(floor).tolist(), holds.tolist(), diff_ok.tolist(), crossover, bool(holds.all()),
    )


def entropy_l1_condition(spec, probe=TailProbe(), m=None):
    """Classify ``int^inf dR / S(B_R)``.

    For a constant density the manifold ``m`` is needed to form ``sigma0 Vol``.
    """
    if isinstance(spec, RadialDistribution):
        S = spec.S
        return classify_integral(lambda R: 1.0 / S(R), probe)
    if m is None:
        raise ValueError("a constant density needs the manifold to form S = sigma0 Vol")

    def integrand(R):
        R = np.asarray(R, dtype=float)
        order = np.argsort(R)
        vols = np.empty_like(R)
        vols[order] = m.volumes(R[order])
        with np.errstate(divide="ignore"):
            return 1.0 / (spec.sigma0 * vols)

    return classify_integral(integrand, probe)
