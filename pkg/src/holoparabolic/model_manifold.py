"""
Rotationally symmetric model manifolds.

A model manifold of dimension ``n`` carries the metric
``dr^2 + sigma(r)^2 * g_{S^{n-1}}`` around a pole.  Everything here reduces to
one radial variable: sphere areas ``omega_{n-1} sigma(R)^{n-1}``, ball volumes
by the coarea integral of the area, and the two Ricci eigenvalues

* radial:     ``-(n-1) sigma''/sigma``
* tangential: ``-sigma''/sigma + (n-2)(1 - sigma'^2)/sigma^2``

Balls are centred at the pole unless stated otherwise.
"""

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.stats import norm

from . import quadrature
from .errors import DomainError, EstimatorInconclusive, NonFiniteError
from .funcs import ScalarFunction

__all__ = [
    "ModelManifold",
    "BallGeometry",
    "RicciRange",
    "RicciDecayReport",
    "VolumeComparisonReport",
    "unit_sphere_area",
    "sphere_area",
    "ball_volume",
    "ricci_range",
    "check_ricci_decay",
    "check_volume_comparison",
]

VOLUME_RTOL = 1e-10


def unit_sphere_area(n):
    """Area of the unit ``(n-1)``-sphere in ``R^n``: ``2 pi^(n/2) / Gamma(n/2)``."""
    return 2.0 * math.pi ** (n / 2.0) / math.gamma(n / 2.0)


@dataclass(frozen=True)
class BallGeometry:
    R: float
    area: float
    volume: float
    quad_error: float


@dataclass(frozen=True)
class RicciRange:
    r: float
    ric_min: float
    ric_max: float
    radial: float
    tangential: float


class ModelManifold:
    """Model manifold with dimension ``n`` and radial profile ``sigma``.

    Parameters
    ----------
    n : int
        Dimension, at least 2.
    sigma : ScalarFunction or str
        Profile; must satisfy ``sigma(0) = 0``, ``sigma'(0) = 1`` and be
        positive on ``(0, r_max)``.
    r_max : float, optional
        Radius where the profile stops being valid; defaults to the upper end
        of the profile's domain.
    name : str, optional
        Label used in reports.
    """

    def __init__(self, n, sigma, r_max=None, name=None):
        if int(n) != n or n < 2:
            raise ValueError(f"dimension must be an integer >= 2, got {n}")
        self.n = int(n)
        self.sigma = sigma if isinstance(sigma, ScalarFunction) else ScalarFunction.from_config(sigma)
        self.r_max = float(self.sigma.domain.hi if r_max is None else r_max)
        self.name = name or f"model(n={self.n}, sigma={self.sigma})"
        self.omega = unit_sphere_area(self.n)
        self._validate()

    @classmethod
    def euclidean(cls, n):
        return cls(n, ScalarFunction.parse("r"), name=f"euclidean-{n}")

    @classmethod
    def hyperbolic(cls, n):
        return cls(n, ScalarFunction.parse("sinh(r)"), name=f"hyperbolic-{n}")

    def _validate(self):
        s0, s1, _ = self.sigma.jet(0.0)
        if abs(s0) > 1e-9:
            raise ValueError(f"profile must vanish at the pole, sigma(0) = {s0}")
        if abs(s1 - 1.0) > 1e-9:
            raise ValueError(f"profile must have unit slope at the pole, sigma'(0) = {s1}")
        hi = min(self.r_max, 50.0)
        grid = np.unique(np.concatenate([np.geomspace(1e-6, hi, 200), np.linspace(0, hi, 58)[1:]]))
        grid = grid[grid < self.r_max]
        for r in grid:
            try:
                value = self.sigma(r)
            except NonFiniteError:
                break  # overflow far out says nothing about positivity nearer in
            if value <= 0:
                raise ValueError(f"profile {self.sigma} is not positive at r = {r}")

    def _check_radius(self, R):
        R = np.asarray(R, dtype=float)
        if np.any(R <= 0) or np.any(R >= self.r_max):
            raise DomainError(f"radius outside (0, {self.r_max}) on {self.name}")

    def area(self, R):
        """Area of the geodesic sphere of radius ``R`` about the pole."""
        self._check_radius(R)
        with np.errstate(over="ignore"):
            return self.omega * self.sigma(R) ** (self.n - 1)

    def _area_integrand(self, r):
        with np.errstate(over="ignore"):
            return self.omega * self.sigma(r) ** (self.n - 1)

    def ball(self, R):
        """Area and volume of the geodesic ball of radius ``R`` about the pole."""
        self._check_radius(R)
        res = quadrature.integrate(self._area_integrand, 0.0, R, epsrel=VOLUME_RTOL)
        return BallGeometry(float(R), float(self.area(R)), res.value, res.error)

    def volume(self, R):
        return self.ball(R).volume

    def volumes(self, radii):
        """Ball volumes at increasing radii, accumulated segment by segment.

        Volumes that overflow double precision are returned as ``inf``.
        """
        radii = np.asarray(radii, dtype=float)
        self._check_radius(radii)
        out = np.full(len(radii), math.inf)
        acc, prev = 0.0, 0.0
        for i, R in enumerate(radii):
            try:
                acc += quadrature.integrate(self._area_integrand, prev, R, epsrel=VOLUME_RTOL).value
            except NonFiniteError:
                break
            if not math.isfinite(acc):
                break
            out[i], prev = acc, R
        return out

    def ricci_eigenvalues(self, r):
        """Radial and tangential Ricci eigenvalues at radius ``r``."""
        self._check_radius(r)
        s, s1, s2 = self.sigma.jet(r)
        radial = -(self.n - 1) * s2 / s
        tangential = -s2 / s + (self.n - 2) * (1.0 - s1 * s1) / (s * s)
        return radial, tangential

    def __repr__(self):
        return f"ModelManifold(n={self.n}, sigma={str(self.sigma)!r}, r_max={self.r_max})"


def sphere_area(m, R):
    return float(m.area(R))


def ball_volume(m, R):
    return m.ball(R)


def ricci_range(m, r):
    radial, tangential = m.ricci_eigenvalues(r)
    return RicciRange(float(r), min(radial, tangential), max(radial, tangential), radial, tangential)


@dataclass
class RicciDecayReport:
    ok: bool
    C1: float
    violations: list = field(default_factory=list)  # (r, ric_min, -C1 r^-2)
    checked: int = 0


def check_ricci_decay(m, C1, r_grid):
    """Check ``Ric >= -C1 / r^2`` at each grid radius, ``r`` the distance to the pole."""
    if C1 <= 0:
        raise ValueError("C1 must be positive")
    violations = []
    for r in r_grid:
        rr = ricci_range(m, r)
        bound = -C1 / r**2
        if rr.ric_min < bound:
            violations.append((float(r), rr.ric_min, bound))
    return RicciDecayReport(not violations, float(C1), violations, len(r_grid))


@dataclass
class VolumeComparisonReport:
    """Outcome of ``Vol(B_R(q)) <= C2 Vol(B_{R/2}(p))`` checks.

    Each row holds ``R``, the pole-ball volume, the Monte Carlo lower
    confidence bound and the deterministic upper bound for the off-pole ball,
    and a status in {"holds", "fails", "inconclusive"}.
    """

    ok: bool
    C2: float
    rows: list = field(default_factory=list)


def _distance_upper_bound(m, R, r, phi, rho):
    """Length of admissible curves from (R, 0) to (r, phi); an upper bound on distance.

    Curves: through the pole, or radial to ``rho``, an arc of angle ``phi``
    at radius ``rho`` (length ``sigma(rho) phi``), then radial to ``r``.
    """
    sig_rho = m.sigma(rho)
    arcs = (
        np.abs(R - rho)[None, :]
        + sig_rho[None, :] * phi[:, None]
        + np.abs(rho[None, :] - r[:, None])
    )
    direct = np.abs(R - r) + np.minimum(m.sigma(r), m.sigma(R)) * phi
    return np.minimum(np.minimum(arcs.min(axis=1), direct), R + r)


def _off_pole_ball_bounds(m, R, samples, rng, z):
    """Bounds on the volume of the ball of radius R/2 about a point at distance R.

    The ball lies in the shell ``|r - R| <= R/2`` (triangle inequality), which
    gives an exact upper bound.  The lower bound samples the shell uniformly
    in ``r`` and on the sphere, weights by ``sigma^{n-1}`` and accepts points
    whose curve-length upper bound is at most ``R/2``.
    """
    r_lo, r_hi = R / 2.0, 1.5 * R
    vols = m.volumes([r_lo, r_hi])
    upper = vols[1] - vols[0]
    r = rng.uniform(r_lo, r_hi, samples)
    g = rng.standard_normal((samples, m.n))
    cos_phi = g[:, 0] / np.linalg.norm(g, axis=1)
    phi = np.arccos(np.clip(cos_phi, -1.0, 1.0))
    rho = np.linspace(0.0, r_hi, 49)[1:]
    inside = _distance_upper_bound(m, R, r, phi, rho) <= R / 2.0
    weights = m.omega * (r_hi - r_lo) * m.sigma(r) ** (m.n - 1) * inside
    est = weights.mean()
    se = weights.std(ddof=1) / math.sqrt(samples)
    return max(est - z * se, 0.0), est, upper


def check_volume_comparison(m, C2, R_grid, samples=20_000, confidence=0.999, seed=0):
    """Check the volume comparison ``Vol(B_R(q)) <= C2 Vol(B_{R/2}(p))``.

    ``q`` is the pole and ``p`` any point of the sphere of radius ``R``; by
    rotational symmetry one ``p`` represents them all.  The off-pole volume is
    bracketed between a Monte Carlo lower confidence bound and an exact upper
    bound, so a "holds" or "fails" verdict is safe at the given confidence.

    Raises
    ------
    EstimatorInconclusive
        If no radius fails and at least one cannot be resolved.
    """
    if C2 <= 0:
        raise ValueError("C2 must be positive")
    z = float(norm.ppf(confidence))
    rng = np.random.default_rng(seed)
    rows, unresolved, failed = [], [], False
    for R in R_grid:
        if 1.5 * R >= m.r_max:
            raise DomainError(f"comparison shell at R={R} exceeds r_max={m.r_max}")
        vol_q = m.volume(R)
        lower, est, upper = _off_pole_ball_bounds(m, R, samples, rng, z)
        if vol_q > C2 * upper:
            status, failed = "fails", True
        elif vol_q <= C2 * lower:
            status = "holds"
        else:
            status = "inconclusive"
            unresolved.append(float(R))
        rows.append({"R": float(R), "vol_center": float(vol_q), "lower": float(lower),
                     "estimate": float(est), "upper": float(upper), "status": status})
    if unresolved and not failed:
        raise EstimatorInconclusive(f"volume comparison unresolved at R = {unresolved}")
    return VolumeComparisonReport(not failed, float(C2), rows)
