import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from holoparabolic.errors import DomainError
from holoparabolic.funcs import ScalarFunction
from holoparabolic.model_manifold import (
    ModelManifold,
    ball_volume,
    check_ricci_decay,
    check_volume_comparison,
    ricci_range,
    sphere_area,
    unit_sphere_area,
)

PROFILES = {
    "euclidean-2": (2, "r"),
    "euclidean-3": (3, "r"),
    "euclidean-5": (5, "r"),
    "hyperbolic-2": (2, "sinh(r)"),
    "hyperbolic-3": (3, "sinh(r)"),
    "sphere-3": (3, "sin(r)"),
    "wide-3": (3, "sinh(2*r)/2"),
    "slow-4": (4, "r*(1 + r)^0.1"),
}


def _manifold(key):
    n, s = PROFILES[key]
    r_max = math.pi if s == "sin(r)" else None
    return ModelManifold(n, s, r_max=r_max, name=key)


def test_unit_sphere_areas():
    assert unit_sphere_area(2) == pytest.approx(2 * math.pi, rel=1e-15)
    assert unit_sphere_area(3) == pytest.approx(4 * math.pi, rel=1e-15)
    assert unit_sphere_area(4) == pytest.approx(2 * math.pi**2, rel=1e-15)


@pytest.mark.parametrize("n,sigma,R,expected", [
    (3, "r", 1.0, 4 * math.pi),
    (2, "r", 2.0, 4 * math.pi),
    (2, "sinh(r)", 1.0, 2 * math.pi * math.sinh(1.0)),
])
def test_sphere_area_examples(n, sigma, R, expected):
    assert sphere_area(ModelManifold(n, sigma), R) == pytest.approx(expected, rel=1e-14)


@pytest.mark.parametrize("n,sigma,R,expected", [
    (3, "r", 1.0, 4 * math.pi / 3),
    (2, "r", 3.0, 9 * math.pi),
    (2, "sinh(r)", 1.0, 2 * math.pi * (math.cosh(1.0) - 1)),
    (3, "sinh(r)", 2.0, 4 * math.pi * (math.sinh(4.0) / 4 - 1.0)),
])
def test_ball_volume_examples(n, sigma, R, expected):
    g = ball_volume(ModelManifold(n, sigma), R)
    assert g.volume == pytest.approx(expected, rel=1e-10, abs=1e-10)
    assert g.area > 0 and g.quad_error >= 0


@pytest.mark.parametrize("key", sorted(PROFILES))
def test_coarea_consistency(key):
    m = _manifold(key)
    top = 3.0 if key == "sphere-3" else 12.0
    for R in np.geomspace(0.01, top, 50):
        h = 1e-5 * R
        lo, hi = m.volumes([R - h, R + h])
        assert (hi - lo) / (2 * h) == pytest.approx(m.area(R), rel=1e-6)


@pytest.mark.parametrize("key", sorted(PROFILES))
def test_volume_strictly_increasing(key):
    m = _manifold(key)
    radii = np.linspace(0.05, 3.0, 40)
    vols = m.volumes(radii)
    assert np.all(np.diff(vols) > 0)
    assert vols == pytest.approx([m.volume(R) for R in radii], rel=1e-9)


def test_volumes_overflow_to_inf():
    m = ModelManifold.hyperbolic(3)
    vols = m.volumes([1.0, 10.0, 400.0])
    assert np.isfinite(vols[:2]).all() and vols[2] == math.inf


@settings(max_examples=40, deadline=None)
@given(st.integers(2, 7), st.floats(0.01, 50))
def test_flat_ricci_vanishes(n, r):
    rr = ricci_range(ModelManifold.euclidean(n), r)
    assert rr.ric_min == 0.0 and rr.ric_max == 0.0


@settings(max_examples=40, deadline=None)
@given(st.sampled_from(["r", "sinh(r)", "r*(1 + r)^0.1", "tanh(r)"]), st.floats(0.01, 10))
def test_planar_area_is_circumference(sigma, R):
    m = ModelManifold(2, sigma)
    assert m.area(R) / (2 * math.pi) == pytest.approx(m.sigma(R), rel=4e-16)


@settings(max_examples=40, deadline=None)
@given(st.integers(2, 6), st.floats(0.05, 5))
def test_constant_curvature_ricci(n, r):
    # curvature -1: Ric = -(n-1) g
    rr = ricci_range(ModelManifold.hyperbolic(n), r)
    assert rr.ric_min <= rr.ric_max
    assert rr.radial == pytest.approx(-(n - 1), rel=1e-12)
    assert rr.tangential == pytest.approx(-(n - 1), rel=1e-8)


def test_ricci_examples():
    rr = ricci_range(ModelManifold.hyperbolic(2), 1.0)
    assert (rr.ric_min, rr.ric_max) == pytest.approx((-1.0, -1.0), rel=1e-14)
    rr = ricci_range(ModelManifold.hyperbolic(3), 0.5)
    assert (rr.radial, rr.tangential) == pytest.approx((-2.0, -2.0), rel=1e-12)


def test_ricci_decay_examples():
    grid = np.geomspace(0.1, 100, 60)
    assert check_ricci_decay(ModelManifold.euclidean(3), 1.0, grid).ok
    rep = check_ricci_decay(ModelManifold.hyperbolic(2), 1.0, [0.5, 2.0])
    assert not rep.ok and rep.violations[0][0] == 2.0


def _slow_profile_ricci(n, r):
    # hand-differentiated r (1+r)^0.1
    u = 1.0 + r
    s = r * u**0.1
    s1 = u**0.1 + 0.1 * r * u**-0.9
    s2 = 0.2 * u**-0.9 - 0.09 * r * u**-1.9
    radial = -(n - 1) * s2 / s
    tangential = -s2 / s + (n - 2) * (1 - s1 * s1) / (s * s)
    return np.minimum(radial, tangential)


def test_ricci_decay_brute_force_sweep():
    n = 2
    grid = np.geomspace(1e-3, 1e4, 4000)
    worst = float(np.min(_slow_profile_ricci(n, grid) * grid**2))
    assert worst == pytest.approx(-0.110, abs=1e-3)
    m = ModelManifold(n, "r*(1 + r)^0.1")
    ric = np.array([ricci_range(m, r).ric_min for r in grid[::40]])
    assert ric == pytest.approx(_slow_profile_ricci(n, grid[::40]), rel=1e-9, abs=1e-12)
    assert check_ricci_decay(m, 10.0, grid).ok
    assert check_ricci_decay(m, -worst * 1.01, grid).ok
    assert not check_ricci_decay(m, -worst * 0.99, grid).ok
    # in dimension 3 the tangential term dominates; the constant is about 1.2
    m3 = ModelManifold(3, "r*(1 + r)^0.1")
    assert check_ricci_decay(m3, 10.0, grid).ok
    assert not check_ricci_decay(m3, 1.0, grid).ok


def test_ricci_decay_rejects_nonpositive_constant():
    with pytest.raises(ValueError):
        check_ricci_decay(ModelManifold.euclidean(2), 0.0, [1.0])


def test_volume_comparison_planar():
    rep = check_volume_comparison(ModelManifold.euclidean(2), 16.0, [1.0, 2.0, 4.0])
    assert rep.ok
    for row in rep.rows:
        exact_off_pole = math.pi * (row["R"] / 2) ** 2  # flat: every ball is congruent
        assert row["lower"] <= exact_off_pole <= row["upper"]
        assert row["vol_center"] / exact_off_pole == pytest.approx(4.0)


def test_volume_comparison_fails_for_tiny_constant():
    rep = check_volume_comparison(ModelManifold.euclidean(3), 0.01, [1.0])
    assert not rep.ok and rep.rows[0]["status"] == "fails"
    # exact ratio of the two volumes is 8
    assert rep.rows[0]["vol_center"] / (4 / 3 * math.pi / 8) == pytest.approx(8.0)


def test_volume_comparison_vacuous_and_seeded():
    m = ModelManifold.hyperbolic(2)
    assert check_volume_comparison(m, 1.0, []).ok
    a = check_volume_comparison(m, 50.0, [1.0, 2.0], samples=4000, seed=7)
    b = check_volume_comparison(m, 50.0, [1.0, 2.0], samples=4000, seed=7)
    assert a.rows == b.rows


def test_construction_validation():
    with pytest.raises(ValueError):
        ModelManifold(1, "r")
    with pytest.raises(ValueError):
        ModelManifold(3, "2*r")
    with pytest.raises(ValueError):
        ModelManifold(3, "r + 1")
    with pytest.raises(ValueError):
        ModelManifold(2, "sin(r)")  # vanishes at pi with no r_max
    assert ModelManifold(3, "sin(r)", r_max=math.pi).r_max == math.pi


def test_radius_outside_domain():
    m = ModelManifold(3, "sin(r)", r_max=math.pi)
    with pytest.raises(DomainError):
        m.area(4.0)
    with pytest.raises(DomainError):
        m.volume(0.0)


def test_table_profile():
    xs = np.linspace(0, 5, 51)
    m = ModelManifold(2, ScalarFunction.table(np.column_stack([xs, xs])))
    assert m.volume(2.0) == pytest.approx(4 * math.pi, rel=1e-9)
