"""
Tests for hyperboloid and Klein points, geodesics and Busemann functions
"""

import numpy as np
import pytest

from lorentz_lab.core.errors import (
    CoincidentPoints,
    InvariantViolation,
    NotInHilbertSpace,
    OnBoundary,
)
from lorentz_lab.geometry.lorentz_core import SparseVec, lorentz_form
from lorentz_lab.geometry.models import (
    BallPoint,
    Geodesic,
    HPoint,
    IdealPoint,
    angle,
    busemann,
    dist,
    eval_geodesic,
    from_klein,
    from_klein_ideal,
    geodesic_through,
    geodesic_toward,
    ideal_endpoint,
    initial_vector,
    klein_distance,
    klein_horofunction,
    midpoint,
    sigma_hilbert,
    sigma_hilbert_inverse,
    to_klein,
    to_klein_ideal,
)
from lorentz_lab.geometry.oracles import busemann_ray_oracle
from lorentz_lab.geometry.sampling import random_hpoint, random_ideal

E0, E1, E2 = SparseVec.basis(0), SparseVec.basis(1), SparseVec.basis(2)
AXIS = Geodesic(base=HPoint.origin(), direction=E1)


def boosted(t: float, index: int = 1) -> HPoint:
    return HPoint(coords=SparseVec({0: np.cosh(t), index: np.sinh(t)}))


def test_from_klein_example():
    """Test the Klein chart on 0.6 e1"""
    p = from_klein(BallPoint(coords=0.6 * E1))
    assert p.coords.allclose(SparseVec({0: 1.25, 1: 0.75}), atol=1e-12)
    assert to_klein(p).coords.allclose(0.6 * E1, atol=1e-12)


def test_from_klein_rejects_boundary():
    """Test that unit-norm Klein points have no hyperboloid lift"""
    with pytest.raises(OnBoundary):
        from_klein(BallPoint(coords=E1, closed=True))


def test_ideal_points_project_to_sphere():
    """Test the Klein image of the isotropic ray through (1, 1)"""
    xi = IdealPoint.from_ray(SparseVec({0: 2.0, 1: 2.0}))
    assert xi.coords == E0 + E1
    assert to_klein_ideal(xi).coords == E1
    with pytest.raises(NotInHilbertSpace):
        IdealPoint.toward(E0 + E1)


def test_from_klein_ideal(rng):
    """Test the inverse of the boundary chart and its rejection of interior points"""
    xi = random_ideal(rng, 4)
    back = from_klein_ideal(to_klein_ideal(xi))
    assert back.coords.allclose(xi.coords, atol=1e-12)
    assert from_klein_ideal(BallPoint(coords=E2, closed=True)).coords == E0 + E2
    with pytest.raises(InvariantViolation):
        from_klein_ideal(BallPoint(coords=0.5 * E1, closed=True))


def test_klein_distance_example():
    """Test that 0.6 e1 lies at distance log 2 from the centre"""
    zero = BallPoint(coords=SparseVec.zero())
    assert klein_distance(zero, BallPoint(coords=0.6 * E1)) == pytest.approx(np.log(2.0), abs=1e-12)
    assert klein_distance(BallPoint(coords=-0.6 * E1), BallPoint(coords=0.6 * E1)) == pytest.approx(
        2.0 * np.log(2.0), abs=1e-12
    )


def test_initial_vector():
    """Test the unit tangent at the origin toward a boosted point"""
    v = initial_vector(HPoint.origin(), boosted(1.0).coords)
    assert v.allclose(E1, atol=1e-12)
    with pytest.raises(CoincidentPoints):
        initial_vector(HPoint.origin(), E0)


def test_geodesic_toward_ideal_point(rng):
    """Test that the ray toward xi is unit speed and ends at xi"""
    x = random_hpoint(rng, 3)
    xi = random_ideal(rng, 3)
    ray = geodesic_toward(x, xi)
    assert dist(x, eval_geodesic(ray, 1.5)) == pytest.approx(1.5, abs=1e-9)
    assert ideal_endpoint(ray, 1).coords.allclose(xi.coords, atol=1e-9)
    assert geodesic_toward(HPoint.origin(), IdealPoint.toward(E2)).direction.allclose(E2, atol=1e-12)


def test_klein_horofunction_levels():
    """Test the r = 0 sheet as distance to the centre and the vanishing at the origin"""
    zero = SparseVec.zero()
    assert klein_horofunction(zero, 0.0, 0.6 * E1) == pytest.approx(np.log(2.0), abs=1e-12)
    assert klein_horofunction(0.3 * E1, 0.7, zero) == 0.0


def test_dist_examples():
    """Test distances along the e1 axis"""
    assert dist(HPoint.origin(), boosted(1.0)) == pytest.approx(1.0, abs=1e-12)
    assert dist(HPoint.origin(), HPoint.origin()) == 0.0
    assert dist(boosted(-2.0), boosted(3.0)) == pytest.approx(5.0, abs=1e-10)
    assert dist(boosted(1e-9), HPoint.origin()) == pytest.approx(1e-9, rel=1e-6)


def test_dist_metric_properties(rng):
    """Test symmetry, the triangle inequality and cosh d = (x, y) on samples"""
    for _ in range(50):
        x, y, z = (random_hpoint(rng, 5) for _ in range(3))
        d = dist(x, y)
        assert d == pytest.approx(dist(y, x), abs=1e-12)
        assert d <= dist(x, z) + dist(z, y) + 1e-9
        pairing = lorentz_form(x.coords, y.coords)
        assert abs(np.cosh(d) - pairing) <= 1e-9 * pairing


def test_midpoint_example():
    """Test that the midpoint of e0 and the boost by 2 is the boost by 1"""
    m = midpoint(HPoint.origin(), boosted(2.0))
    assert m.coords.allclose(boosted(1.0).coords, atol=1e-12)


def test_midpoint_equidistant(rng):
    """Test that random midpoints split the distance in half"""
    for _ in range(20):
        x, y = random_hpoint(rng, 4), random_hpoint(rng, 4)
        m = midpoint(x, y)
        assert dist(x, m) == pytest.approx(dist(x, y) / 2.0, abs=1e-9)
        assert dist(m, y) == pytest.approx(dist(x, y) / 2.0, abs=1e-9)


def test_geodesic_evaluation_and_endpoints():
    """Test unit speed and the ideal endpoints of the e1 axis"""
    assert eval_geodesic(AXIS, 0.7).coords.allclose(boosted(0.7).coords, atol=1e-12)
    assert ideal_endpoint(AXIS, 1).coords == E0 + E1
    assert ideal_endpoint(AXIS, -1).coords == E0 - E1


def test_geodesic_through_points(rng):
    """Test that the geodesic through x and y reaches y at time d(x, y)"""
    x, y = random_hpoint(rng, 3), random_hpoint(rng, 3)
    gamma = geodesic_through(x, y)
    assert dist(eval_geodesic(gamma, dist(x, y)), y) <= 1e-9
    with pytest.raises(CoincidentPoints):
        geodesic_through(x, x)


def test_angle_examples():
    """Test right and zero angles at the origin"""
    p = HPoint.origin()
    assert angle(p, boosted(1.0, 1), boosted(1.0, 2)) == pytest.approx(np.pi / 2, abs=1e-12)
    assert angle(p, boosted(1.0), boosted(2.0)) == pytest.approx(0.0, abs=1e-7)
    assert angle(p, boosted(1.0), IdealPoint.toward(E1)) == pytest.approx(0.0, abs=1e-7)


def test_angle_law_of_cosines(rng):
    """Test the hyperbolic law of cosines on random triangles"""
    for _ in range(20):
        p, a, b = (random_hpoint(rng, 4) for _ in range(3))
        gamma = angle(p, a, b)
        da, db, c = dist(p, a), dist(p, b), dist(a, b)
        expected = np.cosh(da) * np.cosh(db) - np.sinh(da) * np.sinh(db) * np.cos(gamma)
        assert np.cosh(c) == pytest.approx(expected, rel=1e-8)


def test_busemann_along_the_ray():
    """Test that the Busemann function decreases by t toward its ideal point"""
    xi = IdealPoint.toward(E1)
    for t in (0.5, 1.0, 3.0):
        assert busemann(xi, eval_geodesic(AXIS, t), HPoint.origin()) == pytest.approx(-t, abs=1e-10)


def test_busemann_far_from_the_origin():
    """Test exact Busemann values at distances where Klein coordinates saturate"""
    xi = IdealPoint.toward(E1)
    origin = HPoint.origin()
    for t in (20.0, 25.0, 30.0):
        assert busemann(xi, boosted(t), origin) == pytest.approx(-t, abs=1e-9)
    assert busemann(xi, boosted(-25.0), origin) == pytest.approx(25.0, abs=1e-9)
    assert busemann(xi, boosted(25.0, 2), origin) == pytest.approx(np.log(np.cosh(25.0)), rel=1e-12)

    x, y, z = boosted(25.0), boosted(10.0, 2), boosted(-20.0)
    chained = busemann(xi, x, y) + busemann(xi, y, z)
    assert busemann(xi, x, z) == pytest.approx(chained, abs=1e-9)
    assert busemann(xi, x, z) == pytest.approx(-45.0, abs=1e-9)


def test_busemann_matches_ray_oracle(rng):
    """Test the closed form against far points on the ray"""
    for _ in range(10):
        xi = random_ideal(rng, 4)
        x, x0 = random_hpoint(rng, 4), random_hpoint(rng, 4)
        assert abs(busemann(xi, x, x0) - busemann_ray_oracle(xi, x, x0)) < 1e-6


def test_busemann_is_one_lipschitz(rng):
    """Test |beta(x) - beta(y)| <= d(x, y)"""
    for _ in range(20):
        xi = random_ideal(rng, 3)
        x, y = random_hpoint(rng, 3), random_hpoint(rng, 3)
        origin = HPoint.origin()
        gap = abs(busemann(xi, x, origin) - busemann(xi, y, origin))
        assert gap <= dist(x, y) + 1e-9


def test_sigma_hilbert_example():
    """Test the Hilbert-to-ball map on (4/3) e1 and its inverse"""
    y = sigma_hilbert(SparseVec.basis(1, 4.0 / 3.0))
    assert y.coords.allclose(0.8 * E1, atol=1e-12)
    assert sigma_hilbert_inverse(y).allclose(SparseVec.basis(1, 4.0 / 3.0), atol=1e-12)
    with pytest.raises(NotInHilbertSpace):
        sigma_hilbert(E0)
    with pytest.raises(OnBoundary):
        sigma_hilbert_inverse(BallPoint(coords=E1, closed=True))
