import math

import numpy as np
import pytest
from hypothesis import given, settings
from scipy.integrate import quad

from oracles import bm_grid, ccw_hull, kappa, minkowski_sum_2d, q_at, q_grid
from strategies import polygons, random_polygon, random_polytope, random_revolution, seeds, symmetric_polygons
from santalo import DomainError, InvalidBody, PreconditionError, RepresentationError
from santalo.bodies import AffineMap, Polygon, PolytopeV, RevolutionBody
from santalo.bodies.revolution import Profile
from santalo.lab import lp_revolution
from santalo.measures import (affine_ratios, affine_surface_area, bm_distance_ball, bonnesen_report,
                              difference_body_gap, difference_body_volume, min_enclosing_circle,
                              minkowski_q, minksym_bound_check, polygon_ellipse_ratio)
from santalo.symmetrize import schwarz_round

SQUARE = Polygon([[-1, -1], [1, -1], [1, 1], [-1, 1]])
TRIANGLE = Polygon([[0, 0], [1, 0], [0, 1]])
CUBE = PolytopeV([[x, y, z] for x in (-1, 1) for y in (-1, 1) for z in (-1, 1)])
TETRA = PolytopeV([[0, 0, 0], [1, 0, 0], [0, 1, 0], [0, 0, 1]])


def disc(k):
    a = 2 * math.pi * np.arange(k) / k
    return Polygon(np.column_stack([np.cos(a), np.sin(a)]))


# --------------------------------------------------------------------------
# Minkowski measure q
# --------------------------------------------------------------------------
def test_q_symmetric_bodies():
    for K in (SQUARE, CUBE, RevolutionBody.ball(3, m=4096), disc(64)):
        rep = minkowski_q(K)
        assert rep.q == pytest.approx(1.0, abs=1e-9)
        assert np.linalg.norm(rep.center) <= 1e-9


def test_q_simplices_attain_dimension():
    assert minkowski_q(TRIANGLE).q == pytest.approx(2.0, abs=1e-7)
    assert minkowski_q(TETRA).q == pytest.approx(3.0, abs=1e-7)
    assert np.allclose(minkowski_q(TRIANGLE).center, [1 / 3, 1 / 3], atol=1e-7)


def test_q_cone_is_its_meridian_triangle():
    cone = RevolutionBody(np.eye(3)[0], Profile([0.0, 1.0], [1.0, 0.0], positive_interior=False), 3)
    assert minkowski_q(cone).q == pytest.approx(2.0, abs=1e-7)
    assert minkowski_q(cone).q <= 3 - 1e-3


@settings(max_examples=10)
@given(polygons)
def test_q_matches_grid_oracle(P):
    rep = minkowski_q(P)
    assert rep.q == pytest.approx(q_grid(P.vertices), abs=1e-4)
    # the returned centre witnesses q
    assert q_at(ccw_hull(P.vertices), rep.center) <= rep.q + 1e-8


@given(polygons)
def test_q_certificate_and_range(P):
    rep = minkowski_q(P)
    assert 1.0 <= rep.q <= 2.0 + 1e-8
    assert rep.lambda_certificate <= 1e-8 * P.diameter


@settings(max_examples=20)
@given(seeds)
def test_q_non_simplex_polytopes_below_dimension(s):
    K = random_polytope(s, k=12)
    if len(K.vertices) > 4:
        assert minkowski_q(K).q <= 3 - 1e-3


@given(polygons, seeds)
def test_q_affine_invariant(P, s):
    rng = np.random.default_rng(s)
    T = AffineMap(rng.standard_normal((2, 2)) + 2 * np.eye(2), rng.standard_normal(2))
    assert minkowski_q(P.apply_affine(T)).q == pytest.approx(minkowski_q(P).q, abs=1e-7)


def test_q_unknown_representation():
    with pytest.raises(RepresentationError):
        minkowski_q("disc")


# --------------------------------------------------------------------------
# Banach-Mazur distance to the ball
# --------------------------------------------------------------------------
def test_bm_ellipses_and_ellipsoids():
    a = 2 * math.pi * np.arange(400) / 400
    ell = Polygon(np.column_stack([3 * np.cos(a), 0.5 * np.sin(a)]))
    # a 400-gon is within (cos(pi/400))^-1 of the ellipse
    assert bm_distance_ball(ell) == pytest.approx(1.0, abs=1 / math.cos(math.pi / 400) - 1 + 1e-9)
    for K in (RevolutionBody.ball(3), RevolutionBody.ellipsoid(3, 2.0, 0.3), RevolutionBody.ellipsoid(4, 0.5, 1.5)):
        assert bm_distance_ball(K) == pytest.approx(1.0, abs=1e-6)


def test_bm_square():
    assert bm_distance_ball(SQUARE) == pytest.approx(math.sqrt(2), abs=1e-4)
    assert bm_distance_ball(SQUARE) == pytest.approx(bm_grid(SQUARE.vertices), abs=1e-4)


@settings(max_examples=8)
@given(symmetric_polygons)
def test_bm_matches_grid_oracle(P):
    d = bm_distance_ball(P)
    assert 1.0 <= d <= 2.0 + 1e-6
    assert d == pytest.approx(bm_grid(P.vertices), abs=1e-4)


@settings(max_examples=10)
@given(seeds)
def test_bm_revolution_restriction_matches_unrestricted_planar_search(s):
    # for n = 2 a revolution body is a polygon symmetric about the axis; the axis-aligned
    # ellipse search must agree with the unrestricted one
    K = random_revolution(s, n=2, symmetric=True)
    restricted = bm_distance_ball(K)
    free = polygon_ellipse_ratio(K.meridian_polygon)[0]
    assert restricted == pytest.approx(free, abs=1e-6)


def test_bm_cylinder_and_john_bound():
    C = schwarz_round(CUBE, np.array([1.0, 0, 0]))
    d = bm_distance_ball(C)
    assert 1.0 < d <= 3.0
    # after an axial dilation the meridian is a square, whose best ellipse ratio is sqrt(2)
    assert d == pytest.approx(math.sqrt(2), abs=1e-4)


def test_bm_rejects_non_symmetric():
    with pytest.raises(DomainError):
        bm_distance_ball(TRIANGLE)
    with pytest.raises(DomainError):
        bm_distance_ball(RevolutionBody.ball(3, center=0.1))
    with pytest.raises(RepresentationError):
        bm_distance_ball(CUBE)


# --------------------------------------------------------------------------
# Bonnesen quantities
# --------------------------------------------------------------------------
def test_bonnesen_square_closed_forms():
    rep = bonnesen_report(SQUARE)
    assert rep.W == pytest.approx(8 / math.pi, rel=1e-14)
    assert rep.A == pytest.approx(4.0, rel=1e-14)
    assert rep.R == pytest.approx(math.sqrt(2), rel=1e-12)
    assert rep.r == pytest.approx(1.0, rel=1e-9)
    assert rep.slack == pytest.approx(64 / math.pi ** 2 - 16 / math.pi - (math.sqrt(2) - 1) ** 2, abs=1e-9)
    assert rep.slack >= 0


def test_bonnesen_disc_equality_case():
    # for the regular k-gon the slack is 4 pi^2 / (3 k^2) + O(k^-4)
    for k in (256, 512):
        rep = bonnesen_report(disc(k))
        assert rep.slack == pytest.approx(4 * math.pi ** 2 / (3 * k * k), rel=1e-3)
        assert rep.R - rep.r <= 1e-4
        assert rep.slack >= -1e-9
    assert rep.slack <= 1e-4


def test_bonnesen_thin_rectangle():
    rep = bonnesen_report(Polygon([[-1, -0.1], [1, -0.1], [1, 0.1], [-1, 0.1]]))
    R, r = math.sqrt(1.01), 0.1
    assert rep.R == pytest.approx(R, rel=1e-12) and rep.r == pytest.approx(r, rel=1e-9)
    assert rep.slack == pytest.approx((4.4 / math.pi) ** 2 - 4 / math.pi * 0.4 - (R - r) ** 2, abs=1e-9)
    assert rep.slack > 0
    assert (rep.R - rep.r) ** 2 > rep.A


def test_bonnesen_slack_on_500_polygons():
    worst = min(bonnesen_report(random_polygon(s)).slack for s in range(500))
    assert worst >= -1e-9


@given(polygons)
def test_bonnesen_radii(P):
    rep = bonnesen_report(P)
    assert rep.R >= rep.r
    c, R = min_enclosing_circle(P.vertices)
    assert np.max(np.linalg.norm(P.vertices - c, axis=1)) <= R * (1 + 1e-12)
    # some vertex on the circle
    assert np.max(np.linalg.norm(P.vertices - c, axis=1)) == pytest.approx(R, rel=1e-12)


# --------------------------------------------------------------------------
# Difference body
# --------------------------------------------------------------------------
def test_difference_gap_examples():
    assert difference_body_gap(SQUARE) == pytest.approx(0.0, abs=1e-9)
    assert difference_body_gap(TRIANGLE) == pytest.approx(0.5, abs=1e-12)
    # T - T for a tetrahedron is the cuboctahedron of volume 20 |T|
    assert difference_body_gap(TETRA) == pytest.approx(20 / 8 - 1, abs=1e-12)
    assert difference_body_gap(RevolutionBody.ball(3)) == pytest.approx(0.0, abs=1e-9)


@given(polygons)
def test_difference_volume_matches_sum_oracle(P):
    D = minkowski_sum_2d(P.vertices, -P.vertices)
    assert difference_body_volume(P) == pytest.approx(Polygon(D, check=False).volume(), rel=1e-12)


@given(polygons)
def test_difference_gap_versus_q(P):
    gap = difference_body_gap(P)
    q = minkowski_q(P).q
    assert gap >= -1e-9
    assert (gap <= 1e-9) == (q <= 1 + 1e-4)


@given(symmetric_polygons)
def test_difference_gap_zero_for_symmetric(P):
    assert abs(difference_body_gap(P)) <= 1e-9
    assert minkowski_q(P).q == pytest.approx(1.0, abs=1e-4)


@settings(max_examples=10)
@given(seeds)
def test_difference_gap_revolution(s):
    K = random_revolution(s)
    gap = difference_body_gap(K)
    assert gap >= -1e-9
    assert (gap <= 1e-9) == (minkowski_q(K).q <= 1 + 1e-4)


# --------------------------------------------------------------------------
# Affine surface area
# --------------------------------------------------------------------------
def asa_l4_oracle():
    """Affine surface area of the revolution l4 ball from the parametrization (cos^1/2, sin^1/2)."""
    def integrand(phi):
        c, s = math.cos(phi), math.sin(phi)
        x, y = math.sqrt(c), math.sqrt(s)
        x1, y1 = -0.5 * s / x, 0.5 * c / y
        x2 = -0.5 * x - 0.25 * s * s / x ** 3
        y2 = -0.5 * y - 0.25 * c * c / y ** 3
        sp = math.hypot(x1, y1)
        k1 = abs(x1 * y2 - y1 * x2) / sp ** 3
        k2 = abs(x1) / (sp * y)
        return (k1 * k2) ** 0.25 * 2 * math.pi * y * sp
    half, _ = quad(integrand, 0, math.pi / 2, epsabs=1e-13, epsrel=1e-12, limit=500)
    return 2 * half


def test_asa_ball():
    assert affine_surface_area(RevolutionBody.ball(3)) == pytest.approx(4 * math.pi, rel=1e-5)
    assert affine_surface_area(RevolutionBody.ball(2)) == pytest.approx(2 * math.pi, rel=1e-5)
    # the 4-ball: kappa = 1, surface area 4 kappa_4
    assert affine_surface_area(RevolutionBody.ball(4)) == pytest.approx(4 * kappa(4), rel=1e-5)


def test_asa_l4_matches_quadrature_oracle():
    ref = asa_l4_oracle()
    assert affine_surface_area(lp_revolution(3, 4.0)) == pytest.approx(ref, rel=1e-4)


def test_asa_cylinder_is_zero():
    C = schwarz_round(CUBE, np.array([1.0, 0, 0]))
    assert affine_surface_area(C) == pytest.approx(0.0, abs=1e-9)


@pytest.mark.parametrize("K", [RevolutionBody.ball(3), lp_revolution(3, 4.0)], ids=["ball", "l4"])
def test_asa_invariant_under_volume_preserving_dilation(K):
    T = AffineMap.dilation(K.axis, 4.0, 0.5)
    assert affine_surface_area(K.apply_affine(T)) == pytest.approx(affine_surface_area(K), rel=1e-4)


def test_asa_scaling_degree():
    K = lp_revolution(3, 4.0)
    big = K.apply_affine(AffineMap.scaling(3, 2.0))
    # Omega is homogeneous of degree n(n-1)/(n+1)
    assert affine_surface_area(big) == pytest.approx(2.0 ** 1.5 * affine_surface_area(K), rel=1e-6)


def test_asa_errors():
    with pytest.raises(RepresentationError):
        affine_surface_area(CUBE)
    coarse = RevolutionBody(np.eye(3)[0], Profile([-1, 0, 1], [0, 1, 0], positive_interior=False), 3)
    with pytest.raises(InvalidBody):
        affine_surface_area(coarse)


def test_affine_ratios():
    iso, lut = affine_ratios(RevolutionBody.ball(3))
    assert iso == pytest.approx(1.0, abs=1e-5) and lut == pytest.approx(1.0, abs=1e-5)
    iso, lut = affine_ratios(lp_revolution(3, 4.0))
    assert iso < 1 and lut < 1
    assert lut >= iso - 1e-7
    iso, lut = affine_ratios(schwarz_round(CUBE, np.array([1.0, 0, 0])))
    assert iso == pytest.approx(0.0, abs=1e-12) and lut == pytest.approx(0.0, abs=1e-12)


# --------------------------------------------------------------------------
# Asymmetry bound for concave profiles
# --------------------------------------------------------------------------
def test_minksym_even_profile():
    t = np.linspace(-1, 1, 401)
    rep = minksym_bound_check(Profile(t, np.sqrt(1.2 - t * t)))
    assert rep.q == pytest.approx(1.0, abs=1e-9)
    assert rep.ok and rep.worst_margin > 0


def test_minksym_linear_profile():
    t = np.linspace(-1, 1, 401)
    g = Profile(t, 1 - t / 4)
    rep = minksym_bound_check(g)
    assert rep.eps == pytest.approx(rep.q - 1.0)
    assert rep.q > 1
    assert rep.ok and rep.checked == 199


def test_minksym_random_concave_profiles():
    t = np.linspace(-1, 1, 201)
    rng = np.random.default_rng(7)
    bad = 0
    for _ in range(100):
        c = rng.uniform(0.5, 2.0, 4)
        s = rng.uniform(-0.4, 0.4, 4)
        g = np.min(c[:, None] + s[:, None] * t, axis=0) + rng.uniform(0, 0.5) * (1 - t * t)
        bad += minksym_bound_check(Profile(t, g)).violations
    assert bad == 0


def test_minksym_errors():
    t = np.linspace(-1, 1, 101)
    g = Profile(t, 1 - t / 4)
    q = minksym_bound_check(g).q
    with pytest.raises(PreconditionError):
        minksym_bound_check(g, eps=0.5 * (q - 1))
    with pytest.raises(DomainError):
        minksym_bound_check(Profile(np.linspace(-1, 2, 11), np.ones(11)))
