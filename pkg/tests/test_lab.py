import math

import numpy as np
import pytest
from hypothesis import given, settings

from oracles import cap_volume_closed, ccw_hull, dense_chord_radius, kappa, q_grid
from strategies import random_polytope, seeds
from santalo import DomainError, PreconditionError, RepresentationError
from santalo._numerics import complement_basis
from santalo.bodies import PolytopeV, RevolutionBody
from santalo.lab import (FamilySpec, StabilityRecord, bs_chain_check, cap_level, cap_volume, caps_cut_ball,
                         endpoint_section, false_centre_scan, fit_exponent, lp_revolution, make_family,
                         normalize_axial, section_containment_check, stability_scan, write_records)
from santalo.measures import minkowski_q

CUBE = PolytopeV([[x, y, z] for x in (-1, 1) for y in (-1, 1) for z in (-1, 1)])


# --------------------------------------------------------------------------
# families
# --------------------------------------------------------------------------
@pytest.mark.parametrize("n", [3, 4])
@pytest.mark.parametrize("c", [0.0, 0.3, 0.9])
def test_cap_volume_closed_form(n, c):
    assert cap_volume(n, c) == pytest.approx(cap_volume_closed(n, c), rel=1e-12)


def test_cap_level_inverts_volume():
    for eps in (1e-4, 0.05, 1.0):
        assert cap_volume_closed(3, cap_level(3, eps)) == pytest.approx(eps, rel=1e-10)
    with pytest.raises(DomainError):
        cap_level(3, kappa(3))


def test_caps_family_examples():
    B = caps_cut_ball(3, 0.0)
    ball = RevolutionBody.ball(3)
    assert np.array_equal(B.t, ball.t) and np.array_equal(B.r, ball.r)
    K = caps_cut_ball(3, 0.05)
    assert K.is_centrally_symmetric()
    assert K.volume() == pytest.approx(kappa(3) - 0.1, rel=1e-8)
    K4 = caps_cut_ball(4, 0.05)
    assert K4.volume() == pytest.approx(kappa(4) - 0.1, rel=1e-8)


def test_lp_family():
    B = lp_revolution(3, 2.0)
    assert B.volume() == pytest.approx(kappa(3), rel=1e-9)
    # p = 1 is the double cone
    assert lp_revolution(3, 1.0).volume() == pytest.approx(2 * math.pi / 3, rel=1e-8)
    with pytest.raises(DomainError):
        lp_revolution(3, 0.5)


def test_make_family_deterministic_and_validated():
    spec = FamilySpec("random_polytope", 3, count=3, seed=5)
    a, b = make_family(spec), make_family(spec)
    assert all(np.array_equal(x.vertices, y.vertices) for x, y in zip(a, b))
    assert len(make_family(FamilySpec("ellipsoid", 3, [0.5, 2.0]))) == 2
    with pytest.raises(DomainError):
        make_family(FamilySpec("cubes", 3))


# --------------------------------------------------------------------------
# stability scans
# --------------------------------------------------------------------------
def test_ellipsoid_scan_is_degenerate():
    recs, ex = stability_scan(FamilySpec("ellipsoid", 3, [2.0, 0.5, 1.3]))
    assert [r.param for r in recs] == [0.5, 1.3, 2.0]
    assert all(abs(r.deficit) <= 1e-6 and r.bm_minus_1 <= 1e-4 for r in recs)
    assert all(r.q_max == pytest.approx(1.0, abs=1e-6) for r in recs)
    assert ex is None


def test_caps_scan_records_sorted_and_monotone():
    recs, _ = stability_scan(FamilySpec("caps_cut_ball", 3, [0.02, 0.005, 0.01]), with_q=False)
    assert [r.param for r in recs] == [0.005, 0.01, 0.02]
    d = [r.deficit for r in recs]
    b = [r.bm_minus_1 for r in recs]
    assert all(x >= -1e-7 for x in d) and all(x >= -1e-6 for x in b)
    assert d == sorted(d) and b == sorted(b)


def test_scan_rejects_non_symmetric():
    with pytest.raises(PreconditionError):
        stability_scan([(0.0, RevolutionBody.ball(3, center=0.2))])


def test_fit_exponent_recovers_power_law():
    d = np.geomspace(1e-5, 1e-1, 20)
    recs = [StabilityRecord(i, x, 3.0 * x ** 0.4, 1.0, 0.0) for i, x in enumerate(d)]
    assert fit_exponent(recs) == pytest.approx(0.4, abs=1e-12)
    assert fit_exponent(recs[:3]) is None


def test_write_records_deterministic(tmp_path):
    recs = [StabilityRecord(0.1, 1e-3, 2e-2, 1.01, 0.123), StabilityRecord(0.2, 2e-3, 3e-2, 1.02, 0.456)]
    p1, p2 = tmp_path / "a.csv", tmp_path / "b.csv"
    write_records(recs, p1, 0.5, timing=False)
    write_records(recs, p2, 0.5, timing=False)
    assert p1.read_bytes() == p2.read_bytes()
    lines = p1.read_text().splitlines()
    assert lines[0] == "param,deficit,bm_minus_1,q_max,seconds"
    assert lines[1].endswith(",0.0")
    assert lines[-1] == "# fitted_exponent=0.5"


# --------------------------------------------------------------------------
# false centre diagnostics
# --------------------------------------------------------------------------
def test_false_centre_ball():
    q, (t, f), rep = false_centre_scan(RevolutionBody.ball(3))
    assert q == pytest.approx(1.0, abs=1e-6)
    assert np.max(np.abs(f - 1.0)) <= 1e-6
    assert rep["f_min"] <= rep["f_mean"] <= rep["f_max"]


@pytest.mark.parametrize("n,a", [(3, 0.5), (3, 3.0), (4, 2.5)])
def test_false_centre_ellipsoids(n, a):
    q, (t, f), _ = false_centre_scan(RevolutionBody.ellipsoid(n, a, 1.0))
    assert q == pytest.approx(1.0, abs=1e-6)
    # normalized to h(u) = 1 and r(0) = 1 every ellipsoid becomes the ball
    assert np.ptp(f) <= 1e-6


def _section_q_by_sampling(K, m):
    """q of an endpoint section, built from the analytic caps-cut membership test."""
    c = K.t[-1]
    Kn = normalize_axial(K)
    S, eta = endpoint_section(Kn, m)
    v = complement_basis(Kn.axis)[:, 0]
    nu = (eta * Kn.axis - v) / math.hypot(1.0, eta)
    f = np.cross(nu, S.e)
    f = f / np.linalg.norm(f)
    r0 = float(K.meridian(0.0))

    def inside(P):
        # undo the normalization x1 -> x1 / c, r -> r / r0
        Q = P * np.array([c, r0, r0])
        return (np.einsum("ij,ij->i", Q, Q) <= 1.0) & (np.abs(Q[:, 0]) <= c)

    ss = np.linspace(S.s_lo, S.s_hi, 241)
    ys = np.array([dense_chord_radius(inside, S.origin(), S.e, f, s, span=1.5, m=30001) for s in ss])
    pts = np.concatenate([np.column_stack([ss, ys]), np.column_stack([ss, -ys])])
    return q_grid(ccw_hull(pts), levels=6, k=31), S


def test_false_centre_caps_cut_ball():
    K = caps_cut_ball(3, 0.05)
    q, _, rep = false_centre_scan(K)
    assert q >= 1 + 1e-4
    # full two-dimensional brute force at three of the scanned hyperplanes
    for m in (rep["m_argmax"], 0.05, 0.2):
        ref, S = _section_q_by_sampling(K, m)
        assert minkowski_q(S).q == pytest.approx(ref, abs=2e-3)


def test_false_centre_errors():
    with pytest.raises(PreconditionError):
        false_centre_scan(RevolutionBody.ball(3, center=0.3))
    with pytest.raises(RepresentationError):
        false_centre_scan(CUBE)
    with pytest.raises(DomainError):
        false_centre_scan(RevolutionBody.ball(3), m_values=[0.5])


# --------------------------------------------------------------------------
# section containment
# --------------------------------------------------------------------------
def test_containment_ball():
    rep = section_containment_check(RevolutionBody.ball(3, m=4096), np.eye(3)[0])
    assert rep.ok and rep.checked == 20
    # both sides are the same discs
    assert max(abs(v) for v in rep.violation) <= 1e-7
    assert rep.symmetral_polar_volume == pytest.approx(rep.polar_volume, rel=1e-9)


def test_containment_cube_diagonal():
    u = np.ones(3) / math.sqrt(3)
    lo = -1 / math.sqrt(3)  # the polar is the cross-polytope, support in u is 1/sqrt(3)
    rep = section_containment_check(CUBE.to_h(), u, np.linspace(lo, -lo, 22)[1:-1])
    assert rep.checked == 20 and rep.ok


@settings(max_examples=8)
@given(seeds)
def test_containment_random_symmetric(s):
    K = random_polytope(s, k=6, symmetric=True)
    u = np.random.default_rng(s).standard_normal(3)
    rep = section_containment_check(K, u / np.linalg.norm(u))
    assert rep.ok


def test_containment_preconditions():
    with pytest.raises(PreconditionError):
        section_containment_check(random_polytope(1), np.eye(3)[0])
    with pytest.raises(DomainError):
        section_containment_check(RevolutionBody.ball(4), np.eye(4)[0])


# --------------------------------------------------------------------------
# reduction chain
# --------------------------------------------------------------------------
@pytest.mark.parametrize("K", [RevolutionBody.ball(3), RevolutionBody.ellipsoid(3, 2.0, 0.6)], ids=["ball", "ellipsoid"])
def test_chain_equality_cases(K):
    rep = bs_chain_check(K)
    assert rep.ok
    for v in rep.values:
        assert v == pytest.approx(kappa(3) ** 2, rel=1e-6)


def test_chain_random_polytope():
    rep = bs_chain_check(random_polytope(3, k=20))
    assert rep.ok
    v = rep.values
    assert v[0] < v[1] and v[1] <= v[2] * (1 + 1e-6) and v[2] <= v[3] * (1 + 1e-6)
    assert rep.to_dict()["ok"] is True
