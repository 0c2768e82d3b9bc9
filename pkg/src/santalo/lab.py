"""Experiment harness: body families, stability scans and the verification chains."""
from __future__ import annotations

import csv
import logging
import math
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np
from scipy.integrate import quad
from scipy.optimize import brentq

from ._numerics import as_direction, complement_basis, kappa
from .bodies import planar
from .bodies.affine import AffineMap
from .bodies.hyperplane import Hyperplane
from .bodies.polytope import EmptySection, Polygon, Polytope, PolytopeV
from .bodies.revolution import SMOOTH_GRID, RevolutionBody
from .errors import DomainError, PreconditionError, RepresentationError
from .measures import bm_distance_ball, minkowski_q
from .polar import polar, volume_product_report
from .symmetrize import SCHWARZ_GRID, full_reduction, steiner

log = logging.getLogger("santalo.lab")

FAMILIES = ("caps_cut_ball", "lp_revolution", "random_polytope", "ellipsoid")
FIT_RANGE = (1e-4, 1e-2)
FIT_FLOOR = 1e-6
CHAIN_SLACK = 1e-6
CONTAINMENT_TOL = 1e-7
F_TMIN = 0.1  # f = (1 - r^2)/t^2 amplifies errors in r by 2/t^2


def configure_logging():
    level = os.environ.get("SANTALO_LAB_LOG", "WARNING").upper()
    logging.basicConfig(level=getattr(logging, level, logging.WARNING),
                        format="%(levelname)s %(name)s: %(message)s")


# --------------------------------------------------------------------------
# Families
# --------------------------------------------------------------------------
@dataclass
class FamilySpec:
    """A named family of bodies.

    ``params`` holds cap volumes (caps_cut_ball), exponents p (lp_revolution) or
    axis ratios (ellipsoid); random_polytope uses ``count`` and ``seed`` instead.
    """
    name: str
    n: int
    params: list = field(default_factory=list)
    count: int = 0
    seed: int = 0
    points: int = 20
    symmetric: bool = False

    def parameters(self) -> list:
        if self.name == "random_polytope":
            return list(range(self.count))
        return [float(p) for p in self.params]


def cap_volume(n: int, c: float) -> float:
    """Volume of {x in B^n : x_1 >= c}."""
    val, _ = quad(lambda x: (1.0 - x * x) ** ((n - 1) / 2), c, 1.0, epsabs=1e-15, epsrel=1e-13)
    return kappa(n - 1) * val


def cap_level(n: int, eps: float) -> float:
    """Cut level c with cap volume eps."""
    if not 0.0 < eps < kappa(n) / 2:
        raise DomainError(f"cap volume {eps} outside (0, kappa_n / 2)")
    return brentq(lambda c: cap_volume(n, c) - eps, 0.0, 1.0, xtol=1e-15, rtol=1e-15)


def caps_cut_ball(n: int, eps: float, m: int = SMOOTH_GRID) -> RevolutionBody:
    """Unit ball with two opposite caps of volume ``eps`` cut off."""
    if eps == 0:
        return RevolutionBody.ball(n, m=m)
    c = cap_level(n, eps)
    return RevolutionBody.from_function(lambda t: np.sqrt(np.maximum(1.0 - t * t, 0.0)), -c, c, n, m=m)


def lp_revolution(n: int, p: float, m: int = SMOOTH_GRID) -> RevolutionBody:
    """Body of revolution with meridian |t|^p + r^p <= 1."""
    if not p >= 1:
        raise DomainError("lp_revolution needs p >= 1 for convexity")
    if p == 2:
        return RevolutionBody.ball(n, m=m)
    return RevolutionBody.from_function(
        lambda t: np.maximum(1.0 - np.abs(t) ** p, 0.0) ** (1.0 / p), -1.0, 1.0, n, m=m)


def random_polytope(n: int, rng: np.random.Generator, points: int = 20, symmetric: bool = False):
    P = rng.standard_normal((points, n))
    if symmetric:
        P = np.concatenate([P, -P])
    if n == 2:
        return Polygon(planar.hull_2d(P), check=False)
    return PolytopeV.hull_of(P)


def make_family(spec: FamilySpec) -> list:
    if spec.name not in FAMILIES:
        raise DomainError(f"unknown family {spec.name!r}; expected one of {FAMILIES}")
    n = spec.n
    if spec.name == "caps_cut_ball":
        return [caps_cut_ball(n, e) for e in spec.parameters()]
    if spec.name == "lp_revolution":
        return [lp_revolution(n, p) for p in spec.parameters()]
    if spec.name == "ellipsoid":
        return [RevolutionBody.ellipsoid(n, a, 1.0) for a in spec.parameters()]
    rng = np.random.default_rng(spec.seed)
    return [random_polytope(n, rng, spec.points, spec.symmetric) for _ in range(spec.count)]


# --------------------------------------------------------------------------
# False centre diagnostics
# --------------------------------------------------------------------------
def _smooth3(r: np.ndarray) -> np.ndarray:
    out = r.copy()
    out[1:-1] = (r[:-2] + r[1:-1] + r[2:]) / 3.0
    return out


def normalize_axial(C: RevolutionBody) -> RevolutionBody:
    """Axis preserving dilation to h(axis) = 1 and r(0) = 1."""
    if not isinstance(C, RevolutionBody):
        raise RepresentationError("false centre scan needs a body of revolution")
    if not C.meridian.symmetric_about(0.0, 1e-8):
        raise PreconditionError("normalization: body is not o-symmetric")
    a, r0 = C.t[-1], float(C.meridian(0.0))
    if not (a > 0 and r0 > 0):
        raise PreconditionError("normalization: degenerate meridian")
    return C.apply_affine(AffineMap.dilation(C.axis, 1.0 / a, 1.0 / r0))


def endpoint_section(C: RevolutionBody, m: float):
    """Section of a normalized C by the plane through -u and (1-m)u + r(1-m)v."""
    eta = float(C.meridian(1.0 - m)) / (2.0 - m)
    v = complement_basis(C.axis)[:, 0]
    k = math.hypot(1.0, eta)
    nu = (eta * C.axis - v) / k
    return C.section(nu, -eta / k), eta


def f_profile(C: RevolutionBody, smooth: bool = True, tmin: float = F_TMIN):
    """f(t) = (1 - r(t)^2) / t^2 at the meridian nodes with tmin <= t < 1 (C normalized)."""
    t, r = C.t, C.r
    if smooth:
        r = _smooth3(r)
    sel = (t >= tmin) & (t < 1.0)
    return t[sel], (1.0 - r[sel] ** 2) / t[sel] ** 2


def false_centre_scan(C: RevolutionBody, m_values=None, smooth: bool = True):
    """Largest q over sections through an endpoint of the axis, and the f-profile.

    Returns (q_max, (t, f), report).
    """
    K = normalize_axial(C)
    if m_values is None:
        m_values = np.linspace(1 / 128, 0.25, 32)
    qs = []
    for m in m_values:
        if not 0 < m <= 0.25:
            raise DomainError("slope parameter m must lie in (0, 1/4]")
        S, _ = endpoint_section(K, float(m))
        qs.append(1.0 if isinstance(S, EmptySection) else minkowski_q(S).q)
    qs = np.asarray(qs)
    t, f = f_profile(K, smooth)
    k = int(np.argmax(qs))
    report = {"m": [float(x) for x in m_values], "q": qs.tolist(), "m_argmax": float(m_values[k]),
              "f_min": float(f.min()), "f_max": float(f.max()), "f_mean": float(f.mean())}
    return float(qs[k]), (t, f), report


# --------------------------------------------------------------------------
# Stability scans
# --------------------------------------------------------------------------
@dataclass
class StabilityRecord:
    param: float
    deficit: float
    bm_minus_1: float
    q_max: float
    seconds: float

    def row(self, timing: bool = True):
        return [repr(float(self.param)), repr(float(self.deficit)), repr(float(self.bm_minus_1)),
                repr(float(self.q_max)), repr(float(self.seconds)) if timing else "0.0"]


def stability_record(param, body, with_q: bool = True) -> StabilityRecord:
    t0 = time.perf_counter()
    if not body.is_centrally_symmetric(np.zeros(body.n)):
        raise PreconditionError("stability scans need o-symmetric bodies")
    rep = volume_product_report(body)
    bm = bm_distance_ball(body)
    q = float("nan")
    if with_q and isinstance(body, RevolutionBody) and body.n >= 3:
        q = false_centre_scan(body)[0]
    rec = StabilityRecord(float(param), rep.deficit, bm - 1.0, q, time.perf_counter() - t0)
    log.info("param=%g deficit=%.3e bm-1=%.3e q=%.6f (%.2fs)", param, rec.deficit, rec.bm_minus_1,
             q, rec.seconds)
    return rec


def fit_exponent(records, lo: float = FIT_RANGE[0], hi: float = FIT_RANGE[1]):
    """Least-squares slope of log(bm - 1) against log(deficit) inside [lo, hi]."""
    d = np.array([r.deficit for r in records])
    b = np.array([r.bm_minus_1 for r in records])
    sel = (d >= lo) & (d <= hi) & (d > FIT_FLOOR) & (b > FIT_FLOOR)
    if sel.sum() < 2:
        return None
    return float(np.polyfit(np.log(d[sel]), np.log(b[sel]), 1)[0])


def stability_scan(family, threads: int | None = None, with_q: bool = True):
    """Records per body (sorted by parameter) and the fitted exponent (None if degenerate).

    ``family`` is a FamilySpec or a sequence of (param, body) pairs.
    """
    if isinstance(family, FamilySpec):
        pairs = list(zip(family.parameters(), make_family(family)))
    else:
        pairs = list(family)
    pairs.sort(key=lambda pb: pb[0])
    workers = max(1, threads or 1)
    with ThreadPoolExecutor(max_workers=workers) as ex:
        records = list(ex.map(lambda pb: stability_record(pb[0], pb[1], with_q), pairs))
    return records, fit_exponent(records)


def write_records(records, path, exponent, timing: bool = True):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["param", "deficit", "bm_minus_1", "q_max", "seconds"])
        for r in records:
            w.writerow(r.row(timing))
        fh.write(f"# fitted_exponent={'nan' if exponent is None else repr(exponent)}\n")


# --------------------------------------------------------------------------
# Section containment for polar bodies
# --------------------------------------------------------------------------
@dataclass
class ContainmentReport:
    t: list
    violation: list
    checked: int
    violations: int
    polar_volume: float
    symmetral_polar_volume: float

    @property
    def ok(self) -> bool:
        return self.violations == 0 and self.symmetral_polar_volume >= self.polar_volume - 1e-8


def _section_polygon(body, u, t):
    S = body.section(u, t)
    if isinstance(S, EmptySection):
        return None
    if isinstance(S, Polytope):
        return S.vertices
    # a planar section of a body of revolution, in (s, y) coordinates about its own axis
    V = S.meridian_polygon()
    return V


def section_containment_check(K, u, t_grid=None, tol: float = CONTAINMENT_TOL) -> ContainmentReport:
    """Check 1/2 (S - S) inside K~^o(u, t) - tu for S = K^o(u, t), K~ = steiner(K, u^perp)."""
    if K.n != 3:
        raise DomainError("section containment is checked for n = 3")
    u = as_direction(u, 3)
    if not K.is_centrally_symmetric(np.zeros(3)):
        raise PreconditionError("body must be o-symmetric")
    Kt = steiner(K, Hyperplane(u, 0.0))
    P, Pt = polar(K), polar(Kt)
    if isinstance(K, RevolutionBody):
        # both sections are discs about the axis when u is the axis
        if abs(abs(u @ K.axis) - 1.0) > 1e-12:
            raise RepresentationError("bodies of revolution are checked along their axis")
    if t_grid is None:
        lo, hi = -P.support(-u), P.support(u)
        t_grid = np.linspace(lo, hi, 22)[1:-1]
    ts, viol = [], []
    for t in t_grid:
        S = _section_polygon(P, u, float(t))
        T = _section_polygon(Pt, u, float(t))
        if S is None or T is None:
            continue
        A, b = planar.edge_halfspaces(T)
        # 1/2 (S - S) has support (h_S(a) + h_S(-a)) / 2; containment needs it <= h_T(a)
        hs = 0.5 * (planar.support(S, A) + planar.support(S, -A))
        # T - tu is centred: for revolution sections shift to the section axis midpoint
        if isinstance(K, RevolutionBody):
            hs = hs + A @ np.array([0.5 * (T[:, 0].max() + T[:, 0].min()), 0.0])
        ts.append(float(t))
        viol.append(float(np.max(hs - b)))
    bad = int(np.sum(np.array(viol) > tol)) if viol else 0
    return ContainmentReport(ts, viol, len(ts), bad, P.volume(), Pt.volume())


# --------------------------------------------------------------------------
# Reduction chain
# --------------------------------------------------------------------------
@dataclass
class ChainReport:
    product_K: float
    product_C: float
    product_C_tilde: float
    kappa_sq: float
    steps_ok: list
    info: dict = field(default_factory=dict)

    @property
    def values(self) -> list:
        return [self.product_K, self.product_C, self.product_C_tilde, self.kappa_sq]

    @property
    def ok(self) -> bool:
        return all(self.steps_ok)

    def to_dict(self):
        d = asdict(self)
        d["values"] = self.values
        d["ok"] = self.ok
        return d


def bs_chain_check(K, grid: int = SCHWARZ_GRID, slack: float = CHAIN_SLACK) -> ChainReport:
    """V(K)V(K^z) <= V(C)V(C^o) <= V(C~)V(C~^o) <= kappa_n^2 along the reduction."""
    if K.n not in (3, 4):
        raise DomainError("the reduction chain is run for n = 3 or 4")
    pK = volume_product_report(K).product
    C, info = full_reduction(K, grid=grid, return_info=True)
    pC = C.volume() * polar(C).volume()
    Ct = steiner(C, Hyperplane(C.axis, 0.0))
    pCt = Ct.volume() * polar(Ct).volume()
    k2 = kappa(K.n) ** 2
    vals = [pK, pC, pCt, k2]
    ok = [bool(vals[i] <= vals[i + 1] * (1 + slack)) for i in range(3)]
    meta = {"branch": info.branch, "eps": info.eps}
    return ChainReport(pK, pC, pCt, k2, ok, meta)
