"""Polar bodies, the Santalo point, volume products and mixed volumes."""
from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np
from scipy.spatial import ConvexHull

from ._numerics import GL4_NODES, GL4_WEIGHTS, kappa
from .bodies import planar
from .bodies.affine import AffineMap
from .bodies.polytope import Polygon, Polytope, PolytopeH, PolytopeV
from .bodies.revolution import RevolutionBody, profile_from_polygon
from .errors import ConvergenceError, DomainError, RepresentationError

INTERIOR_MARGIN = 1e-9
CERTIFICATE_TOL = 1e-6
MAX_NEWTON = 200


def _margin_ok(body, z) -> bool:
    return body.interior_margin(z) >= INTERIOR_MARGIN * body.diameter


def _check_interior(body, z):
    if isinstance(body, RevolutionBody):
        body.on_axis(z)
    if not _margin_ok(body, z):
        raise DomainError("polarity centre is not strictly interior")


def polar(body, z=None):
    """The polar body {x : <x - z, y - z> <= 1 for all y in body}."""
    z = np.zeros(body.n) if z is None else np.asarray(z, dtype=float)
    _check_interior(body, z)
    if isinstance(body, RevolutionBody):
        s = body.on_axis(z)
        W = planar.polar(body.meridian_polygon, np.array([s, 0.0]))
        return RevolutionBody(body.axis, profile_from_polygon(W), body.n)
    if isinstance(body, Polygon):
        return Polygon(planar.polar(body.vertices, z), check=False)
    if isinstance(body, PolytopeH):
        gap = body.b - body.A @ z
        return PolytopeV(z + body.A / gap[:, None], check=False)
    if isinstance(body, PolytopeV):
        D = body.vertices - z
        P = PolytopeH(D, 1.0 + D @ z, check=False)
        P._center = z
        return P
    raise RepresentationError(f"no polar for {type(body).__name__}")


def polar_volume(body, z) -> float:
    """Volume of the polar about ``z`` without building the polar body."""
    z = np.asarray(z, dtype=float)
    if isinstance(body, RevolutionBody):
        s = body.on_axis(z)
        W = planar.polar(body.meridian_polygon, np.array([s, 0.0]))
        return RevolutionBody(body.axis, profile_from_polygon(W), body.n).volume()
    if isinstance(body, Polytope):
        gap = body.b - body.A @ z
        P = body.A / gap[:, None]
        if body.n == 2:
            return planar.polygon_area(planar.hull_2d(P))
        return float(ConvexHull(P).volume)
    raise RepresentationError(f"no polar for {type(body).__name__}")


def _newton(f, x0, h, inside, max_iter=MAX_NEWTON):
    """Damped Newton with central finite differences; returns (x, f(x), iterations)."""
    x = np.array(x0, dtype=float)
    d = len(x)
    fx = f(x)
    I = np.eye(d)
    for it in range(max_iter):
        fp = np.array([f(x + h * I[i]) for i in range(d)])
        fm = np.array([f(x - h * I[i]) for i in range(d)])
        g = (fp - fm) / (2 * h)
        H = np.diag((fp - 2 * fx + fm) / h ** 2)
        for i in range(d):
            for j in range(i + 1, d):
                H[i, j] = H[j, i] = (f(x + h * (I[i] + I[j])) - f(x + h * (I[i] - I[j]))
                                     - f(x - h * (I[i] - I[j])) + f(x - h * (I[i] + I[j]))) / (4 * h * h)
        try:
            w = np.linalg.eigvalsh(H)
            step = -np.linalg.solve(H, g) if w.min() > 0 else -g / max(np.abs(w).max(), 1e-300)
        except np.linalg.LinAlgError:
            step = -g
        lam = 1.0
        improved = False
        tiny = 1e-13 * max(1.0, h * 1e4)
        for _ in range(60):
            if lam * np.linalg.norm(step) <= tiny:
                break
            xn = x + lam * step
            if inside(xn):
                fn = f(xn)
                if fn < fx:
                    improved = True
                    break
            lam *= 0.5
        if not improved:
            return x, fx, it
        x, fx = xn, fn
        if np.linalg.norm(lam * step) <= tiny:
            return x, fx, it + 1
    return x, fx, max_iter


def santalo_point(body, return_residual: bool = False):
    """Minimizer of z -> V(polar(body, z)), certified by centroid(polar) == z."""
    diam = body.diameter
    h = 1e-4 * diam
    if isinstance(body, RevolutionBody):
        axis = body.axis

        def f(x):
            return polar_volume(body, x[0] * axis)

        def inside(x):
            return _margin_ok(body, x[0] * axis)

        x0 = np.array([body.axial_centroid()])
        x, _, _ = _newton(f, x0, h, inside)
        z = x[0] * axis
    else:
        # the minimizer is affine equivariant; whitening keeps the finite-difference
        # step matched to the body's width in every direction
        c = body.centroid()
        cov = body.second_moment() / body.volume() - np.outer(c, c)
        L = np.linalg.cholesky(cov)
        W = body.apply_affine(AffineMap(np.linalg.inv(L), -np.linalg.solve(L, c)))
        hw = 1e-4 * W.diameter

        def inside(x):
            return _margin_ok(W, x)

        x, _, _ = _newton(lambda x: polar_volume(W, x), np.zeros(body.n), hw, inside)
        z = c + L @ x
    residual = float(np.linalg.norm(polar(body, z).centroid() - z))
    if not residual <= CERTIFICATE_TOL * diam:
        raise ConvergenceError("Santalo point certificate failed", best=z, residual=residual)
    return (z, residual) if return_residual else z


@dataclass
class ProductReport:
    n: int
    z: np.ndarray
    vol_K: float
    vol_polar: float
    product: float
    deficit: float
    symmetric: bool
    santalo_ok: bool
    kuperberg_symmetric_ok: bool
    kuperberg_general_ok: bool
    certificate_residual: float

    def to_dict(self) -> dict:
        d = asdict(self)
        d["z"] = [float(v) for v in self.z]
        d["kappa_n_squared"] = kappa(self.n) ** 2
        return d


def volume_product_report(body) -> ProductReport:
    n = body.n
    z, res = santalo_point(body, return_residual=True)
    vk = body.volume()
    vp = polar(body, z).volume()
    prod = vk * vp
    k2 = kappa(n) ** 2
    sym = body.is_centrally_symmetric()
    return ProductReport(
        n=n, z=z, vol_K=vk, vol_polar=vp, product=prod, deficit=1.0 - prod / k2, symmetric=sym,
        santalo_ok=prod <= k2 * (1 + 1e-7),
        kuperberg_symmetric_ok=(not sym) or prod > 2.0 ** (-n) * k2,
        kuperberg_general_ok=prod > 4.0 ** (-n) * k2,
        certificate_residual=res,
    )


def _revolution_v1(K: RevolutionBody, M: RevolutionBody) -> float:
    n = K.n
    t, r = K.t, K.r
    dt, dr = np.diff(t), np.diff(r)
    ell = np.hypot(dt, dr)
    # outward meridian normal of each lateral piece in (axial, radial) coordinates
    nu = np.column_stack([-dr, dt]) / ell[:, None]
    sgn = 1.0 if M.axis @ K.axis > 0 else -1.0
    VM = M.meridian_polygon * np.array([sgn, 1.0])
    hM = planar.support(VM, nu)
    # lateral (n-1)-area of the frustum: (n-1) kappa_{n-1} * int r^{n-2} along the segment
    R = r[:-1, None] + dr[:, None] * GL4_NODES
    lateral = (n - 1) * kappa(n - 1) * ell * (R ** (n - 2) @ GL4_WEIGHTS)
    total = float(np.sum(hM * lateral))
    caps = kappa(n - 1) * (r[0] ** (n - 1) * planar.support(VM, np.array([[-1.0, 0.0]]))[0]
                           + r[-1] ** (n - 1) * planar.support(VM, np.array([[1.0, 0.0]]))[0])
    return (total + caps) / n


def mixed_volume_v1(K, M) -> float:
    """V_1(K, M) = (1/n) * integral of h_M over the surface area measure of K."""
    if K.n != M.n:
        raise DomainError(f"dimension mismatch: {K.n} vs {M.n}")
    if isinstance(K, Polytope):
        return float(np.sum(M.support_many(K.A) * K.facet_areas())) / K.n
    if isinstance(K, RevolutionBody) and isinstance(M, RevolutionBody):
        if abs(abs(K.axis @ M.axis) - 1.0) > 1e-12:
            raise RepresentationError("bodies of revolution must share the axis")
        return _revolution_v1(K, M)
    raise RepresentationError("mixed volume needs a polytope K or two coaxial bodies of revolution")


def geominimal_upper(body) -> float:
    """Upper bound on the geominimal surface area from the candidate M = K^z - z.

    With z the Santalo point, M = K^z - z has centroid o and M^o = K - z, so the
    bound is kappa_n^{-1/n} n V_1(K, K - z) V(M)^{1/n}. It never exceeds
    kappa_n^{1/n} n V(K)^{(n-1)/n}, with equality exactly when the volume product is
    kappa_n^2.
    """
    n = body.n
    z = santalo_point(body)
    M = polar(body, z).apply_affine(AffineMap.shift(-z))
    Mo = polar(M)
    return kappa(n) ** (-1.0 / n) * n * mixed_volume_v1(body, Mo) * M.volume() ** (1.0 / n)


def geominimal_rhs(body) -> float:
    n = body.n
    return kappa(n) ** (1.0 / n) * n * body.volume() ** ((n - 1) / n)

