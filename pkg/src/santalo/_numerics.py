"""Small numerical helpers used across the package."""
from __future__ import annotations

import math

import numpy as np

from .errors import DomainError

DIRECTION_TOL = 1e-12

# 4-point Gauss-Legendre rule on [0, 1]; exact for polynomials of degree <= 7.
_x, _w = np.polynomial.legendre.leggauss(4)
GL4_NODES = 0.5 * (_x + 1.0)
GL4_WEIGHTS = 0.5 * _w
_x, _w = np.polynomial.legendre.leggauss(12)
GL12_NODES = 0.5 * (_x + 1.0)
GL12_WEIGHTS = 0.5 * _w
del _x, _w


def kappa(n: int) -> float:
    """Volume of the n-dimensional unit ball."""
    return math.pi ** (n / 2) / math.gamma(n / 2 + 1)


def as_direction(d, n: int | None = None) -> np.ndarray:
    d = np.asarray(d, dtype=float).reshape(-1)
    if n is not None and d.shape[0] != n:
        raise DomainError(f"direction has dimension {d.shape[0]}, expected {n}")
    if abs(np.linalg.norm(d) - 1.0) > DIRECTION_TOL:
        raise DomainError(f"direction is not a unit vector (norm={np.linalg.norm(d)!r})")
    return d


def unit(v) -> np.ndarray:
    v = np.asarray(v, dtype=float).reshape(-1)
    nv = np.linalg.norm(v)
    if nv == 0.0:
        raise DomainError("zero vector has no direction")
    return v / nv


def complement_basis(u: np.ndarray) -> np.ndarray:
    """Orthonormal basis (as columns) of the hyperplane orthogonal to ``u``.

    Deterministic: the same ``u`` always yields the same basis, which the
    section comparisons rely on.
    """
    u = unit(u)
    n = u.shape[0]
    k = int(np.argmax(np.abs(u)))
    e = np.zeros(n)
    e[k] = 1.0 if u[k] >= 0 else -1.0
    w = u - e
    nw = np.linalg.norm(w)
    if nw < 1e-15:
        H = np.eye(n)
    else:
        w /= nw
        H = np.eye(n) - 2.0 * np.outer(w, w)
    # H maps e -> u, so the remaining columns of H span u-perp.
    cols = [j for j in range(n) if j != k]
    return H[:, cols].copy()


def chebyshev_nodes(a: float, b: float, m: int) -> np.ndarray:
    """m + 1 Chebyshev-Lobatto nodes on [a, b] in increasing order."""
    theta = np.linspace(math.pi, 0.0, m + 1)
    x = 0.5 * (a + b) + 0.5 * (b - a) * np.cos(theta)
    x[0], x[-1] = a, b
    return x


def clenshaw_curtis_weights(m: int) -> np.ndarray:
    """Quadrature weights on [-1, 1] for the nodes of ``chebyshev_nodes``."""
    theta = np.pi * np.arange(m + 1) / m
    w = np.zeros(m + 1)
    v = np.ones(m - 1)
    inner = theta[1:-1]
    if m % 2 == 0:
        w[0] = w[m] = 1.0 / (m * m - 1)
        for k in range(1, m // 2):
            v -= 2.0 * np.cos(2 * k * inner) / (4 * k * k - 1)
        v -= np.cos(m * inner) / (m * m - 1)
    else:
        w[0] = w[m] = 1.0 / (m * m)
        for k in range(1, (m - 1) // 2 + 1):
            v -= 2.0 * np.cos(2 * k * inner) / (4 * k * k - 1)
    w[1:-1] = 2.0 * v / m
    return w


def sphere_directions(n: int, count: int) -> np.ndarray:
    """Quasi-uniform unit vectors: a circle grid, a Fibonacci sphere, or seeded points on S^3."""
    if n == 2:
        ang = np.linspace(0.0, 2 * math.pi, count, endpoint=False)
        return np.column_stack([np.cos(ang), np.sin(ang)])
    if n == 3:
        i = np.arange(count) + 0.5
        z = 1.0 - 2.0 * i / count
        phi = math.pi * (1.0 + math.sqrt(5.0)) * i
        rho = np.sqrt(1.0 - z * z)
        return np.column_stack([rho * np.cos(phi), rho * np.sin(phi), z])
    rng = np.random.default_rng(12345)
    g = rng.standard_normal((count, n))
    return g / np.linalg.norm(g, axis=1, keepdims=True)


def ball_second_moment(n: int) -> float:
    """Integral of x_1^2 over the unit ball."""
    return kappa(n) / (n + 2)


def isotropic_constant_ball(n: int) -> float:
    return math.sqrt(kappa(n) ** (-2.0 / n) / (n + 2))
