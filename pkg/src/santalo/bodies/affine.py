from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .._numerics import unit
from ..errors import DomainError


@dataclass(frozen=True, eq=False)
class AffineMap:
    """x -> matrix @ x + translation, with the determinant cached."""

    matrix: np.ndarray
    translation: np.ndarray
    det: float = field(init=False)

    def __post_init__(self):
        M = np.array(self.matrix, dtype=float)
        if M.ndim != 2 or M.shape[0] != M.shape[1]:
            raise DomainError("affine map needs a square matrix")
        c = np.zeros(M.shape[0]) if self.translation is None else np.array(self.translation, dtype=float)
        if c.shape != (M.shape[0],):
            raise DomainError("translation has the wrong dimension")
        d = float(np.linalg.det(M))
        if d == 0.0 or not np.isfinite(d):
            raise DomainError("affine map is singular")
        M.setflags(write=False)
        c.setflags(write=False)
        object.__setattr__(self, "matrix", M)
        object.__setattr__(self, "translation", c)
        object.__setattr__(self, "det", d)

    @property
    def n(self) -> int:
        return self.matrix.shape[0]

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        return x @ self.matrix.T + self.translation

    def __matmul__(self, other: "AffineMap") -> "AffineMap":
        """Composition: ``(self @ other)(x) == self(other(x))``."""
        return AffineMap(self.matrix @ other.matrix, self.matrix @ other.translation + self.translation)

    def inverse(self) -> "AffineMap":
        Mi = np.linalg.inv(self.matrix)
        return AffineMap(Mi, -Mi @ self.translation)

    def linear_inverse_transpose(self) -> np.ndarray:
        return np.linalg.inv(self.matrix).T

    @classmethod
    def identity(cls, n: int) -> "AffineMap":
        return cls(np.eye(n), np.zeros(n))

    @classmethod
    def scaling(cls, n: int, s: float) -> "AffineMap":
        return cls(s * np.eye(n), np.zeros(n))

    @classmethod
    def shift(cls, v) -> "AffineMap":
        v = np.asarray(v, dtype=float)
        return cls(np.eye(v.shape[0]), v)

    @classmethod
    def dilation(cls, u, along: float, ortho: float) -> "AffineMap":
        """Scale by ``along`` in direction ``u`` and by ``ortho`` on its orthogonal complement."""
        u = unit(u)
        n = u.shape[0]
        P = np.outer(u, u)
        return cls(along * P + ortho * (np.eye(n) - P), np.zeros(n))
