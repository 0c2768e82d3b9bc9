from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .._numerics import as_direction


@dataclass(frozen=True, eq=False)
class Hyperplane:
    """{x : <normal, x> = offset} with a unit normal."""

    normal: np.ndarray
    offset: float = 0.0

    def __post_init__(self):
        u = as_direction(self.normal).copy()
        u.setflags(write=False)
        object.__setattr__(self, "normal", u)
        object.__setattr__(self, "offset", float(self.offset))

    @property
    def n(self) -> int:
        return self.normal.shape[0]

    def reflect(self, x):
        x = np.asarray(x, dtype=float)
        return x - 2.0 * np.multiply.outer(x @ self.normal - self.offset, self.normal)
