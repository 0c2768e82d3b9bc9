"""Hypothesis strategies for random convex bodies."""
import numpy as np
from hypothesis import strategies as st

from santalo.bodies import Polygon, PolytopeV, RevolutionBody
from santalo.bodies import planar
from santalo.bodies.revolution import profile_from_polygon

seeds = st.integers(min_value=0, max_value=2 ** 32 - 1)


def random_polygon(seed, k=None, symmetric=False):
    rng = np.random.default_rng(seed)
    k = k or int(rng.integers(3, 12))
    P = rng.standard_normal((k, 2)) * rng.uniform(0.3, 3.0, size=2)
    if symmetric:
        P = np.concatenate([P, -P])
    return Polygon(planar.hull_2d(P), check=False)


def random_polytope(seed, n=3, k=12, symmetric=False):
    rng = np.random.default_rng(seed)
    P = rng.standard_normal((k, n))
    if symmetric:
        P = np.concatenate([P, -P])
    return PolytopeV.hull_of(P)


def random_revolution(seed, n=3, k=8, symmetric=False):
    """Body of revolution whose meridian polygon is the hull of random points and their mirrors."""
    rng = np.random.default_rng(seed)
    t = rng.uniform(-1.5, 1.5, k)
    r = rng.uniform(0.2, 1.2, k)
    P = np.column_stack([t, r])
    if symmetric:
        P = np.concatenate([P, P * [-1, 1]])
    P = np.concatenate([P, P * [1, -1]])
    W = planar.hull_2d(P)
    return RevolutionBody(np.eye(n)[0], profile_from_polygon(W), n)


polygons = seeds.map(random_polygon)
symmetric_polygons = seeds.map(lambda s: random_polygon(s, symmetric=True))
polytopes = seeds.map(random_polytope)
revolutions = seeds.map(random_revolution)
