"""Deterministic point sets on unit spheres."""
import itertools

import numpy as np
from scipy.stats import norm, qmc

_GOLDEN = (1.0 + 5.0 ** 0.5) / 2.0


def sphere_points(dim, n):
    """Return ``n`` deterministic, well spread unit vectors in R^dim.

    Fibonacci lattices for dim 2 and 3, an inverse-normal mapped Halton
    sequence above that. For dim 1 the sphere is {-1, +1}.
    """
    if dim < 1 or n < 1:
        raise ValueError("dim and n must be positive")
    if dim == 1:
        return np.array([[1.0], [-1.0]])[: max(n, 2)]
    k = np.arange(n, dtype=float)
    if dim == 2:
        angle = 2.0 * np.pi * np.mod(k / _GOLDEN, 1.0)
        return np.column_stack([np.cos(angle), np.sin(angle)])
    if dim == 3:
        z = 1.0 - (2.0 * k + 1.0) / n
        r = np.sqrt(np.maximum(0.0, 1.0 - z * z))
        phi = 2.0 * np.pi * np.mod(k / _GOLDEN, 1.0)
        return np.column_stack([r * np.cos(phi), r * np.sin(phi), z])
    # first Halton point is the origin, which maps to -inf
    pts = qmc.Halton(d=dim, scramble=False).random(n + 1)[1:]
    g = norm.ppf(pts)
    return g / np.linalg.norm(g, axis=1, keepdims=True)


def axis_directions(dim):
    eye = np.eye(dim)
    return np.concatenate([eye, -eye])


def diagonal_directions(dim):
    """All (+-1, ..., +-1)/sqrt(dim); capped at dim 4 to bound the count."""
    if dim > 4:
        return np.empty((0, dim))
    signs = np.array(list(itertools.product((1.0, -1.0), repeat=dim)))
    return signs / np.sqrt(dim)
