"""Box domains and uniform Cartesian grids.

Boundary faces are enumerated axis by axis, lower side before upper side,
and within one side in C (lexicographic) order of the transverse cell
index. In 1D this gives face 0 = left (normal -1), face 1 = right (+1).
"""
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .exceptions import InvalidDirection, InvalidResolution


@dataclass(frozen=True)
class BoxDomain:
    lower: tuple
    upper: tuple

    def __post_init__(self):
        lo = tuple(float(x) for x in np.atleast_1d(self.lower))
        hi = tuple(float(x) for x in np.atleast_1d(self.upper))
        if len(lo) != len(hi) or not lo:
            raise ValueError("lower and upper corners must have the same positive length")
        if not all(np.isfinite(lo + hi)):
            raise ValueError("domain corners must be finite")
        if not all(h > l for l, h in zip(lo, hi)):
            raise ValueError("upper corner must exceed lower corner componentwise")
        object.__setattr__(self, "lower", lo)
        object.__setattr__(self, "upper", hi)

    @classmethod
    def unit(cls, d=1):
        return cls((0.0,) * d, (1.0,) * d)

    @property
    def dimension(self):
        return len(self.lower)

    @property
    def widths(self):
        return tuple(h - l for l, h in zip(self.lower, self.upper))

    @property
    def volume(self):
        return float(np.prod(self.widths))

    def scaled(self, s):
        return BoxDomain(tuple(s * x for x in self.lower), tuple(s * x for x in self.upper))


def _direction(w, d):
    w = np.atleast_1d(np.asarray(w, dtype=float))
    if w.shape != (d,):
        raise InvalidDirection(f"direction must have {d} components, got {w.shape}")
    if not np.all(np.isfinite(w)) or not np.any(w != 0.0):
        raise InvalidDirection("direction must be finite and nonzero")
    return w


def width_along(domain, w):
    """``sup <w, x> - inf <w, x>`` over the box."""
    w = _direction(w, domain.dimension)
    return float(np.sum(np.abs(w) * np.asarray(domain.widths)))


def extent_along(domain, w):
    """``(inf, sup)`` of ``<w, x>`` over the box."""
    w = _direction(w, domain.dimension)
    lo, hi = np.asarray(domain.lower), np.asarray(domain.upper)
    return (float(np.sum(np.minimum(w * lo, w * hi))),
            float(np.sum(np.maximum(w * lo, w * hi))))


@dataclass(frozen=True, eq=False)
class Grid:
    domain: BoxDomain
    shape: tuple
    _blocks: list = field(init=False, repr=False)

    def __post_init__(self):
        shape = tuple(int(n) for n in np.atleast_1d(self.shape))
        if len(shape) != self.domain.dimension:
            raise InvalidResolution("need one cell count per axis")
        if any(n < 2 for n in shape):
            raise InvalidResolution(f"each axis needs at least 2 cells, got {shape}")
        object.__setattr__(self, "shape", shape)
        blocks, start = [], 0
        for axis in range(self.dimension):
            count = int(np.prod([n for j, n in enumerate(shape) if j != axis]))
            for side in (0, 1):
                blocks.append((axis, side, start, start + count))
                start += count
        object.__setattr__(self, "_blocks", blocks)

    def __eq__(self, other):
        return (isinstance(other, Grid) and self.domain == other.domain
                and self.shape == other.shape)

    def __hash__(self):
        return hash((self.domain, self.shape))

    @property
    def dimension(self):
        return len(self.shape)

    @property
    def dx(self):
        return tuple(w / n for w, n in zip(self.domain.widths, self.shape))

    @property
    def cell_volume(self):
        return float(np.prod(self.dx))

    @property
    def n_cells(self):
        return int(np.prod(self.shape))

    @property
    def n_faces(self):
        return self._blocks[-1][3]

    @cached_property
    def axis_centers(self):
        return tuple(lo + (np.arange(n) + 0.5) * h
                     for lo, n, h in zip(self.domain.lower, self.shape, self.dx))

    @cached_property
    def centers(self):
        """Cell centers, shape ``shape + (d,)``."""
        mesh = np.meshgrid(*self.axis_centers, indexing="ij")
        return np.stack(mesh, axis=-1)

    def face_blocks(self):
        """Yield ``(axis, side, start, stop)`` slices of the face enumeration."""
        return list(self._blocks)

    def transverse_shape(self, axis):
        return tuple(n for j, n in enumerate(self.shape) if j != axis)

    @cached_property
    def face_normals(self):
        eta = np.zeros((self.n_faces, self.dimension))
        for axis, side, a, b in self._blocks:
            eta[a:b, axis] = 1.0 if side else -1.0
        return eta

    @cached_property
    def face_areas(self):
        area = np.empty(self.n_faces)
        for axis, _, a, b in self._blocks:
            area[a:b] = float(np.prod([h for j, h in enumerate(self.dx) if j != axis]))
        return area

    @cached_property
    def face_cells(self):
        """Multi-index of the interior cell adjacent to each face."""
        cells = np.empty((self.n_faces, self.dimension), dtype=int)
        for axis, side, a, b in self._blocks:
            trans = self.transverse_shape(axis)
            idx = np.indices(trans).reshape(len(trans), -1) if trans else np.empty((0, 1), int)
            cols = [j for j in range(self.dimension) if j != axis]
            cells[a:b, cols] = idx.T
            cells[a:b, axis] = self.shape[axis] - 1 if side else 0
        return cells

    def boundary_values(self, values):
        """Adjacent interior cell value for every boundary face."""
        values = np.asarray(values)
        out = np.empty(self.n_faces)
        for axis, side, a, b in self._blocks:
            out[a:b] = np.take(values, -1 if side else 0, axis=axis).ravel()
        return out

    def ghost_slab(self, face_values, axis, side):
        """Face values of one side reshaped to broadcast against cell arrays."""
        for ax, sd, a, b in self._blocks:
            if ax == axis and sd == side:
                slab = np.asarray(face_values[a:b]).reshape(self.transverse_shape(axis))
                return np.expand_dims(slab, axis)
        raise IndexError((axis, side))


def build_grid(domain, cells_per_axis):
    return Grid(domain, tuple(np.atleast_1d(cells_per_axis)))
