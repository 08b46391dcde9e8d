"""Convex compact subsets of R^m stored by their support function.

A body ``A`` is kept as the vector ``h[i] = max_{a in A} (a, xi_i)`` over a
fixed, negation-closed grid of unit directions ``xi_i``.  Minkowski
combinations are linear in ``h`` (after flipping directions for negative
weights) and the Hausdorff distance between convex bodies is the sup-norm
distance of their support functions, so every set operation used by the
package reduces to vector arithmetic.

Only ``m = 1`` (directions ``+1, -1``) and ``m = 2`` (``n_xi`` equally spaced
angles, ``n_xi`` even) are supported.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

__all__ = [
    "DirectionGrid",
    "ConvexBody",
    "InvalidBodyError",
    "GridMismatchError",
    "direction_grid",
    "singleton",
    "ball",
    "minkowski_combine",
    "hausdorff",
    "set_norm",
    "convexify",
    "contains",
    "hausdorff_grid_bound",
]

#: relative slack for the discrete convexity check
CONVEXITY_RTOL = 1e-9


class InvalidBodyError(ValueError):
    """A support vector that is not the support function of a nonempty convex body."""


class GridMismatchError(ValueError):
    """Operands live on different direction grids."""


@dataclass(frozen=True, eq=False)
class DirectionGrid:
    """Ordered unit directions in R^m, closed under negation.

    Attributes
    ----------
    m : int
        Ambient dimension, 1 or 2.
    directions : ndarray, shape (n_xi, m)
        Unit vectors.  For ``m == 1`` this is ``[[1], [-1]]``; for ``m == 2``
        row ``i`` is ``(cos(i*step), sin(i*step))``.
    neg : ndarray of int
        ``directions[neg[i]] == -directions[i]``.
    """

    m: int
    directions: np.ndarray = field(repr=False)
    neg: np.ndarray = field(repr=False)

    @property
    def n_xi(self) -> int:
        return self.directions.shape[0]

    @property
    def step(self) -> float:
        """Angular spacing (``pi`` for ``m == 1``)."""
        return 2 * np.pi / self.n_xi

    @property
    def angles(self) -> np.ndarray:
        return np.arange(self.n_xi) * self.step

    def __eq__(self, other):
        if not isinstance(other, DirectionGrid):
            return NotImplemented
        return self.m == other.m and self.n_xi == other.n_xi

    def __hash__(self):
        return hash((self.m, self.n_xi))


@lru_cache(maxsize=None)
def direction_grid(m: int = 2, n_xi: int = 64) -> DirectionGrid:
    """Build (and cache) the direction grid for dimension ``m``.

    For ``m == 1`` ``n_xi`` is ignored.
    """
    if m == 1:
        dirs = np.array([[1.0], [-1.0]])
        neg = np.array([1, 0])
    elif m == 2:
        if n_xi < 4 or n_xi % 2:
            raise ValueError(f"n_xi must be even and >= 4, got {n_xi}")
        idx = np.arange(n_xi)
        # exact negation: the angle of i + n_xi/2 is angle_i + pi, and we
        # enforce bitwise antisymmetry instead of trusting cos/sin rounding
        half = n_xi // 2
        t = 2 * np.pi * idx[:half] / n_xi
        first = np.column_stack([np.cos(t), np.sin(t)])
        dirs = np.vstack([first, -first])
        neg = (idx + half) % n_xi
    else:
        raise ValueError(f"only m in (1, 2) is supported, got {m}")
    dirs.setflags(write=False)
    neg.setflags(write=False)
    return DirectionGrid(m=m, directions=dirs, neg=neg)


def _check_support(grid: DirectionGrid, h: np.ndarray, rtol: float) -> None:
    tol = rtol * max(1.0, float(np.max(np.abs(h))) if h.size else 1.0)
    width = h + h[grid.neg]
    if np.any(width < -tol):
        i = int(np.argmin(width))
        raise InvalidBodyError(f"negative width {width[i]:.3e} at direction {i}")
    if grid.m == 2:
        gap = np.roll(h, 1) + np.roll(h, -1) - 2 * np.cos(grid.step) * h
        if np.any(gap < -tol):
            i = int(np.argmin(gap))
            raise InvalidBodyError(f"support vector not convex at direction {i} (gap {gap[i]:.3e})")


@dataclass(frozen=True, eq=False)
class ConvexBody:
    """A nonempty convex compact set, given by its sampled support function."""

    grid: DirectionGrid
    h: np.ndarray

    def __post_init__(self):
        h = np.array(self.h, dtype=float)
        if h.shape != (self.grid.n_xi,):
            raise ValueError(f"expected {self.grid.n_xi} support values, got shape {h.shape}")
        if not np.all(np.isfinite(h)):
            raise InvalidBodyError("support values must be finite")
        h.setflags(write=False)
        object.__setattr__(self, "h", h)

    @classmethod
    def checked(cls, grid: DirectionGrid, h, rtol: float = CONVEXITY_RTOL) -> ConvexBody:
        """Construct and validate the ConvexBody invariants."""
        body = cls(grid, h)
        _check_support(grid, body.h, rtol)
        return body

    def validate(self, rtol: float = CONVEXITY_RTOL) -> ConvexBody:
        _check_support(self.grid, self.h, rtol)
        return self

    @property
    def m(self) -> int:
        return self.grid.m

    def interval(self) -> tuple[float, float]:
        """Endpoints ``(lo, hi)`` of a one-dimensional body."""
        if self.m != 1:
            raise ValueError("interval() only applies to m == 1")
        return -float(self.h[1]), float(self.h[0])

    def vertices(self) -> np.ndarray:
        """Vertices of the polygon ``{x : (x, xi_i) <= h_i}`` (``m == 2``).

        Row ``i`` is the intersection of the supporting lines for directions
        ``i`` and ``i + 1``; consecutive rows may coincide.  For ``m == 1``
        the two interval endpoints are returned.
        """
        if self.m == 1:
            lo, hi = self.interval()
            return np.array([[hi], [lo]])
        return _polygon_vertices(self.grid, self.h[None, :])[0]

    def __add__(self, other: ConvexBody) -> ConvexBody:
        return minkowski_combine(1.0, self, 1.0, other)

    def __mul__(self, c: float) -> ConvexBody:
        return minkowski_combine(c, self, 0.0, self)

    __rmul__ = __mul__

    def to_json(self) -> dict:
        return {"m": self.m, "n_xi": self.grid.n_xi, "h": self.h.tolist()}

    @classmethod
    def from_json(cls, data: dict) -> ConvexBody:
        grid = direction_grid(data["m"], data["n_xi"])
        return cls.checked(grid, data["h"])


def _polygon_vertices(grid: DirectionGrid, H: np.ndarray) -> np.ndarray:
    """Vertices for a stack of m=2 support vectors; returns (k, n_xi, 2)."""
    th = grid.angles
    th1 = np.roll(th, -1)
    H1 = np.roll(H, -1, axis=-1)
    s = np.sin(grid.step)
    vx = (H * np.sin(th1) - H1 * np.sin(th)) / s
    vy = (H1 * np.cos(th) - H * np.cos(th1)) / s
    return np.stack([vx, vy], axis=-1)


def _same_grid(A: ConvexBody, B: ConvexBody) -> None:
    if A.grid != B.grid:
        raise GridMismatchError(f"grids differ: {A.grid} vs {B.grid}")


def singleton(a, grid: DirectionGrid) -> ConvexBody:
    """The one-point set ``{a}``: ``h(xi) = (a, xi)``."""
    a = np.atleast_1d(np.asarray(a, dtype=float))
    if a.shape != (grid.m,):
        raise ValueError(f"point must have {grid.m} coordinates")
    h = grid.directions @ a
    # keep h(-xi) == -h(xi) bitwise so reflections stay exact
    h[grid.neg[: grid.n_xi // 2]] = -h[: grid.n_xi // 2]
    return ConvexBody(grid, h)


def ball(r: float, grid: DirectionGrid) -> ConvexBody:
    """Closed Euclidean ball of radius ``r`` centred at the origin.

    Notes
    -----
    The ball in the inflated-approximant construction is read as having
    radius ``r`` (not 1); the radius is what the one-sided bound relies on.
    """
    if r < 0:
        raise ValueError(f"radius must be nonnegative, got {r}")
    return ConvexBody(grid, np.full(grid.n_xi, float(r)))


def _scaled(c: float, h: np.ndarray, grid: DirectionGrid) -> np.ndarray:
    if c >= 0:
        return c * h
    return -c * h[grid.neg]


def minkowski_combine(lam: float, A: ConvexBody, mu: float, B: ConvexBody) -> ConvexBody:
    """Return ``lam*A + mu*B``.

    Negative weights use ``h_{cA}(xi) = |c| h_A(-xi)``, which is exact on a
    negation-closed grid.
    """
    _same_grid(A, B)
    h = _scaled(lam, A.h, A.grid) + _scaled(mu, B.h, B.grid)
    return ConvexBody(A.grid, h)


def hausdorff(A: ConvexBody, B: ConvexBody) -> float:
    """Hausdorff distance, ``max_i |h_A(xi_i) - h_B(xi_i)|``.

    Exact for ``m == 1``.  For ``m == 2`` it underestimates the true
    distance by at most :func:`hausdorff_grid_bound`.
    """
    _same_grid(A, B)
    return float(np.max(np.abs(A.h - B.h)))


def set_norm(A: ConvexBody) -> float:
    """``||A|| = delta(A, {0}) = max_{a in A} |a|``."""
    return float(np.max(np.abs(A.h)))


def hausdorff_grid_bound(A: ConvexBody, B: ConvexBody) -> float:
    """Upper bound on ``delta_true(A, B) - hausdorff(A, B)``.

    Support functions are ``||A||``-Lipschitz on the unit circle and every
    direction lies within angle ``step/2`` of a grid direction, whose chord
    is ``2 sin(step/4)``.  This first-order bound is sharp for polytopes whose
    edge normals fall between grid directions; bodies with smooth support
    functions do better, with error ``O(step**2)``.
    """
    _same_grid(A, B)
    if A.m == 1:
        return 0.0
    return (set_norm(A) + set_norm(B)) * 2 * np.sin(A.grid.step / 4)


def convexify(points, grid: DirectionGrid) -> ConvexBody:
    """Support vector of the convex hull of a finite point set."""
    pts = np.asarray(points, dtype=float)
    if pts.ndim == 1:
        pts = pts[:, None] if grid.m == 1 else pts[None, :]
    if pts.shape[0] == 0:
        raise ValueError("convexify needs at least one point")
    if pts.shape[1] != grid.m:
        raise ValueError(f"points must have {grid.m} coordinates")
    return ConvexBody(grid, np.max(pts @ grid.directions.T, axis=0))


def contains(A: ConvexBody, B: ConvexBody, tol: float = 0.0) -> bool:
    """True iff ``B`` is a subset of ``A`` up to ``tol`` in every grid direction."""
    _same_grid(A, B)
    return bool(np.all(B.h <= A.h + tol))
