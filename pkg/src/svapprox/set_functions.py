"""Grid-sampled 2*pi-periodic scalar and set-valued functions.

A :class:`SetValuedFunction` is an ``(N_x, n_xi)`` matrix whose row ``j`` is
the support vector of the value at ``x_j = 2*pi*j/N_x``.  Integrals over the
period use the trapezoid rule on this grid, i.e. ``(2*pi/N_x) * sum``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .convex_sets import (
    CONVEXITY_RTOL,
    ConvexBody,
    DirectionGrid,
    GridMismatchError,
    _check_support,
    _polygon_vertices,
)

__all__ = [
    "PeriodicGrid",
    "ScalarPeriodicFunction",
    "SetValuedFunction",
    "lp_norm",
    "delta_LAp",
    "in_Phi_p",
    "in_F_p",
    "scalar_times_point",
    "constant_function",
    "zero_function",
    "random_Phi_p_sample",
    "random_F_p_sample",
    "selection_sampler",
    "parse_p",
]


def parse_p(p) -> float:
    """Accept ``1``, ``2``, ``inf``, ``"inf"`` (and friends) as a norm index."""
    if isinstance(p, str):
        p = p.strip().lower()
        if p in ("inf", "infty", "linf", "oo"):
            return np.inf
        p = p.removeprefix("l")
    p = float(p)
    if p not in (1.0, 2.0, np.inf):
        raise ValueError(f"norm index must be one of 1, 2, inf; got {p}")
    return p


def conjugate(p: float) -> float:
    p = parse_p(p)
    if p == 1:
        return np.inf
    if p == np.inf:
        return 1.0
    return 2.0


@dataclass(frozen=True)
class PeriodicGrid:
    """Uniform grid ``x_j = 2*pi*j/N_x`` on one period."""

    N_x: int

    def __post_init__(self):
        if self.N_x < 4:
            raise ValueError(f"N_x must be >= 4, got {self.N_x}")

    @property
    def x(self) -> np.ndarray:
        return 2 * np.pi * np.arange(self.N_x) / self.N_x

    @property
    def step(self) -> float:
        return 2 * np.pi / self.N_x


def lp_norm(values: np.ndarray, p, axis: int = 0) -> np.ndarray | float:
    """Trapezoid-rule ``L_p`` norm over one period of grid samples."""
    p = parse_p(p)
    v = np.abs(np.asarray(values, dtype=float))
    if p == np.inf:
        return np.max(v, axis=axis)
    w = 2 * np.pi / v.shape[axis]
    if p == 1:
        return w * np.sum(v, axis=axis)
    return np.sqrt(w * np.sum(v * v, axis=axis))


@dataclass(frozen=True, eq=False)
class ScalarPeriodicFunction:
    """Real 2*pi-periodic function known by its samples (and maybe a formula)."""

    xgrid: PeriodicGrid
    values: np.ndarray = field(repr=False)
    func: Callable[[np.ndarray], np.ndarray] | None = field(default=None, repr=False)

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.shape != (self.xgrid.N_x,):
            raise ValueError(f"expected {self.xgrid.N_x} samples, got {v.shape}")
        object.__setattr__(self, "values", v)

    @classmethod
    def from_callable(cls, func, xgrid: PeriodicGrid) -> ScalarPeriodicFunction:
        return cls(xgrid, np.asarray(func(xgrid.x), dtype=float), func)

    def __call__(self, x):
        if self.func is None:
            raise TypeError("no closed form; use .values on the grid")
        x = np.mod(np.asarray(x, dtype=float), 2 * np.pi)
        return self.func(x)

    def norm(self, p) -> float:
        return float(lp_norm(self.values, p))

    def __mul__(self, c: float) -> ScalarPeriodicFunction:
        f = self.func
        return ScalarPeriodicFunction(self.xgrid, c * self.values, None if f is None else (lambda x: c * f(x)))

    __rmul__ = __mul__

    def __sub__(self, other: ScalarPeriodicFunction) -> ScalarPeriodicFunction:
        return ScalarPeriodicFunction(self.xgrid, self.values - other.values)


@dataclass(frozen=True, eq=False)
class SetValuedFunction:
    """Periodic map ``x -> ConvexBody`` sampled on a :class:`PeriodicGrid`.

    ``H[j, i]`` is the support value of ``f(x_j)`` in direction ``i``.
    """

    xgrid: PeriodicGrid
    dgrid: DirectionGrid
    H: np.ndarray = field(repr=False)

    def __post_init__(self):
        H = np.array(self.H, dtype=float)
        if H.shape != (self.xgrid.N_x, self.dgrid.n_xi):
            raise ValueError(f"H has shape {H.shape}, expected {(self.xgrid.N_x, self.dgrid.n_xi)}")
        H.setflags(write=False)
        object.__setattr__(self, "H", H)

    @classmethod
    def from_bodies(cls, xgrid: PeriodicGrid, bodies: Sequence[ConvexBody]) -> SetValuedFunction:
        grids = {b.grid for b in bodies}
        if len(grids) != 1:
            raise GridMismatchError("all values must share one direction grid")
        return cls(xgrid, bodies[0].grid, np.stack([b.h for b in bodies]))

    @property
    def values(self) -> list[ConvexBody]:
        return [ConvexBody(self.dgrid, row) for row in self.H]

    def __getitem__(self, j: int) -> ConvexBody:
        return ConvexBody(self.dgrid, self.H[j])

    def __len__(self):
        return self.xgrid.N_x

    def validate(self, rtol: float = CONVEXITY_RTOL) -> SetValuedFunction:
        for row in self.H:
            _check_support(self.dgrid, row, rtol)
        return self

    def pointwise_norm(self) -> np.ndarray:
        """``x_j -> ||f(x_j)||``."""
        return np.max(np.abs(self.H), axis=1)

    def plus_ball(self, r: float) -> SetValuedFunction:
        """``x -> f(x) + B_r(0)``."""
        if r < 0:
            raise ValueError("radius must be nonnegative")
        return SetValuedFunction(self.xgrid, self.dgrid, self.H + r)

    def scaled(self, c: float) -> SetValuedFunction:
        H = c * self.H if c >= 0 else -c * self.H[:, self.dgrid.neg]
        return SetValuedFunction(self.xgrid, self.dgrid, H)

    def to_json(self) -> dict:
        return {
            "N_x": self.xgrid.N_x,
            "m": self.dgrid.m,
            "n_xi": self.dgrid.n_xi,
            "h_matrix": self.H.tolist(),
        }

    @classmethod
    def from_json(cls, data: dict) -> SetValuedFunction:
        from .convex_sets import direction_grid

        return cls(PeriodicGrid(data["N_x"]), direction_grid(data["m"], data["n_xi"]), data["h_matrix"])


def _same_grids(f: SetValuedFunction, g: SetValuedFunction) -> None:
    if f.xgrid != g.xgrid or f.dgrid != g.dgrid:
        raise GridMismatchError("set-valued functions live on different grids")


def delta_LAp(f: SetValuedFunction, g: SetValuedFunction, p) -> float:
    """``|| delta(f(.), g(.)) ||_{L_p}`` for ``p`` in ``{1, 2, inf}``."""
    _same_grids(f, g)
    d = np.max(np.abs(f.H - g.H), axis=1)
    return float(lp_norm(d, p))


def zero_function(xgrid: PeriodicGrid, dgrid: DirectionGrid) -> SetValuedFunction:
    return SetValuedFunction(xgrid, dgrid, np.zeros((xgrid.N_x, dgrid.n_xi)))


def constant_function(body: ConvexBody, xgrid: PeriodicGrid) -> SetValuedFunction:
    return SetValuedFunction(xgrid, body.grid, np.tile(body.h, (xgrid.N_x, 1)))


def in_Phi_p(f: SetValuedFunction, p, tol: float = 1e-9) -> bool:
    """Membership in the unit ball ``Phi_p`` of ``L^A_p``."""
    return float(lp_norm(f.pointwise_norm(), p)) <= 1 + tol


def in_F_p(u: ScalarPeriodicFunction, p, tol: float = 1e-9) -> bool:
    return u.norm(p) <= 1 + tol


def scalar_times_point(u, a, xgrid: PeriodicGrid, dgrid: DirectionGrid) -> SetValuedFunction:
    """Build ``x -> {u(x) * a}``.

    ``u`` may be a :class:`ScalarPeriodicFunction` or a sample array.
    """
    vals = u.values if isinstance(u, ScalarPeriodicFunction) else np.asarray(u, dtype=float)
    a = np.atleast_1d(np.asarray(a, dtype=float))
    if a.shape != (dgrid.m,):
        raise ValueError(f"point must have {dgrid.m} coordinates")
    s = dgrid.directions @ a
    half = dgrid.n_xi // 2
    s[dgrid.neg[:half]] = -s[:half]
    return SetValuedFunction(xgrid, dgrid, np.outer(vals, s))


def _band_limited(rng: np.random.Generator, N_x: int, harmonics: int, size=()) -> np.ndarray:
    """Random real trig polynomial of order ``harmonics`` sampled on the grid."""
    x = 2 * np.pi * np.arange(N_x) / N_x
    k = np.arange(1, harmonics + 1)
    decay = 1.0 / k
    a = rng.standard_normal(size + (harmonics,)) * decay
    b = rng.standard_normal(size + (harmonics,)) * decay
    c0 = rng.standard_normal(size + (1,))
    phase = np.outer(k, x)
    return c0 + a @ np.cos(phase) + b @ np.sin(phase)


def random_F_p_sample(p, seed: int, xgrid: PeriodicGrid, harmonics: int | None = None,
                      scale: float = 1.0) -> ScalarPeriodicFunction:
    """Seeded band-limited scalar function with ``||u||_p == scale``."""
    p = parse_p(p)
    rng = np.random.default_rng(seed)
    K = harmonics if harmonics is not None else max(1, min(8, xgrid.N_x // 4))
    u = _band_limited(rng, xgrid.N_x, K)
    return ScalarPeriodicFunction(xgrid, u * (scale / lp_norm(u, p)))


def random_Phi_p_sample(p, seed: int, xgrid: PeriodicGrid, dgrid: DirectionGrid,
                        harmonics: int | None = None, scale: float = 1.0) -> SetValuedFunction:
    """Seeded random element of ``Phi_p`` with ``||f||_{L^A_p} == scale``.

    Values are ``c(x) + r1(x) S1 + r2(x) S2`` with band-limited centre curve
    ``c``, nonnegative band-limited radii ``r1, r2`` and two random convex
    base shapes, so the body changes shape along the period.  Harmonics are
    capped at ``N_x // 4``.
    """
    p = parse_p(p)
    rng = np.random.default_rng(seed)
    cap = max(1, xgrid.N_x // 4)
    K = min(harmonics if harmonics is not None else 6, cap)
    N, m = xgrid.N_x, dgrid.m

    centre = _band_limited(rng, N, K, size=(m,)).T * rng.uniform(0.0, 1.0)
    H = centre @ dgrid.directions.T
    for _ in range(2):
        r = _band_limited(rng, N, K)
        r = r - r.min() + rng.uniform(0.0, 0.5)
        pts = rng.standard_normal((int(rng.integers(1, 7)), m))
        shape = np.max(pts @ dgrid.directions.T, axis=0)
        # shapes need not contain 0; centring keeps the radius scaling meaningful
        shape = shape - dgrid.directions @ pts.mean(axis=0)
        H = H + np.outer(r, shape)
    norm = lp_norm(np.max(np.abs(H), axis=1), p)
    if norm == 0:
        return zero_function(xgrid, dgrid)
    return SetValuedFunction(xgrid, dgrid, H * (scale / norm))


def selection_sampler(f: SetValuedFunction, seed: int, mode: str = "mixed") -> tuple[ScalarPeriodicFunction, ...]:
    """Draw a selection ``psi(x_j) in f(x_j)``, one scalar function per coordinate.

    Parameters
    ----------
    mode : {"extremal", "convex", "mixed"}
        ``extremal`` picks, at every ``x``, the vertex of ``f(x)`` maximising
        a single random direction; ``convex`` takes independent random convex
        combinations of the vertices; ``mixed`` blends the two with a random
        weight.
    """
    rng = np.random.default_rng(seed)
    N, m = f.xgrid.N_x, f.dgrid.m
    if m == 1:
        V = np.stack([f.H[:, 0], -f.H[:, 1]], axis=1)[..., None]  # (N, 2, 1)
    else:
        V = _polygon_vertices(f.dgrid, f.H)  # (N, n_xi, 2)

    def extremal():
        eta = rng.standard_normal(m)
        idx = np.argmax(V @ eta, axis=1)
        return V[np.arange(N), idx]

    def convex():
        w = rng.dirichlet(np.full(V.shape[1], 0.3), size=N)
        return np.einsum("jk,jkm->jm", w, V)

    if mode == "extremal":
        pts = extremal()
    elif mode == "convex":
        pts = convex()
    elif mode == "mixed":
        lam = rng.uniform() ** 2
        pts = (1 - lam) * extremal() + lam * convex()
    else:
        raise ValueError(f"unknown mode {mode!r}")
    return tuple(ScalarPeriodicFunction(f.xgrid, pts[:, i]) for i in range(m))


def selection_residual(f: SetValuedFunction, psi: Sequence[ScalarPeriodicFunction]) -> float:
    """``max_{x, xi} ((psi(x), xi) - h_{f(x)}(xi))``; nonpositive means membership."""
    P = np.stack([c.values for c in psi], axis=1)
    return float(np.max(P @ f.dgrid.directions.T - f.H))
