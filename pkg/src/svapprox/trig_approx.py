"""Best approximation by trigonometric polynomials of order ``n - 1``.

Solvers work on a uniform grid of the period:

* ``best_L2`` -- Fourier projection (exact for :class:`Kernel` input).
* ``best_Linf`` -- Remez exchange on the circle with ``2n`` reference points.
* ``best_L1`` -- discretised L1 fit as a linear program (HiGHS), with an
  iteratively reweighted least-squares fallback, followed by a search for a
  phase ``theta`` certifying the sign condition
  ``(K - T)(x) * sgn sin(n(x - theta)) >= 0``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import optimize

from .kernels import Kernel, convolve_with_sign, sign_function
from .set_functions import PeriodicGrid, ScalarPeriodicFunction, lp_norm, parse_p

__all__ = [
    "TrigPolynomial",
    "BestApproxResult",
    "trig_basis",
    "best_L2",
    "best_Linf",
    "best_L1",
    "best_approx",
    "check_Nn_star",
    "find_Nn_star_phase",
    "dual_witness",
]


def trig_basis(x: np.ndarray, n: int) -> np.ndarray:
    """Columns ``1/2, cos x, ..., cos (n-1)x, sin x, ..., sin (n-1)x``."""
    x = np.asarray(x, dtype=float)
    k = np.arange(1, n)
    ph = np.outer(x, k)
    return np.column_stack([np.full(x.shape, 0.5), np.cos(ph), np.sin(ph)])


@dataclass(frozen=True, eq=False)
class TrigPolynomial:
    """Element of ``H^T_{2n-1}``: ``a0/2 + sum_{k<n} a_k cos kx + b_k sin kx``."""

    n: int
    a0: float
    a: np.ndarray = field(repr=False)
    b: np.ndarray = field(repr=False)

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("n must be >= 1")
        a = np.asarray(self.a, dtype=float).ravel()
        b = np.asarray(self.b, dtype=float).ravel()
        if a.shape != (self.n - 1,) or b.shape != (self.n - 1,):
            raise ValueError(f"need {self.n - 1} cosine and sine coefficients")
        object.__setattr__(self, "a0", float(self.a0))
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)

    @classmethod
    def zero(cls, n: int) -> TrigPolynomial:
        return cls(n, 0.0, np.zeros(n - 1), np.zeros(n - 1))

    @classmethod
    def from_vector(cls, n: int, c) -> TrigPolynomial:
        c = np.asarray(c, dtype=float)
        if c.shape != (2 * n - 1,):
            raise ValueError(f"expected {2 * n - 1} coefficients")
        return cls(n, c[0], c[1:n], c[n:])

    def vector(self) -> np.ndarray:
        return np.concatenate([[self.a0], self.a, self.b])

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        return (trig_basis(x.ravel(), self.n) @ self.vector()).reshape(x.shape)

    def on_grid(self, N: int) -> np.ndarray:
        return self(2 * np.pi * np.arange(N) / N)

    def as_kernel(self) -> Kernel:
        return Kernel(self.a0, self.a, self.b, tag=f"trig(n={self.n})")

    def to_json(self) -> dict:
        return {"n": self.n, "a0": self.a0, "a": self.a.tolist(), "b": self.b.tolist()}


@dataclass
class BestApproxResult:
    """Output of a best-approximation solve."""

    polynomial: TrigPolynomial
    error: float
    norm: str
    certified: bool
    certificate: dict = field(default_factory=dict)
    diagnostics: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {
            "norm": self.norm,
            "error": self.error,
            "certified": self.certified,
            "polynomial": self.polynomial.to_json(),
            "certificate": _jsonable(self.certificate),
            "diagnostics": _jsonable(self.diagnostics),
        }


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return v if math.isfinite(v) else str(v)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj


def _default_N(K) -> int:
    if isinstance(K, Kernel):
        return 1 << max(12, int(math.ceil(math.log2(2 * max(K.max_harmonic, 1) + 2))))
    return 4096


def _target(K, N: int | None) -> tuple[np.ndarray, int]:
    """Samples of the function to approximate, and the grid size used."""
    if isinstance(K, TrigPolynomial):
        K = K.as_kernel()
    if isinstance(K, Kernel):
        N = N or _default_N(K)
        return K.on_grid(N), N
    if isinstance(K, ScalarPeriodicFunction):
        if N is not None and N != K.xgrid.N_x:
            if K.func is None:
                raise ValueError("sampled function cannot be resampled without a closed form")
            return np.asarray(K.func(PeriodicGrid(N).x), dtype=float), N
        return K.values, K.xgrid.N_x
    v = np.asarray(K, dtype=float)
    return v, v.size


# --------------------------------------------------------------------------- L2


def best_L2(K, n: int, N: int | None = None) -> BestApproxResult:
    """Orthogonal projection onto ``H^T_{2n-1}``.

    For a :class:`Kernel` the projection is the truncated series and
    ``error**2 = pi * sum_{k>=n} (a_k**2 + b_k**2)``; the neglected tail
    beyond the kernel's own truncation is reported in the diagnostics.
    For sampled input the discrete projection on the sample grid is used.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if isinstance(K, TrigPolynomial):
        K = K.as_kernel()
    diag = {}
    if isinstance(K, Kernel):
        m = min(n - 1, K.M)
        a = np.zeros(n - 1)
        b = np.zeros(n - 1)
        a[:m], b[:m] = K.a[:m], K.b[:m]
        T = TrigPolynomial(n, K.a0, a, b)
        err2 = math.pi * float(np.sum(K.a[n - 1:] ** 2 + K.b[n - 1:] ** 2))
        err = math.sqrt(err2)
        if K.decay is not None:
            kind, c, s = K.decay
            k0 = max(K.M, n - 1)
            tail = (c * c * k0 ** (1 - 2 * s) / (2 * s - 1)) if kind == "power" else c * c * s ** (2 * k0 + 2) / (1 - s * s)
            diag["truncation_tail_sq"] = math.pi * tail
        Nc = 1 << int(math.ceil(math.log2(2 * max(K.M, n) + 2)))
        y = K.on_grid(Nc)
    else:
        y, Nc = _target(K, N)
        if n - 1 >= Nc // 2:
            raise ValueError("polynomial order too high for the sample grid")
        c = np.fft.rfft(y) / Nc
        a = 2 * c.real[1:n]
        b = -2 * c.imag[1:n]
        T = TrigPolynomial(n, 2 * c.real[0], a, b)
        err = float(lp_norm(y - T.on_grid(Nc), 2))
    r = y - T.on_grid(Nc)
    x = 2 * np.pi * np.arange(Nc) / Nc
    B = trig_basis(x, n)
    ortho = np.abs((2 * np.pi / Nc) * (B.T @ r)) if n > 0 else np.zeros(0)
    scale = max(1.0, float(np.max(np.abs(y))))
    cert = {"orthogonality_residual": float(np.max(ortho)), "grid": Nc}
    return BestApproxResult(T, err, "l2", bool(np.max(ortho) <= 1e-10 * scale), cert, diag)


# ------------------------------------------------------------------------- Linf


def _circular_runs(r: np.ndarray) -> list[np.ndarray]:
    """Index arrays of maximal same-sign runs of ``r`` around the circle."""
    s = np.where(r >= 0, 1, -1)
    changes = np.nonzero(s != np.roll(s, 1))[0]
    if changes.size == 0:
        return [np.arange(r.size)]
    start = changes[0]
    order = np.roll(np.arange(r.size), -start)
    ss = s[order]
    cuts = np.nonzero(ss[1:] != ss[:-1])[0] + 1
    return np.split(order, cuts)


def _alternating_peaks(r: np.ndarray) -> np.ndarray:
    runs = _circular_runs(r)
    return np.array([run[np.argmax(np.abs(r[run]))] for run in runs])


def _reduce_reference(peaks: np.ndarray, r: np.ndarray, size: int) -> np.ndarray:
    """Drop peaks in pairs, keeping circular alternation, until ``size`` remain."""
    peaks = list(peaks)
    while len(peaks) > size:
        i = int(np.argmin(np.abs(r[peaks])))
        L = len(peaks)
        left, right = (i - 1) % L, (i + 1) % L
        # removing i makes its neighbours adjacent with equal sign; keep the larger
        drop = left if abs(r[peaks[left]]) < abs(r[peaks[right]]) else right
        for j in sorted({i, drop}, reverse=True):
            peaks.pop(j)
    return np.array(sorted(peaks))


def _alternation_count(r: np.ndarray, rel: float) -> int:
    peaks = _alternating_peaks(r)
    emax = np.max(np.abs(r))
    big = peaks[np.abs(r[peaks]) >= (1 - rel) * emax]
    if big.size < 2:
        return int(big.size)
    s = np.sign(r[np.sort(big)])
    return int(np.sum(s != np.roll(s, 1)))


def best_Linf(K, n: int, N: int | None = None, tol: float = 1e-10, max_iter: int = 100) -> BestApproxResult:
    """Uniform best approximation by Remez exchange on a grid of the circle.

    The reference holds ``2n`` points (one more than ``dim H``).  Each step
    solves ``T(x_i) + (-1)^i E = K(x_i)`` on the reference, then replaces the
    reference by the largest alternating peaks of the new residual.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    y, N = _target(K, N)
    if N < 2 * n + 2:
        raise ValueError("grid too coarse for this order")
    x = 2 * np.pi * np.arange(N) / N
    B = trig_basis(x, n)
    scale = max(1.0, float(np.max(np.abs(y))))

    c0 = np.linalg.lstsq(B, y, rcond=None)[0]
    r = y - B @ c0
    if np.max(np.abs(r)) <= 1e-13 * scale:
        T = TrigPolynomial.from_vector(n, c0)
        return BestApproxResult(T, float(np.max(np.abs(r))), "linf", True,
                                {"alternation_count": math.inf, "levelled_error": 0.0, "grid": N},
                                {"iterations": 0})
    istar = int(np.argmax(np.abs(r)))
    ref = np.sort((istar + np.round(np.arange(2 * n) * N / (2 * n)).astype(int)) % N)

    c, E, it, converged = c0, 0.0, 0, False
    for it in range(1, max_iter + 1):
        A = np.column_stack([B[ref], (-1.0) ** np.arange(2 * n)])
        sol = np.linalg.lstsq(A, y[ref], rcond=None)[0]
        c, E = sol[:-1], abs(sol[-1])
        r = y - B @ c
        emax = float(np.max(np.abs(r)))
        if emax - E <= tol * max(emax, 1e-300) or emax <= 1e-13 * scale:
            converged = True
            break
        peaks = _alternating_peaks(r)
        if peaks.size < 2 * n:
            # too few sign changes for a full reference: pad with the global max
            extra = np.setdiff1d(np.argsort(-np.abs(r))[: 2 * n], peaks)
            peaks = np.sort(np.concatenate([peaks, extra]))[: 2 * n]
            ref = np.sort(peaks)
        else:
            ref = _reduce_reference(peaks, r, 2 * n)
    T = TrigPolynomial.from_vector(n, c)
    emax = float(np.max(np.abs(r)))
    alt = _alternation_count(r, max(1e3 * tol, 1e-9))
    ref_vals = r[ref]
    cert = {
        "alternant_points": x[ref],
        "alternant_values": ref_vals,
        "levelled_error": E,
        "alternation_count": alt,
        "grid": N,
    }
    certified = converged and alt >= 2 * n
    return BestApproxResult(T, emax, "linf", certified, cert, {"iterations": it, "converged": converged})


# --------------------------------------------------------------------------- L1


def _l1_lp(B: np.ndarray, y: np.ndarray) -> np.ndarray | None:
    """Solve ``min_c sum |y - B c|`` through its dual.

    The dual ``max y.s  s.t.  B^T s = 0, |s| <= 1`` has only ``dim H``
    equality rows; the primal coefficients are the equality multipliers.
    """
    res = optimize.linprog(-y, A_eq=B.T, b_eq=np.zeros(B.shape[1]), bounds=(-1, 1), method="highs")
    if not res.success:
        return None
    lam = res.eqlin.marginals
    # the multiplier sign convention is solver-specific; take the better one
    c1, c2 = lam, -lam
    return c1 if np.sum(np.abs(y - B @ c1)) <= np.sum(np.abs(y - B @ c2)) else c2


def _l1_irls(B: np.ndarray, y: np.ndarray, iters: int = 60) -> np.ndarray:
    c = np.linalg.lstsq(B, y, rcond=None)[0]
    scale = max(1.0, float(np.max(np.abs(y))))
    for eps in np.geomspace(1e-2, 1e-8, 7) * scale:
        for _ in range(iters // 6 + 1):
            w = 1.0 / np.sqrt((y - B @ c) ** 2 + eps**2)
            sw = np.sqrt(w)
            c = np.linalg.lstsq(B * sw[:, None], y * sw, rcond=None)[0]
    return c


def _sign_score(r: np.ndarray, x: np.ndarray, n: int, thetas: np.ndarray, excl: float) -> np.ndarray:
    """``min (r * phi_n(x - theta)) / max|r|`` over non-excluded points, per theta."""
    per = math.pi / n
    rmax = max(float(np.max(np.abs(r))), 1e-300)
    out = np.empty(thetas.size)
    for i, th in enumerate(thetas):
        d = np.mod(x - th, per)
        keep = np.minimum(d, per - d) >= excl
        s = np.where(np.mod(x - th, 2 * per) < per, 1.0, -1.0)
        out[i] = np.min(r[keep] * s[keep]) / rmax if np.any(keep) else 0.0
    return out


def find_Nn_star_phase(r: np.ndarray, n: int, n_theta: int = 256,
                       excl: float | None = None) -> tuple[float, int, float]:
    """Search ``theta in [0, pi/n]`` and an orientation ``sign in {+1, -1}``
    maximising agreement of ``sign * r`` with ``sgn sin(n(x - theta))``.

    Shifting ``theta`` by ``pi/n`` negates the square wave, so the pair
    ``(theta, sign)`` covers every phase in ``[0, 2pi/n)``.

    Returns ``(theta, sign, score)``; ``score >= 0`` means no violation
    outside the jump neighbourhoods.
    """
    N = r.size
    x = 2 * np.pi * np.arange(N) / N
    excl = 2 * np.pi / N if excl is None else excl
    thetas = np.linspace(0.0, math.pi / n, n_theta)
    h = thetas[1] - thetas[0]
    best = (0.0, 1, -math.inf)
    for sign in (1, -1):
        scores = _sign_score(sign * r, x, n, thetas, excl)
        i = int(np.argmax(scores))
        th, sc = float(thetas[i]), float(scores[i])
        # shifting theta by pi/n flips the sign pattern, so never wrap
        lo, hi = max(0.0, th - h), min(math.pi / n, th + h)
        res = optimize.minimize_scalar(lambda t: -_sign_score(sign * r, x, n, np.array([t]), excl)[0],
                                       bounds=(lo, hi), method="bounded", options={"xatol": 1e-10})
        if -res.fun > sc:
            th, sc = float(res.x), float(-res.fun)
        if sc > best[2]:
            best = (th, sign, sc)
    return best


def _node_exclusion(K, N: int) -> float:
    w = 2 * np.pi / N
    if isinstance(K, Kernel) and K.max_harmonic > 0:
        w = max(w, 2 * np.pi / K.max_harmonic)
    return w


def check_Nn_star(K, T: TrigPolynomial, theta: float, tol: float = 1e-9, N: int | None = None,
                  n: int | None = None, excl: float | None = None, sign: int = 1) -> tuple[bool, dict]:
    """Check ``sign * (K - T)(x) sgn sin(n(x - theta)) >= -tol * ||K - T||_inf``.

    ``sign = -1`` stands for the phase ``theta + pi/n``.

    Points within ``excl`` of a zero of ``sin(n(x - theta))`` are skipped.
    The default is one grid step, widened to the shortest wavelength
    ``2*pi/M`` for a series kernel of order ``M``: a truncated series cannot
    place its sign changes more accurately than that.  Returns ``(ok, report)`` where the
    report lists the worst violating points.
    """
    n = T.n if n is None else n
    if not 0 <= theta <= math.pi / n + 1e-12:
        raise ValueError(f"theta must lie in [0, pi/n], got {theta}")
    y, N = _target(K, N)
    x = 2 * np.pi * np.arange(N) / N
    r = y - T.on_grid(N)
    rmax = float(np.max(np.abs(r)))
    excl = _node_exclusion(K, N) if excl is None else excl
    per = math.pi / n
    d = np.mod(x - theta, per)
    keep = np.minimum(d, per - d) >= excl
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    prod = sign * r * sign_function(n)(x - theta)
    bad = keep & (prod < -tol * rmax)
    order = np.argsort(prod[bad])[:10]
    worst = [(float(x[bad][i]), float(prod[bad][i])) for i in order]
    report = {
        "theta": theta,
        "sign": sign,
        "n": n,
        "violations": int(np.sum(bad)),
        "worst": worst,
        "min_product": float(np.min(prod[keep])) if np.any(keep) else 0.0,
        "residual_sup": rmax,
        "excluded_points": int(np.sum(~keep)),
        "grid": N,
    }
    return not np.any(bad), report


def best_L1(K, n: int, N: int | None = None, tol: float = 1e-9, n_theta: int = 256) -> BestApproxResult:
    """Best ``L_1`` approximation on a grid, with a sign-condition certificate.

    The LP is solved on an ``N``-point grid (default 8192 for kernels).  For
    sampled input ``error`` is the trapezoid ``L_1`` norm of the residual on
    that grid.  For :class:`Kernel` input ``error`` is the same norm on a
    much finer grid (the solver-grid value is kept as
    ``diagnostics["grid_error"]``), and the certificate records the duality
    bracket ``|(K*phi_n)(theta)| <= E <= error`` together with
    ``||K*phi_n||_inf``.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if isinstance(K, Kernel) and N is None:
        N = min(_default_N(K), 8192)
    y, N = _target(K, N)
    x = 2 * np.pi * np.arange(N) / N
    B = trig_basis(x, n)
    scale = max(1.0, float(np.max(np.abs(y))))
    c = _l1_lp(B, y)
    solver = "highs-lp"
    if c is None:
        c = _l1_irls(B, y)
        solver = "irls"
    T = TrigPolynomial.from_vector(n, c)
    r = y - B @ c
    err = float(lp_norm(r, 1))
    diag = {"solver": solver, "grid": N, "grid_error": err}
    if isinstance(K, Kernel):
        Nf = min(1 << 17, 1 << int(math.ceil(math.log2(16 * max(K.max_harmonic, N)))))
        err = float(lp_norm(K.on_grid(Nf) - T.on_grid(Nf), 1))
        diag["fine_grid"] = Nf
    if np.max(np.abs(r)) <= 1e-12 * scale:
        cert = {"theta": 0.0, "sign": 1, "sign_check": {"violations": 0}, "residual_zero": True}
        return BestApproxResult(T, err, "l1", True, cert, diag)

    excl = _node_exclusion(K, N)
    theta, sign, score = find_Nn_star_phase(r, n, n_theta, excl)
    ok, report = check_Nn_star(y, T, theta, tol=tol, n=n, sign=sign, excl=excl)
    cert = {"theta": theta, "sign": sign, "sign_score": score, "sign_check": report}
    if isinstance(K, Kernel):
        sc = convolve_with_sign(K, n)
        cert["dual_lower_bound"] = abs(float(sc(np.array([theta]))[0]))
        cert["sign_convolution_sup"] = sc.sup
        cert["sign_convolution_tail"] = sc.tail_bound
    return BestApproxResult(T, err, "l1", bool(ok), cert, diag)


def best_approx(K, n: int, q, N: int | None = None) -> BestApproxResult:
    """Dispatch on the norm index ``q`` in ``{1, 2, inf}``."""
    q = parse_p(q)
    if q == 1:
        return best_L1(K, n, N)
    if q == 2:
        return best_L2(K, n, N)
    return best_Linf(K, n, N)


# ---------------------------------------------------------------- dual witness


def dual_witness(K, T: TrigPolynomial, q, x0: float, xgrid: PeriodicGrid) -> ScalarPeriodicFunction:
    """Hölder-extremal ``g`` in the unit ball of ``L_p`` (``1/p + 1/q = 1``).

    ``g`` maximises ``((K - T) * g)(x0)``, which then equals
    ``||K - T||_{L_q}`` on the grid.  ``x0`` is snapped to the nearest grid
    point.

    * ``q = 1``: ``g(t) = sgn r(x0 - t)``
    * ``q = 2``: ``g(t) = r(x0 - t) / ||r||_2``
    * ``q = inf``: a unit-mass spike where ``|r(x0 - t)|`` peaks
    """
    from .aumann import kernel_samples

    q = parse_p(q)
    N = xgrid.N_x
    k = kernel_samples(K, xgrid, warn=False)
    r = k - T.on_grid(N)
    i0 = int(round(x0 / xgrid.step)) % N
    j = np.arange(N)
    rr = r[(i0 - j) % N]  # r(x0 - t_j)
    if q == 1:
        g = np.sign(rr)
    elif q == 2:
        nr = float(lp_norm(r, 2))
        g = rr / nr if nr > 0 else np.zeros(N)
    else:
        g = np.zeros(N)
        jm = int(np.argmax(np.abs(rr)))
        g[jm] = np.sign(rr[jm]) / xgrid.step
    return ScalarPeriodicFunction(xgrid, g)
