"""Convolution kernels given by (truncated) Fourier series.

``K(t) = a0/2 + sum_{k=1}^M a_k cos(kt) + b_k sin(kt)``.  Evaluation always
means the truncated sum; the closed form of a family, when known, is kept
separately as ``exact`` for oracles and truncation diagnostics.
"""

from __future__ import annotations

import ast
import math
import re
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy import optimize, special

from .set_functions import PeriodicGrid, ScalarPeriodicFunction

__all__ = [
    "Kernel",
    "SignConvolution",
    "bernoulli_kernel",
    "poisson_kernel",
    "coefficient_kernel",
    "parse_kernel_spec",
    "sign_function",
    "sign_samples",
    "convolve_with_sign",
    "favard_constant",
    "KernelSpecError",
]


class KernelSpecError(ValueError):
    pass


def _fold(a0: float, a: np.ndarray, b: np.ndarray, N: int) -> np.ndarray:
    """Exact values of the truncated series at ``2*pi*j/N`` via aliasing."""
    F = np.zeros(N, dtype=complex)
    k = np.arange(1, len(a) + 1)
    np.add.at(F, k % N, a - 1j * b)
    return a0 / 2 + N * np.fft.ifft(F).real


@dataclass(frozen=True, eq=False)
class Kernel:
    """Real 2*pi-periodic kernel in Fourier form.

    Attributes
    ----------
    a0 : float
        Constant coefficient; the mean value of ``K`` is ``a0/2``.
    a, b : ndarray, shape (M,)
        ``a[k-1]`` and ``b[k-1]`` multiply ``cos(kt)`` and ``sin(kt)``.
    tag : str
        Human-readable family tag, echoed in reports.
    decay : tuple or None
        ``("power", c, r)`` meaning ``hypot(a_k, b_k) <= c k**-r`` beyond the
        truncation, or ``("geometric", c, rho)`` for ``c rho**k``.  ``None``
        when the series is exact (finite).
    exact : callable or None
        Closed form of the untruncated kernel, if available.
    """

    a0: float
    a: np.ndarray = field(repr=False)
    b: np.ndarray = field(repr=False)
    tag: str = "custom"
    decay: tuple | None = None
    exact: Callable[[np.ndarray], np.ndarray] | None = field(default=None, repr=False)

    def __post_init__(self):
        a = np.asarray(self.a, dtype=float).ravel()
        b = np.asarray(self.b, dtype=float).ravel()
        if a.shape != b.shape:
            raise ValueError("a and b must have equal length")
        if not (np.isfinite(self.a0) and np.all(np.isfinite(a)) and np.all(np.isfinite(b))):
            raise ValueError("kernel coefficients must be finite")
        object.__setattr__(self, "a0", float(self.a0))
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)

    @property
    def M(self) -> int:
        """Truncation order."""
        return len(self.a)

    @property
    def max_harmonic(self) -> int:
        nz = np.nonzero((self.a != 0) | (self.b != 0))[0]
        return int(nz[-1]) + 1 if nz.size else 0

    def __call__(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        flat = x.ravel()
        out = np.full(flat.shape, self.a0 / 2)
        k = np.arange(1, self.M + 1)
        chunk = max(1, 2**22 // max(1, self.M))
        for s in range(0, flat.size, chunk):
            ph = np.outer(flat[s:s + chunk], k)
            out[s:s + chunk] += np.cos(ph) @ self.a + np.sin(ph) @ self.b
        return out.reshape(x.shape)

    def on_grid(self, N: int) -> np.ndarray:
        """Truncated series at ``x_j = 2*pi*j/N``, computed exactly by folding."""
        return _fold(self.a0, self.a, self.b, N)

    def sample(self, xgrid: PeriodicGrid) -> ScalarPeriodicFunction:
        return ScalarPeriodicFunction(xgrid, self.on_grid(xgrid.N_x), self)

    def mean_integral(self) -> float:
        """``int_0^{2pi} K = pi * a0``."""
        return math.pi * self.a0

    def coeff_tail(self, k0: int, extra_power: float = 0.0) -> float:
        """Bound on ``sum_{k > k0} hypot(a_k, b_k) * k**-extra_power``.

        Only meaningful beyond the truncation order; for ``k0 >= M`` it bounds
        what the truncation dropped.
        """
        if self.decay is None:
            return 0.0
        kind, c, s = self.decay
        if kind == "power":
            e = s + extra_power
            if e <= 1:
                return math.inf
            return c * k0 ** (1 - e) / (e - 1)
        if kind == "geometric":
            return c * s ** (k0 + 1) / (1 - s)
        raise ValueError(f"unknown decay kind {kind!r}")

    def shifted(self, t0: float) -> Kernel:
        """``x -> K(x - t0)``."""
        k = np.arange(1, self.M + 1)
        c, s = np.cos(k * t0), np.sin(k * t0)
        ex = self.exact
        return Kernel(self.a0, self.a * c - self.b * s, self.a * s + self.b * c,
                      tag=f"{self.tag}@shift={t0:.12g}", decay=self.decay,
                      exact=None if ex is None else (lambda x: ex(np.mod(x - t0, 2 * np.pi))))

    def __sub__(self, other: Kernel) -> Kernel:
        M = max(self.M, other.M)
        pad = lambda v: np.pad(v, (0, M - len(v)))
        return Kernel(self.a0 - other.a0, pad(self.a) - pad(other.a), pad(self.b) - pad(other.b),
                      tag=f"({self.tag})-({other.tag})", decay=self.decay or other.decay)

    @classmethod
    def from_samples(cls, values, tag: str = "sampled") -> Kernel:
        """Trigonometric interpolant of grid samples (``N`` even or odd)."""
        v = np.asarray(values, dtype=float)
        N = v.size
        c = np.fft.rfft(v)
        a = 2 * c.real[1:] / N
        b = -2 * c.imag[1:] / N
        if N % 2 == 0:
            a[-1] /= 2
            b[-1] = 0.0
        return cls(2 * c.real[0] / N, a, b, tag=tag)

    def spec_string(self) -> str:
        return self.tag

    def to_json(self) -> dict:
        return {"tag": self.tag, "M": self.M, "decay": list(self.decay) if self.decay else None}


def bernoulli_kernel(r: int, M: int | None = None) -> Kernel:
    """``D_r(t) = (1/pi) sum_{k<=M} cos(kt - r*pi/2) / k**r``.

    Default truncation is 4096 for ``r == 1`` (slow ``1/k`` decay) and 512
    otherwise.  The closed form is a scaled Bernoulli polynomial.
    """
    r = int(r)
    if r < 1:
        raise ValueError(f"r must be >= 1, got {r}")
    if M is None:
        M = 4096 if r == 1 else 512
    if M < 16:
        raise ValueError(f"truncation M must be >= 16, got {M}")
    k = np.arange(1, M + 1, dtype=float)
    ca, cb = [(1, 0), (0, 1), (-1, 0), (0, -1)][r % 4]
    mag = 1.0 / (math.pi * k**r)

    poly = _bernoulli_poly(r)
    scale = -(2 * math.pi) ** r / (2 * math.pi * math.factorial(r))

    def exact(t):
        t = np.mod(np.asarray(t, dtype=float), 2 * math.pi)
        val = scale * poly(t / (2 * math.pi))
        if r == 1:
            val = np.where(t == 0, 0.0, val)
        return val

    return Kernel(0.0, ca * mag, cb * mag, tag=f"bernoulli:r={r},M={M}",
                  decay=("power", 1 / math.pi, float(r)), exact=exact)


def _bernoulli_poly(r: int) -> np.polynomial.Polynomial:
    B = special.bernoulli(r)
    coef = np.zeros(r + 1)
    for j in range(r + 1):
        coef[r - j] = special.comb(r, j, exact=True) * B[j]
    return np.polynomial.Polynomial(coef)


def poisson_kernel(rho: float, M: int | None = None) -> Kernel:
    """Poisson kernel ``1/(2pi) + (1/pi) sum rho**k cos(kt)``; integrates to 1."""
    if not 0 < rho < 1:
        raise ValueError(f"rho must lie in (0, 1), got {rho}")
    if M is None:
        M = max(16, math.ceil(math.log(1e-17) / math.log(rho)))
    k = np.arange(1, M + 1, dtype=float)

    def exact(t):
        t = np.asarray(t, dtype=float)
        return (1 - rho**2) / (2 * math.pi * (1 - 2 * rho * np.cos(t) + rho**2))

    return Kernel(1 / math.pi, rho**k / math.pi, np.zeros(M), tag=f"poisson:rho={rho:g},M={M}",
                  decay=("geometric", 1 / math.pi, rho), exact=exact)


def coefficient_kernel(a0: float, ak, bk, tag: str | None = None) -> Kernel:
    ak = np.asarray(ak, dtype=float)
    bk = np.asarray(bk, dtype=float)
    n = max(len(ak), len(bk))
    ak, bk = np.pad(ak, (0, n - len(ak))), np.pad(bk, (0, n - len(bk)))
    if tag is None:
        tag = f"coeffs:a0={a0:g},ak={ak.tolist()},bk={bk.tolist()}"
    return Kernel(a0, ak, bk, tag=tag)


_SHORT = re.compile(r"^\s*(bernoulli|poisson)\s*:\s*([^\s]+)\s*$", re.I)


def parse_kernel_spec(text: str) -> Kernel:
    """Parse a kernel description.

    Accepted forms::

        bernoulli:1            poisson:0.5
        family=bernoulli r=1 M=4096
        family=poisson rho=0.5 M=64
        coeffs a0=0 ak=[0, 1] bk=[1]
    """
    text = text.strip()
    m = _SHORT.match(text)
    if m:
        fam, arg = m.group(1).lower(), m.group(2)
        fields = dict(kv.split("=", 1) for kv in arg.split(",") if "=" in kv)
        first = arg.split(",")[0]
        if "=" not in first:
            fields["r" if fam == "bernoulli" else "rho"] = first
        text = f"family={fam} " + " ".join(f"{k}={v}" for k, v in fields.items())
    try:
        if text.startswith("coeffs"):
            body = text[len("coeffs"):]
            kv = dict(re.findall(r"(a0|ak|bk)\s*=\s*(\[[^\]]*\]|[^\s]+)", body))
            if "a0" not in kv and "ak" not in kv and "bk" not in kv:
                raise KernelSpecError(f"no coefficients in {text!r}")
            a0 = float(kv.get("a0", 0.0))
            ak = ast.literal_eval(kv.get("ak", "[]"))
            bk = ast.literal_eval(kv.get("bk", "[]"))
            return coefficient_kernel(a0, ak, bk)
        toks = text.split()
        bad = [t for t in toks if "=" not in t]
        if bad:
            raise KernelSpecError(f"expected key=value tokens or family:arg, got {bad[0]!r}")
        kv = dict(tok.split("=", 1) for tok in toks)
        if "family" not in kv:
            raise KernelSpecError(f"missing family= in kernel spec {text!r}")
        fam = kv.pop("family").lower()
        M = int(kv.pop("M")) if "M" in kv else None
        if fam == "bernoulli":
            k = bernoulli_kernel(int(kv.pop("r")), M)
        elif fam == "poisson":
            k = poisson_kernel(float(kv.pop("rho")), M)
        else:
            raise KernelSpecError(f"unknown kernel family {fam!r}")
        if kv:
            raise KernelSpecError(f"unexpected kernel parameters {sorted(kv)}")
        return k
    except KernelSpecError:
        raise
    except (KeyError, ValueError, SyntaxError) as exc:
        raise KernelSpecError(f"cannot parse kernel spec {text!r}: {exc}") from exc


def sign_function(n: int) -> Callable[[np.ndarray], np.ndarray]:
    """``phi_n(x) = sgn sin(nx)``, exactly zero at the jumps."""
    if n < 1:
        raise ValueError("n must be >= 1")

    def phi(x):
        u = np.mod(n * np.asarray(x, dtype=float) / math.pi, 2.0)
        near = np.minimum(np.abs(u), np.abs(u - 2.0)) < 1e-12
        near |= np.abs(u - 1.0) < 1e-12
        return np.where(near, 0.0, np.where(u < 1.0, 1.0, -1.0))

    return phi


def sign_samples(n: int, xgrid: PeriodicGrid) -> ScalarPeriodicFunction:
    """``phi_n`` on the grid using integer arithmetic (zeros land exactly)."""
    N = xgrid.N_x
    s = (2 * n * np.arange(N)) % (2 * N)
    vals = np.where((s == 0) | (s == N), 0.0, np.where(s < N, 1.0, -1.0))
    return ScalarPeriodicFunction(xgrid, vals, sign_function(n))


@dataclass(frozen=True)
class SignConvolution:
    """``K * phi_n`` in Fourier form together with its sup norm."""

    n: int
    function: Kernel
    sup: float
    argmax: float
    tail_bound: float

    def __call__(self, x):
        return self.function(x)

    def sample(self, xgrid: PeriodicGrid) -> ScalarPeriodicFunction:
        return self.function.sample(xgrid)


def convolve_with_sign(K: Kernel, n: int, n_fine: int | None = None) -> SignConvolution:
    """Exact term-wise ``(K * phi_n)(x) = int K(t) phi_n(x - t) dt``.

    ``phi_n`` has sine harmonics ``jn`` (``j`` odd) with weight ``4/(pi j)``,
    and convolving ``cos(mt)``/``sin(mt)`` against ``sin(m(x-t))`` gives
    ``pi sin(mx)`` / ``-pi cos(mx)``.  Hence

        K * phi_n = sum_{j odd} (4/j) (a_{jn} sin(jnx) - b_{jn} cos(jnx)).

    The sup norm is taken on a fine grid and polished by a bounded scalar
    search; ``tail_bound`` bounds the contribution of harmonics beyond the
    kernel's truncation.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    M = K.M
    j = np.arange(1, M // n + 1)
    j = j[j % 2 == 1]
    m = j * n
    a_new = np.zeros(M)
    b_new = np.zeros(M)
    a_new[m - 1] = -(4.0 / j) * K.b[m - 1]
    b_new[m - 1] = (4.0 / j) * K.a[m - 1]
    F = Kernel(0.0, a_new, b_new, tag=f"{K.tag}*phi_{n}")

    if n_fine is None:
        n_fine = 1 << max(12, int(math.ceil(math.log2(16 * max(F.max_harmonic, 1)))))
    vals = np.abs(F.on_grid(n_fine))
    i = int(np.argmax(vals))
    h = 2 * math.pi / n_fine
    x0 = i * h
    res = optimize.minimize_scalar(lambda x: -abs(float(F(np.array([x]))[0])),
                                   bounds=(x0 - h, x0 + h), method="bounded",
                                   options={"xatol": 1e-12})
    sup, arg = vals[i], x0
    if -res.fun > sup:
        sup, arg = -res.fun, float(res.x) % (2 * math.pi)

    # terms with jn > M: |4/j * coeff_{jn}| <= 4 c (jn)^-r / j
    tail = 0.0
    if K.decay is not None:
        J = M // n
        kind, c, s = K.decay
        if kind == "power":
            tail = 4 * c * n ** (-s) * J ** (-s) / s
        else:
            tail = 4 * c * s ** ((J + 1) * n) / (1 - s**n)
    return SignConvolution(n, F, float(sup), float(arg), float(tail))


def favard_constant(r: int) -> float:
    """``K_r = (4/pi) sum_{j>=0} (-1)^{j(r+1)} / (2j+1)^{r+1}``."""
    s = r + 1
    if s % 2 == 0:
        # non-alternating: (1 - 2^-s) zeta(s)
        return 4 / math.pi * (1 - 2.0**-s) * float(special.zeta(s))
    # alternating Dirichlet beta(s); pairwise summation converges like j^-(s+1)
    j = np.arange(0, 200000, dtype=float)
    terms = (-1.0) ** j / (2 * j + 1) ** s
    return 4 / math.pi * float(np.sum(terms[::-1]))
