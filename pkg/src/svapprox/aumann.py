"""Aumann integrals and set-valued convolutions via support functions.

For a kernel value ``c`` and a convex body ``G``, ``h_{cG}(xi)`` is
``c h_G(xi)`` when ``c >= 0`` and ``|c| h_G(-xi)`` otherwise.  Splitting the
kernel as ``K = K+ - K-`` therefore turns the Aumann convolution into two
ordinary circular convolutions per direction::

    h_{(K*g)(x)}(xi) = int K+(x-t) h_{g(t)}(xi) + K-(x-t) h_{g(t)}(-xi) dt
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from .convex_sets import ConvexBody
from .set_functions import PeriodicGrid, ScalarPeriodicFunction, SetValuedFunction

__all__ = [
    "AliasingWarning",
    "ConvolutionPlan",
    "aumann_integral",
    "set_convolution",
    "scalar_convolution",
    "kernel_samples",
]


class AliasingWarning(UserWarning):
    """A kernel carries harmonics the x-grid cannot resolve."""


def kernel_samples(K, xgrid: PeriodicGrid, warn: bool = True) -> np.ndarray:
    """Samples of a kernel on ``xgrid``.

    ``K`` may be a :class:`~svapprox.kernels.Kernel`, a
    :class:`~svapprox.trig_approx.TrigPolynomial`, a
    :class:`ScalarPeriodicFunction` or a plain sample array.
    """
    if isinstance(K, ScalarPeriodicFunction):
        if K.xgrid != xgrid:
            raise ValueError("kernel samples live on a different grid")
        return K.values
    if isinstance(K, np.ndarray):
        if K.shape != (xgrid.N_x,):
            raise ValueError(f"expected {xgrid.N_x} kernel samples")
        return K
    if hasattr(K, "as_kernel"):
        K = K.as_kernel()
    if warn and K.max_harmonic > xgrid.N_x // 2:
        warnings.warn(
            f"kernel {K.tag} has harmonics up to {K.max_harmonic} > N_x/2 = {xgrid.N_x // 2}",
            AliasingWarning,
            stacklevel=3,
        )
    return K.on_grid(xgrid.N_x)


@dataclass(frozen=True, eq=False)
class ConvolutionPlan:
    """Sign-split kernel samples with cached spectra."""

    xgrid: PeriodicGrid
    k_plus: np.ndarray = field(repr=False)
    k_minus: np.ndarray = field(repr=False)
    spec_plus: np.ndarray = field(repr=False)
    spec_minus: np.ndarray = field(repr=False)

    @classmethod
    def build(cls, K, xgrid: PeriodicGrid, warn: bool = True) -> ConvolutionPlan:
        k = kernel_samples(K, xgrid, warn=warn)
        kp = np.maximum(k, 0.0)
        km = np.maximum(-k, 0.0)
        return cls(xgrid, kp, km, np.fft.rfft(kp), np.fft.rfft(km))

    @property
    def samples(self) -> np.ndarray:
        return self.k_plus - self.k_minus


def _circ_fft(spec: np.ndarray, V: np.ndarray, N: int) -> np.ndarray:
    return np.fft.irfft(spec[:, None] * np.fft.rfft(V, axis=0), n=N, axis=0)


def _circ_direct(k: np.ndarray, V: np.ndarray) -> np.ndarray:
    N = k.size
    idx = (np.arange(N)[:, None] - np.arange(N)[None, :]) % N
    return k[idx] @ V


def aumann_integral(f: SetValuedFunction) -> ConvexBody:
    """``int_0^{2pi} f(t) dt`` as a convex body (trapezoid rule per direction)."""
    return ConvexBody(f.dgrid, f.xgrid.step * np.sum(f.H, axis=0))


def set_convolution(K, g: SetValuedFunction, method: str = "fft",
                    plan: ConvolutionPlan | None = None) -> SetValuedFunction:
    """Aumann convolution ``x -> int K(x - t) g(t) dt``.

    Parameters
    ----------
    K : Kernel, TrigPolynomial, ScalarPeriodicFunction or ndarray
        Sampled on ``g``'s grid unless ``plan`` is given.
    method : {"fft", "direct"}
        Spectral circular convolution or the O(N_x**2) quadrature sum; both
        evaluate the same discrete sum.
    """
    if plan is None:
        plan = ConvolutionPlan.build(K, g.xgrid)
    elif plan.xgrid != g.xgrid:
        raise ValueError("plan was built for a different grid")
    N = g.xgrid.N_x
    H, Hneg = g.H, g.H[:, g.dgrid.neg]
    if method == "fft":
        out = _circ_fft(plan.spec_plus, H, N) + _circ_fft(plan.spec_minus, Hneg, N)
    elif method == "direct":
        out = _circ_direct(plan.k_plus, H) + _circ_direct(plan.k_minus, Hneg)
    else:
        raise ValueError(f"unknown method {method!r}")
    return SetValuedFunction(g.xgrid, g.dgrid, g.xgrid.step * out)


def scalar_convolution(K, u: ScalarPeriodicFunction, method: str = "fft") -> ScalarPeriodicFunction:
    """``(K*u)(x) = int K(t) u(x - t) dt`` on ``u``'s grid."""
    xgrid = u.xgrid
    k = kernel_samples(K, xgrid)
    N = xgrid.N_x
    if method == "fft":
        out = np.fft.irfft(np.fft.rfft(k) * np.fft.rfft(u.values), n=N)
    elif method == "direct":
        out = _circ_direct(k, u.values[:, None])[:, 0]
    else:
        raise ValueError(f"unknown method {method!r}")
    return ScalarPeriodicFunction(xgrid, xgrid.step * out)
