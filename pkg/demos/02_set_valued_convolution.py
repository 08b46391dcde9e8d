# Aumann integrals and convolutions of set-valued functions.
#
# A set-valued function on [0, 2pi) is a matrix of support values H[x_j, xi_i].
# Convolving with a kernel K that changes sign splits K = K+ - K-; the negative
# part reflects the sets, because c * G = |c| * (-G) for c < 0.
import math

import numpy as np

from svapprox import (
    aumann_integral,
    bernoulli_kernel,
    convexify,
    direction_grid,
    hausdorff,
    selection_sampler,
    set_convolution,
)
from svapprox.set_functions import PeriodicGrid, delta_LAp, random_Phi_p_sample, zero_function

xg = PeriodicGrid(64)
dg = direction_grid(2, 32)

# a random element of the unit ball of L^A_inf: every value is a convex body of size <= 1
f = random_Phi_p_sample(math.inf, seed=1, xgrid=xg, dgrid=dg)
print("max_x ||f(x)|| =", f.pointwise_norm().max())

# The Aumann integral collects the integrals of all selections.  Sampling
# many selections and taking the hull of their integrals approaches it.
I = aumann_integral(f)
pts = np.array([[xg.step * c.values.sum() for c in selection_sampler(f, s)] for s in range(2000)])
H = convexify(pts, dg)
print(f"Aumann integral vs hull of 2000 selection integrals: {hausdorff(I, H):.2e}")

# Convolution with the Bernoulli kernel D_1 (a sawtooth, so it changes sign)
K = bernoulli_kernel(1, M=32)
Kf = set_convolution(K, f)
print("values of D_1 * f are convex:", Kf.validate() is Kf)
print("fft and direct quadrature agree to", np.max(np.abs(Kf.H - set_convolution(K, f, method="direct").H)))

# Young's inequality holds for the sampled norms
g = random_Phi_p_sample(1, seed=2, xgrid=xg, dgrid=dg)
k1 = xg.step * np.abs(K.on_grid(xg.N_x)).sum()
lhs = delta_LAp(set_convolution(K, g), zero_function(xg, dg), 1)
print(f"||D_1 * g||_1 = {lhs:.4f} <= ||D_1||_1 ||g||_1 = {k1:.4f}")
