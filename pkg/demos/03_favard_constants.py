# Best trigonometric approximation of the Bernoulli kernels.
#
# E(D_r)_{L1} by order-(n-1) trigonometric polynomials equals ||D_r * phi_n||_inf
# = K_r / n^r, phi_n = sgn sin(nx).  The L1 solver is a linear program; its
# answer is certified by checking that the residual changes sign exactly
# where a shifted phi_n does.
import math

from svapprox import bernoulli_kernel, best_L1, convolve_with_sign, favard_constant

print(f"K_1 = {favard_constant(1):.10f}  (pi/2   = {math.pi / 2:.10f})")
print(f"K_2 = {favard_constant(2):.10f}  (pi^2/8 = {math.pi**2 / 8:.10f})")
print()
print(" r  n   E_L1(D_r)      ||D_r*phi_n||   K_r/n^r        certified  theta")
for r in (1, 2):
    K = bernoulli_kernel(r)
    for n in (1, 2, 3, 4):
        res = best_L1(K, n)
        sup = convolve_with_sign(K, n).sup
        c = res.certificate
        print(f" {r}  {n}   {res.error:.10f}   {sup:.10f}    {favard_constant(r) / n**r:.10f}   "
              f"{res.certified!s:9}  {c['theta']:.4f}")

# The r = 1 rows sit about 1.6e-4 below pi/(2n): D_1 is truncated at 4096
# harmonics and its jump is smeared accordingly.  The tail bound says how much.
sc = convolve_with_sign(bernoulli_kernel(1), 1)
print(f"\ntruncation tail bound for D_1: {sc.tail_bound:.2e}")
