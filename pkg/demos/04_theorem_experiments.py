# Approximating the class K * Phi_p of set-valued convolutions.
#
# Each runner builds the extremal objects and returns a report with both
# sides of the relation, the tolerance budget and a verdict.
import json
import math

from svapprox import bernoulli_kernel, poisson_kernel
from svapprox.theorems import GridConfig, verify_theorem1, verify_theorem2, verify_theorem4, verify_theorem5

D1 = bernoulli_kernel(1)
small = GridConfig(N_x=256, m=2, n_xi=32)

# Linear methods g -> T * g with the best L1 polynomial T never do worse than E(K)_{L1}
rep = verify_theorem1(D1, 2, math.inf, samples=50, grid=small)
print("linear-method bound:", rep.verdict, f"max error / E = {rep.values['max_ratio']:.4f}")

# ... and for p = inf nothing does better: the extremal f = (D_1 * phi_n){a}
rep = verify_theorem2(D1, 1, math.inf, sweep=50)
v = rep.values
print(f"equality: upper {v['upper_E_L1']:.6f}  lower {v['lower']:.6f}  gap {v['gap']:.1e}  -> {rep.verdict}")

# best linear method, found by searching T against dual witnesses
rep = verify_theorem4(bernoulli_kernel(2), 2, 2)
print(f"linear widths: U = {rep.values['U_computed']:.6f}  E = {rep.values['E']:.6f}  -> {rep.verdict}")

# one-sided approximation by T * g + B_e costs at most a factor 2
rep = verify_theorem5(poisson_kernel(0.5), 2, 1, samples=50, grid=small)
v = rep.values
print(f"one-sided: worst error / E = {v['ratio_to_E']:.4f}, containment margin = {v['min_containment_margin']:.1e}")

# reports are plain JSON
print(json.dumps(rep.to_json(), sort_keys=True)[:160], "...")
