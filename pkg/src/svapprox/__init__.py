"""Set-valued convolution classes and their trigonometric approximation.

Convex bodies are stored by support functions on a direction grid, set-valued
functions by support-function matrices on a periodic x-grid.  Aumann
convolutions, scalar best approximation in L1/L2/Linf and the theorem
experiment runners are built on top of that representation.
"""

__version__ = "0.1.0"

from .convex_sets import (  # noqa: E402
    ConvexBody,
    DirectionGrid,
    GridMismatchError,
    InvalidBodyError,
    ball,
    contains,
    convexify,
    direction_grid,
    hausdorff,
    hausdorff_grid_bound,
    minkowski_combine,
    set_norm,
    singleton,
)
from .set_functions import (  # noqa: E402
    PeriodicGrid,
    ScalarPeriodicFunction,
    SetValuedFunction,
    delta_LAp,
    in_F_p,
    in_Phi_p,
    random_F_p_sample,
    random_Phi_p_sample,
    selection_sampler,
)
from .aumann import AliasingWarning, ConvolutionPlan, aumann_integral, scalar_convolution, set_convolution  # noqa: E402
from .kernels import (  # noqa: E402
    Kernel,
    KernelSpecError,
    bernoulli_kernel,
    coefficient_kernel,
    convolve_with_sign,
    favard_constant,
    parse_kernel_spec,
    poisson_kernel,
    sign_function,
)
from .trig_approx import (  # noqa: E402
    BestApproxResult,
    TrigPolynomial,
    best_approx,
    best_L1,
    best_L2,
    best_Linf,
    check_Nn_star,
    dual_witness,
)
from .theorems import (  # noqa: E402
    TheoremReport,
    linear_approx_error,
    verify_theorem1,
    verify_theorem2,
    verify_theorem3,
    verify_theorem4,
    verify_theorem5,
)
