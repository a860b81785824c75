"""Multivariate Kantorovich-Kotelnikov sampling operators with band-limited
kernels: kernel synthesis of prescribed approximation order, operator
evaluation on grids, and a convergence-rate benchmark harness."""

from .dilation import DilationMatrix, new_dilation
from .kernels import (Averager, BallIndicator, BochnerRiesz, BoxIndicator,
                      Kernel, ShiftedCombo, SincAverager, SincCombo,
                      SincSquared, TrigPolynomial, eval_sinc, plain_sinc)
from .operators import (EvalGrid, TruncationPolicy, generalized_sampling,
                        kantorovich_1d, quasi_projection,
                        fourier_side_projection)
from .quadrature import QuadratureSpec
from .synthesis import (check_strict_compatibility, make_g, moment_defect,
                        moment_table, shifted_combo_averager, solve_Q,
                        solve_T, synthesize_kernel)

__version__ = "0.1.0"
