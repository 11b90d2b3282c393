"""l1cert: certification of exact sparse l1-recovery for sensing matrices.

Computes efficiently verifiable lower and upper bounds on the largest
sparsity level a sensing matrix recovers exactly by l1-minimization,
error bounds for imperfect recovery, seeded matrix generators, and an
exact brute-force oracle for validation at desk scale.
"""

from .bounds import (CorrectorMatrix, GammaPair, GoodnessCertificate,
                     beta_sufficient_for_alpha, compute_alpha1,
                     compute_alphas, convert_gamma, improved_s_from_corrector,
                     performance_limit, s_bound_alphas, s_bound_mu)
from .core import (ObservationNorm, PsVertex, SensingMatrix, SparseSignal,
                   argmax_over_Ps, hard_threshold, load_matrix,
                   mutual_incoherence, norm_s1, save_matrix)
from .errors import (ArgumentError, L1CertError, ResourceLimitError,
                     SolverFailure, UnsupportedConfigError)
from .generators import Family, GenSpec, generate
from .lower import (KernelWitness, SCAConfig, UpperBoundResult,
                    max_kernel_correlation, sca_lower_bound, s_upper_bound)
from .lp import LinearProgram, LPSolution, LPStatus, solve_lp
from .oracle import (empirical_goodness, gammahat_exact,
                     gammahat_exact_kernel_grid, s_star_exact,
                     submatrix_kernel_check)
from .recovery import (ErrorBoundInputs, InfeasibleRecoveryError,
                       RecoveryProblem, RecoveryReport,
                       ScalingResult, beta_sufficient_for_gamma, l1_recover,
                       noiseless_error_bound, noisy_error_bound,
                       re_implied_bounds, rip_implied_bounds,
                       simulate_suboptimal_recovery,
                       weighted_scaling_feasibility,
                       weighted_scaling_optimize)

__version__ = "0.1.0"
