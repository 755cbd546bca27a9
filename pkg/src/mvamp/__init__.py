"""Joint community estimation from sparse networks and high-dimensional
covariates: a two-orbit iterative estimator, its scalar state-evolution
theory (fixed points, detection threshold, MMSE and mutual-information
limits), and a Monte-Carlo harness comparing the two.
"""

from .amp import (AmpRun, AmpState, DenoiserParams, amp_step, denoise_f, denoise_g,
                  init_spectral, init_zero, onsager_coeffs, run_amp, solve_a0,
                  spectral_initialize)
from .exceptions import ConvergenceError, DivergenceError, InfeasibleSnrError, MvampError
from .experiments import (AggregateResult, ExperimentConfig, ReplicateResult,
                          SeCheckReport, empirical_mse, empirical_overlap,
                          run_replicate, run_sweep, se_consistency_check)
from .linalg import (ComposedSpectralOperator, DenseSymmetricOperator, RectOperator,
                     SparseCenteredOperator, SymmetricOperator, WeightedSumOperator,
                     compose_spectral_operator, estimate_shift, power_iteration)
from .model import (CommunityLabels, CovariateModel, GaussianSurrogate, LayerParams,
                    RevelationMasks, SbmLayer, center_scale_layer, combine_layers,
                    lambda_from_rates, rates_from_lambda, sample_covariates,
                    sample_gaussian_surrogate, sample_labels, sample_revelation,
                    sample_sbm_layer, substream, write_covariates_csv, write_edge_list,
                    write_labels_csv)
from .scalar_channel import (QuadratureRule, gauss_hermite_rule, log_cosh, scalar_mi,
                             scalar_mmse)
from .state_evolution import (SeConfig, SeParams, SeTrajectory, detection_possible,
                              fixed_point_z, gamma_star, limit_mmse, params_from_z,
                              se_run, se_scalar_step, xi_limit)

__version__ = "0.1.0"
