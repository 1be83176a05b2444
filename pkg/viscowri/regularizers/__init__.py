from .measurement import LinearMeasurement, NormalEquations, TvGeometry, default_gamma, tv_model_solve
from .phase import (ArmijoResult, armijo_search, composite_gradient_step, phase_curvature, phase_misfit,
                    phase_misfit_gradient, phase_penalty, phase_prox)
from .prox import joint_prox_update, separate_ri_prox_update, shrink_pair, shrink_weight
from .solvers import (LOG_COLUMNS, SOLVERS, PolarTvSolver, SeparateTvSolver, TvSolver, alg1_solve, alg2_solve,
                      alg3_solve, refine_data)
from .state import Curvature, PhaseRegularizer, PolarState, RegHyperparams, TvAuxState
