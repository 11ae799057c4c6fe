"""Modified error function: fixed-point construction, contraction checks and a shooting oracle."""

from .contraction import (BoundCheck, ContractionCertificate, certify, check_C_lower_bound,
                          check_lemma_a, check_lemma_b, check_lemma_c, empirical_contraction_ratio,
                          find_delta1, g_of)
from .errors import (BlowUp, BracketFailure, DegenerateInput, DeltaOutOfRange, DomainError,
                     InvalidInterval, KViolation, ModErfError, NonConvergence, StiffnessFailure)
from .function_space import (GridFunction, KMembershipReport, check_K_membership, default_x_max,
                             erf_grid, evaluate, ramp_grid, random_K_function, sup_distance)
from .picard_solver import IterationReport, evaluate_solution, residual_of, solve
from .quadrature import QuadratureResult, integrate_finite, integrate_semi_infinite
from .shooting_oracle import ShootingResult, compare_solutions, integrate_ivp, solve_shooting
from .tau_operator import OperatorParams, apply_tau, compute_C, inner_integral, psi, tau_values

__version__ = "0.1.0"
