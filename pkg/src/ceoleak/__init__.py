"""Rate-distortion-leakage regions of the two-agent CEO problem with an eavesdropper."""

from .discrete import (dominance_report, equivocation_counterexample, extreme_points,
                       information_quantities, inner_bound_constraints, logloss_inner_no_si,
                       logloss_inner_si, logloss_outer_no_si, logloss_outer_si,
                       outer_bound_constraints, si_gap_report, xi_k, xi_prime)
from .gaussian import (AuxRates, GaussianCeoParams, SearchConfig, SubsetPair, all_constraints,
                       beta_to_r, gaussian_cond_entropy, gaussian_rhs, leakage_curve,
                       membership, min_distortion, r_to_beta, saturation_threshold)
from .geometry import (Constraint, ConstraintSet, FeasibilityReport, RateTuple, dominates,
                       evaluate, pareto_filter)
from .info import (AuxiliarySystem, DiscreteCeoModel, JointDistribution, build_joint,
                   conditional_entropy, conditional_mutual_information, entropy)

__version__ = "0.1.0"
