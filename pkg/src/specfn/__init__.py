"""Unitary-similarity-invariant functionals of complex matrices.

Pseudospectra and pseudo-spectral radii, classical/k-/q-/C-numerical ranges
and radii, unitarily invariant norms, and numerical checks for maps that
preserve these functionals on skew products ``A* B``.
"""

from .linalg import (BackendError, DimensionError, DomainError, Frobenius, KyFan, Operator,
                     PartialIsometry, RankOne, Schatten, Trace, adjoint, compact_svd,
                     conjugate_matrix, haar_unitary, inner, load_matrix, parse_norm,
                     rank_one, rank_one_apply, right_support_partial_isometry, save_matrix,
                     skew_product, spectral_data, unitary_invariant_norm)
from .numrange import (CWeight, Condition, QProfile, c_numerical_radius,
                       check_hausdorff_bound, check_lwq, check_midpoint_convexity,
                       classify_theorem41_condition, conjugation_symmetry_wc,
                       k_numerical_radius, numerical_radius, q_disc, q_member,
                       q_numerical_radius, q_profile, q_region)
from .preserver import (CNumericalRadius, ConstantPhase, KNumericalRadius,
                        PerOperatorIsometry, PseudoSpectralRadius, PseudoSpectrumRegion,
                        QNumericalRadius, RankOneCanonical, SeededRandomPhase, ShiftExample,
                        TwoSidedUnitary, UnitaryInvariantNorm, apply_map, check_axioms,
                        check_invariance, check_norm_identity, check_orthogonality_transfer,
                        check_zero_product_equivalence, conjugate_form_distinguisher,
                        shift_example_demo)
from .pseudospec import (check_pseudo_properties, pseudo_member, pseudo_region,
                         pseudo_spectral_radius, rank_one_psr_closed_form, resolvent_gap)
from .regions import Disc, Region, hausdorff_distance
from .reports import Report

__version__ = "0.1.0"
