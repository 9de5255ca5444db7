"""toralab: a numerical laboratory for hyperbolic toral automorphisms.

Exact classification of integer automorphisms, perturbed Anosov maps,
conjugacies and their regularity, twisted cohomological equations with a
KAM-style improvement step, and linear-cocycle diagnostics.
"""

__version__ = "0.1.0"

from .spectral import (IntegerAutomorphism, automorphism, block_diagonal,
                       block_upper_identity, char_poly, classify,
                       classification_report, factorization,
                       lyapunov_splitting, spectral_data,
                       weakly_irreducible_definitional)
from .torusfn import (GridFunction, TrigPoly, c0_norm, c1_norm,
                      estimate_holder, holder_norm, sobolev_norm, transform,
                      inverse_transform, weierstrass_type)
from .maps import (PerturbedMap, build, fixed_point_near_zero,
                   periodic_data_check, periodic_points, verify_anosov)
from .conjugacy import (ConjugacyResult, build_counterexample, jacobian_dh,
                        periodic_covariance, regularity_metrics,
                        skew_phi_from_finite_psi, solve_conjugacy,
                        solve_inverse)
from .twisted import (dual_orbit_decomposition, kam_iterate, kam_step,
                      solve_linearized)
from .cocycles import (CocycleSpec, cocycle_product, conformality_check,
                       conformality_at_periodic, dh_as_cocycle_conjugacy,
                       exponents_at_periodic, fiber_bunching_check,
                       lyapunov_qr, lyapunov_volume, oseledets_subbundle)
from . import errors

__all__ = [name for name in dir() if not name.startswith("_")]
