"""Numerical checks of growth bounds at infinity for homeomorphic solutions
of degenerate Beltrami equations whose dilatation has global finite mean
oscillation."""

from .capacity import (CapacityEstimate, GridSpec, RingCondenser, annulus_ring_modulus,
                       capacity_dirichlet, capacity_lower_bound, condenser_image, shlyk_consistency)
from .errors import (BreakpointError, CapacityError, DegeneratePointError, DegenerateProfileError,
                     EvaluationError, InequalityViolation)
from .fields import (BeltramiCoefficient, DilatationField, RadialMap, RadialProfile, beltrami_residual,
                     dilatation_field, dilatation_from_mu, dilatation_from_radial_map, fixture,
                     identity_map, load_profile_table, log_map, mu_from_radial_map, power_map,
                     wirtinger_fd)
from .geometry import (Annulus, Circle, Disk, QuadratureSpec, ScalarField, area_disk,
                       extremum_on_circle, integrate_field, integrate_radial)
from .gfmo import (DispersionReport, GrowthConstant, dispersion_sup, gfmo_evidence, growth_constant,
                   lemma2_check, lemma2_lhs, lemma2_shell_decomposition, mean_deviation, mean_over_disk)
from .growth import (DilatationContext, GrowthReport, RadialTestFunction, RingQReport, capacity_chain,
                     dilatation_context, eta_log, eta_loglog, eta_uniform, image_annulus_modulus,
                     proposition1_check, ringq_rhs, theorem1_report)

__version__ = "0.1.0"
