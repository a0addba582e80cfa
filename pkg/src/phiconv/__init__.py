"""Abstract convexity with respect to finite-dimensional function spans on finite metric spaces."""

from .boundary import (choquet_boundary, dual_ball, is_norming_subset, shilov_boundary,
                       weakstar_exposed_generators)
from .errors import *  # noqa: F401,F403
from .ground import ExtendedFunction, GroundSet, PointSubset, build_ground_set, distance_function
from .hull import hull_membership, is_phi_convex, phi_convex_hull, separate_from_hull
from .phi_space import DualVector, PhiSpace, PhiVector, dirac, evaluate, separates_points, sup_norm
from .points import (affine_exposed_points, compare_point_classes, is_phi_between, milman_converse_check,
                     phi_exposed_points, phi_extremal_points, reconstruction_check)
from .variational import (argmax_set, conjugate, exposing_perturbation, gateaux_probe, ill_posed_fraction,
                          inf_convolution, max_rule_check, support_function, well_posedness)

__version__ = "0.1.0"
