"""alexlab: numerical checks for moving-plane symmetry of closed hypersurfaces, mean-curvature
operators, and Hopf-lemma / maximum-principle variants."""

__version__ = "0.1.0"

from .catalog import CATALOG, build_surface, list_catalog
from .conditions import check_all, contact_order, find_tangency_set
from .moving_planes import find_lambda0, run_moving_planes
from .surface_core import ScalarField, mean_curvature_pN, second_fundamental_form_pN
