"""Well-balanced kinetic relaxation schemes for 1D hyperbolic balance laws."""

from .boundary import BoundaryCondition, SpongeLayer, fill_ghosts, sponge_damp
from .core import (BoundaryExtensionError, CellField, ConfigurationError,
                   HKRError, Mesh1D, PositivityError, QuadratureRule,
                   StepFailureError, cell_average, field_from_function,
                   gauss2_rule, l1_error, midpoint_rule, quadrature_rule)
from .kinetic import (RelaxConfig, choose_lambda, maxwellian, maxwellian_pair,
                      omega, projection_step, recover_u, source_step)
from .models import (Burgers, EulerGravity, Geometry, ShallowWater,
                     bernoulli_height, flat_geometry)
from .reconstruction import WBRecon, WBReconstructor, minmod, wb_reconstruct
from .reference import llf_wb_step, make_reference, restrict_block, run_llf
from .splitting import (SCHEME_LABELS, SCHEMES, KineticScheme, KineticState,
                        SUZUKI_GAMMAS, lie_step, scheme_def, splitting_plan,
                        strang_step, suzuki_step)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
