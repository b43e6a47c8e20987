"""Legendrian curve flows in the first Heisenberg group.

Planar inverse mean curvature flow of the projection, horizontal lifts,
the length-preserving rescaled flow, the intrinsic curvature equation for
constant Webster curvature, geodesics, and the integral identities used to
check them.
"""

from .diagnostics import IdentityReport, conservation_suite, minkowski_residual, total_curvature
from .errors import (
    ConvexityError,
    DegenerateCurveError,
    HolonomyMismatchError,
    LegendrianError,
    LegflowError,
    ParseError,
    SingularityError,
)
from .flow3d import evolve_expanding, normal_speed_decompose, rescale_trajectory, step_rescaled_direct
from .geodesics import HelixParams, fit_helix, make_helix, make_horizontal_line, variation_vertical
from .heis_core import (
    DiscreteClosedCurve,
    HeisFrameVector,
    curvature_of,
    dilate,
    frame_decompose,
    horizontality_residual,
    legendrian_lift,
    metric_and_length,
)
from .imcf_planar import SolverConfig, SupportFunction, evolve_planar, support_transform
from .intrinsic_flow import CurvatureField, WebsterParam, evolve_k2, homogeneous_oracle
from .planar import PlanarCurve
from .trajectory import FlowTrajectory

__version__ = "0.1.0"
