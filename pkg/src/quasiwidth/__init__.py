"""Width and boundary width of Jordan curves in CP^1 via hyperbolic convex hulls."""

from .analysis import ExperimentConfig, analyze_curve, probe
from .constants import verify_constants
from .constructions import build_circle, build_Cn, build_D, build_Gn, build_perturbed_circle, build_square
from .curves import JordanCurve, sample_curve
from .hull import MINUS, PLUS, LabeledHull, classify_faces, convex_hull_3d
from .turning import turning_constant
from .width import boundary_width, estimate_widths, width

__all__ = [
    "ExperimentConfig", "analyze_curve", "probe", "verify_constants",
    "build_circle", "build_Cn", "build_D", "build_Gn", "build_perturbed_circle", "build_square",
    "JordanCurve", "sample_curve", "MINUS", "PLUS", "LabeledHull", "classify_faces", "convex_hull_3d",
    "turning_constant", "boundary_width", "estimate_widths", "width",
]
__version__ = "0.1.0"
