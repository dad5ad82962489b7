"""Simulation and statistical verification of STIT and Poisson hyperplane tessellations."""
from .geometry import (
    ConvexPolytope,
    EmbeddedFacet,
    GeometryError,
    Hyperplane,
    NoSplitError,
    box,
    clip_halfspace,
    cut_by_hyperplane,
    intrinsic_volumes,
    k_faces,
    polygon,
    support_interval,
)
from .measure import (
    ConfigurationError,
    DirectionalDistribution,
    HyperplaneMeasure,
    SamplingError,
    axis_parallel,
    hitting_mass,
    isotropic,
    make_directional,
    sample_hitting,
)
from .mnw import StitTessellation, build_stit, iterate, rescale
from .pht import PhtTessellation, build_pht, extract_faces

__version__ = "0.1.0"

__all__ = [
    "ConvexPolytope", "EmbeddedFacet", "GeometryError", "Hyperplane", "NoSplitError",
    "box", "clip_halfspace", "cut_by_hyperplane", "intrinsic_volumes", "k_faces",
    "polygon", "support_interval",
    "ConfigurationError", "DirectionalDistribution", "HyperplaneMeasure", "SamplingError",
    "axis_parallel", "hitting_mass", "isotropic", "make_directional", "sample_hitting",
    "StitTessellation", "build_stit", "iterate", "rescale",
    "PhtTessellation", "build_pht", "extract_faces",
]
