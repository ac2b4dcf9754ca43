"""Exact computer algebra for modules over rings of functions and vector fields (AV-modules)."""
from .build import build_module
from .gln import rep_build
from .modules import (alpha_module, av_dual, av_tensor, charged_twist, gauge_module,
                      minimal_differentiability, rudakov_module, tensor_module, validate_smash)
from .rings import elliptic, laurent, localized, poly

__version__ = "0.1.0"

__all__ = [
    "alpha_module", "av_dual", "av_tensor", "build_module", "charged_twist", "elliptic",
    "gauge_module", "laurent", "localized", "minimal_differentiability", "poly", "rep_build",
    "rudakov_module", "tensor_module", "validate_smash",
]
