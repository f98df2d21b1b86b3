"""Two-photon doublons in a quasiperiodic mosaic Bose-Hubbard waveguide."""

from .errors import MosaicDoublonError, ResourceError, ValidationError
from .model import EmitterSpec, LatticeSpec, build_emitter_h, build_two_photon_h, fibonacci

__version__ = "0.1.0"

__all__ = [
    "EmitterSpec",
    "LatticeSpec",
    "MosaicDoublonError",
    "ResourceError",
    "ValidationError",
    "build_emitter_h",
    "build_two_photon_h",
    "fibonacci",
    "__version__",
]
