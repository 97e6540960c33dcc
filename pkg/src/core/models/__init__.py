from .bundle import Frame, ReferenceBundle
from .camera import CameraPose
from .deformation import DeformationField
from .gaussians import Gaussian3D, GaussianSet, logit, sigmoid
from .network import MlpSpec
from .scene import HybridScene
from .snapshot import GaussianSnapshot

__all__ = [
    "CameraPose",
    "DeformationField",
    "Frame",
    "Gaussian3D",
    "GaussianSet",
    "GaussianSnapshot",
    "HybridScene",
    "MlpSpec",
    "ReferenceBundle",
    "logit",
    "sigmoid",
]
