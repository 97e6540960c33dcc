from .composition import compose_scene_at_t, is_extrapolated
from .deformation import (
    DeformationGradients,
    DeformationOffsets,
    apply_deformation,
    apply_deformation_backward,
    create_deformation_field,
    deform,
    deformation_spec,
)

__all__ = [
    "DeformationGradients",
    "DeformationOffsets",
    "apply_deformation",
    "apply_deformation_backward",
    "compose_scene_at_t",
    "create_deformation_field",
    "deform",
    "deformation_spec",
    "is_extrapolated",
]
