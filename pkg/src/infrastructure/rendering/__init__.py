from .options import GaussianGradients, RenderGrad, RenderOptions, RenderOutput
from .rasterizer import brute_force_render, render, render_backward

__all__ = [
    "GaussianGradients",
    "RenderGrad",
    "RenderOptions",
    "RenderOutput",
    "brute_force_render",
    "render",
    "render_backward",
]
