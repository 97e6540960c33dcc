"""Constants for hybridsplat."""

import math

SH_C0 = 0.28209479177387814
SH_C1 = 0.4886025119029199
SH_C2 = (
    1.0925484305920792,
    -1.0925484305920792,
    0.31539156525252005,
    -1.0925484305920792,
    0.5462742152960396,
)
SH_C3 = (
    -0.5900435899266435,
    2.890611442640554,
    -0.4570457994644658,
    0.3731763325901154,
    -0.4570457994644658,
    1.445305721320277,
    -0.5900435899266435,
)
MAX_SH_DEGREE = 3

SCENE_FILE_MAGIC = b"HSPL"
SCENE_FILE_VERSION = 1
BUNDLE_FORMAT_VERSION = 1


class DefaultValues:
    SH_DEGREE = 1
    FEATURE_DIM = 8
    NEAR_PLANE = 0.05
    FAR_PLANE = 1000.0
    FOOTPRINT_SIGMA = 3.0
    LOW_PASS_BLUR = 0.3
    MIN_ALPHA = 1.0 / 255.0
    TERMINATION_TRANSMITTANCE = 1.0 / 255.0
    TILE_SIZE = 16
    DEGENERATE_DET = 1e-12
    INIT_OPACITY = 0.1
    MIN_SCALE = 1e-6
    MAX_SCALE = 1e3


LOG_SCALE_MIN = math.log(DefaultValues.MIN_SCALE)
LOG_SCALE_MAX = math.log(DefaultValues.MAX_SCALE)
