from dataclasses import dataclass, field

import numpy as np

from core.models.network import MlpSpec


@dataclass
class DeformationField:
    """Shared network mapping (position, time) to Gaussian offsets, plus its input normalization.

    Positions enter the network as (x - center) / scene_scale and time as t / (num_frames - 1),
    both positionally encoded with `position_freqs` and `time_freqs` bands.
    """

    spec: MlpSpec
    params: dict[str, np.ndarray]
    center: np.ndarray
    scene_scale: float
    num_frames: int
    position_freqs: int = 8
    time_freqs: int = 4
    metadata: dict = field(default_factory=dict)

    def normalized_time(self, t: float) -> float:
        if self.num_frames <= 1:
            return 0.0
        return float(t) / float(self.num_frames - 1)

    def copy(self) -> "DeformationField":
        return DeformationField(
            spec=self.spec,
            params={name: value.copy() for name, value in self.params.items()},
            center=np.array(self.center, dtype=np.float64),
            scene_scale=self.scene_scale,
            num_frames=self.num_frames,
            position_freqs=self.position_freqs,
            time_freqs=self.time_freqs,
            metadata=dict(self.metadata),
        )
