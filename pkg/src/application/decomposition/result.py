import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from core.exceptions import ConfigValidationError, InvalidInputError
from core.utils import atomic_write_text

SIDECAR_VERSION = 1


@dataclass
class DecompositionResult:
    """Per-Gaussian outcome of the decomposition stages, aligned by Gaussian id."""

    ids: np.ndarray
    scores: np.ndarray
    threshold_labels: np.ndarray
    grouped_labels: np.ndarray
    cluster_ids: np.ndarray
    tau: float = 0.5

    def __post_init__(self):
        self.ids = np.asarray(self.ids, dtype=np.int64)
        self.scores = np.asarray(self.scores, dtype=np.float64)
        self.threshold_labels = np.asarray(self.threshold_labels, dtype=bool)
        self.grouped_labels = np.asarray(self.grouped_labels, dtype=bool)
        self.cluster_ids = np.asarray(self.cluster_ids, dtype=np.int64)
        n = len(self.ids)
        for name in ("scores", "threshold_labels", "grouped_labels", "cluster_ids"):
            if getattr(self, name).shape != (n,):
                raise InvalidInputError(f"{name} has shape {getattr(self, name).shape}, expected ({n},)")

    def __len__(self) -> int:
        return len(self.ids)

    @property
    def num_dynamic(self) -> int:
        return int(np.count_nonzero(self.grouped_labels))

    @property
    def flipped(self) -> np.ndarray:
        return self.threshold_labels != self.grouped_labels

    def score_of(self, ids: np.ndarray) -> np.ndarray:
        """Scores looked up by id; ids not in the result score 0."""
        return self._lookup(ids, self.scores)

    def label_of(self, ids: np.ndarray) -> np.ndarray:
        return self._lookup(ids, self.grouped_labels.astype(np.float64)) > 0.5

    def _lookup(self, ids: np.ndarray, values: np.ndarray) -> np.ndarray:
        ids = np.asarray(ids, dtype=np.int64)
        if not len(self.ids):
            return np.zeros(len(ids))
        order = np.argsort(self.ids)
        pos = np.clip(np.searchsorted(self.ids, ids, sorter=order), 0, len(self.ids) - 1)
        found = self.ids[order[pos]] == ids
        return np.where(found, values[order[pos]], 0.0)

    def to_dict(self) -> dict:
        return {
            "version": SIDECAR_VERSION,
            "tau": self.tau,
            "num_gaussians": len(self),
            "num_dynamic": self.num_dynamic,
            "ids": self.ids.tolist(),
            "scores": self.scores.tolist(),
            "threshold_labels": self.threshold_labels.astype(int).tolist(),
            "labels": self.grouped_labels.astype(int).tolist(),
            "clusters": self.cluster_ids.tolist(),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "DecompositionResult":
        return cls(
            ids=data["ids"],
            scores=data["scores"],
            threshold_labels=data["threshold_labels"],
            grouped_labels=data["labels"],
            cluster_ids=data["clusters"],
            tau=data.get("tau", 0.5),
        )


def write_sidecar(result: DecompositionResult, path: str | Path) -> None:
    atomic_write_text(path, json.dumps(result.to_dict()))


def read_sidecar(path: str | Path) -> DecompositionResult:
    try:
        data = json.loads(Path(path).read_text())
        if data.get("version") != SIDECAR_VERSION:
            raise ConfigValidationError(f"decomposition sidecar {path} has unsupported version {data.get('version')}")
        return DecompositionResult.from_dict(data)
    except FileNotFoundError as e:
        raise ConfigValidationError(f"decomposition sidecar not found: {path}") from e
    except (json.JSONDecodeError, KeyError) as e:
        raise ConfigValidationError(f"decomposition sidecar {path} is malformed: {e}") from e
