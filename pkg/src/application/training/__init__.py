from .losses import PhotometricLoss, photometric_loss
from .trainer import GaussianTrainer, StepGradients, TrainingReport, gaussian_learning_rates

__all__ = [
    "GaussianTrainer",
    "PhotometricLoss",
    "StepGradients",
    "TrainingReport",
    "gaussian_learning_rates",
    "photometric_loss",
]
