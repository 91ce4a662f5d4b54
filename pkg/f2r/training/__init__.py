from .adversarial import ConverterReport, F2RTrainer, LossBreakdown, TrainConfig, evaluate_converter, train
from .guards import TrainingDivergedError
from .losses import discriminator_loss, loss_cycle, loss_self, loss_style, sequence_nll
from .pretrain import PretrainConfig, accuracy, pretrain_discriminator, pretrain_generator, reconstruction_nll
from .ranker_training import RankerTrainConfig, train_ranker

__all__ = [
    "ConverterReport",
    "F2RTrainer",
    "LossBreakdown",
    "TrainConfig",
    "evaluate_converter",
    "train",
    "TrainingDivergedError",
    "discriminator_loss",
    "loss_cycle",
    "loss_self",
    "loss_style",
    "sequence_nll",
    "PretrainConfig",
    "accuracy",
    "pretrain_discriminator",
    "pretrain_generator",
    "reconstruction_nll",
    "RankerTrainConfig",
    "train_ranker",
]
