from .base import (FORMAT_VERSION, LabelConfidence, Model, ModelFormatError, Standardizer, TrainConfig,
                   as_labels, dumps_model, load_model, predict_confidence, save_model, split_train_test)
from .logistic import LogisticModel, loss_and_grad, train_logistic
from .mlp import MLPModel, Network, train_mlp
from .smo import BinarySVM, SVMModel, dual_objective, smo_binary, train_svm_smo
from .stack import StackedModel, meta_features, train_stack

TRAINERS = {
    "logistic": train_logistic,
    "mlp": train_mlp,
    "svm": train_svm_smo,
    "stack": train_stack,
}

__all__ = [
    "FORMAT_VERSION", "LabelConfidence", "Model", "ModelFormatError", "Standardizer", "TrainConfig",
    "as_labels", "dumps_model", "load_model", "predict_confidence", "save_model", "split_train_test",
    "LogisticModel", "loss_and_grad", "train_logistic", "MLPModel", "Network", "train_mlp",
    "BinarySVM", "SVMModel", "dual_objective", "smo_binary", "train_svm_smo",
    "StackedModel", "meta_features", "train_stack", "TRAINERS",
]
