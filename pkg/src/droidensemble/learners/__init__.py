"""The five base classifiers and their shared model container."""
from .base import (ALGORITHMS, SCHEMA_VERSION, Posterior, TrainedModel, dump_model, laplace,
                   load_model, parse_model, predict, predict_proba, save_model)
from .logistic import SimpleLogisticModel, train_simple_logistic
from .nb import NaiveBayesModel, train_naive_bayes
from .part import RuleListModel, train_part
from .ridor import RippleDownModel, train_ridor
from .tree import DecisionTreeModel, train_decision_tree

REGISTRY = {
    "nb": NaiveBayesModel,
    "sl": SimpleLogisticModel,
    "dt": DecisionTreeModel,
    "ridor": RippleDownModel,
    "part": RuleListModel,
}

TRAINERS = {
    "nb": train_naive_bayes,
    "sl": train_simple_logistic,
    "dt": train_decision_tree,
    "ridor": train_ridor,
    "part": train_part,
}


def train(algorithm, m, seed=0):
    """Train one of ``ALGORITHMS`` on sample matrix ``m``."""
    return TRAINERS[algorithm](m, seed=seed)


__all__ = [
    "ALGORITHMS", "SCHEMA_VERSION", "REGISTRY", "TRAINERS",
    "Posterior", "TrainedModel",
    "NaiveBayesModel", "SimpleLogisticModel", "DecisionTreeModel", "RuleListModel", "RippleDownModel",
    "train", "train_naive_bayes", "train_simple_logistic", "train_decision_tree", "train_part", "train_ridor",
    "predict", "predict_proba", "laplace",
    "save_model", "load_model", "dump_model", "parse_model",
]
