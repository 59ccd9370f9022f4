"""From-scratch classifiers and the repeated-split evaluation harness."""

from .bayes import GaussianNBModel, train_gnb
from .cv import KINDS, CVReport, ModelSpec, cross_validate, split_indices, train_model
from .dataset import Dataset, Standardizer
from .knn import KNNModel, train_knn
from .serialize import model_from_dict, model_to_dict
from .svm import SVMModel, rbf_kernel, smo, train_svm_rbf
from .tree import ForestModel, TreeModel, train_forest, train_tree

__all__ = [
    "CVReport",
    "Dataset",
    "ForestModel",
    "GaussianNBModel",
    "KINDS",
    "KNNModel",
    "ModelSpec",
    "SVMModel",
    "Standardizer",
    "TreeModel",
    "cross_validate",
    "model_from_dict",
    "model_to_dict",
    "rbf_kernel",
    "smo",
    "split_indices",
    "train_forest",
    "train_gnb",
    "train_knn",
    "train_model",
    "train_svm_rbf",
    "train_tree",
]
