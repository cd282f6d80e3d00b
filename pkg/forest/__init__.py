# Random forest classifier
from .params import ForestError, ForestParams
from .tree import DecisionTree, train_tree
from .forest import RandomForestModel, classify, load_model, predict_proba, save_model, train_forest

__all__ = [
    'ForestError', 'ForestParams', 'DecisionTree', 'train_tree',
    'RandomForestModel', 'classify', 'load_model', 'predict_proba', 'save_model', 'train_forest',
]
