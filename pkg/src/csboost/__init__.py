"""Cost-sensitive multi-class boosting with decision stumps.

Four AdaBoost variants over one engine, GA search over per-class cost
vectors, imbalance-aware metrics, a synthetic imbalanced-data generator,
and a reproducible experiment CLI.
"""

from .boost import (BoostHistory, CostVector, EnsembleModel, TraceRow,
                    TrainTrace, Variant,
                    WeightDistribution, classifier_weight, fit, load_model,
                    predict, predict_batch, save_model, update_weights,
                    weighted_error, write_trace_csv)
from .costopt import (GAConfig, GATrace, crossover, mutate, roulette_select,
                      tune_costs, write_ga_trace_csv)
from .data import (Dataset, FoldAssignment, SynthConfig, generate_synthetic,
                   load_csv, save_csv, stratified_kfold, subset,
                   train_test_split)
from .errors import (ConfigError, ContractError, CsBoostError, DataLoadError,
                     DegenerateWeightsError, InfeasibleError)
from .metrics import (ConfusionMatrix, accuracy, confusion_matrix, mavg,
                      metrics_report, recall_per_class, test_error)
from .stump import StumpModel, StumpSearcher, fit_stump, predict_stump
from .theory import (bayes_f_star, cs_exp_loss, implied_probs,
                     label_score_product, recode_label,
                     stagewise_consistency_check, stagewise_loss_curve)

__version__ = "0.1.0"

__all__ = [
    "BoostHistory", "CostVector", "EnsembleModel", "TraceRow",
    "TrainTrace", "Variant",
    "WeightDistribution", "classifier_weight", "fit", "load_model",
    "predict", "predict_batch", "save_model", "update_weights",
    "weighted_error", "write_trace_csv",
    "GAConfig", "GATrace", "crossover", "mutate", "roulette_select",
    "tune_costs", "write_ga_trace_csv",
    "Dataset", "FoldAssignment", "SynthConfig", "generate_synthetic",
    "load_csv", "save_csv", "stratified_kfold", "subset", "train_test_split",
    "ConfigError", "ContractError", "CsBoostError", "DataLoadError",
    "DegenerateWeightsError", "InfeasibleError",
    "ConfusionMatrix", "accuracy", "confusion_matrix", "mavg",
    "metrics_report", "recall_per_class", "test_error",
    "StumpModel", "StumpSearcher", "fit_stump", "predict_stump",
    "bayes_f_star", "cs_exp_loss", "implied_probs", "label_score_product",
    "recode_label", "stagewise_consistency_check", "stagewise_loss_curve",
    "__version__",
]
