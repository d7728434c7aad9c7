"""Boosted decision stumps over block-structured dense features."""
from .boosting import (BinaryModel, MultiClassModel, TrainConfig, decision_score,
                       load_model, predict_binary, predict_multiclass,
                       predict_multiclass_matrix, save_model, staged_errors,
                       train_binary, train_ovr)
from .features import (Block, BlockManifest, FeatureStoreError,
                       LabeledFeatureSet, concat_blocks, extract_block,
                       load_features, save_features, split_per_class)
from .harness import ComparisonTable, ExperimentSpec, evaluate, run_comparison
from .selection import SelectionReport, per_block_report, selected_features
from .stump import (SortedColumns, Stump, fit_stump, fit_stump_oracle, presort,
                    stump_predict)
from .synth import SynthBlock, SynthConfig, generate, improvement_curve

__all__ = [n for n in dir() if not n.startswith("_")]
