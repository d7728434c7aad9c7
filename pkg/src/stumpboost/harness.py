"""Experiment runner: evaluation plus the single-block-vs-concatenation
comparison, with every row sharing one identically-seeded train/test split so
accuracy differences come from the features alone."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .boosting import MultiClassModel, TrainConfig, predict_multiclass_matrix, train_ovr
from .features import (LabeledFeatureSet, concat_blocks, extract_block,
                       load_features, split_per_class)


class HarnessError(ValueError):
    pass


@dataclass(frozen=True)
class ExperimentSpec:
    blocks: tuple[tuple[str, str], ...]  # (name, feature-file path)
    train_count: int | None = None
    test_count: int | None = None
    seed: int = 0
    presplit: tuple[tuple[str, str, str], ...] = ()  # (name, train path, test path)
    config: TrainConfig = field(default_factory=TrainConfig)

    def __post_init__(self):
        if bool(self.blocks) == bool(self.presplit):
            raise HarnessError("give either block files to split or pre-split pairs")
        if self.presplit and (self.train_count is not None or self.test_count is not None):
            raise HarnessError("split counts and pre-split inputs are mutually exclusive")
        if self.blocks and self.train_count is None:
            raise HarnessError("train_count required when splitting")


@dataclass(frozen=True)
class ComparisonTable:
    rows: tuple[tuple[str, float], ...]  # (feature-set label, accuracy percent)

    def text(self) -> str:
        width = max(len(name) for name, _ in self.rows)
        return "\n".join(f"{name:<{width}}  {acc:.1f}" for name, acc in self.rows)

    def csv(self) -> str:
        lines = ["features,accuracy_pct"]
        lines += [f"{name},{acc:.1f}" for name, acc in self.rows]
        return "\n".join(lines)


def evaluate(model: MultiClassModel, fset: LabeledFeatureSet) -> float:
    """Top-1 multiclass accuracy in [0, 1]."""
    for c in model.classes:
        for stump, _ in model.models[c].rounds:
            if stump.feature >= fset.d:
                raise HarnessError(
                    f"model references feature {stump.feature}, set has d={fset.d}")
    pred = predict_multiclass_matrix(model, fset.values.astype(np.float64))
    return float(np.mean(pred == fset.labels))


def _load_named(name: str, path: str) -> LabeledFeatureSet:
    fset = load_features(path)
    if len(fset.manifest.blocks) == 1 and fset.manifest.blocks[0].name == "default":
        from .features import Block, BlockManifest
        fset = LabeledFeatureSet(fset.values, fset.labels,
                                 BlockManifest((Block(name, 0, fset.d),)))
    return fset


def run_comparison(spec: ExperimentSpec) -> ComparisonTable:
    """Accuracy per single block plus the full concatenation, one shared split."""
    if spec.blocks:
        sets = [_load_named(name, path) for name, path in spec.blocks]
        full = concat_blocks(sets)
        train, test = split_per_class(full, spec.train_count, spec.test_count,
                                      spec.seed)
    else:
        trains = [_load_named(name, p) for name, p, _ in spec.presplit]
        tests = [_load_named(name, p) for name, _, p in spec.presplit]
        train = concat_blocks(trains)
        test = concat_blocks(tests)
    names = [b.name for b in train.manifest.blocks]
    rows = []
    for name in names:
        model = train_ovr(extract_block(train, name), spec.config)
        acc = evaluate(model, extract_block(test, name))
        rows.append((name, 100.0 * acc))
    model = train_ovr(train, spec.config)
    rows.append(("-".join(names), 100.0 * evaluate(model, test)))
    return ComparisonTable(tuple(rows))
