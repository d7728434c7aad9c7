"""Synthetic multi-block datasets with planted, block-disjoint informative
features, so the single-block-vs-concatenation comparison is testable at desk
scale.

Each block carries k informative columns (class-conditional mean +-gap/2 with
unit-variance Gaussian noise), r strictly-increasing-transform copies of each
informative column, and z pure-noise columns. A block only "covers" a subset
of classes: informative columns single out covered classes and look identical
across every uncovered class.
"""
from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .boosting import TrainConfig, predict_multiclass_matrix, train_ovr
from .features import Block, BlockManifest, LabeledFeatureSet, extract_block

_SEED_MASK = 0xFFFFFFFFFFFFFFFF


class SynthError(ValueError):
    pass


@dataclass(frozen=True)
class SynthBlock:
    name: str
    informative: int
    redundant: int          # copies per informative column
    noise: int
    coverage: tuple[int, ...]  # classes this block's informative dims separate

    @property
    def width(self) -> int:
        return self.informative * (1 + self.redundant) + self.noise


@dataclass(frozen=True)
class SynthConfig:
    classes: int
    train_per_class: int
    test_per_class: int
    blocks: tuple[SynthBlock, ...]
    gap: float = 4.0
    noise_scale: float = 1.0
    seed: int = 0

    def __post_init__(self):
        if self.classes < 2:
            raise SynthError("need >= 2 classes")
        if self.train_per_class < 1 or self.test_per_class < 1:
            raise SynthError("per-class sample counts must be positive")
        if self.gap <= 0:
            raise SynthError("signal gap must be positive")
        if not self.blocks:
            raise SynthError("need >= 1 block")
        covered = set()
        for b in self.blocks:
            if b.informative < 1 or b.redundant < 0 or b.noise < 0:
                raise SynthError(f"bad dims in block {b.name!r}")
            if any(c < 0 or c >= self.classes for c in b.coverage):
                raise SynthError(f"block {b.name!r} covers unknown class")
            if not b.coverage:
                raise SynthError(f"block {b.name!r} covers no class")
            covered.update(b.coverage)
        if covered != set(range(self.classes)):
            raise SynthError(f"coverage misses classes {set(range(self.classes)) - covered}")


def _block_matrix(block: SynthBlock, labels: np.ndarray, gap: float,
                  noise_scale: float, transforms: list[tuple[float, float]],
                  rng: np.random.Generator) -> tuple[np.ndarray, list[int]]:
    n = len(labels)
    cols = []
    informative_local: list[int] = []
    src = np.empty((n, block.informative))
    for i in range(block.informative):
        target = block.coverage[i % len(block.coverage)]
        mean = np.where(labels == target, gap / 2.0, -gap / 2.0)
        src[:, i] = mean + rng.standard_normal(n)
        informative_local.append(len(cols))
        cols.append(src[:, i])
    for i in range(block.informative):
        for r in range(block.redundant):
            slope, intercept = transforms[i * block.redundant + r]
            cols.append(slope * src[:, i] + intercept)
    for _ in range(block.noise):
        cols.append(noise_scale * rng.standard_normal(n))
    return np.column_stack(cols), informative_local


def generate(config: SynthConfig) -> tuple[LabeledFeatureSet, LabeledFeatureSet,
                                           dict[str, list[int]]]:
    """Build (train, test, ground truth) deterministically from the seed.

    Ground truth maps block name -> global indices of its informative columns.
    Redundant copies reuse one affine positive-slope transform per copy across
    train and test, so the copies stay order-equivalent to their sources.
    """
    rng = np.random.default_rng([config.seed & _SEED_MASK])
    transforms = {
        b.name: [(rng.uniform(0.5, 2.0), rng.uniform(-1.0, 1.0))
                 for _ in range(b.informative * b.redundant)]
        for b in config.blocks
    }

    def build(per_class: int) -> tuple[np.ndarray, np.ndarray, dict[str, list[int]]]:
        labels = np.repeat(np.arange(config.classes), per_class)
        parts, truth, offset = [], {}, 0
        for b in config.blocks:
            mat, local = _block_matrix(b, labels, config.gap, config.noise_scale,
                                       transforms[b.name], rng)
            parts.append(mat)
            truth[b.name] = [offset + i for i in local]
            offset += b.width
        return np.hstack(parts).astype(np.float32), labels, truth

    blocks = []
    offset = 0
    for b in config.blocks:
        blocks.append(Block(b.name, offset, b.width))
        offset += b.width
    manifest = BlockManifest(tuple(blocks))

    tr_x, tr_y, truth = build(config.train_per_class)
    te_x, te_y, _ = build(config.test_per_class)
    return (LabeledFeatureSet(tr_x, tr_y, manifest),
            LabeledFeatureSet(te_x, te_y, manifest),
            truth)


def _accuracy(model, test: LabeledFeatureSet) -> float:
    pred = predict_multiclass_matrix(model, test.values.astype(np.float64))
    return float(np.mean(pred == test.labels))


def run_block_vs_concat(config: SynthConfig,
                        train_config: TrainConfig) -> tuple[dict[str, float], float]:
    """Train per single block and on the concatenation; return accuracies."""
    train, test, _ = generate(config)
    singles = {}
    for b in config.blocks:
        model = train_ovr(extract_block(train, b.name), train_config)
        singles[b.name] = _accuracy(model, extract_block(test, b.name))
    concat_model = train_ovr(train, train_config)
    return singles, _accuracy(concat_model, test)


def coverage_at_level(classes: int, n_blocks: int, block_index: int,
                      level: float) -> tuple[int, ...]:
    """Coverage for one block at a disjointness level in [0, 1].

    Level 1 keeps only the block's own contiguous share of classes; level 0
    adds every other class back (fully redundant blocks).
    """
    if not 0.0 <= level <= 1.0:
        raise SynthError(f"level {level} outside [0, 1]")
    base = list(range(block_index * classes // n_blocks,
                      (block_index + 1) * classes // n_blocks))
    others = [c for c in range(classes) if c not in base]
    extra = round((1.0 - level) * len(others))
    return tuple(sorted(base + others[:extra]))


@dataclass(frozen=True)
class CurvePoint:
    level: float
    best_single_accuracy: float  # mean over seeds of the best single block
    concat_accuracy: float       # mean over seeds

    @property
    def gap(self) -> float:
        return self.concat_accuracy - self.best_single_accuracy


def improvement_curve(base_config: SynthConfig, levels: list[float],
                      train_config: TrainConfig | None = None,
                      n_seeds: int = 10) -> list[CurvePoint]:
    """Concat-vs-best-single accuracy, per cross-block disjointness level.

    Every level reruns the full comparison over n_seeds fresh datasets whose
    coverage is rewritten by coverage_at_level; block dims stay as configured.
    """
    if train_config is None:
        train_config = TrainConfig(rounds=64)
    points = []
    nb = len(base_config.blocks)
    for level in levels:
        best_single, concat = [], []
        for s in range(n_seeds):
            blocks = tuple(
                replace(b, coverage=coverage_at_level(base_config.classes, nb, i, level))
                for i, b in enumerate(base_config.blocks))
            cfg = replace(base_config, blocks=blocks, seed=base_config.seed + s)
            singles, cacc = run_block_vs_concat(cfg, train_config)
            best_single.append(max(singles.values()))
            concat.append(cacc)
        points.append(CurvePoint(level, float(np.mean(best_single)),
                                 float(np.mean(concat))))
    return points
