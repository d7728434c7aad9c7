"""Discrete AdaBoost on decision stumps, plus a one-vs-rest multiclass wrapper.

Conventions fixed here: vote weight alpha = 0.5*ln((1-e)/e) with the round
error clamped to [epsilon_clamp, 1-epsilon_clamp]; training stops before a
round whose error reaches 0.5 - early_stop_margin; an empty binary model
predicts +1 and an all-tied multiclass argmax resolves to the lowest class id.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable

import numpy as np

from .features import LabeledFeatureSet
from .stump import SortedColumns, Stump, fit_stump, presort, stump_predict_matrix


class BoostingError(ValueError):
    pass


@dataclass(frozen=True)
class TrainConfig:
    rounds: int = 256
    epsilon_clamp: float = 1e-10
    early_stop_margin: float = 0.0

    def __post_init__(self):
        if self.rounds < 1:
            raise BoostingError(f"rounds must be >= 1, got {self.rounds}")
        if not 0.0 < self.epsilon_clamp < 0.5:
            raise BoostingError(f"epsilon_clamp {self.epsilon_clamp} outside (0, 0.5)")
        if self.early_stop_margin < 0:
            raise BoostingError("early_stop_margin must be non-negative")


@dataclass(frozen=True)
class RoundRecord:
    error: float       # weighted stump error this round
    alpha: float
    bound: float       # running product of 2*sqrt(e~(1-e~))


@dataclass
class BinaryModel:
    rounds: list[tuple[Stump, float]] = field(default_factory=list)
    trace: list[RoundRecord] = field(default_factory=list)


@dataclass
class MultiClassModel:
    models: dict[int, BinaryModel]
    classes: list[int]
    rounds_budget: int


RoundHook = Callable[[int, float, float, np.ndarray], None]


def train_binary(fset: LabeledFeatureSet, targets, config: TrainConfig,
                 sorted_cols: SortedColumns | None = None,
                 on_round: RoundHook | None = None) -> BinaryModel:
    """Discrete AdaBoost: reweight, refit a stump, accumulate weighted votes.

    `on_round(t, error, alpha, weights)` fires after each accepted round with
    the renormalized weights, for diagnostics and invariant checks.
    """
    targets = np.asarray(targets, dtype=np.int64)
    if targets.shape != (fset.n,):
        raise BoostingError(f"targets length {targets.shape} != n={fset.n}")
    if not np.isin(targets, (-1, 1)).all():
        raise BoostingError("targets must be +-1")
    if sorted_cols is None:
        sorted_cols = presort(fset)

    w = np.full(fset.n, 1.0 / fset.n)
    model = BinaryModel()
    bound = 1.0
    lo, hi = config.epsilon_clamp, 1.0 - config.epsilon_clamp
    for t in range(config.rounds):
        stump, err = fit_stump(fset, targets, w, sorted_cols)
        if err >= 0.5 - config.early_stop_margin:
            break
        e = min(max(err, lo), hi)
        alpha = 0.5 * np.log((1.0 - e) / e)
        bound *= 2.0 * np.sqrt(e * (1.0 - e))
        model.rounds.append((stump, float(alpha)))
        model.trace.append(RoundRecord(err, float(alpha), float(bound)))
        h = stump_predict_matrix(stump, fset.values)
        w = w * np.exp(-alpha * targets * h)
        w /= w.sum()
        if on_round is not None:
            on_round(t, err, float(alpha), w)
    return model


def decision_score(model: BinaryModel, x) -> float:
    x = np.atleast_2d(np.asarray(x, dtype=np.float64))
    return float(decision_score_matrix(model, x)[0])


def decision_score_matrix(model: BinaryModel, values: np.ndarray) -> np.ndarray:
    score = np.zeros(values.shape[0])
    for stump, alpha in model.rounds:
        score += alpha * stump_predict_matrix(stump, values)
    return score


def predict_binary(model: BinaryModel, x) -> int:
    return 1 if decision_score(model, x) >= 0.0 else -1


def staged_errors(model: BinaryModel, fset: LabeledFeatureSet, targets) -> list[float]:
    """Training misclassification rate of every prefix of the ensemble."""
    targets = np.asarray(targets, dtype=np.int64)
    score = np.zeros(fset.n)
    out = []
    for stump, alpha in model.rounds:
        score += alpha * stump_predict_matrix(stump, fset.values)
        pred = np.where(score >= 0.0, 1, -1)
        out.append(float(np.mean(pred != targets)))
    return out


def train_ovr(fset: LabeledFeatureSet, config: TrainConfig,
              on_round: RoundHook | None = None) -> MultiClassModel:
    """One binary ensemble per class present, sharing one presort and budget."""
    classes = fset.class_ids()
    if len(classes) < 2:
        raise BoostingError(f"need >= 2 classes, got {classes}")
    sorted_cols = presort(fset)
    models = {}
    for c in classes:
        targets = np.where(fset.labels == c, 1, -1)
        models[c] = train_binary(fset, targets, config, sorted_cols, on_round)
    return MultiClassModel(models, classes, config.rounds)


def predict_multiclass(model: MultiClassModel, x) -> int:
    x = np.atleast_2d(np.asarray(x, dtype=np.float64))
    return int(predict_multiclass_matrix(model, x)[0])


def predict_multiclass_matrix(model: MultiClassModel, values: np.ndarray) -> np.ndarray:
    """Argmax of per-class vote sums; ties resolve to the lowest class id."""
    scores = np.stack([decision_score_matrix(model.models[c], values)
                       for c in model.classes])
    winners = scores.argmax(axis=0)  # argmax takes the first maximum
    return np.asarray(model.classes)[winners]


MODEL_HEADER = "STUMPBOOST-MODEL v1"


def save_model(model: MultiClassModel, path) -> None:
    lines = [MODEL_HEADER,
             f"rounds {model.rounds_budget}",
             "classes " + " ".join(str(c) for c in model.classes)]
    for c in model.classes:
        for t, (stump, alpha) in enumerate(model.models[c].rounds):
            lines.append(f"class {c} round {t} feature {stump.feature} "
                         f"threshold {stump.threshold!r} polarity "
                         f"{stump.polarity:+d} alpha {alpha!r}")
    Path(path).write_text("\n".join(lines) + "\n")


def load_model(path) -> MultiClassModel:
    lines = Path(path).read_text().splitlines()
    if not lines or lines[0] != MODEL_HEADER:
        raise BoostingError(f"{path}: not a {MODEL_HEADER} file")
    if len(lines) < 3 or not lines[1].startswith("rounds ") \
            or not lines[2].startswith("classes "):
        raise BoostingError(f"{path}: malformed model header")
    budget = int(lines[1].split()[1])
    classes = [int(c) for c in lines[2].split()[1:]]
    models: dict[int, BinaryModel] = {c: BinaryModel() for c in classes}
    for ln, line in enumerate(lines[3:], 4):
        if not line.strip():
            continue
        f = line.split()
        if len(f) != 12 or f[0] != "class" or f[2] != "round" or f[4] != "feature" \
                or f[6] != "threshold" or f[8] != "polarity" or f[10] != "alpha":
            raise BoostingError(f"{path}:{ln}: malformed round line")
        c = int(f[1])
        if c not in models:
            raise BoostingError(f"{path}:{ln}: class {c} not in header")
        stump = Stump(int(f[5]), float(f[7]), int(f[9]))
        models[c].rounds.append((stump, float(f[11])))
    return MultiClassModel(models, classes, budget)
