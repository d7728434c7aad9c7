"""Make boosting's implicit feature selection observable per source block."""
from __future__ import annotations

from dataclasses import dataclass

from .boosting import BinaryModel, MultiClassModel
from .features import BlockManifest


class SelectionError(ValueError):
    pass


@dataclass(frozen=True)
class FeatureUsage:
    multiplicity: int   # number of stumps on this feature
    vote_mass: float    # sum of their alphas


@dataclass(frozen=True)
class BlockUsage:
    name: str
    distinct: int
    multiplicity: int
    vote_mass: float


@dataclass(frozen=True)
class SelectionReport:
    per_block: tuple[BlockUsage, ...]
    total_distinct: int
    total_rounds: int
    total_vote_mass: float

    def machine_lines(self) -> list[str]:
        return [f"block={b.name} distinct={b.distinct} multiplicity="
                f"{b.multiplicity} votemass={b.vote_mass!r}"
                for b in self.per_block]

    def table(self) -> str:
        width = max(len(b.name) for b in self.per_block)
        rows = [f"{'block':<{width}}  distinct  multiplicity  votemass"]
        for b in self.per_block:
            rows.append(f"{b.name:<{width}}  {b.distinct:>8}  "
                        f"{b.multiplicity:>12}  {b.vote_mass:.4f}")
        rows.append(f"total: {self.total_distinct} distinct features over "
                    f"{self.total_rounds} rounds, vote mass {self.total_vote_mass:.4f}")
        return "\n".join(rows)


def _binary_models(model: BinaryModel | MultiClassModel) -> list[BinaryModel]:
    if isinstance(model, MultiClassModel):
        return [model.models[c] for c in model.classes]
    return [model]


def selected_features(model: BinaryModel | MultiClassModel) -> dict[int, FeatureUsage]:
    """Per selected feature index: stump count and summed vote weight.

    Multiclass models aggregate over every per-class ensemble.
    """
    mult: dict[int, int] = {}
    mass: dict[int, float] = {}
    for bm in _binary_models(model):
        for stump, alpha in bm.rounds:
            mult[stump.feature] = mult.get(stump.feature, 0) + 1
            mass[stump.feature] = mass.get(stump.feature, 0.0) + alpha
    return {f: FeatureUsage(mult[f], mass[f]) for f in sorted(mult)}


def per_block_report(model: BinaryModel | MultiClassModel,
                     manifest: BlockManifest) -> SelectionReport:
    """Attribute every selected feature to its source block."""
    usage = selected_features(model)
    for f in usage:
        if f >= manifest.width:
            raise SelectionError(
                f"selected feature {f} outside manifest span [0, {manifest.width})")
    per_block = []
    for b in manifest.blocks:
        inside = [f for f in usage if b.offset <= f < b.stop]
        per_block.append(BlockUsage(
            b.name,
            distinct=len(inside),
            multiplicity=sum(usage[f].multiplicity for f in inside),
            vote_mass=sum(usage[f].vote_mass for f in inside)))
    rounds = sum(len(bm.rounds) for bm in _binary_models(model))
    return SelectionReport(
        tuple(per_block),
        total_distinct=len(usage),
        total_rounds=rounds,
        total_vote_mass=sum(u.vote_mass for u in usage.values()))


def per_class_reports(model: MultiClassModel,
                      manifest: BlockManifest) -> dict[int, SelectionReport]:
    return {c: per_block_report(model.models[c], manifest) for c in model.classes}
