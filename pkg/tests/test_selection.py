import numpy as np
import pytest

from stumpboost import (BlockManifest, TrainConfig, per_block_report,
                        selected_features, train_ovr)
from stumpboost.boosting import BinaryModel, MultiClassModel
from stumpboost.features import Block
from stumpboost.selection import SelectionError, per_class_reports
from stumpboost.stump import Stump

from conftest import make_set


def model_on(features_alphas):
    return BinaryModel(rounds=[(Stump(f, 0.0, 1), a) for f, a in features_alphas])


FC = BlockManifest((Block("FC6", 0, 4096), Block("FC7", 4096, 4096)))


class TestSelectedFeatures:
    def test_multiset_aggregation(self):
        usage = selected_features(model_on([(7, 0.5), (7, 0.2), (12, 0.4)]))
        assert usage[7].multiplicity == 2
        assert usage[7].vote_mass == pytest.approx(0.7)
        assert usage[12].multiplicity == 1
        assert usage[12].vote_mass == pytest.approx(0.4)

    def test_empty(self):
        assert selected_features(BinaryModel()) == {}

    def test_distinct_bounded_by_rounds(self, rng):
        fset = make_set(rng.normal(size=(30, 10)),
                        rng.integers(0, 2, size=30))
        model = train_ovr(fset, TrainConfig(rounds=7))
        for c in model.classes:
            assert len(selected_features(model.models[c])) <= 7


class TestPerBlockReport:
    def test_span_lookup(self):
        rep = per_block_report(model_on([(10, 1.0), (5000, 2.0)]), FC)
        by_name = {b.name: b for b in rep.per_block}
        assert by_name["FC6"].distinct == 1
        assert by_name["FC7"].distinct == 1
        assert rep.total_distinct == 2

    def test_unused_block_zero(self):
        rep = per_block_report(model_on([(1, 1.0), (2, 0.5)]), FC)
        by_name = {b.name: b for b in rep.per_block}
        assert by_name["FC7"].distinct == 0
        assert by_name["FC7"].vote_mass == 0.0

    def test_partition_and_mass_conservation(self, rng):
        fset = make_set(rng.normal(size=(40, 6)), rng.integers(0, 3, size=40))
        manifest = BlockManifest((Block("a", 0, 2), Block("b", 2, 4)))
        fset = make_set(fset.values, fset.labels, manifest)
        model = train_ovr(fset, TrainConfig(rounds=10))
        rep = per_block_report(model, manifest)
        assert sum(b.distinct for b in rep.per_block) == rep.total_distinct
        total_alpha = sum(a for c in model.classes
                          for _, a in model.models[c].rounds)
        assert sum(b.vote_mass for b in rep.per_block) == pytest.approx(total_alpha)
        assert rep.total_distinct <= rep.total_rounds

    def test_out_of_span(self):
        with pytest.raises(SelectionError, match="outside"):
            per_block_report(model_on([(9000, 1.0)]), FC)

    def test_machine_format(self):
        rep = per_block_report(model_on([(10, 0.5)]), FC)
        line = rep.machine_lines()[0]
        assert line == "block=FC6 distinct=1 multiplicity=1 votemass=0.5"

    def test_per_class(self):
        m = MultiClassModel({0: model_on([(1, 1.0)]),
                             1: model_on([(5000, 2.0)])}, [0, 1], 1)
        reps = per_class_reports(m, FC)
        assert {b.name: b.distinct for b in reps[0].per_block} == {"FC6": 1, "FC7": 0}
        assert {b.name: b.distinct for b in reps[1].per_block} == {"FC6": 0, "FC7": 1}
