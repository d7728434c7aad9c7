import struct

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from stumpboost import (Block, BlockManifest, FeatureStoreError,
                        LabeledFeatureSet, concat_blocks, extract_block,
                        load_features, save_features, split_per_class)
from stumpboost.synth import SynthBlock, SynthConfig, generate

from conftest import make_set


def random_set(rng, n, d, classes=3, manifest=None):
    return make_set(rng.normal(size=(n, d)), rng.integers(0, classes, size=n),
                    manifest)


class TestValidation:
    def test_empty_rejected(self):
        with pytest.raises(FeatureStoreError, match="empty"):
            make_set(np.zeros((0, 3), dtype=np.float32), [])

    def test_nan_located(self):
        v = np.zeros((5, 3), dtype=np.float32)
        v[3, 1] = np.nan
        with pytest.raises(FeatureStoreError, match=r"row 3, col 1"):
            LabeledFeatureSet(v, np.zeros(5, dtype=np.int64),
                              BlockManifest.single(3))

    def test_negative_label(self):
        with pytest.raises(FeatureStoreError, match="label"):
            make_set(np.ones((2, 1), dtype=np.float32), [-1, 0])

    def test_manifest_must_tile(self):
        with pytest.raises(FeatureStoreError, match="offset"):
            BlockManifest((Block("a", 0, 2), Block("b", 3, 1)))
        with pytest.raises(FeatureStoreError, match="duplicate"):
            BlockManifest((Block("a", 0, 2), Block("a", 2, 1)))

    def test_label_gaps_allowed(self):
        s = make_set(np.ones((3, 1), dtype=np.float32), [0, 5, 5])
        assert s.num_classes == 6


class TestRoundTrip:
    def test_small_binary(self, rng, tmp_path):
        s = random_set(rng, 10, 5)
        save_features(s, tmp_path / "s.fvb")
        assert load_features(tmp_path / "s.fvb") == s

    def test_n4_d2(self, rng, tmp_path):
        s = random_set(rng, 4, 2)
        save_features(s, tmp_path / "s.fvb")
        back = load_features(tmp_path / "s.fvb")
        assert back.n == 4 and back.d == 2
        assert len(back.manifest.blocks) == 1

    def test_synth_three_block_manifest(self, tmp_path):
        cfg = SynthConfig(2, 5, 5, (SynthBlock("a", 2, 1, 1, (0, 1)),
                                    SynthBlock("b", 1, 0, 2, (0, 1)),
                                    SynthBlock("c", 1, 2, 0, (0, 1))), seed=3)
        train, _, _ = generate(cfg)
        save_features(train, tmp_path / "t.fvb")
        back = load_features(tmp_path / "t.fvb")
        assert back == train
        assert back.manifest == train.manifest

    def test_csv(self, rng, tmp_path):
        s = random_set(rng, 6, 3)
        save_features(s, tmp_path / "s.csv", format="csv")
        assert load_features(tmp_path / "s.csv", format="csv") == s

    @settings(max_examples=25, deadline=None)
    @given(n=st.integers(1, 8), d=st.integers(1, 6), seed=st.integers(0, 10**6))
    def test_roundtrip_property(self, tmp_path_factory, n, d, seed):
        rng = np.random.default_rng(seed)
        s = random_set(rng, n, d)
        path = tmp_path_factory.mktemp("rt") / "s.fvb"
        save_features(s, path)
        assert load_features(path) == s


class TestLoadErrors:
    def test_bad_magic(self, tmp_path):
        p = tmp_path / "bad.fvb"
        p.write_bytes(b"NOPE" + b"\x00" * 16)
        with pytest.raises(FeatureStoreError, match="bad magic"):
            load_features(p)

    def test_size_mismatch(self, tmp_path):
        p = tmp_path / "short.fvb"
        p.write_bytes(struct.pack("<4sII", b"FVB1", 4, 2) + b"\x00" * 8)
        with pytest.raises(FeatureStoreError, match="size"):
            load_features(p)

    def test_nan_payload_located(self, tmp_path):
        n, d = 5, 3
        vals = np.zeros((n, d), dtype="<f4")
        vals[3, 1] = np.nan
        p = tmp_path / "nan.fvb"
        p.write_bytes(struct.pack("<4sII", b"FVB1", n, d)
                      + np.zeros(n, dtype="<i4").tobytes() + vals.tobytes())
        with pytest.raises(FeatureStoreError, match=r"row 3, col 1"):
            load_features(p)

    def test_missing_file(self, tmp_path):
        with pytest.raises(FeatureStoreError, match="no such file"):
            load_features(tmp_path / "nope.fvb")

    def test_bad_csv_header(self, tmp_path):
        p = tmp_path / "bad.csv"
        p.write_text("lbl,a,b\n0,1,2\n")
        with pytest.raises(FeatureStoreError, match="header"):
            load_features(p, format="csv")


class TestConcat:
    def test_fc6_fc7_width(self, rng):
        a = random_set(rng, 3, 4096, manifest=BlockManifest.single(4096, "FC6"))
        b = make_set(rng.normal(size=(3, 4096)), a.labels,
                     BlockManifest.single(4096, "FC7"))
        c = concat_blocks([a, b])
        assert c.d == 8192
        assert [blk.name for blk in c.manifest.blocks] == ["FC6", "FC7"]
        assert c.manifest["FC7"].offset == 4096

    def test_single_identity(self, rng):
        a = random_set(rng, 5, 3)
        assert concat_blocks([a]) == a

    def test_label_mismatch_row(self, rng):
        a = make_set(np.ones((2, 1), dtype=np.float32), [0, 1],
                     BlockManifest.single(1, "a"))
        b = make_set(np.ones((2, 1), dtype=np.float32), [1, 0],
                     BlockManifest.single(1, "b"))
        with pytest.raises(FeatureStoreError, match="row 0"):
            concat_blocks([a, b])

    def test_sample_count_mismatch(self, rng):
        a = random_set(rng, 3, 2, manifest=BlockManifest.single(2, "a"))
        b = make_set(np.ones((4, 2), dtype=np.float32), [0, 0, 0, 0],
                     BlockManifest.single(2, "b"))
        with pytest.raises(FeatureStoreError, match="sample-count"):
            concat_blocks([a, b])

    def test_duplicate_name(self, rng):
        a = random_set(rng, 3, 2)
        b = make_set(rng.normal(size=(3, 2)), a.labels)
        with pytest.raises(FeatureStoreError, match="duplicate"):
            concat_blocks([a, b])

    def test_associative(self, rng):
        labels = rng.integers(0, 2, size=4)
        a, b, c = (make_set(rng.normal(size=(4, 2)), labels,
                            BlockManifest.single(2, nm)) for nm in "abc")
        assert concat_blocks([concat_blocks([a, b]), c]) == concat_blocks([a, b, c])

    def test_extract_block_roundtrip(self, rng):
        labels = rng.integers(0, 2, size=4)
        a, b = (make_set(rng.normal(size=(4, 3)), labels,
                         BlockManifest.single(3, nm)) for nm in "ab")
        both = concat_blocks([a, b])
        assert extract_block(both, "b") == b


class TestSplit:
    def make_classes(self, rng, counts):
        labels = np.concatenate([np.full(m, c) for c, m in counts.items()])
        return make_set(rng.normal(size=(len(labels), 3)), labels)

    def test_60_rest(self, rng):
        s = self.make_classes(rng, {0: 100, 1: 100})
        train, test = split_per_class(s, 60, seed=9)
        for c in (0, 1):
            assert (train.labels == c).sum() == 60
            assert (test.labels == c).sum() == 40
        assert train.manifest == s.manifest and test.manifest == s.manifest

    def test_50_50(self, rng):
        s = self.make_classes(rng, {c: 100 + c for c in range(5)})
        train, test = split_per_class(s, 50, test_count=50, seed=1)
        for c in range(5):
            assert (train.labels == c).sum() == 50
            assert (test.labels == c).sum() == 50

    def test_too_few_names_class(self, rng):
        s = self.make_classes(rng, {0: 100, 7: 59})
        with pytest.raises(FeatureStoreError, match="class 7 has 59"):
            split_per_class(s, 60)

    def test_deterministic_and_seed_sensitive(self, rng):
        s = self.make_classes(rng, {0: 30, 1: 30})
        a1 = split_per_class(s, 10, seed=5)
        a2 = split_per_class(s, 10, seed=5)
        b = split_per_class(s, 10, seed=6)
        assert a1[0] == a2[0] and a1[1] == a2[1]
        assert not np.array_equal(a1[0].values, b[0].values)

    def test_disjoint(self, rng):
        s = self.make_classes(rng, {0: 40})
        s = make_set(np.arange(40, dtype=np.float32)[:, None], np.zeros(40))
        train, test = split_per_class(s, 25, seed=2)
        tr = set(train.values[:, 0].tolist())
        te = set(test.values[:, 0].tolist())
        assert not tr & te
        assert len(tr | te) == 40
