"""Dense labeled feature sets with named column-block provenance.

Storage is float32 (files can be large); all downstream training math is
float64. Sets are immutable after construction and safe to share read-only.
"""
from __future__ import annotations

import csv
import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

MAGIC = b"FVB1"
_HEADER = struct.Struct("<4sII")

# Per-class splits draw from numpy's PCG64 generator seeded with
# SeedSequence([seed mod 2**64, class_id]); this is the fixed, documented
# permutation source so splits reproduce across machines.
_SEED_MASK = 0xFFFFFFFFFFFFFFFF


class FeatureStoreError(ValueError):
    """Malformed file, invalid set, or violated operation precondition."""


@dataclass(frozen=True)
class Block:
    name: str
    offset: int
    width: int

    @property
    def stop(self) -> int:
        return self.offset + self.width


@dataclass(frozen=True)
class BlockManifest:
    blocks: tuple[Block, ...]

    def __post_init__(self):
        if not self.blocks:
            raise FeatureStoreError("manifest has no blocks")
        names = [b.name for b in self.blocks]
        if len(set(names)) != len(names):
            raise FeatureStoreError("duplicate block name in manifest")
        if any(not n for n in names):
            raise FeatureStoreError("empty block name in manifest")
        expect = 0
        for b in self.blocks:
            if b.offset != expect:
                raise FeatureStoreError(
                    f"block {b.name!r} offset {b.offset}, expected {expect}")
            if b.width <= 0:
                raise FeatureStoreError(f"block {b.name!r} has width {b.width}")
            expect = b.stop

    @property
    def width(self) -> int:
        return self.blocks[-1].stop

    def block_of(self, column: int) -> Block:
        for b in self.blocks:
            if b.offset <= column < b.stop:
                return b
        raise FeatureStoreError(f"column {column} outside manifest span [0, {self.width})")

    def __getitem__(self, name: str) -> Block:
        for b in self.blocks:
            if b.name == name:
                return b
        raise KeyError(name)

    @staticmethod
    def single(width: int, name: str = "default") -> "BlockManifest":
        return BlockManifest((Block(name, 0, width),))


@dataclass(frozen=True)
class LabeledFeatureSet:
    values: np.ndarray  # (n, d) float32, row-major
    labels: np.ndarray  # (n,) int64
    manifest: BlockManifest

    def __post_init__(self):
        v = np.ascontiguousarray(np.asarray(self.values, dtype=np.float32))
        lab = np.asarray(self.labels, dtype=np.int64)
        if v.ndim != 2:
            raise FeatureStoreError("values must be a 2-D matrix")
        n, d = v.shape
        if n == 0 or d == 0:
            raise FeatureStoreError("empty set (n=0 or d=0) rejected")
        if lab.shape != (n,):
            raise FeatureStoreError(f"labels length {lab.shape} != sample count {n}")
        bad = ~np.isfinite(v)
        if bad.any():
            r, c = np.argwhere(bad)[0]
            raise FeatureStoreError(f"non-finite value at row {r}, col {c}")
        if lab.min() < 0 or lab.max() > 2**31 - 1:
            i = int(np.argmax((lab < 0) | (lab > 2**31 - 1)))
            raise FeatureStoreError(f"label {lab[i]} at row {i} outside 0..2^31-1")
        if self.manifest.width != d:
            raise FeatureStoreError(
                f"manifest spans {self.manifest.width} columns, matrix has {d}")
        object.__setattr__(self, "values", v)
        object.__setattr__(self, "labels", lab)
        v.setflags(write=False)
        lab.setflags(write=False)

    @property
    def n(self) -> int:
        return self.values.shape[0]

    @property
    def d(self) -> int:
        return self.values.shape[1]

    @property
    def num_classes(self) -> int:
        return int(self.labels.max()) + 1

    def class_ids(self) -> list[int]:
        return sorted(int(c) for c in np.unique(self.labels))

    def __eq__(self, other) -> bool:
        if not isinstance(other, LabeledFeatureSet):
            return NotImplemented
        return (self.manifest == other.manifest
                and np.array_equal(self.labels, other.labels)
                and np.array_equal(self.values, other.values))


def _manifest_path(path) -> Path:
    return Path(str(path) + ".manifest")


def read_manifest(path) -> BlockManifest:
    path = Path(path)
    blocks = []
    for ln, line in enumerate(path.read_text().splitlines(), 1):
        line = line.strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 3:
            raise FeatureStoreError(f"{path}:{ln}: expected '<name> <offset> <width>'")
        blocks.append(Block(parts[0], int(parts[1]), int(parts[2])))
    return BlockManifest(tuple(blocks))


def _read_manifest(path: Path, d: int) -> BlockManifest:
    m = read_manifest(path)
    if m.width != d:
        raise FeatureStoreError(f"{path}: manifest width {m.width} != d={d}")
    return m


def _write_manifest(manifest: BlockManifest, path: Path) -> None:
    lines = [f"{b.name} {b.offset} {b.width}" for b in manifest.blocks]
    path.write_text("\n".join(lines) + "\n")


def load_features(path, format: str = "binary") -> LabeledFeatureSet:
    """Load a feature set from an FVB1 binary file or a small CSV fixture.

    A "<path>.manifest" sidecar supplies the block layout; without one the
    whole matrix becomes a single block named "default".
    """
    path = Path(path)
    if not path.exists():
        raise FeatureStoreError(f"no such file: {path}")
    if format == "binary":
        raw = path.read_bytes()
        if len(raw) < _HEADER.size:
            raise FeatureStoreError(f"{path}: truncated header")
        magic, n, d = _HEADER.unpack_from(raw)
        if magic != MAGIC:
            raise FeatureStoreError(f"{path}: bad magic {magic!r}")
        expect = _HEADER.size + 4 * n + 4 * n * d
        if len(raw) != expect:
            raise FeatureStoreError(
                f"{path}: payload size {len(raw)} bytes, header implies {expect}")
        labels = np.frombuffer(raw, dtype="<i4", count=n, offset=_HEADER.size)
        values = np.frombuffer(raw, dtype="<f4", count=n * d,
                               offset=_HEADER.size + 4 * n).reshape(n, d)
    elif format == "csv":
        with path.open(newline="") as fh:
            rows = list(csv.reader(fh))
        if not rows:
            raise FeatureStoreError(f"{path}: empty CSV")
        d = len(rows[0]) - 1
        if rows[0] != ["label"] + [f"f{i}" for i in range(d)]:
            raise FeatureStoreError(f"{path}: bad CSV header {rows[0][:4]}...")
        labels = np.array([int(r[0]) for r in rows[1:]], dtype=np.int64)
        values = np.array([[float(x) for x in r[1:]] for r in rows[1:]],
                          dtype=np.float32)
    else:
        raise FeatureStoreError(f"unknown format {format!r}")
    mpath = _manifest_path(path)
    manifest = _read_manifest(mpath, d) if mpath.exists() else BlockManifest.single(d)
    return LabeledFeatureSet(values, labels, manifest)


def save_features(fset: LabeledFeatureSet, path, format: str = "binary") -> None:
    """Write the canonical FVB1 binary plus its manifest sidecar."""
    path = Path(path)
    if format == "binary":
        with path.open("wb") as fh:
            fh.write(_HEADER.pack(MAGIC, fset.n, fset.d))
            fh.write(fset.labels.astype("<i4").tobytes())
            fh.write(fset.values.astype("<f4").tobytes())
    elif format == "csv":
        with path.open("w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["label"] + [f"f{i}" for i in range(fset.d)])
            for i in range(fset.n):
                w.writerow([int(fset.labels[i])] + [repr(float(x)) for x in fset.values[i]])
    else:
        raise FeatureStoreError(f"unknown format {format!r}")
    _write_manifest(fset.manifest, _manifest_path(path))


def concat_blocks(sets: list[LabeledFeatureSet]) -> LabeledFeatureSet:
    """Column-concatenate sets sharing samples; block names must stay unique."""
    if not sets:
        raise FeatureStoreError("concat of zero sets")
    first = sets[0]
    names: list[str] = []
    for s in sets:
        if s.n != first.n:
            raise FeatureStoreError(
                f"sample-count mismatch: {s.n} vs {first.n}")
        diff = np.nonzero(s.labels != first.labels)[0]
        if diff.size:
            r = int(diff[0])
            raise FeatureStoreError(
                f"label mismatch at row {r}: {s.labels[r]} vs {first.labels[r]}")
        for b in s.manifest.blocks:
            if b.name in names:
                raise FeatureStoreError(f"duplicate block name {b.name!r}")
            names.append(b.name)
    blocks = []
    offset = 0
    for s in sets:
        for b in s.manifest.blocks:
            blocks.append(Block(b.name, offset, b.width))
            offset += b.width
    values = np.hstack([s.values for s in sets])
    return LabeledFeatureSet(values, first.labels, BlockManifest(tuple(blocks)))


def extract_block(fset: LabeledFeatureSet, name: str) -> LabeledFeatureSet:
    """Slice out one named block as a standalone single-block set."""
    b = fset.manifest[name]
    return LabeledFeatureSet(fset.values[:, b.offset:b.stop], fset.labels,
                             BlockManifest.single(b.width, name))


def split_per_class(fset: LabeledFeatureSet, train_count: int,
                    test_count: int | None = None,
                    seed: int = 0) -> tuple[LabeledFeatureSet, LabeledFeatureSet]:
    """Per-class deterministic train/test split.

    Each class gets exactly train_count training samples drawn by a seeded
    shuffle; test takes test_count more when given, else all remaining.
    """
    if train_count <= 0:
        raise FeatureStoreError("train_count must be positive")
    if test_count is not None and test_count <= 0:
        raise FeatureStoreError("test_count must be positive when given")
    need = train_count + (test_count or 0)
    train_idx: list[np.ndarray] = []
    test_idx: list[np.ndarray] = []
    for c in fset.class_ids():
        members = np.nonzero(fset.labels == c)[0]
        if len(members) < need:
            raise FeatureStoreError(
                f"class {c} has {len(members)} samples, needs {need}")
        rng = np.random.default_rng([seed & _SEED_MASK, c])
        perm = rng.permutation(len(members))
        train_idx.append(members[perm[:train_count]])
        stop = train_count + test_count if test_count is not None else None
        test_idx.append(members[perm[train_count:stop]])
    tr = np.sort(np.concatenate(train_idx))
    te = np.sort(np.concatenate(test_idx))
    return (LabeledFeatureSet(fset.values[tr], fset.labels[tr], fset.manifest),
            LabeledFeatureSet(fset.values[te], fset.labels[te], fset.manifest))
