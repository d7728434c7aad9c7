import numpy as np
import pytest

from stumpboost import BlockManifest, LabeledFeatureSet


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def make_set(values, labels, manifest=None):
    values = np.asarray(values, dtype=np.float32)
    if values.ndim == 1:
        values = values[:, None]
    if manifest is None:
        manifest = BlockManifest.single(values.shape[1])
    return LabeledFeatureSet(values, np.asarray(labels), manifest)


def random_instance(rng, n_max=50, d_max=20):
    """Random weighted binary problem for stump-fitting checks."""
    n = int(rng.integers(2, n_max + 1))
    d = int(rng.integers(1, d_max + 1))
    values = rng.normal(size=(n, d)).astype(np.float32)
    if rng.random() < 0.3:  # inject ties so the distinct-value logic is hit
        values = np.round(values * 2) / 2
    targets = rng.choice([-1, 1], size=n)
    if np.all(targets == targets[0]) and n > 1:
        targets[0] = -targets[0]
    weights = rng.random(n)
    if rng.random() < 0.2:
        weights[rng.integers(0, n)] = 0.0
    weights /= weights.sum()
    fset = make_set(values, np.zeros(n, dtype=np.int64))
    return fset, targets, weights
