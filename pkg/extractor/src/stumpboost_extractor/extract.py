"""Run an image folder through an AlexNet-style network and dump the last
fully connected stages as FVB1 feature files.

Layout contract: one subdirectory per class under the image root; class ids
follow sorted directory order. Every emitted layer file shares one row order
(recorded in rows.txt), so the files satisfy the concatenation preconditions
of the training library.

Captured activations are post-nonlinearity for the two hidden FC stages and
raw pre-softmax scores for the final stage.
"""
from __future__ import annotations

import logging
import struct
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import torch
from PIL import Image
from torchvision import models, transforms

log = logging.getLogger(__name__)

MAGIC = b"FVB1"

# classifier-module indices of the captured outputs in torchvision's AlexNet
_LAYER_TAPS = {"fc6": 2, "fc7": 5, "fc8": 6}
LAYER_WIDTHS = {"fc6": 4096, "fc7": 4096, "fc8": 1000}


class ExtractionError(RuntimeError):
    pass


@dataclass(frozen=True)
class ExtractionSpec:
    image_dir: str
    weights: str                     # local AlexNet state_dict file
    out_prefix: str
    layers: tuple[str, ...] = ("fc6", "fc7", "fc8")
    resize: int = 256
    crop: int = 224
    mean: tuple[float, float, float] = (0.485, 0.456, 0.406)
    std: tuple[float, float, float] = (0.229, 0.224, 0.225)
    batch_size: int = 16

    def __post_init__(self):
        if not self.layers:
            raise ExtractionError("at least one layer must be requested")
        unknown = [l for l in self.layers if l not in _LAYER_TAPS]
        if unknown:
            raise ExtractionError(f"unknown layers {unknown}; "
                                  f"choose from {sorted(_LAYER_TAPS)}")


def _list_images(root: Path) -> tuple[list[tuple[Path, int]], list[str]]:
    classes = sorted(p.name for p in root.iterdir() if p.is_dir())
    if not classes:
        raise ExtractionError(f"{root}: no class subdirectories")
    items = []
    for cid, name in enumerate(classes):
        files = sorted(p for p in (root / name).iterdir() if p.is_file())
        if not files:
            raise ExtractionError(f"{root / name}: class directory is empty")
        items += [(p, cid) for p in files]
    return items, classes


def _load_model(weights_path: Path) -> torch.nn.Module:
    if not weights_path.exists():
        raise ExtractionError(f"weights file not found: {weights_path}")
    model = models.alexnet(weights=None)
    state = torch.load(weights_path, map_location="cpu", weights_only=True)
    model.load_state_dict(state)
    model.eval()
    return model


def _write_fvb(path: Path, labels: np.ndarray, values: np.ndarray,
               block_name: str) -> None:
    n, d = values.shape
    with path.open("wb") as fh:
        fh.write(struct.pack("<4sII", MAGIC, n, d))
        fh.write(labels.astype("<i4").tobytes())
        fh.write(values.astype("<f4").tobytes())
    Path(str(path) + ".manifest").write_text(f"{block_name} 0 {d}\n")


def dump_activations(spec: ExtractionSpec) -> dict[str, Path]:
    """Extract every requested layer; returns layer name -> FVB1 path.

    Also writes "<prefix>.labels.txt" (class id <-> directory name) and
    "<prefix>.rows.txt" (row index <-> image path). Undecodable images are
    skipped with a warning and excluded from every layer consistently.
    """
    root = Path(spec.image_dir)
    items, classes = _list_images(root)
    model = _load_model(Path(spec.weights))

    captured: dict[str, list[torch.Tensor]] = {l: [] for l in spec.layers}
    hooks = []
    for layer in spec.layers:
        module = model.classifier[_LAYER_TAPS[layer]]
        hooks.append(module.register_forward_hook(
            lambda _m, _i, out, layer=layer: captured[layer].append(
                out.detach().clone())))

    preprocess = transforms.Compose([
        transforms.Resize(spec.resize),
        transforms.CenterCrop(spec.crop),
        transforms.ToTensor(),
        transforms.Normalize(spec.mean, spec.std),
    ])

    kept_paths: list[Path] = []
    kept_labels: list[int] = []
    batch: list[torch.Tensor] = []
    try:
        with torch.no_grad():
            for path, cid in items:
                try:
                    with Image.open(path) as img:
                        tensor = preprocess(img.convert("RGB"))
                except Exception as exc:
                    log.warning("skipping undecodable image %s: %s", path, exc)
                    continue
                batch.append(tensor)
                kept_paths.append(path)
                kept_labels.append(cid)
                if len(batch) == spec.batch_size:
                    model(torch.stack(batch))
                    batch = []
            if batch:
                model(torch.stack(batch))
    finally:
        for h in hooks:
            h.remove()

    if not kept_paths:
        raise ExtractionError("no decodable images found")
    labels = np.asarray(kept_labels, dtype=np.int64)

    prefix = Path(spec.out_prefix)
    prefix.parent.mkdir(parents=True, exist_ok=True)
    out: dict[str, Path] = {}
    for layer in spec.layers:
        values = torch.cat(captured[layer]).numpy()
        if values.shape != (len(kept_paths), LAYER_WIDTHS[layer]):
            raise ExtractionError(
                f"{layer}: captured shape {values.shape}, expected "
                f"({len(kept_paths)}, {LAYER_WIDTHS[layer]})")
        target = Path(f"{prefix}.{layer}.fvb")
        _write_fvb(target, labels, values, layer)
        out[layer] = target
    Path(f"{prefix}.labels.txt").write_text(
        "".join(f"{cid} {name}\n" for cid, name in enumerate(classes)))
    Path(f"{prefix}.rows.txt").write_text(
        "".join(f"{p}\n" for p in kept_paths))
    return out
