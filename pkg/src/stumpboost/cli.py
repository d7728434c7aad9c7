"""Command-line front end: train / predict / eval / compare / synth / report.

Flag precedence: command-line flags override a key=value config file, which
overrides built-in defaults.
"""
from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import boosting, harness, selection, synth
from .boosting import TrainConfig
from .features import (concat_blocks, load_features, read_manifest,
                       save_features)


def _parse_blocks(arg: str) -> list[tuple[str, str]]:
    out = []
    for part in arg.split(","):
        if "=" not in part:
            raise ValueError(f"--blocks entry {part!r} is not name=path")
        name, path = part.split("=", 1)
        out.append((name, path))
    return out


def _read_config_file(path: str) -> dict[str, str]:
    conf = {}
    for ln, line in enumerate(Path(path).read_text().splitlines(), 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ValueError(f"{path}:{ln}: expected key=value")
        k, v = line.split("=", 1)
        conf[k.strip()] = v.strip()
    return conf


def _effective(args, key: str, cast, default):
    cli = getattr(args, key, None)
    if cli is not None:
        return cli
    conf = getattr(args, "_file_config", {})
    if key in conf:
        return cast(conf[key])
    return default


def _load_block_sets(args):
    sets = [harness._load_named(n, p) for n, p in args.blocks]
    return concat_blocks(sets) if len(sets) > 1 else sets[0]


def _train_config(args) -> TrainConfig:
    return TrainConfig(rounds=_effective(args, "rounds", int, 256))


def _cmd_train(args) -> int:
    fset = _load_block_sets(args)
    model = boosting.train_ovr(fset, _train_config(args))
    boosting.save_model(model, args.model)
    print(f"wrote model {args.model} ({len(model.classes)} classes)")
    return 0


def _cmd_predict(args) -> int:
    fset = _load_block_sets(args)
    model = boosting.load_model(args.model)
    pred = boosting.predict_multiclass_matrix(model, fset.values.astype(np.float64))
    text = "\n".join(str(int(p)) for p in pred) + "\n"
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return 0


def _cmd_eval(args) -> int:
    fset = _load_block_sets(args)
    model = boosting.load_model(args.model)
    print(f"accuracy {harness.evaluate(model, fset):.4f}")
    return 0


def _cmd_compare(args) -> int:
    spec = harness.ExperimentSpec(
        blocks=tuple(args.blocks),
        train_count=_effective(args, "train_count", int, None),
        test_count=_effective(args, "test_count", int, None),
        seed=_effective(args, "seed", int, 0),
        config=_train_config(args))
    table = harness.run_comparison(spec)
    fmt = _effective(args, "format", str, "text")
    text = table.csv() if fmt == "csv" else table.text()
    if args.out:
        Path(args.out).write_text(text + "\n")
    else:
        print(text)
    return 0


def _parse_block_spec(spec: str, classes: int) -> synth.SynthBlock:
    parts = spec.split(":")
    if len(parts) not in (4, 5):
        raise ValueError(f"block spec {spec!r} is not name:informative:redundant"
                         ":noise[:c0;c1;...]")
    coverage = (tuple(int(c) for c in parts[4].split(";")) if len(parts) == 5
                else tuple(range(classes)))
    return synth.SynthBlock(parts[0], int(parts[1]), int(parts[2]),
                            int(parts[3]), coverage)


def _cmd_synth(args) -> int:
    classes = _effective(args, "classes", int, 4)
    cfg = synth.SynthConfig(
        classes=classes,
        train_per_class=_effective(args, "train_per_class", int, 60),
        test_per_class=_effective(args, "test_per_class", int, 40),
        blocks=tuple(_parse_block_spec(s, classes) for s in args.block_spec),
        gap=_effective(args, "gap", float, 4.0),
        noise_scale=_effective(args, "noise_scale", float, 1.0),
        seed=_effective(args, "seed", int, 0))
    train, test, truth = synth.generate(cfg)
    save_features(train, args.out + ".train.fvb")
    save_features(test, args.out + ".test.fvb")
    lines = [f"{name} {col}" for name, cols in truth.items() for col in cols]
    Path(args.out + ".groundtruth.txt").write_text("\n".join(lines) + "\n")
    print(f"wrote {args.out}.train.fvb ({train.n}x{train.d}), "
          f"{args.out}.test.fvb ({test.n}x{test.d})")
    return 0


def _cmd_report(args) -> int:
    model = boosting.load_model(args.model)
    if args.manifest:
        manifest = read_manifest(args.manifest)
    elif args.blocks:
        manifest = _load_block_sets(args).manifest
    else:
        raise ValueError("report needs --manifest or --blocks")
    report = selection.per_block_report(model, manifest)
    for line in report.machine_lines():
        print(line)
    if args.per_class:
        for c, rep in selection.per_class_reports(model, manifest).items():
            for line in rep.machine_lines():
                print(f"class={c} {line}")
    return 0


def _add_common(p, blocks_required=True):
    p.add_argument("--blocks", type=_parse_blocks,
                   required=blocks_required, help="name=path[,name=path...]")
    p.add_argument("--config", help="key=value config file")
    p.add_argument("--rounds", type=int)
    p.add_argument("--seed", type=int)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="stumpboost")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("train", help="train a one-vs-rest boosted-stump model")
    _add_common(p)
    p.add_argument("--model", required=True)
    p.set_defaults(func=_cmd_train)

    p = sub.add_parser("predict", help="write one predicted class id per row")
    _add_common(p)
    p.add_argument("--model", required=True)
    p.add_argument("--out")
    p.set_defaults(func=_cmd_predict)

    p = sub.add_parser("eval", help="print accuracy of a model on a labeled set")
    _add_common(p)
    p.add_argument("--model", required=True)
    p.set_defaults(func=_cmd_eval)

    p = sub.add_parser("compare",
                       help="single-block vs concatenation accuracy table")
    _add_common(p)
    p.add_argument("--train-count", type=int, dest="train_count")
    p.add_argument("--test-count", type=int, dest="test_count")
    p.add_argument("--format", choices=("text", "csv"))
    p.add_argument("--out")
    p.set_defaults(func=_cmd_compare)

    p = sub.add_parser("synth", help="write a synthetic multi-block dataset")
    p.add_argument("--config", help="key=value config file")
    p.add_argument("--classes", type=int)
    p.add_argument("--train-per-class", type=int, dest="train_per_class")
    p.add_argument("--test-per-class", type=int, dest="test_per_class")
    p.add_argument("--block-spec", action="append", dest="block_spec",
                   required=True,
                   help="name:informative:redundant:noise[:c0;c1;...]; repeatable")
    p.add_argument("--gap", type=float)
    p.add_argument("--noise-scale", type=float, dest="noise_scale")
    p.add_argument("--seed", type=int)
    p.add_argument("--out", required=True, help="output path prefix")
    p.set_defaults(func=_cmd_synth)

    p = sub.add_parser("report", help="per-block feature-selection report")
    _add_common(p, blocks_required=False)
    p.add_argument("--model", required=True)
    p.add_argument("--manifest", help="manifest sidecar describing the blocks")
    p.add_argument("--per-class", action="store_true", dest="per_class")
    p.set_defaults(func=_cmd_report)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        args._file_config = _read_config_file(args.config) if getattr(
            args, "config", None) else {}
        return args.func(args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def entry() -> None:
    raise SystemExit(main())
