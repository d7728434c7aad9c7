import argparse
import logging
import sys

from .extract import ExtractionError, ExtractionSpec, dump_activations


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="stumpboost-extract",
        description="dump fully-connected CNN activations for an image folder "
                    "(one subdirectory per class) into FVB1 feature files")
    parser.add_argument("--images", required=True, help="image root directory")
    parser.add_argument("--weights", required=True,
                        help="local AlexNet state_dict (.pth)")
    parser.add_argument("--out", required=True, help="output path prefix")
    parser.add_argument("--layers", default="fc6,fc7,fc8",
                        help="comma-separated subset of fc6,fc7,fc8")
    parser.add_argument("--resize", type=int, default=256)
    parser.add_argument("--crop", type=int, default=224)
    parser.add_argument("--batch-size", type=int, default=16)
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO)
    try:
        spec = ExtractionSpec(
            image_dir=args.images, weights=args.weights, out_prefix=args.out,
            layers=tuple(l for l in args.layers.split(",") if l),
            resize=args.resize, crop=args.crop, batch_size=args.batch_size)
        written = dump_activations(spec)
    except (ExtractionError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    for layer, path in written.items():
        print(f"wrote {path}")
    return 0


def entry() -> None:
    raise SystemExit(main())
