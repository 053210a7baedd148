"""Command-line front end: fuse, gen-dataset, eval, bench.

Exit codes: 0 success, 2 bad arguments, 3 I/O or file-format problems,
4 dimension mismatches. Every failure prints a single `error:` line.
"""

import argparse
import re
import sys
from pathlib import Path

from . import fusion, harness, metrics, pgm
from .blocks import DimensionError

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_IO = 3
EXIT_DIMENSION = 4

_DEFAULT_METHODS = "variance-dct,variance-dct+cv,ac-max,sml-dct+cv"
_TRUTH_RE = re.compile(r"^(?P<name>.+)_r(?P<radius>\d+)_truth\.pgm$")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        print(f"error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def build_parser():
    parser = _Parser(
        prog="dctfuse",
        description="Multi-focus grayscale image fusion in the 8x8 DCT block domain.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    fuse = sub.add_parser("fuse", help="fuse two or more PGM images")
    fuse.add_argument("--inputs", nargs="+", required=True, metavar="PGM")
    fuse.add_argument("--output", required=True, metavar="PGM")
    fuse.add_argument("--measure", choices=fusion.MEASURES, default="sml-dct")
    fuse.add_argument("--threshold", type=float, default=0.0)
    fuse.add_argument(
        "--cv",
        action=argparse.BooleanOptionalAction,
        default=True,
        help="3x3 consistency verification of the decision map",
    )
    fuse.add_argument(
        "--dump-maps",
        metavar="DIR",
        help="also write decision/refined maps as text grids into DIR",
    )
    fuse.set_defaults(func=_cmd_fuse)

    gen = sub.add_parser("gen-dataset", help="generate split-focus benchmark triples")
    gen.add_argument("--images", metavar="DIR", help="directory of pristine PGMs")
    gen.add_argument(
        "--synthetic",
        type=int,
        metavar="N",
        help="generate N procedural 512x512 images instead of (or on top of) --images",
    )
    gen.add_argument("--radii", default="5,7,9", metavar="R,R,...")
    gen.add_argument("--out", required=True, metavar="DIR")
    gen.set_defaults(func=_cmd_gen_dataset)

    ev = sub.add_parser("eval", help="score a fused image")
    ev.add_argument("--fused", required=True, metavar="PGM")
    ev.add_argument("--ref", metavar="PGM", help="ground truth for SSIM")
    ev.add_argument(
        "--sources",
        nargs=2,
        metavar=("A", "B"),
        help="source pair for the no-reference metrics",
    )
    ev.set_defaults(func=_cmd_eval)

    bench = sub.add_parser("bench", help="run the benchmark over a dataset directory")
    bench.add_argument("--dataset", required=True, metavar="DIR")
    bench.add_argument("--methods", default=_DEFAULT_METHODS, metavar="M,M,...")
    bench.add_argument("--repeat", type=int, default=5, metavar="N")
    bench.add_argument(
        "--figures",
        metavar="DIR",
        help="also render report charts (PNG) into DIR",
    )
    bench.set_defaults(func=_cmd_bench)

    return parser


def _read_images(paths):
    imgs = []
    shape = None
    for p in paths:
        img = pgm.read_image(p)
        if shape is None:
            shape = img.shape
        elif img.shape != shape:
            raise DimensionError(
                f"{p}: dimensions {img.shape[1]}x{img.shape[0]} do not match "
                f"{shape[1]}x{shape[0]} of {paths[0]}"
            )
        imgs.append(img)
    return imgs


def _cmd_fuse(args):
    if len(args.inputs) < 2:
        raise ValueError("need at least two --inputs")
    imgs = _read_images(args.inputs)
    cfg = fusion.FusionConfig(
        measure=args.measure,
        decision_threshold=args.threshold,
        consistency_verification=args.cv,
    )
    if len(imgs) == 2:
        result = fusion.fuse_pair(imgs[0], imgs[1], cfg)
        fused, decision, refined = result.fused, result.decision, result.refined
    else:
        fused, labels = fusion.fuse_multi(imgs, cfg, return_labels=True)
        decision, refined = labels, None
    pgm.write_image(fused, args.output)
    if args.dump_maps:
        outdir = Path(args.dump_maps)
        outdir.mkdir(parents=True, exist_ok=True)
        (outdir / "decision_map.txt").write_text(fusion.format_map(decision))
        if refined is not None:
            (outdir / "refined_map.txt").write_text(fusion.format_map(refined))
    return EXIT_OK


def _parse_radii(text):
    radii = []
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        try:
            radius = int(part)
        except ValueError:
            raise ValueError(f"bad radius '{part}'") from None
        if radius < 0:
            raise ValueError(f"radius must be >= 0, got {radius}")
        radii.append(radius)
    if not radii:
        raise ValueError("no radii given")
    return radii


def _cmd_gen_dataset(args):
    radii = _parse_radii(args.radii)
    images = []
    if args.images:
        for p in sorted(Path(args.images).iterdir()):
            if p.suffix.lower() == ".pgm":
                images.append((p.stem, pgm.read_image(p)))
    if args.synthetic:
        for i in range(args.synthetic):
            images.append((f"synth{i:02d}", harness.synthetic_image(seed=i)))
    if not images:
        raise ValueError("no input images; give --images with PGMs or --synthetic N")
    outdir = Path(args.out)
    outdir.mkdir(parents=True, exist_ok=True)
    for name, img in images:
        for radius in radii:
            a, b, truth = harness.make_split_focus_pair(img, radius)
            pgm.write_image(a, outdir / f"{name}_r{radius}_A.pgm")
            pgm.write_image(b, outdir / f"{name}_r{radius}_B.pgm")
            pgm.write_image(truth, outdir / f"{name}_r{radius}_truth.pgm")
    return EXIT_OK


def _cmd_eval(args):
    if not args.ref and not args.sources:
        raise ValueError("need --ref and/or --sources")
    fused = pgm.read_image(args.fused)
    report = metrics.MetricsReport(name=str(args.fused))
    if args.ref:
        report.ssim = metrics.ssim(pgm.read_image(args.ref), fused)
    if args.sources:
        a = pgm.read_image(args.sources[0])
        b = pgm.read_image(args.sources[1])
        report.mi = metrics.mutual_information(a, b, fused)
        report.qabf = metrics.petrovic_qabf(a, b, fused)
    for row in report.csv_rows():
        print(row)
    return EXIT_OK


def _discover_triples(dataset):
    dataset = Path(dataset)
    triples = []
    for truth_path in sorted(dataset.glob("*_truth.pgm")):
        match = _TRUTH_RE.match(truth_path.name)
        if not match:
            continue
        name = match.group("name")
        radius = int(match.group("radius"))
        a_path = dataset / f"{name}_r{radius}_A.pgm"
        b_path = dataset / f"{name}_r{radius}_B.pgm"
        if not a_path.exists() or not b_path.exists():
            continue
        triples.append(
            (
                name,
                radius,
                pgm.read_image(a_path),
                pgm.read_image(b_path),
                pgm.read_image(truth_path),
            )
        )
    return triples


def _cmd_bench(args):
    methods = [t.strip() for t in args.methods.split(",") if t.strip()]
    if not methods:
        raise ValueError("no methods given")
    for token in methods:
        harness.parse_method(token)
    if args.repeat < 1:
        raise ValueError(f"--repeat must be >= 1, got {args.repeat}")
    triples = _discover_triples(args.dataset)
    if not triples:
        raise ValueError(
            f"no dataset triples (<name>_r<R>_{{A,B,truth}}.pgm) found in {args.dataset}"
        )
    report = harness.bench_triples(triples, methods, repeat=args.repeat)
    sys.stdout.write(report.to_csv())
    if args.figures:
        from . import plots

        plots.save_report_figures(report, args.figures)
    return EXIT_OK


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except DimensionError as exc:
        return _fail(EXIT_DIMENSION, exc)
    except pgm.PgmError as exc:
        return _fail(EXIT_IO, exc)
    except OSError as exc:
        return _fail(EXIT_IO, exc)
    except ValueError as exc:
        return _fail(EXIT_USAGE, exc)


def _fail(code, exc):
    print(f"error: {exc}", file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
