"""``mbi`` command-line front end.

    mbi analyze <image> [--threshold N] [--crop-ratio F] [--axis vertical|horizontal|auto]
                        [--roi-extent plate|foot] [--ranges FILE] [--config FILE]
    mbi batch <dir> [--out CSV] [--jobs N] [...]
    mbi sweep <image> [--tolerance PCT] [--steps N] [--format csv|json] [...]
    mbi generate <template.json> <out.png>

Exit codes: 0 success, 1 usage or configuration error, 2 analysis or IO error.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import io
import json
import logging
import sys
from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

from .errors import FootprintError, ZeroContactArea
from .geometry import AXES, EXTENTS
from .imaging import encode_png, load_image, to_grayscale
from .mbi import AnalysisConfig, FootAssessment, FootClass, RangeTable, assess
from .sensitivity import DEFAULT_STEPS, DEFAULT_TOLERANCE_PCT, threshold_sweep
from .synth import FootTemplate, InvalidTemplate, analytic_mbi, generate

log = logging.getLogger("footprint")

EXIT_OK, EXIT_USAGE, EXIT_ANALYSIS = 0, 1, 2
IMAGE_SUFFIXES = {".png", ".jpg", ".jpeg"}
DISCONTINUITY_WARNING = (
    "possible extreme high arch; side-view assessment required - not automated"
)
BATCH_FIELDS = (
    "input_path", "b1", "b0", "mbi", "non_contact_area", "class", "region", "severity", "note",
)


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


@dataclass
class AnalysisReport:
    """Machine-readable result of one ``analyze`` run, including its exact config."""

    input_path: str
    config: dict
    image: dict
    roi: dict
    counts: dict
    mbi: float
    foot_class: str
    severity: float | None
    continuity: dict
    warnings: list[str] = field(default_factory=list)

    @classmethod
    def from_assessment(cls, path, width, height, config: AnalysisConfig, fa: FootAssessment):
        roi = fa.result.roi
        warnings = []
        if not fa.continuity.is_continuous:
            warnings.append(DISCONTINUITY_WARNING)
        return cls(
            input_path=str(path),
            config=config.to_dict(),
            image={"width": width, "height": height},
            roi={"top": roi.top, "bottom": roi.bottom, "left": roi.left, "right": roi.right,
                 "crop_ratio": roi.crop_ratio},
            counts={"b1": fa.result.counts.b1, "b0": fa.result.counts.b0},
            mbi=fa.result.mbi,
            foot_class=fa.foot_class.value,
            severity=fa.severity,
            continuity={"state": fa.continuity.label,
                        "component_count": fa.continuity.component_count},
            warnings=warnings,
        )

    def to_dict(self) -> dict:
        d = {}
        for key, value in dataclasses.asdict(self).items():
            d["class" if key == "foot_class" else key] = value
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "AnalysisReport":
        d = dict(d)
        d["foot_class"] = d.pop("class")
        return cls(**d)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    @classmethod
    def from_json(cls, text: str) -> "AnalysisReport":
        return cls.from_dict(json.loads(text))


def _threshold(text):
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}")
    if not 0 <= value <= 255:
        raise argparse.ArgumentTypeError(f"threshold must lie in [0, 255], got {text}")
    return int(value) if value.is_integer() else value


def _ratio(text):
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}")
    if not 0 < value < 1:
        raise argparse.ArgumentTypeError(f"crop ratio must lie in (0, 1), got {text}")
    return value


def _positive_int(text):
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}")
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {text}")
    return value


def _non_negative(text):
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}")
    if value < 0:
        raise argparse.ArgumentTypeError(f"must be >= 0, got {text}")
    return value


def _add_config_flags(p):
    p.add_argument("--threshold", type=_threshold, help="binarization threshold (default 140)")
    p.add_argument("--crop-ratio", type=_ratio, help="arch band as a fraction of the foot axis (default 1/3)")
    p.add_argument("--axis", choices=AXES, help="foot axis orientation (default vertical)")
    p.add_argument("--roi-extent", choices=EXTENTS, help="ROI width across the axis (default plate)")
    p.add_argument("--ranges", metavar="FILE", help="JSON range table {flat, normal, high_arch}")
    p.add_argument("--config", metavar="FILE", help="JSON config file; flags override its values")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="mbi", description="Modified Brucken Index footprint analysis")
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("analyze", help="analyze one footprint image, JSON to stdout")
    p.add_argument("path")
    _add_config_flags(p)

    p = sub.add_parser("batch", help="analyze every PNG/JPEG in a directory, CSV out")
    p.add_argument("dir")
    p.add_argument("--out", metavar="CSV", help="write CSV here instead of stdout")
    p.add_argument("--jobs", type=_positive_int, default=1, help="images analyzed concurrently")
    _add_config_flags(p)

    p = sub.add_parser("sweep", help="threshold sensitivity sweep around the nominal threshold")
    p.add_argument("path")
    p.add_argument("--tolerance", type=_non_negative, default=DEFAULT_TOLERANCE_PCT,
                   help="maximum relative deviation in percent (default 15)")
    p.add_argument("--steps", type=_positive_int, default=DEFAULT_STEPS, help="sweep points (default 31)")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--out", metavar="FILE", help="write the report here instead of stdout")
    _add_config_flags(p)

    p = sub.add_parser("generate", help="render a synthetic footprint template to PNG")
    p.add_argument("template")
    p.add_argument("out")
    p.add_argument("--roi-extent", choices=EXTENTS, default="plate",
                   help="extent used for the echoed analytic index")
    return parser


def resolve_config(args) -> AnalysisConfig:
    """Defaults, then the config file, then explicit flags."""
    values = {}
    try:
        if args.config:
            loaded = json.loads(Path(args.config).read_text())
            if not isinstance(loaded, dict):
                raise UsageError(f"{args.config}: config must be a JSON object")
            values.update(loaded)
        if args.ranges:
            values["ranges"] = RangeTable.load(args.ranges).to_dict()
        for key in ("threshold", "crop_ratio", "axis", "roi_extent"):
            flag = getattr(args, key, None)
            if flag is not None:
                values[key] = flag
        return AnalysisConfig.from_dict(values)
    except (OSError, ValueError, TypeError) as exc:
        raise UsageError(f"invalid configuration: {exc}") from exc


def analyze_file(path, config: AnalysisConfig) -> AnalysisReport:
    gray = to_grayscale(load_image(path))
    height, width = gray.shape
    log.info("analyzing %s (%dx%d)", path, width, height)
    return AnalysisReport.from_assessment(path, width, height, config, assess(gray, config))


def _emit(text: str, out):
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def cmd_analyze(args) -> int:
    config = resolve_config(args)
    try:
        report = analyze_file(args.path, config)
    except FootprintError as exc:
        print(f"mbi analyze: {args.path}: {exc}", file=sys.stderr)
        continuity = getattr(exc, "continuity", None)
        if continuity is not None and not continuity.is_continuous:
            print(f"warning: footprint splits into {continuity.component_count} contact regions; "
                  f"{DISCONTINUITY_WARNING}", file=sys.stderr)
        return EXIT_ANALYSIS
    for w in report.warnings:
        print(f"warning: {w}", file=sys.stderr)
    print(report.to_json())
    return EXIT_OK


def _batch_row(path: Path, config: AnalysisConfig) -> dict:
    row = dict.fromkeys(BATCH_FIELDS, "")
    row["input_path"] = str(path)
    try:
        report = analyze_file(path, config)
    except FootprintError as exc:
        row["note"] = f"{type(exc).__name__}: {exc}"
        return row
    row.update(
        b1=report.counts["b1"],
        b0=report.counts["b0"],
        mbi=report.mbi,
        non_contact_area=report.counts["b1"],
        region=FootClass(report.foot_class).region,
        severity="" if report.severity is None else report.severity,
        note="; ".join(report.warnings),
    )
    row["class"] = report.foot_class
    return row


def cmd_batch(args) -> int:
    config = resolve_config(args)
    root = Path(args.dir)
    if not root.is_dir():
        print(f"mbi batch: {root}: not a directory", file=sys.stderr)
        return EXIT_ANALYSIS
    paths = sorted(p for p in root.iterdir() if p.is_file() and p.suffix.lower() in IMAGE_SUFFIXES)
    if not paths:
        print(f"mbi batch: {root}: no PNG or JPEG files found", file=sys.stderr)
        return EXIT_ANALYSIS

    with ThreadPoolExecutor(max_workers=args.jobs) as pool:
        rows = list(pool.map(lambda p: _batch_row(p, config), paths))

    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=BATCH_FIELDS, lineterminator="\n")
    writer.writeheader()
    writer.writerows(rows)
    _emit(buf.getvalue(), args.out)

    failed = sum(1 for r in rows if r["mbi"] == "")
    regions = Counter(r["region"] for r in rows if r["mbi"] != "")
    print(
        "regions: " + " ".join(f"{k}={regions.get(k, 0)}" for k in ("flat", "normal", "high_arch", "other"))
        + f" failed={failed}",
        file=sys.stderr,
    )
    return EXIT_ANALYSIS if failed == len(rows) else EXIT_OK


def cmd_sweep(args) -> int:
    config = resolve_config(args)
    if not 1 <= config.threshold <= 254:
        raise UsageError(f"nominal threshold must lie in [1, 254], got {config.threshold}")
    try:
        gray = to_grayscale(load_image(args.path))
        report = threshold_sweep(
            gray,
            config.threshold,
            args.tolerance,
            args.steps,
            crop_ratio=config.crop_ratio,
            axis=config.axis,
            roi_extent=config.roi_extent,
        )
    except FootprintError as exc:
        print(f"mbi sweep: {args.path}: {exc}", file=sys.stderr)
        return EXIT_ANALYSIS
    for w in report.warnings:
        print(f"warning: {w}", file=sys.stderr)
    if args.format == "json":
        _emit(json.dumps(report.to_dict(), indent=2) + "\n", args.out)
    else:
        _emit(report.to_csv(), args.out)
    return EXIT_OK


def cmd_generate(args) -> int:
    try:
        text = Path(args.template).read_text()
    except OSError as exc:
        print(f"mbi generate: {args.template}: {exc.strerror or exc}", file=sys.stderr)
        return EXIT_ANALYSIS
    try:
        template = FootTemplate.from_json(text)
    except InvalidTemplate as exc:
        print(f"mbi generate: invalid template: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        Path(args.out).write_bytes(encode_png(generate(template)))
    except OSError as exc:
        print(f"mbi generate: {args.out}: {exc.strerror or exc}", file=sys.stderr)
        return EXIT_ANALYSIS

    echo = template.to_dict()
    if template.edge_ramp == 0:
        try:
            echo["analytic_mbi"] = analytic_mbi(template, args.roi_extent)
        except ZeroContactArea:
            echo["analytic_mbi"] = None
        echo["roi_extent"] = args.roi_extent
    print(json.dumps(echo), file=sys.stderr)
    return EXIT_OK


COMMANDS = {
    "analyze": cmd_analyze,
    "batch": cmd_batch,
    "sweep": cmd_sweep,
    "generate": cmd_generate,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        return COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"mbi {args.command}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except Exception as exc:  # last resort: malformed input must not crash the CLI
        log.debug("unhandled error", exc_info=True)
        print(f"mbi {args.command}: unexpected error: {exc}", file=sys.stderr)
        return EXIT_ANALYSIS


if __name__ == "__main__":
    sys.exit(main())
