"""Command line: ``cardseg segment | synth | bench``.

Every pipeline setting is a flat key (see ``CONFIG_KEYS``) that can be given
as ``--key-name value`` or as a ``key=value`` line in a ``--config`` file.
Flags override the file, the file overrides defaults.

Exit codes: 0 success, 1 processing error, 2 usage error.
"""
from __future__ import annotations

import argparse
import json
import statistics
import sys
from dataclasses import replace
from pathlib import Path

from . import __version__
from .binarize import BinarizeConfig
from .pipeline import STAGES, PipelineConfig, dumps, emit_annotated, process_card
from .raster import ImageFormatError, load_image, save_image
from .region_extract import ExtractConfig, FilterRules
from .segment import SegmentConfig
from .skew import SkewConfig
from .synthcard import CorpusRanges, card_of_size, corpus

EXIT_OK, EXIT_PROCESSING, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _bool(text: str) -> bool:
    t = text.strip().lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"expected a boolean, got {text!r}")


# flat key -> (section, field, parser); section None means a top-level field
CONFIG_KEYS = {
    "block_size": ("extract", "block_size", int),
    "spread_thresh": ("extract", "spread_thresh", int),
    "ink_thresh": ("extract", "ink_thresh", int),
    "speck_area": ("extract", "speck_area", int),
    "link_gap": ("extract", "link_gap", int),
    "min_area": ("rules", "min_area", int),
    "min_h": ("rules", "min_h", float),
    "max_h": ("rules", "max_h", float),
    "max_aspect": ("rules", "max_aspect", int),
    "min_density": ("rules", "min_density", int),
    "max_density": ("rules", "max_density", int),
    "epsilon": ("skew", "epsilon", int),
    "max_angle": ("skew", "max_angle", int),
    "skew_denominator": ("skew", "denominator", str),
    "profile_window": ("skew", "profile_window", int),
    "skew_passes": ("skew", "passes", int),
    "binarize_offset": ("binarize", "offset", int),
    "min_contrast": ("binarize", "min_contrast", int),
    "line_thresh_permille": ("segment", "line_thresh_permille", int),
    "min_band_frac": ("segment", "min_band_frac", int),
    "merge_gap_frac": ("segment", "merge_gap_frac", int),
    "deskew": (None, "deskew", _bool),
    "emit_annotated": (None, "emit_annotated", _bool),
    "emit_timing": (None, "emit_timing", _bool),
    "parallelism": (None, "parallelism", int),
}


def read_config_file(path) -> dict[str, str]:
    """Flat ``key=value`` lines; blank lines and ``#`` comments ignored."""
    out = {}
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise UsageError(f"cannot read config file {path}: {e.strerror}") from None
    for n, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        key = key.strip().replace("-", "_")
        if not sep:
            raise UsageError(f"{path}:{n}: expected key=value")
        if key not in CONFIG_KEYS:
            raise UsageError(f"{path}:{n}: unknown config key {key!r}")
        out[key] = value.strip()
    return out


def build_config(values: dict[str, str]) -> PipelineConfig:
    """PipelineConfig from flat string settings (unset keys keep defaults)."""
    parts: dict[str, dict] = {"extract": {}, "rules": {}, "skew": {}, "binarize": {},
                              "segment": {}, None: {}}
    for key, raw in values.items():
        section, name, parse = CONFIG_KEYS[key]
        try:
            parts[section][name] = parse(raw)
        except ValueError:
            raise UsageError(f"bad value for {key}: {raw!r}") from None
    try:
        rules = replace(FilterRules(), **parts["rules"])
        return PipelineConfig(
            extract=replace(ExtractConfig(rules=rules), **parts["extract"]),
            skew=replace(SkewConfig(), **parts["skew"]),
            binarize=replace(BinarizeConfig(), **parts["binarize"]),
            segment=replace(SegmentConfig(), **parts["segment"]),
            **parts[None],
        )
    except ValueError as e:
        raise UsageError(str(e)) from None


def _add_config_flags(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("pipeline settings (also accepted as key=value in --config)")
    g.add_argument("--config", metavar="FILE", help="flat key=value settings file")
    for key in CONFIG_KEYS:
        g.add_argument("--" + key.replace("_", "-"), dest="cfg_" + key, metavar="VALUE")


def _config_from_args(args) -> PipelineConfig:
    values = read_config_file(args.config) if args.config else {}
    for key in CONFIG_KEYS:
        v = getattr(args, "cfg_" + key)
        if v is not None:
            values[key] = v
    return build_config(values)


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(message)


def make_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="cardseg", description="Business-card text segmentation.")
    p.add_argument("--version", action="version", version=f"cardseg {__version__}")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("segment", help="segment one card image into regions, lines and chars")
    s.add_argument("--input", required=True, help="PGM or PNG card image")
    s.add_argument("--out", help="result JSON path (default: stdout)")
    s.add_argument("--annotated", help="annotated PGM/PNG path (implies emit_annotated)")
    _add_config_flags(s)

    y = sub.add_parser("synth", help="write synthetic cards with ground-truth JSON")
    y.add_argument("--out-dir", required=True)
    y.add_argument("--n", type=int, default=1)
    y.add_argument("--seed", type=int, default=42)
    y.add_argument("--size", choices=("corpus", "3mp", "1mp", "vga"), default="corpus",
                   help="corpus draws card geometry at random; the others fix the resolution")
    y.add_argument("--format", choices=("pgm", "png"), default="pgm")

    b = sub.add_parser("bench", help="time the pipeline on a generated card")
    b.add_argument("--size", choices=("3mp", "1mp", "vga"), default="3mp")
    b.add_argument("--repeat", type=int, default=5)
    b.add_argument("--seed", type=int, default=7)
    _add_config_flags(b)
    return p


def cmd_segment(args) -> int:
    cfg = _config_from_args(args)
    if args.annotated:
        cfg = replace(cfg, emit_annotated=True)
    annotated = args.annotated
    if cfg.emit_annotated and not annotated:
        if not args.out:
            raise UsageError("emit_annotated needs --annotated or --out to name the image")
        annotated = str(Path(args.out).with_suffix(".annotated.pgm"))
    img = load_image(args.input)
    result = process_card(img, cfg, source=args.input)
    text = dumps(result, cfg.emit_timing)
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    if annotated:
        emit_annotated(result, img, annotated)
    return EXIT_OK


def cmd_synth(args) -> int:
    if args.n < 1:
        raise UsageError("--n must be >= 1")
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    if args.size == "corpus":
        cards = corpus(args.n, args.seed, CorpusRanges())
    else:
        cards = (card_of_size(args.size, args.seed + i) for i in range(args.n))
    for i, (img, gt) in enumerate(cards):
        stem = out / f"card_{args.seed + i:06d}"
        save_image(img, f"{stem}.{args.format}")
        with open(f"{stem}.json", "w", encoding="utf-8") as f:
            json.dump(gt.to_json(), f, indent=1)
            f.write("\n")
    print(f"wrote {args.n} card(s) to {out}")
    return EXIT_OK


def cmd_bench(args) -> int:
    if args.repeat < 1:
        raise UsageError("--repeat must be >= 1")
    cfg = replace(_config_from_args(args), emit_timing=True)
    img, gt = card_of_size(args.size, args.seed)
    runs = [process_card(img, cfg).timing_ms for _ in range(args.repeat)]
    print(f"card {args.size}: {img.width}x{img.height}, {gt.n_chars} chars, "
          f"{cfg.workers()} worker(s), {args.repeat} run(s)")
    for stage in STAGES + ("total",):
        vals = [r[stage] for r in runs]
        print(f"  {stage:<9} median {statistics.median(vals):9.1f} ms   "
              f"min {min(vals):9.1f} ms   max {max(vals):9.1f} ms")
    print(f"median total: {statistics.median(r['total'] for r in runs):.1f} ms")
    return EXIT_OK


COMMANDS = {"segment": cmd_segment, "synth": cmd_synth, "bench": cmd_bench}


def main(argv=None) -> int:
    parser = make_parser()
    try:
        args = parser.parse_args(argv)
        return COMMANDS[args.command](args)
    except UsageError as e:
        print(f"cardseg: usage error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except FileNotFoundError as e:
        print(f"cardseg: no such file: {e.filename}", file=sys.stderr)
        return EXIT_PROCESSING
    except (ImageFormatError, OSError, ValueError) as e:
        print(f"cardseg: error: {e}", file=sys.stderr)
        return EXIT_PROCESSING


if __name__ == "__main__":
    sys.exit(main())
