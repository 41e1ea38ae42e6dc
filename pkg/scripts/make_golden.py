"""Regenerate the golden fixture card and its expected outputs.

    python scripts/make_golden.py [--check]

Only rerun without --check after an intentional output change; the test
suite compares byte for byte against the committed files.
"""
import argparse
import sys
from pathlib import Path

from cardseg.pipeline import PipelineConfig, annotated_image, dumps, process_card
from cardseg.raster import encode_pgm, load_image
from cardseg.synthcard import CardSpec, Decoy, LineSpec, render_card
from cardseg.raster import Rect

FIXTURES = Path(__file__).resolve().parent.parent / "tests" / "fixtures"
CARD = FIXTURES / "golden_card.pgm"
JSON = FIXTURES / "golden_result.json"
ANNOTATED = FIXTURES / "golden_annotated.pgm"
SOURCE = "golden_card.pgm"


def golden_spec() -> CardSpec:
    lines = [
        LineSpec("Jane Q. Sample", 40, 40, 15, 21, 3),
        LineSpec("Chief Widget Officer", 40, 72, 10, 14, 2),
        LineSpec("tel +1 555-0100", 40, 150, 10, 14, 2),
        LineSpec("jane@example.org", 40, 172, 10, 14, 2),
    ]
    return CardSpec(width=480, height=280, lines=lines, skew_centideg=-350,
                    noise_permille=2, shade_gradient=16,
                    decoys=[Decoy(Rect(380, 40, 56, 56), "solid")])


def outputs(img):
    result = process_card(img, PipelineConfig(), source=SOURCE)
    return dumps(result).encode("utf-8"), encode_pgm(annotated_image(result, img))


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--check", action="store_true", help="compare instead of writing")
    args = ap.parse_args()
    img, _ = render_card(golden_spec(), seed=2024)
    card = encode_pgm(img)
    if args.check:
        js, ann = outputs(load_image(CARD))
        ok = (CARD.read_bytes() == card and JSON.read_bytes() == js
              and ANNOTATED.read_bytes() == ann)
        print("golden fixture", "matches" if ok else "DIFFERS")
        return 0 if ok else 1
    FIXTURES.mkdir(parents=True, exist_ok=True)
    CARD.write_bytes(card)
    js, ann = outputs(load_image(CARD))
    JSON.write_bytes(js)
    ANNOTATED.write_bytes(ann)
    print(f"wrote {CARD.name}, {JSON.name}, {ANNOTATED.name}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
