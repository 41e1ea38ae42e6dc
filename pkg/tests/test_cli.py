import json

import pytest

from cardseg.cli import CONFIG_KEYS, UsageError, build_config, main, read_config_file
from cardseg.raster import load_image, save_image
from cardseg.synthcard import CardSpec, LineSpec, render_card


@pytest.fixture
def card(tmp_path):
    img, _ = render_card(CardSpec(400, 160, [LineSpec("Call 555 0100", 40, 60, 15, 21, 3)],
                                  skew_centideg=-200), 0)
    p = tmp_path / "card.pgm"
    save_image(img, p)
    return p


def test_segment_to_stdout(card, capsys):
    assert main(["segment", "--input", str(card)]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["schema"] == "cardseg/1" and "timing_ms" not in doc
    assert sum(len(l["chars"]) for r in doc["regions"] for l in r["lines"]) == 11


def test_segment_writes_files(card, tmp_path):
    out = tmp_path / "res.json"
    ann = tmp_path / "ann.pgm"
    assert main(["segment", "--input", str(card), "--out", str(out), "--annotated", str(ann),
                 "--emit-timing", "true"]) == 0
    assert "timing_ms" in json.loads(out.read_text())
    assert load_image(ann).pixels.min() == 0


def test_emit_annotated_derives_path(card, tmp_path):
    out = tmp_path / "res.json"
    assert main(["segment", "--input", str(card), "--out", str(out), "--emit-annotated", "1"]) == 0
    assert (tmp_path / "res.annotated.pgm").exists()


def test_missing_input_exits_1(tmp_path, capsys):
    missing = tmp_path / "nope.pgm"
    assert main(["segment", "--input", str(missing)]) == 1
    assert str(missing) in capsys.readouterr().err


def test_bad_image_exits_1(tmp_path, capsys):
    p = tmp_path / "bad.pgm"
    p.write_bytes(b"P5 2 2")
    assert main(["segment", "--input", str(p)]) == 1
    assert "byte offset 6" in capsys.readouterr().err


@pytest.mark.parametrize("argv", [
    [],
    ["segment"],
    ["segment", "--input", "x.pgm", "--block-size", "abc"],
    ["segment", "--input", "x.pgm", "--block-size", "2"],
    ["segment", "--input", "x.pgm", "--skew-denominator", "cubic"],
    ["frobnicate"],
    ["synth", "--out-dir", "d", "--n", "0"],
])
def test_usage_errors_exit_2(argv, capsys):
    assert main(argv) == 2


def test_config_file_and_flag_precedence(card, tmp_path, capsys):
    conf = tmp_path / "c.conf"
    conf.write_text("# settings\nblock_size = 8\nepsilon=250\n")
    assert main(["segment", "--input", str(card), "--config", str(conf), "--epsilon", "400"]) == 0
    echo = json.loads(capsys.readouterr().out)["config"]
    assert echo["extract"]["block_size"] == 8 and echo["skew"]["epsilon"] == 400


def test_config_file_errors(tmp_path):
    conf = tmp_path / "c.conf"
    conf.write_text("colour = red\n")
    with pytest.raises(UsageError):
        read_config_file(conf)
    conf.write_text("block_size\n")
    with pytest.raises(UsageError):
        read_config_file(conf)
    with pytest.raises(UsageError):
        read_config_file(tmp_path / "missing.conf")


def test_every_key_builds():
    defaults = {"deskew": "true", "emit_annotated": "no", "emit_timing": "off",
                "skew_denominator": "common", "min_h": "0.01", "max_h": "0.5"}
    values = {k: defaults.get(k, "4" if k == "block_size" else "1") for k in CONFIG_KEYS}
    cfg = build_config(values)
    assert cfg.extract.block_size == 4 and cfg.skew.denominator == "common" and cfg.deskew


def test_synth_writes_cards(tmp_path, capsys):
    assert main(["synth", "--out-dir", str(tmp_path), "--n", "2", "--seed", "5", "--size", "vga"]) == 0
    for i in (5, 6):
        img = load_image(tmp_path / f"card_{i:06d}.pgm")
        gt = json.loads((tmp_path / f"card_{i:06d}.json").read_text())
        assert (img.width, img.height) == (640, 480) and gt["lines"]


def test_bench_prints_stage_breakdown(capsys):
    assert main(["bench", "--size", "vga", "--repeat", "2"]) == 0
    out = capsys.readouterr().out
    for stage in ("extract", "skew", "binarize", "segment", "total"):
        assert f"  {stage}" in out
    assert "median total:" in out
