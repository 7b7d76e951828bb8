import json
import zlib

import pytest

import piergen


def test_design_space_taxonomy():
    space = piergen.default_design_space()
    kinds = [p["kind"] for p in space["parameters"]]
    assert len(kinds) == 15
    assert sorted(set(kinds)) == ["composite", "counting", "recognition"]
    assert [kinds.count(k) for k in ("recognition", "counting", "composite")] == [6, 3, 6]


def test_sample_is_deterministic_and_valid():
    a = piergen.sample(42, 7)
    assert a == piergen.sample(42, 7)
    assert a != piergen.sample(42, 8)
    assert len(a) == 15
    assert piergen.violations(a) == []


def test_violation_reported():
    v = piergen.sample(1, 0)
    v["cap_beam_cross_dim"] = 1000
    assert piergen.violations(v)


def test_dxf_and_step_text():
    v = piergen.sample(3, 0)
    text = piergen.dxf(v, "front")
    assert text.rstrip().endswith("EOF")
    assert "PIER_COLUMN" in text.upper()
    step = piergen.step(v)
    assert step.startswith("ISO-10303-21;")
    assert step.count("=MANIFOLD_SOLID_BREP(") == 2 + v["num_pier_columns"] + v["num_piles"] + v["num_bearings"]


def test_png_header_and_size():
    png = piergen.png(piergen.sample(3, 0), "top", width=320, height=240)
    assert png[:8] == b"\x89PNG\r\n\x1a\n"
    assert png[12:16] == b"IHDR"
    assert int.from_bytes(png[16:20], "big") == 320
    assert int.from_bytes(png[20:24], "big") == 240
    assert zlib.crc32(png[12:29]) == int.from_bytes(png[29:33], "big")


def test_rewards():
    assert piergen.r_p1("yes", "yes") == 1.0
    assert piergen.r_p1("no", "yes") == 0.0
    assert piergen.r_p2({0, 1}, {0, 1}, {2, 3}) == 1.0
    assert piergen.r_p2({0}, {0, 1}, {2, 3}) == pytest.approx(0.2)
    assert piergen.r_p2({0, 2}, {0, 1}, {2, 3}) == 0.0
    v = piergen.sample(5, 0)
    names = list(v)
    accuracy = {n: 0.9 if i < 6 else 0.5 if i < 12 else 0.1 for i, n in enumerate(names)}
    assert piergen.r_p3(v, v, accuracy) == 21.0
    assert piergen.r_p3({}, v, accuracy) == 0.0


def test_invalid_input_raises():
    with pytest.raises(piergen.PiergenError):
        piergen.dxf(piergen.sample(1, 0), "isometric")
    with pytest.raises(piergen.PiergenError):
        piergen.r_p2({4}, {0}, {1})


def test_generate_and_curriculum(tmp_path):
    out = tmp_path / "run"
    assert piergen.generate({"seed": 9, "count": 5}, out, jobs=2) == 5
    lines = (out / "manifest.jsonl").read_text().splitlines()
    assert len(lines) == 5
    test_ids = set(json.loads((out / "split.json").read_text())["test"])
    files = piergen.curriculum({"seed": 9, "count": 5}, out)
    assert files
    for rel in files:
        for line in (out / rel).read_text().splitlines():
            assert json.loads(line)["sample_id"] not in test_ids
