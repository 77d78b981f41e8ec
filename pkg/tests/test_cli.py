import json

import pytest

from cmvspectra.cli import main


@pytest.fixture
def seq_file(tmp_path):
    p = tmp_path / "seq.json"
    p.write_text(json.dumps({"values": [[0.3, 0.0], [0.0, 0.2]], "r": 0.6}))
    return str(p)


@pytest.fixture
def samp_file(tmp_path):
    p = tmp_path / "samp.json"
    p.write_text(json.dumps({"level": 1, "table": [[0.3, 0.0], [0.0, 0.2]], "r": 0.6}))
    return str(p)


def test_bands_writes_tables_and_svg(tmp_path, seq_file, capsys):
    out = tmp_path / "out"
    rc = main(["bands", "--input", seq_file, "--out", str(out), "--json"])
    assert rc == 0
    for name in ("bands.csv", "gaps.csv", "discriminant.csv", "bands.svg", "bands.json"):
        assert (out / name).exists()
    header, *rows = (out / "bands.csv").read_text().strip().splitlines()
    assert header.startswith("band_index,")
    assert len(rows) == 2  # period-2 sequence has 2 bands
    report = json.loads((out / "bands.json").read_text())
    assert report["period"] == 2
    assert (out / "bands.svg").read_text().startswith("<svg")


def test_discriminant_grid_size(tmp_path, seq_file):
    out = tmp_path / "out"
    rc = main(["discriminant", "--input", seq_file, "--out", str(out), "--grid", "32"])
    assert rc == 0
    rows = (out / "discriminant.csv").read_text().strip().splitlines()
    assert len(rows) == 33  # header + grid


def test_density_outputs_and_mass(tmp_path, seq_file):
    out = tmp_path / "out"
    rc = main(["density", "--input", seq_file, "--out", str(out), "--u", '{"0": 1.0}'])
    assert rc == 0
    report = json.loads((out / "density.json").read_text())
    assert report["mass"] == pytest.approx(1.0, abs=1e-4)


def test_gordon_check_periodic_passes(tmp_path, seq_file):
    out = tmp_path / "out"
    rc = main(["gordon-check", "--input", seq_file, "--out", str(out), "--stages", "2"])
    assert rc == 0
    cert = json.loads((out / "gordon.json").read_text())
    assert cert["passed"] is True
    assert [c["lhs"] for c in cert["checks"]] == [0.0, 0.0]


def test_construct_cantor_deterministic(tmp_path, samp_file):
    out_a, out_b = tmp_path / "a", tmp_path / "b"
    for out in (out_a, out_b):
        rc = main(["construct", "--input", samp_file, "--out", str(out),
                   "--mode", "cantor", "--eps", "0.9", "--stages", "1", "--seed", "7"])
        assert rc == 0
    assert (out_a / "trail.json").read_bytes() == (out_b / "trail.json").read_bytes()
    trail = json.loads((out_a / "trail.json").read_text())
    assert len(trail["stages"]) == 2
    assert (out_a / "stages.csv").exists()
    assert (out_a / "nested_bands.svg").exists()


def test_construct_ac_mode(tmp_path, samp_file):
    out = tmp_path / "out"
    rc = main(["construct", "--input", samp_file, "--out", str(out), "--mode", "ac",
               "--eps", "0.9", "--stages", "1", "--seed", "7", "--t", "1.5",
               "--u", '{"0": 1.0}'])
    assert rc == 0
    trail = json.loads((out / "trail.json").read_text())
    assert trail["stages"][1]["density_drift"] is not None


def test_gamma_json(capsys):
    rc = main(["gamma", "--k", "2", "--q", "8", "--r", "0.5", "--json"])
    assert rc == 0
    obj = json.loads(capsys.readouterr().out)
    assert obj["gamma"] > 0


def test_verify_single_criterion(capsys):
    rc = main(["verify", "--filter", "free-discriminant"])
    assert rc == 0
    assert "PASS free-discriminant" in capsys.readouterr().out


def test_missing_input_exits_2(tmp_path, capsys):
    rc = main(["bands", "--input", str(tmp_path / "nope.json"), "--out", str(tmp_path / "o")])
    assert rc == 2
    assert not (tmp_path / "o").exists() or not any((tmp_path / "o").iterdir())


def test_invalid_json_exits_2(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("not json")
    assert main(["bands", "--input", str(bad)]) == 2


def test_alpha_outside_disk_exits_2_without_partial_output(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"values": [[1.5, 0.0], [0.0, 0.2]], "r": 0.6}))
    out = tmp_path / "out"
    assert main(["bands", "--input", str(bad), "--out", str(out)]) == 2
    assert not out.exists() or not any(out.iterdir())


def test_construct_requires_sampling_input(tmp_path, seq_file):
    rc = main(["construct", "--input", seq_file, "--out", str(tmp_path / "o"),
               "--mode", "cantor", "--eps", "0.5", "--stages", "1"])
    assert rc == 2


def test_bad_u_mapping_exits_2(tmp_path, seq_file):
    rc = main(["density", "--input", seq_file, "--out", str(tmp_path / "o"),
               "--u", "{broken"])
    assert rc == 2


def test_verify_unknown_filter_exits_2():
    assert main(["verify", "--filter", "no-such-criterion"]) == 2
