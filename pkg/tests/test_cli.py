import csv
import json

import pytest

from qpoisson.cli import main


def _rows(path):
    with open(path) as fh:
        return list(csv.reader(line for line in fh if not line.startswith("#")))


def test_fusion_csv(tmp_path, capsys):
    assert main(["fusion", "--n", "3", "--ball", "2", "--out", str(tmp_path)]) == 0
    out = capsys.readouterr().out
    assert "PASS sum_rules" in out and "FAIL" not in out
    rows = _rows(tmp_path / "fusion_fusion.csv")
    assert rows[0] == ["lambda", "mu", "nu", "mult"]
    assert ["1", "1", "2", "1"] in rows and ["1", "1", "1,1", "1"] in rows
    man = json.loads((tmp_path / "fusion_manifest.json").read_text())
    assert man["config"]["n"] == 3 and "out" not in man["config"]
    assert {r.get("table") for r in man["results"]} >= {"fusion", "m0", "inequality"}


def test_fusion_needs_n(tmp_path, capsys):
    assert main(["fusion", "--out", str(tmp_path)]) == 2
    assert "needs --n" in capsys.readouterr().err


def test_bad_variant_is_usage_error(tmp_path):
    with pytest.raises(SystemExit) as exc:
        main(["hecke", "--variant", "sigma", "--out", str(tmp_path)])
    assert exc.value.code == 2


def test_bad_q_is_usage_error(tmp_path):
    assert main(["hecke", "--q", "3/2", "--out", str(tmp_path)]) == 2
    assert main(["walk", "--levy", "1:1/2", "--out", str(tmp_path)]) == 2


def test_hecke_json(tmp_path, capsys):
    assert main(["hecke", "--n", "2", "--m", "3", "--format", "json", "--out", str(tmp_path)]) == 0
    man = json.loads((tmp_path / "hecke_manifest.json").read_text())
    reports = {r["variant"]: r for r in man["results"][0]["summary"]["reports"]}
    assert reports["pi_plus"]["E_value"] == "1/10" and reports["pi_minus"]["E_scalar"]
    assert not reports["pi"]["E_scalar"]
    assert not list(tmp_path.glob("*.csv"))
    assert "PASS E_pi_not_scalar" in capsys.readouterr().out


def test_coset_p2s_table(tmp_path):
    code = main(["coset", "--K", "40", "--steps", "20", "--p2s", "6", "--out", str(tmp_path)])
    assert code == 0
    rows = _rows(tmp_path / "coset_p2s.csv")
    assert len(rows) == 8 and all(r[-1] == "True" for r in rows[1:])
    cert = _rows(tmp_path / "coset_certificate.csv")
    assert cert[1][:3] == ["0", "1", "1"] and cert[2][2] == "2/3"


def test_config_precedence(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# comment\nn = 2\nm = 4\nvariant = pi_plus\n")
    assert main(["hecke", "--config", str(cfg), "--m", "3", "--out", str(tmp_path)]) == 0
    man = json.loads((tmp_path / "hecke_manifest.json").read_text())
    assert man["config"]["m"] == 3 and man["config"]["variant"] == "pi_plus"
    jcfg = tmp_path / "run.json"
    jcfg.write_text(json.dumps({"n": 3, "ball": 1}))
    assert main(["fusion", "--config", str(jcfg), "--out", str(tmp_path)]) == 0
    assert json.loads((tmp_path / "fusion_manifest.json").read_text())["config"]["ball"] == 1


def test_unknown_config_key(tmp_path):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"bogus": 1}))
    assert main(["hecke", "--config", str(cfg), "--out", str(tmp_path)]) == 2


def test_walk_small(tmp_path, capsys):
    args = ["walk", "--n", "2", "--ball", "6", "--steps", "60", "--paths", "2000",
            "--escape", "20", "--out", str(tmp_path)]
    assert main(args) == 0
    out = capsys.readouterr().out
    assert "PASS eigen_identity" in out and "PASS mc_within_4sigma" in out
    kern = _rows(tmp_path / "walk_kernel.csv")
    assert ["1", "0", "4/25"] in kern
    assert [r[0] for r in kern if r[1] == "cemetery"] == ["6"]


def test_failed_check_exit_code(tmp_path, capsys):
    # an escape threshold beyond reach makes the escape check fail
    args = ["walk", "--steps", "10", "--paths", "200", "--escape", "1000", "--out", str(tmp_path)]
    assert main(args) == 1
    assert "FAIL escape_fraction_ge_0.99" in capsys.readouterr().out


def test_byte_identical_reruns(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    args = ["walk", "--steps", "40", "--paths", "500", "--escape", "10", "--seed", "3"]
    main(args + ["--out", str(a)])
    main(args + ["--out", str(b)])
    names = sorted(p.name for p in a.iterdir())
    assert names == sorted(p.name for p in b.iterdir()) and len(names) == 4
    for n in names:
        assert (a / n).read_bytes() == (b / n).read_bytes()
