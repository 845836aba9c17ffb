import json

from plsembed import cli
from plsembed.pipeline import Check, bundled_path


def test_enumerate_and_report(tmp_path, capsys):
    out = tmp_path / "cat"
    assert cli.main(["enumerate", "--max-size", "5", "--out", str(out)]) == 0
    text = capsys.readouterr().out
    assert "59" in text and (out / "species_05.txt").exists()
    assert (out / "counts.csv").read_text().splitlines()[-1] == "5,59,36,0"
    assert cli.main(["report", "--catalog", str(out), "--csv", str(tmp_path / "t.csv")]) == 0
    assert "4,18,11,2" in (tmp_path / "t.csv").read_text()


def test_survey_report_roundtrip(tmp_path, capsys):
    cat = tmp_path / "cat"
    cli.main(["enumerate", "--max-size", "6", "--out", str(cat)])
    res = tmp_path / "r.jsonl"
    assert cli.main(["survey", "--max-size", "6", "--catalog", str(cat), "--out", str(res),
                     "--no-timings"]) == 0
    assert cli.main(["survey", "--max-size", "6", "--catalog", str(cat), "--out", str(res),
                     "--resume"]) == 0
    assert len(res.read_text().splitlines()) == 13
    capsys.readouterr()
    assert cli.main(["report", "--in", str(res)]) == 0
    out = capsys.readouterr().out
    assert "6,0,10,1,0,0" in out and "4,0,2,0,0,0" in out


def test_classify_json(capsys):
    assert cli.main(["classify", "--file", bundled_path("free_collision"), "--json"]) == 0
    rec = json.loads(capsys.readouterr().out)
    assert rec["verdict"] == "NE"


def test_classify_text(capsys):
    assert cli.main(["classify", "--file", bundled_path("baumslag_b")]) == 0
    out = capsys.readouterr().out
    assert "verdict: INF_NOT_FIN" in out and "family B" in out


def test_classify_bad_file(tmp_path, capsys):
    bad = tmp_path / "bad.txt"
    bad.write_text("a a\n")
    assert cli.main(["classify", "--file", str(bad)]) == 1
    assert "error" in capsys.readouterr().err


def test_verify_command_ok(capsys):
    assert cli.main(["verify-paper"]) == 0
    out = capsys.readouterr().out
    assert out.count("PASS") == 9 and "FAIL" not in out


def test_verify_command_budget_exit(capsys):
    # starve the searches: the coset facts cannot close
    code = cli.main(["verify-paper", "--max-cosets", "2", "--kb-max-rules", "3"])
    assert code == 3
    assert "FAIL" in capsys.readouterr().out


def test_verify_command_mismatch_exit(monkeypatch, capsys):
    monkeypatch.setattr(cli, "verify_bundled",
                        lambda config: [Check("x", False, "wrong family")])
    assert cli.main(["verify-paper"]) == 2


def test_report_needs_input(capsys):
    assert cli.main(["report"]) == 1
