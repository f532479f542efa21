import io
import json
import sys
import textwrap
from pathlib import Path

import pytest

from disembed.cli import CONFIG_ENV, main
from disembed.serialization import parse_flat, parse_structured

FIX = Path(__file__).parent / "fixtures"
SAMPLE_AUC = 0.6254415227629513
SAMPLE_AP = 0.7392399267399268


def run(*argv):
    out, err = io.StringIO(), io.StringIO()
    try:
        code = main(list(map(str, argv)), out, err)
    except SystemExit as exc:  # argparse usage errors
        code = exc.code
    return code, out.getvalue(), err.getvalue()


def test_extract_treasury_block():
    code, out, err = run("extract", FIX / "treasury.ptb")
    assert code == 0
    assert out.splitlines()[1:] == [
        "#1\t0\tthe Treasury\twill announce\tdetails of the November refunding",
        "    S:TEMPORAL\ton Monday",
        "    L:CONTRAST\t#2",
        "#2\t0\tthe funding\twill be delayed\t",
        "    L:CONTRAST\t#1",
        "    L:CONDITION\t#3",
        "    L:CONDITION\t#4",
        "#3\t1\tCongress\tfail\tto increase the Treasury 's borrowing capacity",
        "#4\t1\tpresident Bush\tfail\tto increase the Treasury 's borrowing capacity",
    ]
    assert "leaves: 4" in err
    assert "rule subordination_pre: 1" in err
    assert "unmatched leaves: 0" in err


def test_no_phrasal_keeps_date_in_arg2():
    code, out, _ = run("extract", FIX / "sotomayor.ptb", "--no-phrasal")
    assert code == 0
    first = out.splitlines()[1].split("\t")
    assert "on May 26, 2009" in first[4]
    assert "S:TEMPORAL" not in out
    _, with_phrasal, _ = run("extract", FIX / "sotomayor.ptb")
    assert "    S:TEMPORAL\ton May 26, 2009" in with_phrasal


def test_empty_input(tmp_path):
    p = tmp_path / "empty.ptb"
    p.write_text("")
    code, out, err = run("extract", p)
    assert (code, out) == (0, "")
    assert "leaves: 0" in err and "unmatched leaves: 0" in err


def test_structured_format():
    code, out, _ = run("extract", FIX / "treasury.ptb", "--format", "structured")
    assert code == 0
    (result,) = parse_structured(out)
    assert [p.id for p in result.propositions] == [1, 2, 3, 4]


def test_multi_document_output_round_trips():
    code, out, _ = run("extract", FIX / "corpus.ptb", "-q")
    assert code == 0
    doc = parse_flat(out)
    ids = [p.id for b in doc.blocks for p in b.propositions]
    assert ids  # per-document ids restart at 1
    assert ids.count(1) >= 10


def test_simplify_treasury_and_red_spot():
    code, out, _ = run("simplify", FIX / "treasury.ptb")
    assert code == 0
    assert "Coordination (Contrast)" in out and "Subordination (Condition)" in out
    assert "Coordination (List)" in out and out.count("[core] ") + out.count("[context] ") == 7
    _, out, _ = run("simplify", FIX / "great_red_spot.ptb")
    assert out.splitlines() == [
        "DOCUMENT-ROOT",
        "  [core] Coordination (Contrast)",
        "    [core] The Great Red Spot may have been observed in 1664 by Robert Hooke.",
        "    [core] This is disputed.",
    ]


def test_simplify_unsplittable(tmp_path):
    p = tmp_path / "one.ptb"
    p.write_text("(ROOT (S (NP (NN Rain)) (VP (VBZ falls)) (. .)))\n")
    _, out, _ = run("simplify", p)
    assert out.splitlines() == ["DOCUMENT-ROOT", "  [core] Rain falls."]


def test_byte_identical_runs(tmp_path):
    a, b = tmp_path / "a.txt", tmp_path / "b.txt"
    assert run("extract", FIX / "corpus.ptb", "-o", a, "-q")[0] == 0
    assert run("extract", FIX / "corpus.ptb", "-o", b, "-q")[0] == 0
    assert a.read_bytes() == b.read_bytes()


def test_usage_error_exit_1():
    assert run("extract")[0] == 1
    assert run("bogus")[0] == 1
    assert run("extract", FIX / "treasury.ptb", "--format", "xml")[0] == 1


def test_input_errors_exit_2(tmp_path):
    code, _, err = run("extract", tmp_path / "missing.ptb")
    assert code == 2 and "cannot read" in err
    bad = tmp_path / "bad.ptb"
    bad.write_text("(ROOT (S (NP (NN x))")
    code, _, err = run("extract", bad)
    assert code == 2 and "offset" in err
    assert run("extract", FIX / "treasury.ptb", "--max-depth", "0")[0] == 2
    rules = tmp_path / "rules.txt"
    rules.write_text("no_such_rule\n")
    assert run("extract", FIX / "treasury.ptb", "--rules", rules)[0] == 2


def test_depth_ceiling_exit_3():
    code, _, err = run("simplify", FIX / "treasury.ptb", "--max-depth", "1")
    assert code == 3 and "internal error" in err


def test_rule_order_file(tmp_path):
    rules = tmp_path / "rules.txt"
    rules.write_text("# only adverbial clauses\nsubordination_post\n")
    _, out, err = run("simplify", FIX / "treasury.ptb", "--rules", rules)
    assert "rule subordination_post: 1" in err
    assert "Contrast" not in out


def test_custom_cue_lexicon(tmp_path):
    cues = tmp_path / "cues.tsv"
    cues.write_text("subordination-leading\talthough\tCAUSE\n")
    _, out, _ = run("simplify", FIX / "treasury.ptb", "--cues", cues, "--no-phrasal")
    assert "Subordination (Cause)" in out and "Contrast" not in out
    cues.write_text("subordination-leading\talthough\tCONCESSION\n")
    code, _, err = run("simplify", FIX / "treasury.ptb", "--cues", cues)
    assert code == 2 and "unknown relation" in err


def test_config_precedence(tmp_path, monkeypatch):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"format": "structured", "phrasal": False}))
    _, out, _ = run("extract", FIX / "sotomayor.ptb", "--config", cfg)
    assert json.loads(out)["version"] == 1
    assert "S:TEMPORAL" not in out and "TEMPORAL" not in out
    _, out, _ = run("extract", FIX / "sotomayor.ptb", "--config", cfg, "--format", "flat")
    assert out.startswith("He nominated")
    monkeypatch.setenv(CONFIG_ENV, str(cfg))
    _, out, _ = run("extract", FIX / "sotomayor.ptb")
    assert out.lstrip().startswith("{")


def test_bad_config(tmp_path):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"colour": "red"}))
    code, _, err = run("extract", FIX / "treasury.ptb", "--config", cfg)
    assert code == 2 and "colour" in err


def test_uniform_confidence_flag():
    _, out, _ = run("extract", FIX / "treasury.ptb", "--format", "structured", "--confidence", "uniform")
    (r,) = parse_structured(out)
    assert {p.confidence for p in r.propositions} == {1.0}


def test_external_extractor_flag(tmp_path):
    script = tmp_path / "stub.py"
    script.write_text(textwrap.dedent("""
        import sys
        for line in sys.stdin:
            if "nominated" in line:
                print("he\\tnominated\\tSonia Sotomayor")
            elif "becoming" in line:
                print("she\\twas becoming\\tthe first Supreme Court Justice of Hispanic descent")
            print()
    """))
    code, out, err = run("extract", FIX / "sotomayor.ptb", "--extractor", f"{sys.executable} {script}")
    assert code == 0
    lines = out.splitlines()
    assert lines[1] == "#1\t0\the\tnominated\tSonia Sotomayor"
    assert lines[4] == "#2\t0\tshe\twas becoming\tthe first Supreme Court Justice of Hispanic descent"
    assert "unmatched leaves: 1" in err


def test_eval_identical_files_give_ap_one(tmp_path):
    gold = FIX / "sample_gold.tsv"
    code, out, _ = run("eval", "--gold", gold, "--system", gold)
    assert code == 0
    metrics = dict(line.split("\t") for line in out.splitlines())
    assert metrics["average_precision"] == "1.000000"
    assert metrics["auc"] == "1.000000"


def test_eval_sample_with_outputs(tmp_path):
    csv_path, png = tmp_path / "curve.csv", tmp_path / "curve.png"
    code, out, _ = run("eval", "--gold", FIX / "sample_gold.tsv", "--system", FIX / "sample_system.tsv",
                       "--curve-out", csv_path, "--plot-out", png)
    assert code == 0
    metrics = dict(line.split("\t") for line in out.splitlines())
    assert metrics["system"] == "32" and metrics["gold"] == "28" and metrics["correct"] == "24"
    assert float(metrics["auc"]) == pytest.approx(SAMPLE_AUC, abs=1e-6)
    assert float(metrics["average_precision"]) == pytest.approx(SAMPLE_AP, abs=1e-6)
    rows = csv_path.read_text().splitlines()
    assert rows[0] == "threshold,precision,recall" and len(rows) == 5
    assert png.read_bytes()[:8] == b"\x89PNG\r\n\x1a\n"


def test_eval_missing_gold(tmp_path):
    code, _, err = run("eval", "--gold", tmp_path / "nope.tsv", "--system", FIX / "sample_system.tsv")
    assert code == 2 and "nope.tsv" in err


def test_eval_malformed_line(tmp_path):
    bad = tmp_path / "g.tsv"
    bad.write_text("1\trel\targ\n2\trel\t\targ\n")
    code, _, err = run("eval", "--gold", bad, "--system", FIX / "sample_system.tsv")
    assert code == 2 and "g.tsv:2" in err


def test_plot_is_deterministic(tmp_path):
    a, b = tmp_path / "a.png", tmp_path / "b.png"
    for p in (a, b):
        run("eval", "--gold", FIX / "sample_gold.tsv", "--system", FIX / "sample_system.tsv", "--plot-out", p)
    assert a.read_bytes() == b.read_bytes()
