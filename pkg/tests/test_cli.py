import json
import subprocess
import sys

import pytest

from cardex import __version__
from cardex.cli import main
from cardex.synthetic import child_corpus


@pytest.fixture
def files(tmp_path):
    corpus = child_corpus(60, seed=3)
    paths = {k: tmp_path / name for k, name in
             [("corpus", "c.jsonl"), ("kb", "kb.tsv"), ("gold", "gold.tsv")]}
    corpus.write(paths["corpus"], paths["kb"], paths["gold"])
    paths["dir"] = tmp_path
    return paths


def run(*argv):
    return main([str(a) for a in argv])


def read_jsonl(path):
    return [json.loads(line) for line in path.read_text().splitlines()]


def test_full_pipeline(files, capsys):
    d = files["dir"]
    assert run("annotate", files["corpus"], files["kb"], "--mode", "nummod", "--out", d / "lab.jsonl") == 0
    rows = read_jsonl(d / "lab.jsonl")
    assert set(rows[0]) == {"subject", "predicate", "sentence_idx", "labels", "text", "tokens"}
    assert all(len(r["labels"]) == len(r["tokens"]) for r in rows)
    assert sum(r["labels"].count("CARD") for r in rows) >= 50

    assert run("train", d / "lab.jsonl", "--out", d / "m.crf", "--max-iter", "50") == 0
    assert (d / "m.crf").read_text().startswith("cardex-crf v1\n")

    assert run("predict", files["corpus"], d / "m.crf", "--out", d / "p.jsonl") == 0
    preds = read_jsonl(d / "p.jsonl")
    assert preds and set(preds[0]) == {"subject", "predicate", "count", "confidence", "mode", "evidence"}
    assert set(preds[0]["evidence"]) == {"sentence", "span"}

    capsys.readouterr()
    assert run("evaluate", d / "p.jsonl", files["gold"], "--json") == 0
    (report,) = json.loads(capsys.readouterr().out)
    assert report["predicate_id"] == "child" and report["f1"] > 0.9

    assert run("evaluate", d / "p.jsonl", files["gold"]) == 0
    out = capsys.readouterr().out
    assert out.splitlines()[0].split() == ["predicate", "#s", "#pred", "#corr", "P", "R", "F1"]
    assert out.splitlines()[1].split()[0] == "child"


def test_predict_flags_and_stdout(files, capsys):
    d = files["dir"]
    run("annotate", files["corpus"], files["kb"], "--mode", "comp", "--out", d / "lab.jsonl")
    run("train", d / "lab.jsonl", "--out", d / "m.crf", "--max-iter", "20")
    capsys.readouterr()
    assert run("predict", files["corpus"], d / "m.crf", "--compositional", "--zero-one",
               "--threshold", "0.5") == 0
    lines = capsys.readouterr().out.splitlines()
    assert all(json.loads(line)["confidence"] > 0.5 or json.loads(line)["mode"] == "TRANSLATED"
               for line in lines)


def test_annotate_with_gold_and_min_count(files, capsys):
    assert run("annotate", files["corpus"], files["kb"], "--mode", "vanilla", "--gold", files["gold"],
               "--min-count", "5") == 0
    rows = [json.loads(line) for line in capsys.readouterr().out.splitlines()]
    gold = {line.split("\t")[0]: int(line.split("\t")[2]) for line in files["gold"].read_text().splitlines()}
    assert rows and all(gold[r["subject"]] >= 5 for r in rows)


def test_baseline(files, capsys):
    d = files["dir"]
    assert run("baseline", files["corpus"], "--seed", "7", "--out", d / "b1.jsonl") == 0
    assert run("baseline", files["corpus"], "--seed", "7", "--out", d / "b2.jsonl") == 0
    assert (d / "b1.jsonl").read_bytes() == (d / "b2.jsonl").read_bytes()
    rows = read_jsonl(d / "b1.jsonl")
    assert rows and all(r["mode"] == "BASELINE" for r in rows)


def test_analyze(files, capsys):
    assert run("analyze", files["corpus"], "--json") == 0
    census = json.loads(capsys.readouterr().out)
    assert census["counts"]["NUMBER"] > 0 and census["total"] == sum(census["counts"].values())
    assert run("analyze", files["corpus"], "--top", "3") == 0
    out = capsys.readouterr().out
    assert out.splitlines()[0].split() == ["tag", "count", "freq"] and "total" in out


def test_evaluate_multiple_predicates(tmp_path, capsys):
    (tmp_path / "g.tsv").write_text("a\tchild\t2\na\tspouse\t1\nb\tchild\t3\n")
    (tmp_path / "p.jsonl").write_text(
        '{"subject": "a", "predicate": "child", "count": 2, "confidence": 0.9, "mode": "SINGLE", '
        '"evidence": {"sentence": 0, "span": [1, 2]}}\n')
    assert run("evaluate", tmp_path / "p.jsonl", tmp_path / "g.tsv", "--json") == 0
    reports = json.loads(capsys.readouterr().out)
    assert [r["predicate_id"] for r in reports] == ["child", "spouse", "*"]
    assert reports[0]["precision"] == 1.0 and reports[1]["recall"] == 0.0


def test_usage_errors_exit_1(files, capsys):
    assert run() == 1
    assert run("annotate", files["corpus"], files["kb"]) == 1          # --mode missing
    assert run("annotate", files["corpus"], files["kb"], "--mode", "fuzzy") == 1
    assert run("predict", files["corpus"], "m.crf", "--threshold", "lots") == 1
    assert run("frobnicate") == 1
    assert "usage:" in capsys.readouterr().err


def test_bad_config_values_exit_1(files):
    assert run("annotate", files["corpus"], files["kb"], "--mode", "vanilla", "--min-count", "0") == 1
    assert run("predict", files["corpus"], files["dir"] / "none.crf", "--threshold", "1.5") == 1


def test_bad_data_exits_2(files, tmp_path, capsys):
    assert run("analyze", tmp_path / "missing.jsonl") == 2
    (tmp_path / "bad.jsonl").write_text("{not json\n")
    assert run("analyze", tmp_path / "bad.jsonl") == 2
    assert ":1:" in capsys.readouterr().err
    (tmp_path / "m.crf").write_text("cardex-crf v1\nsigma\t1\nlabels\tCARD\tO\ntemplate\t7\n")
    assert run("predict", files["corpus"], tmp_path / "m.crf") == 2
    assert "version 7" in capsys.readouterr().err
    (tmp_path / "lab.jsonl").write_text(json.dumps({"text": "He has 3 sons.", "labels": ["O"] * 5}) + "\n")
    assert run("train", tmp_path / "lab.jsonl", "--out", tmp_path / "x.crf") == 2
    assert "no CARD" in capsys.readouterr().err
    (tmp_path / "lab.jsonl").write_text(json.dumps({"text": "He has 3 sons.", "labels": ["O"]}) + "\n")
    assert run("train", tmp_path / "lab.jsonl", "--out", tmp_path / "x.crf") == 2


def test_custom_rules_file(files, tmp_path, capsys):
    # a lexicon that knows no number words leaves only digit numbers
    (tmp_path / "rules.txt").write_text("[number_words]\nzilch\t0\n[ordinal_words]\nfirst\t1\n"
                                        "[month_names]\nmay\n[year_range]\n1000\t2199\n")
    assert run("--rules", tmp_path / "rules.txt", "analyze", files["corpus"], "--json") == 0
    sparse = json.loads(capsys.readouterr().out)["counts"]["NUMBER"]
    assert run("analyze", files["corpus"], "--json") == 0
    assert json.loads(capsys.readouterr().out)["counts"]["NUMBER"] > sparse
    (tmp_path / "rules.txt").write_text("[number_words]\none\tuno\n")
    assert run("--rules", tmp_path / "rules.txt", "analyze", files["corpus"]) == 2


def test_module_entry_point_and_version():
    out = subprocess.run([sys.executable, "-m", "cardex", "--version"], capture_output=True, text=True)
    assert out.returncode == 0 and out.stdout.strip() == f"cardex {__version__}"
