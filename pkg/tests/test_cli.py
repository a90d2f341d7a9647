import json
import os
import subprocess
import sys

import pytest

from cascade_lens import cli
from cascade_lens.reports import strip_stamp

DAY = 86400


def _write(path, text):
    path.write_text(text, encoding="utf-8")
    return str(path)


@pytest.fixture
def chain_files(tmp_path):
    edges = _write(tmp_path / "edges.tsv", "2\t1\n3\t2\n")
    events = _write(tmp_path / "events.jsonl", "\n".join(json.dumps(e) for e in [
        {"event_id": 100, "user_id": 1, "ts": 0, "kind": "original", "tokens": ["vicodin"]},
        {"event_id": 101, "user_id": 2, "ts": DAY, "kind": "original", "tokens": ["vicodin"]},
        {"event_id": 102, "user_id": 3, "ts": 2 * DAY, "kind": "retweet", "parent_event_id": 101, "tokens": []},
    ]) + "\n")
    return edges, events, str(tmp_path / "out")


def _load(out, name):
    with open(os.path.join(out, name), encoding="utf-8") as fh:
        return json.load(fh)


def test_stats_reciprocity(tmp_path, capsys):
    edges = _write(tmp_path / "e.tsv", "1\t2\n2\t1\n1\t3\n")
    out = str(tmp_path / "r")
    assert cli.run(["stats", "--edges", edges, "--out", out]) == 0
    rep = _load(out, "stats.json")
    assert rep["reciprocity"] == pytest.approx(2 / 3)
    assert rep["config"]["edges"] == edges
    assert "generated_at" in rep
    assert "Reciprocity" in capsys.readouterr().out
    assert os.path.exists(os.path.join(out, "degree_ccdf.csv"))


def test_cascades_chain(chain_files):
    edges, events, out = chain_files
    code = cli.run(["cascades", "--edges", edges, "--events", events, "--out", out,
                    "--min-cascade-size", "1"])
    assert code == 0
    with open(os.path.join(out, "cascades.jsonl"), encoding="utf-8") as fh:
        rows = [json.loads(x) for x in fh]
    assert len(rows) == 1 and rows[0]["metrics"]["size"] == 3


def test_cascades_with_author_outside_graph(chain_files):
    edges, events, out = chain_files
    with open(events, "a", encoding="utf-8") as fh:
        fh.write(json.dumps({"event_id": 103, "user_id": 55, "ts": 3 * DAY, "kind": "retweet",
                             "parent_event_id": 102, "tokens": []}) + "\n")
    assert cli.run(["cascades", "--edges", edges, "--events", events, "--out", out,
                    "--min-cascade-size", "1"]) == 0
    with open(os.path.join(out, "cascades.jsonl"), encoding="utf-8") as fh:
        (row,) = [json.loads(x) for x in fh]
    assert row["metrics"]["size"] == 4 and [3, 55] in row["edges"]


def test_exposure_absent_token(chain_files, capsys):
    edges, events, out = chain_files
    code = cli.run(["exposure", "--edges", edges, "--events", events, "--out", out, "--token", "lortab"])
    assert code == cli.EXIT_NO_DATA
    assert "no data" in capsys.readouterr().err


def test_exposure_default_tokens(chain_files):
    edges, events, out = chain_files
    assert cli.run(["exposure", "--edges", edges, "--events", events, "--out", out, "--support", "1"]) == 0
    summary = _load(out, "exposure_summary.json")
    assert os.path.exists(os.path.join(out, "exposure_vicodin.csv"))
    assert "vicodin" in json.dumps(summary)


def test_error_codes_are_distinct(tmp_path, chain_files):
    edges, events, out = chain_files
    bad = _write(tmp_path / "bad.tsv", "1\t2\nxx\t3\n")
    codes = {
        "missing": cli.run(["stats", "--edges", str(tmp_path / "nope.tsv"), "--out", out]),
        "malformed": cli.run(["stats", "--edges", bad, "--out", out]),
        "config": cli.run(["cascades", "--edges", edges, "--out", out]),
        "usage": cli.run(["stats", "--bogus"]),
        "no_data": cli.run(["exposure", "--edges", edges, "--events", events, "--out", out,
                            "--token", "zzz"]),
    }
    assert codes == {"missing": 3, "malformed": 4, "config": 6, "usage": 2, "no_data": 5}


def test_malformed_message_has_line(tmp_path, capsys):
    bad = _write(tmp_path / "bad.tsv", "1\t2\nxx\t3\n")
    cli.run(["stats", "--edges", bad, "--out", str(tmp_path / "o")])
    assert "line 2" in capsys.readouterr().err


@pytest.mark.parametrize("flag", [["--delta", "0"], ["--min-cascade-size", "0"], ["--support", "0"],
                                  ["--hits-tol", "-1"]])
def test_bad_values(chain_files, flag):
    edges, events, out = chain_files
    assert cli.run(["all", "--edges", edges, "--events", events, "--out", out] + flag) == cli.EXIT_BAD_CONFIG


def test_thread_env(monkeypatch):
    monkeypatch.setenv("CASCADE_LENS_THREADS", "3")
    assert cli.thread_limit() == 3
    monkeypatch.setenv("CASCADE_LENS_THREADS", "x")
    with pytest.raises(Exception):
        cli.thread_limit()


def _snapshot(out):
    snap = {}
    for name in sorted(os.listdir(out)):
        with open(os.path.join(out, name), encoding="utf-8") as fh:
            snap[name] = strip_stamp(fh.read())
    return snap


def test_synth_then_all_is_deterministic(tmp_path):
    fx = str(tmp_path / "fx")
    assert cli.run(["synth", "--out", fx, "--nodes", "800", "--roots", "12",
                    "--activation", "0.35", "--noise", "1.0", "--seed", "3"]) == 0
    edges, events = os.path.join(fx, "edges.tsv"), os.path.join(fx, "events.jsonl")
    outs = []
    out = str(tmp_path / "run")
    for _ in range(2):
        assert cli.run(["all", "--edges", edges, "--events", events, "--out", out,
                        "--min-cascade-size", "2", "--support", "2"]) == 0
        outs.append(_snapshot(out))
    assert outs[0] == outs[1]
    for name in ("stats.json", "bowtie.json", "roles.json", "reach.json", "cascades.jsonl",
                 "cascades_summary.json", "exposure_summary.json", "stats.txt"):
        assert name in outs[0]


def test_module_entry_point(tmp_path):
    edges = _write(tmp_path / "e.tsv", "1\t2\n2\t1\n")
    r = subprocess.run([sys.executable, "-m", "cascade_lens", "stats", "--edges", edges,
                        "--out", str(tmp_path / "o")], capture_output=True, text=True)
    assert r.returncode == 0, r.stderr
