import json
import subprocess
import sys

import pytest

from lcis.cli import main
from lcis.graph import sample_pair, save_graph
from lcis.greedy import greedy_lcis
from lcis.transcript import Transcript


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr().out
    return code, json.loads(out) if out.strip().startswith("{") else out


@pytest.fixture
def pair_files(tmp_path):
    y = sample_pair(10, 4)
    save_graph(y.g1, tmp_path / "g1.txt")
    save_graph(y.g2, tmp_path / "g2.txt")
    return y, str(tmp_path / "g1.txt"), str(tmp_path / "g2.txt")


def test_greedy_seeded(capsys, tmp_path):
    tpath = tmp_path / "t.jsonl"
    code, out = run(capsys, "greedy", "--n", "40", "--seed", "3", "--emit-transcript", str(tpath))
    sol, tr = greedy_lcis(sample_pair(40, 3))
    assert code == 0
    assert out["size"] == sol.size and out["s1"] == list(sol.s1) and out["s2"] == list(sol.s2)
    assert "runtime_ms" in out
    assert Transcript.load(tpath).to_jsonl() == tr.to_jsonl()


def test_global_flags_before_subcommand(capsys):
    _, a = run(capsys, "--seed", "3", "greedy", "--n", "40")
    _, b = run(capsys, "greedy", "--n", "40", "--seed", "3")
    assert a["s1"] == b["s1"]


def test_greedy_and_exact_on_files(capsys, pair_files):
    y, f1, f2 = pair_files
    code, out = run(capsys, "greedy", "--graph1", f1, "--graph2", f2)
    assert code == 0 and out["size"] == greedy_lcis(y)[0].size
    code, out = run(capsys, "exact", "--graph1", f1, "--graph2", f2)
    assert code == 0 and out["flag"] == "optimal"
    assert out["mapping"] == {str(a): b for a, b in zip(out["s1"], out["s2"])}
    code, out = run(capsys, "exact", "--graph1", f1, "--graph2", f2, "--budget", "1")
    assert out["flag"] == "lower-bound"


def test_verify(capsys, tmp_path, pair_files):
    y, f1, f2 = pair_files
    sol, _ = greedy_lcis(y)
    good = tmp_path / "good.json"
    good.write_text(json.dumps(sol.to_json()))
    code, out = run(capsys, "verify", "--graph1", f1, "--graph2", f2, "--solution", str(good))
    assert code == 0 and out["valid"]
    d1, d2 = y.g1.to_dense(), y.g2.to_dense()
    bad_pair = next((a, b) for a in range(10) for b in range(10) if d1[0, a] != d2[0, b] and a and b)
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"s1": [0, bad_pair[0]], "s2": [0, bad_pair[1]]}))
    code, out = run(capsys, "verify", "--graph1", f1, "--graph2", f2, "--solution", str(bad))
    assert code == 1 and out["violation"] == [0, 1]


def test_online_sim(capsys, tmp_path):
    tpath = tmp_path / "t.jsonl"
    code, out = run(capsys, "online-sim", "--strategy", "greedy", "--n", "30", "--seed", "2",
                    "--validate", "--emit-transcript", str(tpath))
    assert code == 0 and out["valid"] and out["rounds"] == 30
    lines = tpath.read_text().splitlines()
    assert len(lines) == 30 and json.loads(lines[0])["t"] == 1


def test_ogp_commands(capsys):
    code, out = run(capsys, "ogp-scan", "--eps", "1")
    assert code == 0 and out["m"] == 14 and out["psi_at_min"] == pytest.approx(2.25)
    code, out = run(capsys, "ogp-scan", "--eps", "1", "--n", "16", "--seeds", "2")
    assert out["events"]["trials"] == 2
    code, out = run(capsys, "ogp-census", "--n", "6", "--t", "3", "--m", "2",
                    "--k-sol", "3", "--k-ov", "1", "--seed", "1")
    assert code == 0 and {"z_count", "w_count"} <= set(out) and out["w_threshold"] is None
    code, out = run(capsys, "ogp-family", "--n", "24", "--t", "8", "--m", "3", "--seed", "1",
                    "--strategy", "greedy")
    assert code == 0 and len(out["sizes"]) == 3 and isinstance(out["S"], bool)


def test_experiment(capsys, tmp_path):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"kind": "exact-vs-greedy", "n_values": [6], "trials": 4}))
    code, out = run(capsys, "experiment", "--config", str(cfg), "--out", str(tmp_path / "o"),
                    "--seed", "3", "--jobs", "2")
    assert code == 0 and out["config"]["master_seed"] == 3
    assert (tmp_path / "o" / "records.csv").exists()


def test_usage_errors(capsys, tmp_path):
    assert main(["exact"]) == 2
    bad = tmp_path / "g.txt"
    bad.write_text("2\n1 0\n")
    assert main(["greedy", "--graph1", str(bad), "--graph2", str(bad)]) == 2
    assert "u ≥ v at line 2" in capsys.readouterr().err
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"kind": "greedy-scaling", "n_values": [8], "trials": 0}))
    assert main(["experiment", "--config", str(cfg)]) == 2
    with pytest.raises(SystemExit) as exc:
        main(["no-such-command"])
    assert exc.value.code == 2


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "lcis.cli", "ogp-scan", "--eps", "2"],
                         capture_output=True, text=True)
    assert res.returncode == 0 and json.loads(res.stdout)["m"] == 4
