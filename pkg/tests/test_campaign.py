from __future__ import annotations

import csv
import io
import json
import time
from pathlib import Path

import numpy as np
import pytest

from qmutlab import campaign
from qmutlab.campaign import CampaignError, load_config
from qmutlab.cli import main
from qmutlab.corpus import ghz as corpus_ghz, shipped_corpus_dir
from qmutlab.metrics import METRIC_NAMES
from qmutlab.oracles import VerdictKind
from qmutlab.programs import dump_sidecar
from qmutlab.qasm import serialize_qasm
from qmutlab.records import read_store

from _support import DIVERSE, bell, random_circuit


def write_inputs(directory: Path, circuits, metas=None) -> Path:
    directory.mkdir(parents=True, exist_ok=True)
    for c in circuits:
        (directory / f"{c.name}.qasm").write_text(serialize_qasm(c), encoding="utf-8")
    if metas:
        (directory / "programs.json").write_text(dump_sidecar(metas), encoding="utf-8")
    return directory


@pytest.fixture
def bell_dir(tmp_path):
    return write_inputs(tmp_path / "in", [bell()], {"bell": DIVERSE})


@pytest.fixture
def ghz3_campaign(tmp_path):
    src = write_inputs(tmp_path / "in", [corpus_ghz(3)])
    out = tmp_path / "out"
    assert main(["generate", "-i", str(src), "-o", str(out)]) == 0
    assert main(["run", "-i", str(src), "-o", str(out)]) == 0
    return src, out


class TestConfig:
    def test_ini_and_overrides(self, tmp_path):
        ini = tmp_path / "c.ini"
        ini.write_text("[campaign]\ninputs = a.qasm, b\nshots = 500\nseed = 9\noperators = Add,Remove\n"
                       "positions = 10, 100\nalpha = 0.05\nopo_test = goodness_of_fit\n")
        cfg = load_config(ini, seed=3)
        assert cfg.inputs == ("a.qasm", "b") and cfg.shots == 500 and cfg.seed == 3
        assert {o.value for o in cfg.enumeration.operator_filter} == {"Add", "Remove"}
        assert cfg.enumeration.position_filter == frozenset({10, 100})
        assert cfg.oracle.alpha == 0.05 and cfg.oracle.opo_test.value == "goodness_of_fit"

    def test_defaults(self):
        cfg = load_config()
        assert (cfg.shots, cfg.seed, cfg.seed_mode, cfg.max_qubits) == (100_000, 2023, "shared", 16)

    @pytest.mark.parametrize("bad", [dict(shots=0), dict(seed_mode="random"), dict(operators="Mutate"),
                                     dict(alpha=2.0), dict(gates="cp")])
    def test_invalid(self, bad):
        with pytest.raises(CampaignError):
            load_config(**bad)

    def test_missing_file(self, tmp_path):
        with pytest.raises(CampaignError):
            load_config(tmp_path / "nope.ini")


class TestGenerate:
    def test_bell_counts_and_files(self, bell_dir, tmp_path, capsys):
        out = tmp_path / "out"
        assert main(["generate", "-i", str(bell_dir), "-o", str(out)]) == 0
        assert "Add=51, Remove=2, Replace=15" in capsys.readouterr().out
        rows = campaign.read_specs(out / campaign.SPECS_FILE)
        assert len(rows) == 68
        assert all((out / r["file"]).exists() for r in rows)
        assert (out / "mutants/bell/bell__Remove_h_0.qasm").read_text().count("\n") == 7

    def test_operator_filter(self, bell_dir, tmp_path):
        out = tmp_path / "out"
        assert main(["generate", "-i", str(bell_dir), "-o", str(out), "--operators", "Remove"]) == 0
        assert {r["operator"] for r in campaign.read_specs(out / campaign.SPECS_FILE)} == {"Remove"}

    def test_empty_dir(self, tmp_path, capsys):
        (tmp_path / "empty").mkdir()
        assert main(["generate", "-i", str(tmp_path / "empty"), "-o", str(tmp_path / "o")]) == 2
        assert "no circuits" in capsys.readouterr().err

    def test_partial_failure(self, bell_dir, tmp_path, capsys):
        (bell_dir / "broken.qasm").write_text("OPENQASM 2.0;\nqreg q[1];\nfoo q[0];\n")
        assert main(["generate", "-i", str(bell_dir), "-o", str(tmp_path / "o")]) == 1
        assert "broken.qasm" in capsys.readouterr().err

    def test_all_fail(self, tmp_path):
        d = tmp_path / "bad"
        d.mkdir()
        (d / "broken.qasm").write_text("not qasm")
        assert main(["generate", "-i", str(d), "-o", str(tmp_path / "o")]) == 2

    def test_missing_path(self, tmp_path):
        assert main(["generate", "-i", str(tmp_path / "missing"), "-o", str(tmp_path / "o")]) == 2

    def test_deterministic(self, bell_dir, tmp_path):
        for name in ("a", "b"):
            main(["generate", "-i", str(bell_dir), "-o", str(tmp_path / name)])
        assert (tmp_path / "a/specs.jsonl").read_bytes() == (tmp_path / "b/specs.jsonl").read_bytes()


class TestRun:
    def test_ghz3(self, ghz3_campaign):
        _, out = ghz3_campaign
        recs = read_store(out / campaign.STORE_FILE)
        assert len(recs) == len(campaign.read_specs(out / campaign.SPECS_FILE))
        add = [r for r in recs if r.operator == "Add"]
        assert all(r.survived for r in add if r.gate == "id")
        sr = lambda g: sum(r.survived for r in add if r.gate == g) / sum(r.gate == g for r in add)
        assert sr("cz") == 1.0 and sr("cz") > sr("cx")
        assert set(recs[0].metrics) == set(METRIC_NAMES) | {"entanglement_estimated"}
        assert all(r.algorithm == "ghz" and r.output_dominance == "DiverseOutput" for r in recs)

    def test_rerun_identical_and_resume(self, ghz3_campaign, tmp_path, capsys):
        src, out = ghz3_campaign
        before = (out / campaign.STORE_FILE).read_bytes()
        assert main(["run", "-i", str(src), "-o", str(out)]) == 0
        assert "executed 0 mutants" in capsys.readouterr().out
        assert (out / campaign.STORE_FILE).read_bytes() == before
        fresh = tmp_path / "fresh"
        main(["generate", "-i", str(src), "-o", str(fresh)])
        main(["run", "-i", str(src), "-o", str(fresh)])
        assert (fresh / campaign.STORE_FILE).read_bytes() == before

    def test_partial_store_resume(self, ghz3_campaign, tmp_path):
        src, out = ghz3_campaign
        full = (out / campaign.STORE_FILE).read_bytes()
        lines = full.decode().splitlines(keepends=True)
        (out / campaign.STORE_FILE).write_text("".join(lines[::2]))
        assert main(["run", "-i", str(src), "-o", str(out)]) == 0
        assert (out / campaign.STORE_FILE).read_bytes() == full

    def test_workers_do_not_change_output(self, ghz3_campaign, tmp_path):
        src, out = ghz3_campaign
        par = tmp_path / "par"
        main(["generate", "-i", str(src), "-o", str(par)])
        assert main(["run", "-i", str(src), "-o", str(par), "-j", "2"]) == 0
        assert (par / campaign.STORE_FILE).read_bytes() == (out / campaign.STORE_FILE).read_bytes()

    def test_per_mutant_seeds(self, tmp_path):
        src = write_inputs(tmp_path / "in", [corpus_ghz(3)])
        out = tmp_path / "o"
        main(["generate", "-i", str(src), "-o", str(out), "--gates", "id"])
        assert main(["run", "-i", str(src), "-o", str(out), "--seed-mode", "per-mutant", "--shots", "5000"]) == 0
        recs = read_store(out / campaign.STORE_FILE)
        # independent re-samples of an identical circuit: OPO p-values vary but almost always pass
        assert len({r.p_value for r in recs}) > 1
        assert sum(r.survived for r in recs) >= len(recs) - 1
        assert campaign.execution_seed(5, "per-mutant", "00000000000000ff") == 5 ^ 0xFF
        assert campaign.execution_seed(5, "shared", "00000000000000ff") == 5

    def test_verdict_partition_and_dominant_no_opo(self, tmp_path):
        src = shipped_corpus_dir()
        out = tmp_path / "o"
        args = ["-i", str(src / "dj_3.qasm"), "-i", str(src / "wstate_3.qasm"), "-o", str(out)]
        main(["generate", *args])
        assert main(["run", *args, "--shots", "4000"]) == 0
        recs = read_store(out / campaign.STORE_FILE)
        assert all(r.verdict in {VerdictKind.SURVIVED, VerdictKind.KILLED_WOO, VerdictKind.KILLED_OPO} for r in recs)
        dom = [r for r in recs if r.output_dominance == "OutputDominant"]
        assert dom and not any(r.verdict is VerdictKind.KILLED_OPO for r in dom)
        assert any(r.verdict is VerdictKind.KILLED_OPO for r in recs if r.output_dominance == "DiverseOutput")

    def test_over_budget_stillborn(self, tmp_path):
        src = write_inputs(tmp_path / "in", [corpus_ghz(5)])
        out = tmp_path / "o"
        main(["generate", "-i", str(src), "-o", str(out), "--operators", "Remove"])
        assert main(["run", "-i", str(src), "-o", str(out), "--max-qubits", "4"]) == 0
        recs = read_store(out / campaign.STORE_FILE)
        assert recs and all(r.verdict is VerdictKind.STILLBORN and "exceeds" in r.reason for r in recs)
        assert all(r.metrics["entanglement_estimated"] for r in recs)

    def test_missing_origin_stillborn(self, ghz3_campaign, tmp_path):
        src, out = ghz3_campaign
        (out / campaign.STORE_FILE).unlink()
        empty = tmp_path / "other"
        write_inputs(empty, [bell()], {"bell": DIVERSE})
        assert main(["run", "-i", str(empty), "-o", str(out)]) == 0
        recs = read_store(out / campaign.STORE_FILE)
        assert all(r.verdict is VerdictKind.STILLBORN for r in recs)

    def test_run_without_specs(self, bell_dir, tmp_path):
        assert main(["run", "-i", str(bell_dir), "-o", str(tmp_path / "none")]) == 2

    def test_throughput_10q_50g(self, tmp_path):
        c = random_circuit(np.random.default_rng(21), 10, 50)
        c = type(c)("rand10", c.num_qubits, c.num_clbits, c.gates, c.measurements)
        src = write_inputs(tmp_path / "in", [c], {"rand10": DIVERSE})
        out = tmp_path / "o"
        t0 = time.perf_counter()
        main(["generate", "-i", str(src), "-o", str(out)])
        assert main(["run", "-i", str(src), "-o", str(out)]) == 0
        elapsed = time.perf_counter() - t0
        n = len(read_store(out / campaign.STORE_FILE))
        assert 1000 <= n <= 2000
        assert elapsed < 600


class TestAnalyzeAndRecommend:
    def test_analyze_outputs(self, ghz3_campaign, tmp_path, capsys):
        _, out = ghz3_campaign
        rep = tmp_path / "rep"
        assert main(["analyze", "--store", str(out / campaign.STORE_FILE), "--out", str(rep),
                     "--group", "operator", "--group", "operator,gate,position_bucket",
                     "--heatmap", "operator,gate_type", "--no-correlations"]) == 0
        rows = list(csv.reader(io.StringIO((rep / "sr_operator.csv").read_text())))
        assert len(rows) == 4 and rows[0] == ["operator", "survivors", "total", "sr"]
        top = json.loads((rep / "top5_operator+gate+position_bucket.json").read_text())
        assert len(top["top"]) == 5 and top["top"][0]["label"].startswith("Add_")
        assert (rep / "heatmap_operator__gate_type.json").exists()

    def test_too_many_ivs(self, ghz3_campaign, tmp_path):
        _, out = ghz3_campaign
        assert main(["analyze", "--store", str(out / campaign.STORE_FILE), "--out", str(tmp_path / "r"),
                     "--group", "operator,gate,gate_type,position_bucket"]) == 2

    def test_correlations_report(self, tmp_path, capsys):
        src = write_inputs(tmp_path / "in", [corpus_ghz(3), corpus_ghz(4), bell()],
                           {"bell": DIVERSE})
        out = tmp_path / "o"
        main(["generate", "-i", str(src), "-o", str(out), "--operators", "Remove,Replace"])
        main(["run", "-i", str(src), "-o", str(out), "--shots", "2000"])
        capsys.readouterr()
        assert main(["correlations", "--store", str(out / campaign.STORE_FILE)]) == 0
        lines = capsys.readouterr().out.strip().splitlines()
        assert lines[0] == "metric,pearson_r" and len(lines) == 8
        assert [line.split(",")[0] for line in lines[1:]] == list(METRIC_NAMES)

    def test_recommend_algorithm(self, ghz3_campaign, tmp_path):
        _, out = ghz3_campaign
        manifest = tmp_path / "m.json"
        copies = tmp_path / "copies"
        assert main(["recommend", "--store", str(out / campaign.STORE_FILE), "--algorithm", "ghz",
                     "--sr", "0.9:1.0", "--max", "10", "--out", str(manifest), "--copy-to", str(copies)]) == 0
        m = json.loads(manifest.read_text())
        assert 1 <= m["count"] <= 10
        assert all(0.9 <= e["combination_sr"] <= 1.0 for e in m["mutants"])
        assert sorted(p.name for p in copies.iterdir()) == sorted(Path(e["file"]).name for e in m["mutants"])

    def test_recommend_diverse_h(self, ghz3_campaign, tmp_path, capsys):
        _, out = ghz3_campaign
        capsys.readouterr()
        assert main(["recommend", "--store", str(out / campaign.STORE_FILE), "--dominance", "diverse",
                     "--gate", "h", "--sr", "0:0.2"]) == 0
        m = json.loads(capsys.readouterr().out)
        assert m["count"] > 0 and all(e["gate"] == "h" and e["combination_sr"] <= 0.2 for e in m["mutants"])

    def test_infeasible_band(self, ghz3_campaign, capsys):
        _, out = ghz3_campaign
        capsys.readouterr()
        # no survival ratio k/n with n <= 98 equals 0.123456
        assert main(["recommend", "--store", str(out / campaign.STORE_FILE),
                     "--sr", "0.123456:0.123456"]) == 0
        res = capsys.readouterr()
        assert json.loads(res.out)["count"] == 0 and "warning" in res.err

    def test_bad_band(self, ghz3_campaign):
        _, out = ghz3_campaign
        assert main(["recommend", "--store", str(out / campaign.STORE_FILE), "--sr", "0.5"]) == 2
        assert main(["recommend", "--store", str(out / campaign.STORE_FILE), "--sr", "0.7:0.2"]) == 2
