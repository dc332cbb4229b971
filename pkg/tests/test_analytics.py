from __future__ import annotations

import csv
import io
import random
import statistics
from collections import Counter
from itertools import combinations

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from qmutlab.analytics import (UndefinedCorrelationError, complexity_correlations, format_interaction,
                               heatmap_data, marginalize, pearson, rank_interactions, survival_rate,
                               table_to_csv)
from qmutlab.metrics import METRIC_NAMES
from qmutlab.oracles import VerdictKind
from qmutlab.records import IV_NAMES, MutantRecord, dumps_record, read_store, write_store

from _support import synthetic_records


def brute_tally(records, grouping):
    surv, tot = Counter(), Counter()
    for r in records:
        if r.verdict is VerdictKind.STILLBORN:
            continue
        key = tuple(getattr(r, g) for g in grouping)
        tot[key] += 1
        surv[key] += r.verdict is VerdictKind.SURVIVED
    return {k: (surv[k], tot[k]) for k in tot}


def rec(i, verdict="Survived", operator="Add", gate="h", bucket=10, origin="c0", metrics=None):
    return MutantRecord(id=f"{i:04d}", origin=origin, operator=operator, gate=gate, gate_type="Hadamard",
                        gate_size="Single", position=0, position_bucket=bucket, operands=(0,), params=(),
                        verdict=VerdictKind(verdict), algorithm="ghz", algorithm_group="ghz",
                        output_dominance="DiverseOutput", metrics=metrics or {})


RECORDS = synthetic_records(3000, seed=1)


class TestSurvivalRate:
    def test_simple_ratio(self):
        rs = [rec(i, "Survived" if i < 3 else "KilledWOO") for i in range(4)]
        t = survival_rate(rs, ["operator"])
        assert t.sr("Add") == 0.75

    def test_stillborn_excluded(self):
        rs = [rec(0), rec(1, "Stillborn"), rec(2, "KilledOPO")]
        c = survival_rate(rs, ["operator"]).cells[("Add",)]
        assert (c.survivors, c.total) == (1, 2)

    def test_overall(self):
        t = survival_rate(RECORDS, [])
        s, n = brute_tally(RECORDS, ())[()]
        assert t.cells[()].sr == s / n

    def test_two_cells(self):
        rs = [rec(0, operator="Add"), rec(1, "KilledWOO", operator="Remove"), rec(2, operator="Remove")]
        t = survival_rate(rs, ["operator", "gate", "position_bucket"])
        assert {k: (c.survivors, c.total) for k, c in t.cells.items()} == brute_tally(rs, ("operator", "gate", "position_bucket"))
        assert set(t.cells) == {("Add", "h", 10), ("Remove", "h", 10)}

    @pytest.mark.parametrize("k", [1, 2, 3])
    def test_brute_force_all_groupings(self, k):
        for grouping in combinations(IV_NAMES, k):
            t = survival_rate(RECORDS, grouping)
            got = {key: (c.survivors, c.total) for key, c in t.cells.items()}
            assert got == brute_tally(RECORDS, grouping)
            assert all(0 <= c.sr <= 1 and c.total > 0 for c in t.cells.values())

    def test_marginalization(self):
        for grouping in combinations(IV_NAMES, 3):
            t = survival_rate(RECORDS, grouping)
            for keep in list(combinations(grouping, 2)) + list(combinations(grouping, 1)):
                assert marginalize(t, keep).cells == survival_rate(RECORDS, keep).cells

    @settings(max_examples=20, deadline=None)
    @given(st.randoms(use_true_random=False))
    def test_permutation_invariant(self, rnd):
        shuffled = list(RECORDS[:500])
        rnd.shuffle(shuffled)
        for g in (["gate"], ["operator", "position_bucket"]):
            assert survival_rate(shuffled, g).cells == survival_rate(RECORDS[:500], g).cells

    def test_unknown_iv(self):
        with pytest.raises(KeyError):
            survival_rate(RECORDS, ["colour"])

    def test_csv(self):
        rs = [rec(0), rec(1, "KilledWOO", operator="Remove"), rec(2, operator="Replace")]
        text = table_to_csv(survival_rate(rs, ["operator"]))
        rows = list(csv.reader(io.StringIO(text)))
        assert rows[0] == ["operator", "survivors", "total", "sr"]
        assert len(rows) == 4
        assert rows[2] == ["Remove", "0", "1", "0.000000"]


class TestRanking:
    def test_tie_rules(self):
        def cell(gate, survivors, total, start):
            return [rec(start + i, "Survived" if i < survivors else "KilledWOO", gate=gate) for i in range(total)]

        rs = cell("h", 18, 20, 0) + cell("z", 9, 10, 100) + cell("x", 9, 10, 200) + cell("y", 1, 10, 300)
        t = survival_rate(rs, ["gate"])
        # equal SR: larger total first, then value order
        assert [c.values for c in rank_interactions(t, 3)] == [("h",), ("x",), ("z",)]
        assert len(rank_interactions(t, 50)) == len(t.cells) == 4

    def test_label_format(self):
        assert format_interaction(("Add", "id", 80), 1.0) == "Add_id_80.0{1.0}"
        assert format_interaction(("Replace", "Multi", 100), 0.6666) == "Replace_Multi_100.0{0.67}"

    def test_k_validation(self):
        with pytest.raises(ValueError):
            rank_interactions(survival_rate(RECORDS, ["gate"]), 0)


class TestPearson:
    @pytest.mark.parametrize("xs,ys,r", [((1, 2, 3), (2, 4, 6), 1.0), ((1, 2, 3), (3, 2, 1), -1.0),
                                         ((1, 2, 3, 4), (1, 3, 2, 4), 0.8)])
    def test_examples(self, xs, ys, r):
        assert pearson(xs, ys) == pytest.approx(r, abs=1e-15)

    def test_degenerate(self):
        with pytest.raises(UndefinedCorrelationError):
            pearson([1, 1, 1], [1, 2, 3])
        with pytest.raises(ValueError):
            pearson([1], [2])
        with pytest.raises(ValueError):
            pearson([1, 2], [1, 2, 3])

    @settings(max_examples=100)
    @given(st.integers(2, 1000), st.integers(0, 2**32 - 1))
    def test_matches_two_pass_oracle(self, n, seed):
        rng = np.random.default_rng(seed)
        xs = rng.normal(size=n).tolist()
        ys = (0.3 * np.array(xs) + rng.normal(size=n)).tolist()
        assert abs(pearson(xs, ys) - statistics.correlation(xs, ys)) < 1e-12


class TestCorrelations:
    def test_engineered_sr(self):
        rs = []
        for q in range(2, 8):
            surv = q  # SR = q / 30
            for i in range(30):
                metrics = {m: 0 for m in METRIC_NAMES} | {"num_qubits": q, "num_gates": 5 * q + (q % 2)}
                rs.append(rec(q * 100 + i, "Survived" if i < surv else "KilledWOO", origin=f"c{q}", metrics=metrics))
        corr = complexity_correlations(rs)
        assert corr["num_qubits"] == pytest.approx(1.0, abs=1e-12)
        assert corr["depth"] is None  # zero variance
        assert set(corr) == set(METRIC_NAMES)

    def test_equal_sr_degenerate(self):
        rs = [rec(i, origin=f"c{i % 2}", metrics={m: i % 2 for m in METRIC_NAMES}) for i in range(4)]
        assert all(v is None for v in complexity_correlations(rs).values())

    def test_needs_two_circuits(self):
        with pytest.raises(ValueError):
            complexity_correlations([rec(0)])


class TestHeatmap:
    def test_nulls_for_missing(self):
        rs = [rec(0, operator="Add", gate="h"), rec(1, "KilledWOO", operator="Remove", gate="h")]
        data = heatmap_data(rs, "operator", "gate_type")
        assert data["row_labels"] == ["Add", "Remove", "Replace"]
        assert "Hadamard" in data["col_labels"]
        row = data["row_labels"].index("Replace")
        assert all(v is None for v in data["sr"][row])
        assert data["sr"][0][data["col_labels"].index("Hadamard")] == 1.0


class TestStore:
    def test_round_trip(self, tmp_path):
        path = tmp_path / "records.jsonl"
        shuffled = RECORDS[:200]
        random.Random(3).shuffle(shuffled)
        write_store(path, shuffled)
        back = read_store(path)
        assert back == sorted(RECORDS[:200], key=lambda r: r.id)
        lines = path.read_text().splitlines()
        assert lines == [dumps_record(r) for r in back]
