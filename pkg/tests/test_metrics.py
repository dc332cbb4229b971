from __future__ import annotations

import networkx as nx
import numpy as np
from hypothesis import given, settings, strategies as st

from qmutlab.circuit import Circuit, GateApplication
from qmutlab.corpus import desk_corpus
from qmutlab.metrics import (circuit_depth, compute_metrics, semantic_entangled_qubits,
                             structural_entangled_qubits)

from _support import bell, ghz, random_circuit


def dag_depth(c: Circuit) -> int:
    """Longest path (in gates) of the explicit gate-dependency DAG."""
    g = nx.DiGraph()
    g.add_nodes_from(range(len(c.gates)))
    last = {}
    for i, gate in enumerate(c.gates):
        for q in gate.operands:
            if q in last:
                g.add_edge(last[q], i)
            last[q] = i
    if not c.gates:
        return 0
    return nx.dag_longest_path_length(g) + 1


class TestMetrics:
    def test_ghz3(self):
        m = compute_metrics(ghz(3))
        assert (m.depth, m.num_single_gates, m.num_multi_gates, m.num_entangled_qubits) == (3, 1, 2, 3)
        assert (m.num_qubits, m.num_gates, m.num_measurements) == (3, 3, 3)
        assert m.entanglement_estimated is False

    def test_bell(self):
        assert compute_metrics(bell()).num_entangled_qubits == 2

    def test_parallel_layer(self):
        c = Circuit("c", 3, 0, tuple(GateApplication("h", (q,)) for q in range(3)))
        m = compute_metrics(c)
        assert (m.depth, m.num_entangled_qubits) == (1, 0)

    def test_structural_fallback(self):
        m = compute_metrics(ghz(5), sim_budget=4)
        assert m.entanglement_estimated is True
        assert m.num_entangled_qubits == 5

    def test_cx_on_basis_state_not_entangling(self):
        c = Circuit("c", 2, 0, (GateApplication("cx", (0, 1)),))
        assert semantic_entangled_qubits(c) == 0
        assert structural_entangled_qubits(c) == 2

    def test_structural_and_semantic_agree_on_ghz_and_empty(self):
        for n in range(2, 9):
            assert semantic_entangled_qubits(ghz(n)) == structural_entangled_qubits(ghz(n)) == n
            empty = Circuit("e", n, 0)
            assert semantic_entangled_qubits(empty) == structural_entangled_qubits(empty) == 0

    @settings(max_examples=80, deadline=None)
    @given(st.integers(1, 5), st.integers(0, 50), st.integers(0, 2**32 - 1))
    def test_depth_matches_dag_and_invariants(self, n, m, seed):
        c = random_circuit(np.random.default_rng(seed), n, m)
        met = compute_metrics(c)
        assert met.depth == dag_depth(c)
        assert met.num_single_gates + met.num_multi_gates == met.num_gates
        assert met.depth <= met.num_gates
        assert met.num_entangled_qubits <= met.num_qubits
        assert met.num_entangled_qubits != 1

    def test_corpus_depth(self):
        for c in desk_corpus():
            assert circuit_depth(c) == dag_depth(c)
