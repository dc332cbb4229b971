"""Circuit and gate complexity metrics."""
from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np

from .circuit import Circuit
from .simulator import DEFAULT_MAX_QUBITS, run_statevector

METRIC_NAMES = (
    "num_qubits", "num_gates", "num_measurements", "depth",
    "num_single_gates", "num_multi_gates", "num_entangled_qubits",
)

PURITY_TOLERANCE = 1e-9


@dataclass(frozen=True)
class CircuitMetrics:
    num_qubits: int
    num_gates: int
    num_measurements: int
    depth: int
    num_single_gates: int
    num_multi_gates: int
    num_entangled_qubits: int
    # True when the entangled-qubit count is the structural (union-find) estimate.
    entanglement_estimated: bool = False

    def as_dict(self) -> dict:
        return asdict(self)

    def values(self) -> dict[str, int]:
        return {k: getattr(self, k) for k in METRIC_NAMES}


def circuit_depth(c: Circuit) -> int:
    level = [0] * c.num_qubits
    depth = 0
    for g in c.gates:
        d = 1 + max(level[q] for q in g.operands)
        for q in g.operands:
            level[q] = d
        depth = max(depth, d)
    return depth


def qubit_purities(amplitudes: np.ndarray, num_qubits: int) -> list[float]:
    """Purity tr(rho^2) of each single-qubit reduced state."""
    t = amplitudes.reshape((2,) * num_qubits)
    out = []
    for q in range(num_qubits):
        m = np.moveaxis(t, num_qubits - 1 - q, 0).reshape(2, -1)
        rho = m @ m.conj().T
        out.append(float(np.real(np.trace(rho @ rho))))
    return out


def semantic_entangled_qubits(c: Circuit, max_qubits: int = DEFAULT_MAX_QUBITS) -> int:
    state = run_statevector(c, max_qubits)
    return sum(p < 1 - PURITY_TOLERANCE for p in qubit_purities(state.amplitudes, c.num_qubits))


def structural_entangled_qubits(c: Circuit) -> int:
    parent = list(range(c.num_qubits))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for g in c.gates:
        if len(g.operands) > 1:
            root = find(g.operands[0])
            for q in g.operands[1:]:
                parent[find(q)] = root
    sizes: dict[int, int] = {}
    for q in range(c.num_qubits):
        r = find(q)
        sizes[r] = sizes.get(r, 0) + 1
    return sum(s for s in sizes.values() if s >= 2)


def compute_metrics(c: Circuit, sim_budget: int = DEFAULT_MAX_QUBITS) -> CircuitMetrics:
    n_multi = sum(1 for g in c.gates if len(g.operands) > 1)
    if c.num_qubits <= sim_budget:
        eq, estimated = semantic_entangled_qubits(c, sim_budget), False
    else:
        eq, estimated = structural_entangled_qubits(c), True
    return CircuitMetrics(
        num_qubits=c.num_qubits,
        num_gates=len(c.gates),
        num_measurements=len(c.measurements),
        depth=circuit_depth(c),
        num_single_gates=len(c.gates) - n_multi,
        num_multi_gates=n_multi,
        num_entangled_qubits=eq,
        entanglement_estimated=estimated,
    )
