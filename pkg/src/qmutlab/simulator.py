"""Ideal state-vector simulation and seeded shot sampling.

Qubit ``q`` is bit ``q`` of the amplitude index (little endian), so in an
outcome key the highest clbit is the leftmost character and clbit 0 the
rightmost.

Sampling draws one multinomial sample from the measured-qubit marginal with
``numpy.random.default_rng(seed)`` (PCG64). Equal marginals and equal seeds
give equal counts.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping

import numpy as np

from .circuit import Circuit, GateApplication
from .gates import lookup

DEFAULT_MAX_QUBITS = 16


class SimulationError(ValueError):
    pass


class QubitBudgetError(SimulationError):
    pass


@dataclass(frozen=True)
class StateVector:
    amplitudes: np.ndarray
    num_qubits: int

    @classmethod
    def zero(cls, num_qubits: int) -> "StateVector":
        amps = np.zeros(1 << num_qubits, dtype=complex)
        amps[0] = 1.0
        return cls(amps, num_qubits)

    def norm(self) -> float:
        return float(np.vdot(self.amplitudes, self.amplitudes).real)

    def probabilities(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2


@dataclass(frozen=True)
class OutcomeDistribution:
    """Counts over classical bitstrings; zero-count keys are not stored."""

    counts: Mapping[str, int]
    shots: int
    width: int = field(default=-1)

    def __post_init__(self):
        counts = {k: int(v) for k, v in sorted(self.counts.items()) if int(v) != 0}
        if any(v < 0 for v in counts.values()):
            raise ValueError("negative count")
        if sum(counts.values()) != self.shots:
            raise ValueError(f"counts sum to {sum(counts.values())}, expected {self.shots} shots")
        widths = {len(k) for k in counts}
        width = self.width
        if width < 0:
            width = widths.pop() if len(widths) == 1 else (0 if not widths else -1)
        if width < 0 or any(len(k) != width for k in counts):
            raise ValueError("outcome keys of inconsistent length")
        object.__setattr__(self, "counts", counts)
        object.__setattr__(self, "width", width)

    @property
    def probabilities(self) -> dict[str, float]:
        return {k: v / self.shots for k, v in self.counts.items()}


def _apply_matrix(vec: np.ndarray, n: int, u: np.ndarray, operands: tuple[int, ...]) -> np.ndarray:
    k = len(operands)
    axes = [n - 1 - q for q in operands]
    t = np.tensordot(u.reshape((2,) * (2 * k)), vec.reshape((2,) * n),
                     axes=(list(range(k, 2 * k)), axes))
    return np.moveaxis(t, list(range(k)), axes).reshape(-1)


def _check_operands(n: int, g: GateApplication) -> None:
    for q in g.operands:
        if not 0 <= q < n:
            raise SimulationError(f"{g.gate}: qubit {q} out of range for {n} qubits")


def apply_gate(state: StateVector, g: GateApplication) -> StateVector:
    _check_operands(state.num_qubits, g)
    u = lookup(g.gate).unitary(g.params)
    return StateVector(_apply_matrix(state.amplitudes, state.num_qubits, u, g.operands), state.num_qubits)


def evolve(amplitudes: np.ndarray, num_qubits: int, gates: Iterable[GateApplication]) -> np.ndarray:
    """Apply ``gates`` in order to a raw amplitude vector."""
    vec = amplitudes
    for g in gates:
        _check_operands(num_qubits, g)
        vec = _apply_matrix(vec, num_qubits, lookup(g.gate).unitary(g.params), g.operands)
    return vec


def check_budget(c: Circuit, max_qubits: int = DEFAULT_MAX_QUBITS) -> None:
    if c.num_qubits > max_qubits:
        raise QubitBudgetError(f"{c.name}: {c.num_qubits} qubits exceeds simulation cap of {max_qubits}")


def run_statevector(c: Circuit, max_qubits: int = DEFAULT_MAX_QUBITS) -> StateVector:
    check_budget(c, max_qubits)
    return StateVector(evolve(StateVector.zero(c.num_qubits).amplitudes, c.num_qubits, c.gates), c.num_qubits)


def measured_marginal(c: Circuit, amplitudes: np.ndarray) -> tuple[list[int], np.ndarray]:
    """Distinct measured qubits (ascending) and their joint outcome probabilities.

    Index ``j`` of the returned vector has bit ``r`` set when the ``r``-th
    measured qubit reads 1.
    """
    if not c.measurements:
        raise SimulationError(f"{c.name}: circuit has no measurements")
    n = c.num_qubits
    qubits = sorted({q for q, _ in c.measurements})
    probs = (np.abs(amplitudes) ** 2).reshape((2,) * n)
    drop = tuple(n - 1 - q for q in range(n) if q not in qubits)
    marginal = probs.sum(axis=drop) if drop else probs
    return qubits, np.ascontiguousarray(marginal).reshape(-1)


def outcome_keys(c: Circuit, qubits: list[int], indices: Iterable[int]) -> list[str]:
    """Render marginal indices as clbit strings (clbit 0 rightmost)."""
    rank = {q: r for r, q in enumerate(qubits)}
    assign: dict[int, int] = {}
    for q, cb in c.measurements:
        assign[cb] = rank[q]
    keys = []
    for j in indices:
        bits = ["0"] * c.num_clbits
        for cb, r in assign.items():
            if (j >> r) & 1:
                bits[c.num_clbits - 1 - cb] = "1"
        keys.append("".join(bits))
    return keys


def exact_distribution(c: Circuit, amplitudes: np.ndarray) -> dict[str, float]:
    """Outcome probabilities of the measured marginal, zero entries dropped."""
    qubits, marginal = measured_marginal(c, amplitudes)
    nz = np.flatnonzero(marginal)
    out: dict[str, float] = {}
    for key, j in zip(outcome_keys(c, qubits, nz), nz):
        out[key] = out.get(key, 0.0) + float(marginal[j])
    return out


def sample_from_state(c: Circuit, amplitudes: np.ndarray, shots: int, seed: int) -> OutcomeDistribution:
    if shots < 1:
        raise ValueError("shots must be >= 1")
    qubits, marginal = measured_marginal(c, amplitudes)
    pvals = marginal / marginal.sum()
    drawn = np.random.default_rng(seed).multinomial(shots, pvals)
    nz = np.flatnonzero(drawn)
    counts: dict[str, int] = {}
    for key, j in zip(outcome_keys(c, qubits, nz), nz):
        counts[key] = counts.get(key, 0) + int(drawn[j])
    return OutcomeDistribution(counts, shots, c.num_clbits)


def sample_shots(c: Circuit, shots: int, seed: int, max_qubits: int = DEFAULT_MAX_QUBITS) -> OutcomeDistribution:
    if not c.measurements:
        raise SimulationError(f"{c.name}: circuit has no measurements")
    return sample_from_state(c, run_statevector(c, max_qubits).amplitudes, shots, seed)
