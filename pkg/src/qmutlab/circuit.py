"""Circuit intermediate representation."""
from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Optional

from .gates import lookup

ALGORITHM_GROUPS = (
    "ae", "dj", "ghz", "graphstate", "grover", "qaoa",
    "qft", "qgan", "qpe", "qwalk", "vqe", "wstate",
)


class OutputDominance(str, Enum):
    OUTPUT_DOMINANT = "OutputDominant"
    DIVERSE_OUTPUT = "DiverseOutput"

    @classmethod
    def parse(cls, text: str) -> "OutputDominance":
        key = text.strip().lower().replace("-", "").replace("_", "")
        aliases = {
            "outputdominant": cls.OUTPUT_DOMINANT, "dominant": cls.OUTPUT_DOMINANT,
            "diverseoutput": cls.DIVERSE_OUTPUT, "diverse": cls.DIVERSE_OUTPUT,
        }
        try:
            return aliases[key]
        except KeyError:
            raise ValueError(f"unknown output dominance: {text!r}") from None


@dataclass(frozen=True)
class ProgramMeta:
    algorithm: str
    algorithm_group: str
    output_dominance: OutputDominance

    def __post_init__(self):
        if self.algorithm_group not in ALGORITHM_GROUPS:
            raise ValueError(f"unknown algorithm group: {self.algorithm_group!r}")
        if not isinstance(self.output_dominance, OutputDominance):
            object.__setattr__(self, "output_dominance", OutputDominance.parse(self.output_dominance))


class CircuitError(ValueError):
    pass


@dataclass(frozen=True)
class GateApplication:
    gate: str
    operands: tuple[int, ...]
    params: tuple[float, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "operands", tuple(int(q) for q in self.operands))
        object.__setattr__(self, "params", tuple(float(p) for p in self.params))
        entry = lookup(self.gate)
        if len(self.operands) != entry.arity:
            raise CircuitError(f"{self.gate} expects {entry.arity} operand(s), got {len(self.operands)}")
        if len(self.params) != entry.param_count:
            raise CircuitError(f"{self.gate} expects {entry.param_count} parameter(s), got {len(self.params)}")
        if len(set(self.operands)) != len(self.operands):
            raise CircuitError(f"duplicate operand in {self.gate}{list(self.operands)}")


@dataclass(frozen=True)
class Circuit:
    """Gate list plus end-of-circuit measurement map.

    Position ``i`` is ``gates[i]``; measurements do not occupy positions.
    ``metadata`` does not take part in equality.
    """

    name: str
    num_qubits: int
    num_clbits: int
    gates: tuple[GateApplication, ...] = ()
    measurements: tuple[tuple[int, int], ...] = ()
    metadata: Optional[ProgramMeta] = field(default=None, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "gates", tuple(self.gates))
        object.__setattr__(self, "measurements", tuple((int(q), int(c)) for q, c in self.measurements))
        if self.num_qubits < 0 or self.num_clbits < 0:
            raise CircuitError("register sizes must be nonnegative")
        for pos, g in enumerate(self.gates):
            for q in g.operands:
                if not 0 <= q < self.num_qubits:
                    raise CircuitError(f"gate {g.gate} at position {pos}: qubit {q} out of range")
        for q, c in self.measurements:
            if not 0 <= q < self.num_qubits:
                raise CircuitError(f"measurement qubit {q} out of range")
            if not 0 <= c < self.num_clbits:
                raise CircuitError(f"measurement clbit {c} out of range")

    def __len__(self) -> int:
        return len(self.gates)

    def with_gates(self, gates) -> "Circuit":
        return Circuit(self.name, self.num_qubits, self.num_clbits, tuple(gates),
                       self.measurements, self.metadata)

    def with_metadata(self, meta: Optional[ProgramMeta]) -> "Circuit":
        return Circuit(self.name, self.num_qubits, self.num_clbits, self.gates,
                       self.measurements, meta)


def relative_position_bucket(position: int, total_positions: int) -> int:
    """Decile bucket (10..100) of a gate position: ceil(10*(p+1)/n)*10."""
    if total_positions < 1:
        raise ValueError("total_positions must be >= 1")
    if not 0 <= position < total_positions:
        raise ValueError(f"position {position} out of range for {total_positions} positions")
    return -(-10 * (position + 1) // total_positions) * 10
