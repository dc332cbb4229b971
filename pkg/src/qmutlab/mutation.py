"""First-order gate mutations: Add, Remove and Replace."""
from __future__ import annotations

import hashlib
import itertools
import json
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional

from .circuit import Circuit, CircuitError, GateApplication, relative_position_bucket
from .gates import MUTATABLE_GATES, CATALOG, GateType, SizeClass, lookup, mutatable_pool


class Operator(str, Enum):
    ADD = "Add"
    REMOVE = "Remove"
    REPLACE = "Replace"


class OperandStrategy(str, Enum):
    ANCHOR = "Anchor"
    EXHAUSTIVE = "Exhaustive"


class MutationError(ValueError):
    """A spec that cannot be applied to its circuit (the mutant is stillborn)."""


@dataclass(frozen=True)
class MutantSpec:
    origin: str
    operator: Operator
    position: int
    gate: str
    operands: tuple[int, ...]
    params: tuple[float, ...]
    position_bucket: int
    # Gate being replaced (Replace only).
    original_gate: Optional[str] = None

    @property
    def gate_type(self) -> GateType:
        return lookup(self.gate).gate_type

    @property
    def size_class(self) -> SizeClass:
        return lookup(self.gate).size_class

    @property
    def id(self) -> str:
        key = [self.origin, self.operator.value, self.gate, self.position,
               list(self.operands), [float(p) for p in self.params]]
        return hashlib.sha256(json.dumps(key, separators=(",", ":")).encode()).hexdigest()[:16]

    @property
    def filename(self) -> str:
        stem = f"{self.origin}__{self.operator.value}_{self.gate}_{self.position}"
        if self.operator is Operator.ADD:
            stem += "_" + "-".join(str(q) for q in self.operands)
        return stem + ".qasm"

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "origin": self.origin,
            "operator": self.operator.value,
            "position": self.position,
            "gate": self.gate,
            "operands": list(self.operands),
            "params": list(self.params),
            "original_gate": self.original_gate,
            "gate_type": self.gate_type.value,
            "gate_size": self.size_class.value,
            "position_bucket": self.position_bucket,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "MutantSpec":
        return cls(d["origin"], Operator(d["operator"]), int(d["position"]), d["gate"],
                   tuple(d["operands"]), tuple(d["params"]), int(d["position_bucket"]),
                   d.get("original_gate"))


@dataclass(frozen=True)
class EnumerationConfig:
    operand_strategy: OperandStrategy = OperandStrategy.ANCHOR
    default_angle: float = math.pi / 2
    max_mutants_per_circuit: Optional[int] = None
    operator_filter: Optional[frozenset] = None
    gate_filter: Optional[frozenset] = None
    # Relative-position deciles (10..100) to keep.
    position_filter: Optional[frozenset] = None

    def __post_init__(self):
        if not 0 < self.default_angle < 2 * math.pi:
            raise ValueError("default_angle must lie in (0, 2*pi)")
        if self.max_mutants_per_circuit is not None and self.max_mutants_per_circuit < 1:
            raise ValueError("max_mutants_per_circuit must be >= 1")
        object.__setattr__(self, "operand_strategy", OperandStrategy(self.operand_strategy))
        if self.operator_filter is not None:
            object.__setattr__(self, "operator_filter", frozenset(Operator(o) for o in self.operator_filter))
        if self.gate_filter is not None:
            unknown = set(self.gate_filter) - set(MUTATABLE_GATES)
            if unknown:
                raise ValueError(f"not mutatable gates: {sorted(unknown)}")
            object.__setattr__(self, "gate_filter", frozenset(self.gate_filter))
        if self.position_filter is not None:
            object.__setattr__(self, "position_filter", frozenset(int(b) for b in self.position_filter))


def _anchor_operands(anchor: tuple[int, ...], arity: int, num_qubits: int) -> tuple[int, ...]:
    ops = list(anchor[:arity])
    q = ops[-1]
    while len(ops) < arity:
        q = (q + 1) % num_qubits
        if q not in ops:
            ops.append(q)
    return tuple(ops)


def _params_for(gate: str, angle: float) -> tuple[float, ...]:
    return (angle,) * CATALOG[gate].param_count


def enumerate_add(c: Circuit, cfg: EnumerationConfig = EnumerationConfig()) -> list[MutantSpec]:
    n = len(c.gates)
    if n == 0:
        return []
    specs = []
    for pos in range(n + 1):
        ref = min(pos, n - 1)
        bucket = relative_position_bucket(ref, n)
        anchor = c.gates[ref].operands
        for gate in MUTATABLE_GATES:
            arity = CATALOG[gate].arity
            if arity > c.num_qubits:
                continue
            params = _params_for(gate, cfg.default_angle)
            if cfg.operand_strategy is OperandStrategy.ANCHOR:
                tuples = [_anchor_operands(anchor, arity, c.num_qubits)]
            else:
                tuples = itertools.permutations(range(c.num_qubits), arity)
            for ops in tuples:
                specs.append(MutantSpec(c.name, Operator.ADD, pos, gate, tuple(ops), params, bucket))
    return specs


def enumerate_remove(c: Circuit) -> list[MutantSpec]:
    n = len(c.gates)
    return [
        MutantSpec(c.name, Operator.REMOVE, pos, g.gate, g.operands, g.params,
                   relative_position_bucket(pos, n))
        for pos, g in enumerate(c.gates) if CATALOG[g.gate].mutatable
    ]


def enumerate_replace(c: Circuit, cfg: EnumerationConfig = EnumerationConfig()) -> list[MutantSpec]:
    n = len(c.gates)
    specs = []
    for pos, g in enumerate(c.gates):
        if not CATALOG[g.gate].mutatable:
            continue
        bucket = relative_position_bucket(pos, n)
        for new in mutatable_pool(len(g.operands)):
            if new == g.gate:
                continue
            if CATALOG[new].param_count == 0:
                params: tuple[float, ...] = ()
            elif g.params:
                params = g.params
            else:
                params = _params_for(new, cfg.default_angle)
            specs.append(MutantSpec(c.name, Operator.REPLACE, pos, new, g.operands, params, bucket, g.gate))
    return specs


def _evenly_spaced(items: list, cap: int) -> list:
    if len(items) <= cap:
        return items
    return [items[(i * len(items)) // cap] for i in range(cap)]


def enumerate_mutants(c: Circuit, cfg: EnumerationConfig = EnumerationConfig()) -> list[MutantSpec]:
    """All specs for ``c`` after filters, in Add, Remove, Replace order.

    A per-circuit cap keeps an evenly spaced subsequence of that order.
    """
    ops = cfg.operator_filter
    specs: list[MutantSpec] = []
    if ops is None or Operator.ADD in ops:
        specs += enumerate_add(c, cfg)
    if ops is None or Operator.REMOVE in ops:
        specs += enumerate_remove(c)
    if ops is None or Operator.REPLACE in ops:
        specs += enumerate_replace(c, cfg)
    if cfg.gate_filter is not None:
        specs = [s for s in specs if s.gate in cfg.gate_filter]
    if cfg.position_filter is not None:
        specs = [s for s in specs if s.position_bucket in cfg.position_filter]
    if cfg.max_mutants_per_circuit is not None:
        specs = _evenly_spaced(specs, cfg.max_mutants_per_circuit)
    return specs


def apply_mutation(c: Circuit, m: MutantSpec) -> Circuit:
    gates = list(c.gates)
    n = len(gates)
    try:
        if m.operator is Operator.ADD:
            if not 0 <= m.position <= n:
                raise MutationError(f"add position {m.position} outside 0..{n}")
            gates.insert(m.position, GateApplication(m.gate, m.operands, m.params))
        else:
            if not 0 <= m.position < n:
                raise MutationError(f"position {m.position} outside 0..{n - 1}")
            current = gates[m.position]
            expected = m.gate if m.operator is Operator.REMOVE else m.original_gate
            if expected is not None and current.gate != expected:
                raise MutationError(f"position {m.position} holds {current.gate}, spec expects {expected}")
            if m.operator is Operator.REMOVE:
                del gates[m.position]
            else:
                if tuple(m.operands) != current.operands:
                    raise MutationError("replacement operands differ from the replaced gate")
                gates[m.position] = GateApplication(m.gate, m.operands, m.params)
        mutant = c.with_gates(gates)
    except (CircuitError, KeyError) as exc:
        raise MutationError(str(exc)) from None
    return Circuit(m.filename[:-5], mutant.num_qubits, mutant.num_clbits, mutant.gates,
                   mutant.measurements, c.metadata)
