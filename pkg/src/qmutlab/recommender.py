"""Recommend mutants whose characteristic combinations hit a target survival rate."""
from __future__ import annotations

import itertools
import warnings
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

from .circuit import OutputDominance
from .records import MUTATION_IVS, MutantRecord

SCOPES = ("all", "algorithm", "algorithm_group", "output_dominance")
_GATE_FAMILY = {"gate", "gate_type", "gate_size"}


def characteristic_combinations() -> list[tuple[str, ...]]:
    """Single, pairwise and three-way mutation-characteristic groupings.

    Gate, gate type and gate size describe the same gate, so a combination
    holds at most one of them.
    """
    out = []
    for size in (1, 2, 3):
        for combo in itertools.combinations(MUTATION_IVS, size):
            if len(_GATE_FAMILY.intersection(combo)) <= 1:
                out.append(combo)
    return out


COMBINATIONS = characteristic_combinations()


@dataclass(frozen=True)
class Query:
    scope: str = "all"
    scope_value: Optional[str] = None
    filters: dict = field(default_factory=dict)
    target_sr: tuple[float, float] = (0.0, 1.0)
    max_results: int = 10

    def __post_init__(self):
        if self.scope not in SCOPES:
            raise ValueError(f"unknown scope {self.scope!r}")
        if self.scope != "all" and self.scope_value is None:
            raise ValueError(f"scope {self.scope!r} needs a value")
        if self.scope == "output_dominance":
            object.__setattr__(self, "scope_value", OutputDominance.parse(self.scope_value).value)
        lo, hi = self.target_sr
        if not 0.0 <= lo <= hi <= 1.0:
            raise ValueError("target_sr must satisfy 0 <= lo <= hi <= 1")
        if self.max_results < 1:
            raise ValueError("max_results must be >= 1")
        for name in self.filters:
            if name not in MUTATION_IVS:
                raise ValueError(f"cannot filter on {name!r}")
        object.__setattr__(self, "filters", {k: frozenset(v) for k, v in self.filters.items()})

    @property
    def midpoint(self) -> float:
        return (self.target_sr[0] + self.target_sr[1]) / 2

    def in_scope(self, r: MutantRecord) -> bool:
        return self.scope == "all" or getattr(r, self.scope) == self.scope_value

    def passes_filters(self, r: MutantRecord) -> bool:
        return all(getattr(r, k) in vals for k, vals in self.filters.items())


@dataclass(frozen=True)
class Recommendation:
    record: MutantRecord
    distance: float
    combination: tuple[str, ...]
    combination_values: tuple
    combination_sr: float


def score_records(store: Sequence[MutantRecord], q: Query) -> list[Recommendation]:
    """Qualifying records ranked by distance of their best combination SR to the target midpoint."""
    if not store:
        raise ValueError("empty record store")
    scoped = [r for r in store if r.executed and q.in_scope(r)]
    tables = []
    for combo in COMBINATIONS:
        tally: dict[tuple, list[int]] = {}
        for r in scoped:
            slot = tally.setdefault(tuple(getattr(r, g) for g in combo), [0, 0])
            slot[0] += r.survived
            slot[1] += 1
        tables.append((combo, {k: s / n for k, (s, n) in tally.items()}))
    lo, hi = q.target_sr
    mid = q.midpoint
    ranked = []
    for r in scoped:
        if not q.passes_filters(r):
            continue
        best = None
        for combo, srs in tables:
            values = tuple(getattr(r, g) for g in combo)
            sr = srs[values]
            if lo <= sr <= hi:
                d = abs(sr - mid)
                if best is None or d < best.distance:
                    best = Recommendation(r, d, combo, values, sr)
        if best is not None:
            ranked.append(best)
    ranked.sort(key=lambda rec: (rec.distance, rec.record.id))
    return ranked[: q.max_results]


def recommend(store: Sequence[MutantRecord], q: Query) -> list[MutantRecord]:
    recs = [rec.record for rec in score_records(store, q)]
    if not recs:
        warnings.warn("no mutants match the query and target survival rate", stacklevel=2)
    return recs


def set_survival_rate(records: Iterable[MutantRecord]) -> Optional[float]:
    recs = [r for r in records if r.executed]
    return sum(r.survived for r in recs) / len(recs) if recs else None
