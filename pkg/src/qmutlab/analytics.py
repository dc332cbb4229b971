"""Survival-rate tables, interaction rankings and complexity correlations."""
from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

from .gates import MUTATABLE_GATES, GateType, SizeClass
from .metrics import METRIC_NAMES
from .records import IV_NAMES, MutantRecord

# Value domains for heatmap axes; other IVs use the values present in the data.
IV_DOMAINS = {
    "operator": ("Add", "Remove", "Replace"),
    "gate": MUTATABLE_GATES,
    "gate_type": tuple(t.value for t in GateType),
    "gate_size": tuple(s.value for s in SizeClass),
    "position_bucket": tuple(range(10, 101, 10)),
}


class UndefinedCorrelationError(ValueError):
    pass


@dataclass(frozen=True)
class Cell:
    survivors: int
    total: int

    @property
    def sr(self) -> float:
        return self.survivors / self.total


@dataclass(frozen=True)
class SurvivalTable:
    grouping: tuple[str, ...]
    cells: dict

    def sr(self, *values) -> float:
        return self.cells[tuple(values)].sr


def _check_grouping(grouping: Sequence[str]) -> tuple[str, ...]:
    grouping = tuple(grouping)
    for name in grouping:
        if name not in IV_NAMES:
            raise KeyError(f"unknown independent variable {name!r}")
    if len(set(grouping)) != len(grouping):
        raise ValueError("grouping repeats an independent variable")
    return grouping


def survival_rate(records: Iterable[MutantRecord], grouping: Sequence[str]) -> SurvivalTable:
    """SR per combination of ``grouping`` values; stillborn mutants are excluded.

    An empty grouping yields the overall SR under the key ``()``.
    """
    grouping = _check_grouping(grouping)
    tally: dict[tuple, list[int]] = {}
    for r in records:
        if not r.executed:
            continue
        key = tuple(getattr(r, g) for g in grouping)
        slot = tally.setdefault(key, [0, 0])
        slot[0] += r.survived
        slot[1] += 1
    cells = {k: Cell(s, t) for k, (s, t) in sorted(tally.items(), key=lambda kv: _sort_key(kv[0]))}
    return SurvivalTable(grouping, cells)


def _sort_key(values: tuple) -> tuple:
    return tuple((0, v, "") if isinstance(v, (int, float)) else (1, 0, str(v)) for v in values)


def marginalize(t: SurvivalTable, keep: Sequence[str]) -> SurvivalTable:
    keep = _check_grouping(keep)
    idx = [t.grouping.index(k) for k in keep]
    tally: dict[tuple, list[int]] = {}
    for key, cell in t.cells.items():
        sub = tuple(key[i] for i in idx)
        slot = tally.setdefault(sub, [0, 0])
        slot[0] += cell.survivors
        slot[1] += cell.total
    cells = {k: Cell(s, n) for k, (s, n) in sorted(tally.items(), key=lambda kv: _sort_key(kv[0]))}
    return SurvivalTable(keep, cells)


@dataclass(frozen=True)
class RankedCell:
    values: tuple
    sr: float
    survivors: int
    total: int

    @property
    def label(self) -> str:
        return format_interaction(self.values, self.sr)


def rank_interactions(t: SurvivalTable, k: int) -> list[RankedCell]:
    """Top ``k`` cells by SR, then by mutant count, then by value tuple."""
    if k < 1:
        raise ValueError("k must be >= 1")
    ranked = sorted(t.cells.items(), key=lambda kv: (-kv[1].sr, -kv[1].total, _sort_key(kv[0])))
    return [RankedCell(key, c.sr, c.survivors, c.total) for key, c in ranked[:k]]


def format_interaction(values: Sequence, sr: float) -> str:
    """Render a cell as e.g. ``Add_id_80.0{1.0}``."""
    parts = [f"{float(v):.1f}" if isinstance(v, int) and not isinstance(v, bool) else str(v) for v in values]
    return "_".join(parts) + "{" + repr(round(sr, 2)) + "}"


def pearson(xs: Sequence[float], ys: Sequence[float]) -> float:
    if len(xs) != len(ys):
        raise ValueError("length mismatch")
    n = len(xs)
    if n < 2:
        raise ValueError("need at least two points")
    mx = math.fsum(xs) / n
    my = math.fsum(ys) / n
    dx = [x - mx for x in xs]
    dy = [y - my for y in ys]
    sxx = math.fsum(d * d for d in dx)
    syy = math.fsum(d * d for d in dy)
    if sxx == 0 or syy == 0:
        raise UndefinedCorrelationError("zero variance")
    r = math.fsum(a * b for a, b in zip(dx, dy)) / math.sqrt(sxx * syy)
    return max(-1.0, min(1.0, r))


def per_circuit_sr(records: Iterable[MutantRecord]) -> dict[str, tuple[float, dict]]:
    """Origin -> (SR, metrics snapshot) over executed mutants."""
    tally: dict[str, list] = {}
    for r in records:
        if not r.executed:
            continue
        slot = tally.setdefault(r.origin, [0, 0, r.metrics])
        slot[0] += r.survived
        slot[1] += 1
    return {o: (s / n, m) for o, (s, n, m) in sorted(tally.items())}


def complexity_correlations(records: Iterable[MutantRecord]) -> dict[str, Optional[float]]:
    """Pearson r between per-circuit SR and each complexity metric.

    A metric (or SR) with zero variance across circuits maps to ``None``.
    """
    per = per_circuit_sr(records)
    if len(per) < 2:
        raise ValueError("need records from at least two circuits")
    srs = [sr for sr, _ in per.values()]
    out: dict[str, Optional[float]] = {}
    for name in METRIC_NAMES:
        xs = [float(m[name]) for _, m in per.values()]
        try:
            out[name] = pearson(xs, srs)
        except UndefinedCorrelationError:
            out[name] = None
    return out


def table_to_csv(t: SurvivalTable) -> str:
    buf = io.StringIO()
    w = csv.writer(buf)
    w.writerow(list(t.grouping) + ["survivors", "total", "sr"])
    for key, c in t.cells.items():
        w.writerow(list(key) + [c.survivors, c.total, f"{c.sr:.6f}"])
    return buf.getvalue()


def heatmap_data(records: Iterable[MutantRecord], row_iv: str, col_iv: str) -> dict:
    """Grid of SR values; ``None`` marks combinations with no mutants."""
    t = survival_rate(records, [row_iv, col_iv])
    present = list(t.cells)

    def domain(name: str, i: int) -> list:
        if name in IV_DOMAINS:
            return list(IV_DOMAINS[name])
        return sorted({k[i] for k in present}, key=lambda v: _sort_key((v,)))

    rows, cols = domain(row_iv, 0), domain(col_iv, 1)
    grid, totals = [], []
    for rv in rows:
        grid.append([t.cells[(rv, cv)].sr if (rv, cv) in t.cells else None for cv in cols])
        totals.append([t.cells[(rv, cv)].total if (rv, cv) in t.cells else 0 for cv in cols])
    return {"rows": row_iv, "cols": col_iv, "row_labels": rows, "col_labels": cols,
            "sr": grid, "total": totals}


def dumps_json(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"
