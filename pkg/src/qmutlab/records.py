"""Executed-mutant records and the JSONL record store."""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Optional

from .oracles import VerdictKind

IV_NAMES = (
    "operator", "gate", "gate_type", "gate_size", "position_bucket",
    "algorithm", "algorithm_group", "output_dominance",
)

MUTATION_IVS = ("operator", "gate", "gate_type", "gate_size", "position_bucket")


@dataclass(frozen=True)
class MutantRecord:
    id: str
    origin: str
    operator: str
    gate: str
    gate_type: str
    gate_size: str
    position: int
    position_bucket: int
    operands: tuple[int, ...]
    params: tuple[float, ...]
    verdict: VerdictKind
    algorithm: str
    algorithm_group: str
    output_dominance: str
    original_gate: Optional[str] = None
    p_value: Optional[float] = None
    reason: Optional[str] = None
    file: Optional[str] = None
    metrics: dict = field(default_factory=dict, compare=False, hash=False)

    @property
    def executed(self) -> bool:
        return self.verdict is not VerdictKind.STILLBORN

    @property
    def survived(self) -> bool:
        return self.verdict is VerdictKind.SURVIVED

    def iv(self, name: str):
        if name not in IV_NAMES:
            raise KeyError(f"unknown independent variable {name!r}")
        return getattr(self, name)

    def to_dict(self) -> dict:
        return {
            "id": self.id, "origin": self.origin, "operator": self.operator,
            "gate": self.gate, "gate_type": self.gate_type, "gate_size": self.gate_size,
            "position": self.position, "position_bucket": self.position_bucket,
            "operands": list(self.operands), "params": list(self.params),
            "original_gate": self.original_gate, "verdict": self.verdict.value,
            "p_value": self.p_value, "reason": self.reason,
            "algorithm": self.algorithm, "algorithm_group": self.algorithm_group,
            "output_dominance": self.output_dominance, "file": self.file,
            "metrics": dict(sorted(self.metrics.items())),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "MutantRecord":
        return cls(
            id=d["id"], origin=d["origin"], operator=d["operator"], gate=d["gate"],
            gate_type=d["gate_type"], gate_size=d["gate_size"], position=int(d["position"]),
            position_bucket=int(d["position_bucket"]), operands=tuple(d.get("operands", ())),
            params=tuple(d.get("params", ())), verdict=VerdictKind(d["verdict"]),
            algorithm=d["algorithm"], algorithm_group=d["algorithm_group"],
            output_dominance=d["output_dominance"], original_gate=d.get("original_gate"),
            p_value=d.get("p_value"), reason=d.get("reason"), file=d.get("file"),
            metrics=dict(d.get("metrics") or {}),
        )


def dumps_record(rec: MutantRecord) -> str:
    return json.dumps(rec.to_dict(), sort_keys=True, separators=(",", ":"))


def read_store(path: Path | str) -> list[MutantRecord]:
    out = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if line:
                out.append(MutantRecord.from_dict(json.loads(line)))
    return out


def write_store(path: Path | str, records: Iterable[MutantRecord]) -> None:
    """Write records sorted by id, one JSON object per line."""
    recs = sorted(records, key=lambda r: r.id)
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for r in recs:
            fh.write(dumps_record(r) + "\n")
