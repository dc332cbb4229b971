"""Campaign pipeline: load circuits, generate mutants, execute and judge, report."""
from __future__ import annotations

import configparser
import glob
import json
import logging
import math
import shutil
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Optional, Sequence

import numpy as np

from . import analytics
from .circuit import Circuit
from .metrics import compute_metrics
from .mutation import EnumerationConfig, MutantSpec, MutationError, Operator, apply_mutation, enumerate_mutants
from .oracles import OracleConfig, Verdict, VerdictKind, judge
from .programs import load_sidecar, resolve_meta
from .qasm import QasmError, parse_qasm, serialize_qasm
from .recommender import score_records, set_survival_rate
from .records import MutantRecord, dumps_record, read_store, write_store
from .simulator import DEFAULT_MAX_QUBITS, SimulationError, evolve, sample_from_state, StateVector

log = logging.getLogger(__name__)

DEFAULT_SHOTS = 100_000
DEFAULT_SEED = 2023
SPECS_FILE = "specs.jsonl"
STORE_FILE = "records.jsonl"
MUTANTS_DIR = "mutants"
PREFIX_CACHE_BYTES = 128 << 20

EXIT_OK, EXIT_PARTIAL, EXIT_USAGE = 0, 1, 2


class CampaignError(Exception):
    """Input or usage problem; maps to exit code 2."""


@dataclass(frozen=True)
class CampaignConfig:
    inputs: tuple[str, ...] = ()
    shots: int = DEFAULT_SHOTS
    seed: int = DEFAULT_SEED
    # "shared": every execution uses ``seed``; "per-mutant": seed XOR record id.
    seed_mode: str = "shared"
    enumeration: EnumerationConfig = field(default_factory=EnumerationConfig)
    oracle: OracleConfig = field(default_factory=OracleConfig)
    max_qubits: int = DEFAULT_MAX_QUBITS
    output_dir: str = "campaign-out"
    workers: int = 1

    def __post_init__(self):
        if self.shots < 1:
            raise ValueError("shots must be >= 1")
        if self.seed < 0:
            raise ValueError("seed must be nonnegative")
        if self.seed_mode not in ("shared", "per-mutant"):
            raise ValueError(f"unknown seed mode {self.seed_mode!r}")
        if self.workers < 1:
            raise ValueError("workers must be >= 1")

    @property
    def out(self) -> Path:
        return Path(self.output_dir)


def _split_list(text: str) -> list[str]:
    return [t.strip() for t in text.replace("\n", ",").split(",") if t.strip()]


def load_config(path: Optional[str | Path] = None, **overrides) -> CampaignConfig:
    """Read an INI ``[campaign]`` section and apply non-None keyword overrides."""
    values: dict = {}
    if path is not None:
        cp = configparser.ConfigParser()
        if not cp.read(path, encoding="utf-8"):
            raise CampaignError(f"cannot read config file {path}")
        values = dict(cp["campaign"]) if cp.has_section("campaign") else {}
    values.update({k: v for k, v in overrides.items() if v is not None})

    def get(key, conv, default=None):
        v = values.get(key)
        return default if v is None or v == "" else conv(v)

    def listing(v):
        return tuple(_split_list(v)) if isinstance(v, str) else tuple(v)

    try:
        enum = EnumerationConfig(
            operand_strategy=get("operand_strategy", str, "Anchor"),
            default_angle=get("default_angle", float, math.pi / 2),
            max_mutants_per_circuit=get("max_mutants_per_circuit", int),
            operator_filter=get("operators", listing),
            gate_filter=get("gates", listing),
            position_filter=get("positions", lambda v: tuple(int(x) for x in listing(v))),
        )
        oracle = OracleConfig(alpha=get("alpha", float, 0.01), opo_test=get("opo_test", str, "homogeneity"))
        return CampaignConfig(
            inputs=get("inputs", listing, ()),
            shots=get("shots", int, DEFAULT_SHOTS),
            seed=get("seed", int, DEFAULT_SEED),
            seed_mode=get("seed_mode", str, "shared"),
            enumeration=enum,
            oracle=oracle,
            max_qubits=get("max_qubits", int, DEFAULT_MAX_QUBITS),
            output_dir=get("output_dir", str, "campaign-out"),
            workers=get("workers", int, 1),
        )
    except ValueError as exc:
        raise CampaignError(f"invalid configuration: {exc}") from None


# --------------------------------------------------------------------- corpus

def discover_inputs(inputs: Sequence[str]) -> list[Path]:
    found: list[Path] = []
    for item in inputs:
        p = Path(item)
        if p.is_dir():
            found += sorted(p.glob("*.qasm"))
        elif any(ch in item for ch in "*?["):
            found += sorted(Path(m) for m in glob.glob(item) if m.endswith(".qasm"))
        elif p.exists():
            found.append(p)
        else:
            raise CampaignError(f"input path does not exist: {item}")
    seen, unique = set(), []
    for p in found:
        if p.resolve() not in seen:
            seen.add(p.resolve())
            unique.append(p)
    return unique


def load_circuits(inputs: Sequence[str]) -> tuple[list[Circuit], list[tuple[Path, str]]]:
    """Parse every input file; returns (circuits, [(path, error message)])."""
    circuits, errors = [], []
    sidecars: dict[Path, dict] = {}
    names: set[str] = set()
    for path in discover_inputs(inputs):
        try:
            side = sidecars.setdefault(path.parent, load_sidecar(path.parent))
            meta = resolve_meta(path, side)
            c = parse_qasm(path.read_text(encoding="utf-8"), name=path.stem, metadata=meta)
            if c.name in names:
                raise CampaignError(f"duplicate circuit name {c.name!r}")
            names.add(c.name)
            circuits.append(c)
        except (QasmError, LookupError, ValueError, CampaignError, OSError) as exc:
            errors.append((path, str(exc)))
    return circuits, errors


# ------------------------------------------------------------------- generate

@dataclass
class GenerateResult:
    specs: list[dict]
    counts: dict[str, int]
    errors: list[tuple[Path, str]]

    @property
    def exit_code(self) -> int:
        if not self.specs and self.errors:
            return EXIT_USAGE
        return EXIT_PARTIAL if self.errors else EXIT_OK


def generate(cfg: CampaignConfig) -> GenerateResult:
    circuits, errors = load_circuits(cfg.inputs)
    if not circuits and not errors:
        raise CampaignError("no circuits found in inputs")
    out = cfg.out
    rows: list[dict] = []
    counts = {op.value: 0 for op in Operator}
    for c in circuits:
        (out / MUTANTS_DIR / c.name).mkdir(parents=True, exist_ok=True)
        for spec in enumerate_mutants(c, cfg.enumeration):
            row = spec.to_dict()
            try:
                mutant = apply_mutation(c, spec)
            except MutationError as exc:
                row["file"] = None
                row["stillborn_reason"] = str(exc)
            else:
                rel = f"{MUTANTS_DIR}/{c.name}/{spec.filename}"
                (out / rel).write_text(serialize_qasm(mutant), encoding="utf-8", newline="\n")
                row["file"] = rel
            rows.append(row)
            counts[spec.operator.value] += 1
    out.mkdir(parents=True, exist_ok=True)
    with open(out / SPECS_FILE, "w", encoding="utf-8", newline="\n") as fh:
        for row in rows:
            fh.write(json.dumps(row, sort_keys=True, separators=(",", ":")) + "\n")
    return GenerateResult(rows, counts, errors)


def read_specs(path: Path) -> list[dict]:
    with open(path, encoding="utf-8") as fh:
        return [json.loads(line) for line in fh if line.strip()]


# ------------------------------------------------------------------------ run

class PrefixStates:
    """States of the original circuit before each position, checkpointed to a memory budget."""

    def __init__(self, c: Circuit, budget_bytes: int = PREFIX_CACHE_BYTES):
        self.c = c
        n = len(c.gates)
        state_bytes = 16 << c.num_qubits
        self.stride = max(1, math.ceil((n + 1) * state_bytes / budget_bytes))
        vec = StateVector.zero(c.num_qubits).amplitudes
        self.checkpoints = {0: vec}
        for pos in range(n):
            vec = evolve(vec, c.num_qubits, (c.gates[pos],))
            if (pos + 1) % self.stride == 0:
                self.checkpoints[pos + 1] = vec
        self.final = vec

    def before(self, position: int) -> np.ndarray:
        start = (position // self.stride) * self.stride
        return evolve(self.checkpoints[start], self.c.num_qubits, self.c.gates[start:position])


def execution_seed(cfg_seed: int, seed_mode: str, record_id: Optional[str]) -> int:
    if seed_mode == "shared" or record_id is None:
        return cfg_seed
    return cfg_seed ^ int(record_id, 16)


def _record(c: Circuit, spec: MutantSpec, row: dict, verdict: Verdict, metrics: dict) -> MutantRecord:
    meta = c.metadata
    return MutantRecord(
        id=spec.id, origin=spec.origin, operator=spec.operator.value, gate=spec.gate,
        gate_type=spec.gate_type.value, gate_size=spec.size_class.value,
        position=spec.position, position_bucket=spec.position_bucket,
        operands=spec.operands, params=spec.params, verdict=verdict.kind,
        algorithm=meta.algorithm, algorithm_group=meta.algorithm_group,
        output_dominance=meta.output_dominance.value, original_gate=spec.original_gate,
        p_value=verdict.p_value, reason=verdict.reason, file=row.get("file"), metrics=metrics,
    )


def execute_circuit(c: Circuit, rows: Sequence[dict], cfg: CampaignConfig) -> list[MutantRecord]:
    """Run the original once, then every mutant spec in ``rows``; judge each against the original."""
    cm = compute_metrics(c, cfg.max_qubits)
    metrics = {**cm.values(), "entanglement_estimated": cm.entanglement_estimated}
    specs = [MutantSpec.from_dict(r) for r in rows]
    if c.num_qubits > cfg.max_qubits or not c.measurements:
        why = "no measurements" if not c.measurements else f"{c.num_qubits} qubits exceeds cap {cfg.max_qubits}"
        return [_record(c, s, r, Verdict(VerdictKind.STILLBORN, reason=why), metrics) for s, r in zip(specs, rows)]
    prefix = PrefixStates(c)
    expected = sample_from_state(c, prefix.final, cfg.shots, cfg.seed)
    out = []
    for spec, row in zip(specs, rows):
        try:
            mutant = apply_mutation(c, spec)
            vec = evolve(prefix.before(spec.position), c.num_qubits, mutant.gates[spec.position:])
            observed = sample_from_state(mutant, vec, cfg.shots, execution_seed(cfg.seed, cfg.seed_mode, spec.id))
            verdict = judge(expected, observed, c.metadata, cfg.oracle)
        except (MutationError, SimulationError) as exc:
            verdict = Verdict(VerdictKind.STILLBORN, reason=str(exc))
        out.append(_record(c, spec, row, verdict, metrics))
    return out


def _execute_job(args) -> list[dict]:
    c, rows, cfg = args
    return [r.to_dict() for r in execute_circuit(c, rows, cfg)]


@dataclass
class RunResult:
    records: list[MutantRecord]
    executed: int
    skipped: int
    errors: list[tuple[Path, str]]

    @property
    def exit_code(self) -> int:
        return EXIT_PARTIAL if self.errors else EXIT_OK


def _chunks(rows: list[dict], size: int) -> Iterable[list[dict]]:
    for i in range(0, len(rows), size):
        yield rows[i:i + size]


def run(cfg: CampaignConfig) -> RunResult:
    out = cfg.out
    spec_path = out / SPECS_FILE
    if not spec_path.exists():
        raise CampaignError(f"no mutant specs at {spec_path}; run 'generate' first")
    rows = read_specs(spec_path)
    circuits, errors = load_circuits(cfg.inputs)
    by_name = {c.name: c for c in circuits}
    store_path = out / STORE_FILE
    existing = {r.id: r for r in read_store(store_path)} if store_path.exists() else {}
    pending: dict[str, list[dict]] = {}
    orphans: list[MutantRecord] = []
    for row in rows:
        if row["id"] in existing:
            continue
        if row["origin"] not in by_name:
            orphans.append(MutantRecord(
                id=row["id"], origin=row["origin"], operator=row["operator"], gate=row["gate"],
                gate_type=row["gate_type"], gate_size=row["gate_size"], position=row["position"],
                position_bucket=row["position_bucket"], operands=tuple(row["operands"]),
                params=tuple(row["params"]), verdict=VerdictKind.STILLBORN, algorithm="unknown",
                algorithm_group="unknown", output_dominance="unknown",
                original_gate=row.get("original_gate"), reason="origin circuit unavailable",
                file=row.get("file")))
            continue
        pending.setdefault(row["origin"], []).append(row)

    jobs = []
    chunk = max(1, math.ceil(sum(len(v) for v in pending.values()) / (4 * cfg.workers)))
    for name, group in pending.items():
        for part in (_chunks(group, chunk) if cfg.workers > 1 else [group]):
            jobs.append((by_name[name], part, cfg))

    new: list[MutantRecord] = list(orphans)
    with open(store_path, "a", encoding="utf-8", newline="\n") as fh:
        for r in orphans:
            fh.write(dumps_record(r) + "\n")
        if cfg.workers > 1:
            with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
                results = pool.map(_execute_job, jobs)
                for batch in results:
                    recs = [MutantRecord.from_dict(d) for d in batch]
                    _append(fh, recs)
                    new += recs
        else:
            for c, part, _ in jobs:
                recs = execute_circuit(c, part, cfg)
                _append(fh, recs)
                new += recs
    records = list(existing.values()) + new
    write_store(store_path, records)
    return RunResult(sorted(records, key=lambda r: r.id), len(new), len(existing), errors)


def _append(fh, recs: Sequence[MutantRecord]) -> None:
    for r in recs:
        fh.write(dumps_record(r) + "\n")
    fh.flush()


# -------------------------------------------------------------------- analyze

MAX_CLI_IVS = 3
INTERACTION_GROUPINGS = (
    ("operator", "gate", "position_bucket"),
    ("operator", "gate_type", "position_bucket"),
    ("operator", "gate_size", "position_bucket"),
)
DEFAULT_HEATMAPS = tuple(
    [("position_bucket", iv) for iv in ("operator", "gate", "gate_type", "gate_size")]
    + [("operator", iv) for iv in ("gate", "gate_type", "gate_size")]
    + [(alg, iv) for alg in ("algorithm", "algorithm_group", "output_dominance")
       for iv in ("operator", "gate", "gate_type", "gate_size", "position_bucket")]
)


def _slug(grouping: Sequence[str]) -> str:
    return "+".join(grouping) if grouping else "overall"


def summarize(records: Sequence[MutantRecord]) -> dict:
    executed = [r for r in records if r.executed]
    kinds = {k.value: sum(1 for r in records if r.verdict is k) for k in VerdictKind}
    n = len(executed)
    return {
        "mutants": len(records),
        "executed": n,
        "verdicts": kinds,
        "overall_sr": kinds["Survived"] / n if n else None,
        "woo_kill_rate": kinds["KilledWOO"] / n if n else None,
        "opo_kill_rate": kinds["KilledOPO"] / n if n else None,
    }


def analyze(store: Path, out_dir: Path, groupings: Optional[Sequence[Sequence[str]]] = None,
            top: Optional[int] = 5, correlations: bool = True,
            heatmaps: Optional[Sequence[tuple[str, str]]] = None) -> list[Path]:
    records = read_store(store)
    out_dir.mkdir(parents=True, exist_ok=True)
    written: list[Path] = []

    def write(name: str, text: str) -> None:
        p = out_dir / name
        p.write_text(text, encoding="utf-8", newline="")
        written.append(p)

    if groupings is None:
        groupings = [()] + [(iv,) for iv in analytics.IV_NAMES] + list(INTERACTION_GROUPINGS)
    for g in groupings:
        if len(g) > MAX_CLI_IVS:
            raise CampaignError(f"grouping {','.join(g)} has more than {MAX_CLI_IVS} variables")
        try:
            table = analytics.survival_rate(records, g)
        except KeyError as exc:
            raise CampaignError(str(exc.args[0])) from None
        write(f"sr_{_slug(g)}.csv", analytics.table_to_csv(table))
        if top and len(g) >= 2 and table.cells:
            ranked = analytics.rank_interactions(table, top)
            write(f"top{top}_{_slug(g)}.json", analytics.dumps_json({
                "grouping": list(g),
                "top": [{"rank": i + 1, "label": rc.label, "values": list(rc.values), "sr": rc.sr,
                         "survivors": rc.survivors, "total": rc.total} for i, rc in enumerate(ranked)],
            }))
    if correlations:
        try:
            corr = analytics.complexity_correlations(records)
        except ValueError as exc:
            log.warning("correlations skipped: %s", exc)
        else:
            lines = ["metric,pearson_r\r\n"]
            lines += [f"{k},{'' if v is None else f'{v:.6f}'}\r\n" for k, v in corr.items()]
            write("correlations.csv", "".join(lines))
    for row_iv, col_iv in (DEFAULT_HEATMAPS if heatmaps is None else heatmaps):
        write(f"heatmap_{row_iv}__{col_iv}.json",
              analytics.dumps_json(analytics.heatmap_data(records, row_iv, col_iv)))
    write("summary.json", analytics.dumps_json(summarize(records)))
    return written


# ------------------------------------------------------------------ recommend

def recommend_manifest(store: Path, query, copy_to: Optional[Path] = None,
                       mutants_root: Optional[Path] = None) -> dict:
    """Select mutants for ``query`` and describe them; optionally copy their QASM files."""
    records = read_store(store)
    if not records:
        raise CampaignError(f"record store {store} is empty")
    chosen = score_records(records, query)
    root = Path(mutants_root) if mutants_root is not None else Path(store).parent
    entries = []
    for rec in chosen:
        r = rec.record
        entry = {
            "id": r.id, "file": r.file, "origin": r.origin, "operator": r.operator,
            "gate": r.gate, "position": r.position, "position_bucket": r.position_bucket,
            "verdict": r.verdict.value, "combination": "+".join(rec.combination),
            "combination_values": list(rec.combination_values), "combination_sr": rec.combination_sr,
        }
        if copy_to is not None and r.file:
            src = root / r.file
            if src.exists():
                Path(copy_to).mkdir(parents=True, exist_ok=True)
                shutil.copyfile(src, Path(copy_to) / src.name)
                entry["copied_to"] = str(Path(copy_to) / src.name)
        entries.append(entry)
    manifest = {
        "query": {
            "scope": query.scope, "scope_value": query.scope_value,
            "filters": {k: sorted(v, key=str) for k, v in sorted(query.filters.items())},
            "target_sr": list(query.target_sr), "max_results": query.max_results,
        },
        "count": len(entries),
        "set_sr": set_survival_rate(rec.record for rec in chosen),
        "mutants": entries,
    }
    if not entries:
        manifest["warning"] = "no mutants match the query and target survival rate"
        warnings.warn(manifest["warning"], stacklevel=2)
    return manifest
