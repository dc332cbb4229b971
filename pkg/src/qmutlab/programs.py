"""Program metadata: algorithm, algorithm group and output dominance.

Circuit files are matched to metadata through a ``programs.json`` sidecar in
their directory, falling back to the defaults below keyed by the algorithm
prefix of MQT Bench style file names (``<algorithm>_...qasm``).
"""
from __future__ import annotations

import json
from pathlib import Path
from typing import Optional

from .circuit import OutputDominance, ProgramMeta

SIDECAR_NAME = "programs.json"

_D = OutputDominance.OUTPUT_DOMINANT
_V = OutputDominance.DIVERSE_OUTPUT

# algorithm -> (algorithm group, output dominance)
DEFAULT_PROGRAMS: dict[str, tuple[str, OutputDominance]] = {
    "ae": ("ae", _D),
    "pricingcall": ("ae", _D),
    "pricingput": ("ae", _D),
    "dj": ("dj", _D),
    "ghz": ("ghz", _V),
    "graphstate": ("graphstate", _V),
    "grover-noancilla": ("grover", _D),
    "grover-v-chain": ("grover", _D),
    "portfolioqaoa": ("qaoa", _D),
    "qaoa": ("qaoa", _D),
    "qft": ("qft", _V),
    "qftentangled": ("qft", _V),
    "qgan": ("qgan", _V),
    "qpeexact": ("qpe", _D),
    "qpeinexact": ("qpe", _D),
    "qwalk-noancilla": ("qwalk", _V),
    "qwalk-v-chain": ("qwalk", _V),
    "groundstatelarge": ("vqe", _D),
    "groundstatemedium": ("vqe", _D),
    "groundstatesmall": ("vqe", _D),
    "portfoliovqe": ("vqe", _D),
    "realamprandom": ("vqe", _D),
    "routing": ("vqe", _D),
    "su2random": ("vqe", _D),
    "tsp": ("vqe", _D),
    "twolocalrandom": ("vqe", _D),
    "vqe": ("vqe", _D),
    "wstate": ("wstate", _V),
}


def algorithm_from_stem(stem: str) -> str:
    return stem.split("_", 1)[0]


def default_meta(stem: str) -> Optional[ProgramMeta]:
    alg = algorithm_from_stem(stem)
    if alg not in DEFAULT_PROGRAMS:
        return None
    group, dom = DEFAULT_PROGRAMS[alg]
    return ProgramMeta(alg, group, dom)


def load_sidecar(directory: Path) -> dict[str, ProgramMeta]:
    path = Path(directory) / SIDECAR_NAME
    if not path.exists():
        return {}
    raw = json.loads(path.read_text(encoding="utf-8"))
    return {
        stem: ProgramMeta(d["algorithm"], d["algorithm_group"], OutputDominance.parse(d["output_dominance"]))
        for stem, d in raw.items()
    }


def resolve_meta(path: Path, sidecar: Optional[dict[str, ProgramMeta]] = None) -> ProgramMeta:
    path = Path(path)
    if sidecar is None:
        sidecar = load_sidecar(path.parent)
    meta = sidecar.get(path.stem) or default_meta(path.stem)
    if meta is None:
        raise LookupError(f"{path.name}: no program metadata (add it to {SIDECAR_NAME})")
    return meta


def dump_sidecar(metas: dict[str, ProgramMeta]) -> str:
    raw = {
        stem: {"algorithm": m.algorithm, "algorithm_group": m.algorithm_group,
               "output_dominance": m.output_dominance.value}
        for stem, m in sorted(metas.items())
    }
    return json.dumps(raw, indent=2, sort_keys=True) + "\n"
