"""Desk-scale benchmark corpus modelled on MQT Bench algorithm families.

``python -m qmutlab.corpus DIR`` regenerates the shipped QASM files and
their ``programs.json`` sidecar.
"""
from __future__ import annotations

import argparse
import math
from importlib import resources
from pathlib import Path
from typing import Callable

import numpy as np

from .circuit import Circuit, GateApplication
from .programs import default_meta, dump_sidecar
from .qasm import serialize_qasm


class _Builder:
    def __init__(self, name: str, num_qubits: int):
        self.name, self.n = name, num_qubits
        self.gates: list[GateApplication] = []

    def __getattr__(self, gate: str):
        def add(*args):
            params = [a for a in args if isinstance(a, float)]
            qubits = [a for a in args if not isinstance(a, float)]
            self.gates.append(GateApplication(gate, tuple(qubits), tuple(params)))
            return self
        return add

    def build(self, measured=None) -> Circuit:
        measured = list(range(self.n)) if measured is None else list(measured)
        meas = [(q, i) for i, q in enumerate(measured)]
        return Circuit(self.name, self.n, len(measured), tuple(self.gates), tuple(meas),
                       default_meta(self.name))


def ghz(n: int) -> Circuit:
    b = _Builder(f"ghz_{n}", n)
    b.h(0)
    for i in range(n - 1):
        b.cx(i, i + 1)
    return b.build()


def graphstate(n: int) -> Circuit:
    b = _Builder(f"graphstate_{n}", n)
    for q in range(n):
        b.h(q)
    for q in range(n):
        b.cz(q, (q + 1) % n)
    return b.build()


def _qft(b: _Builder, qubits: list[int]) -> None:
    m = len(qubits)
    for j in reversed(range(m)):
        b.h(qubits[j])
        for k in reversed(range(j)):
            b.cp(math.pi / 2 ** (j - k), qubits[j], qubits[k])
    for i in range(m // 2):
        b.swap(qubits[i], qubits[m - 1 - i])


def _inverse_qft(b: _Builder, qubits: list[int]) -> None:
    m = len(qubits)
    for i in range(m // 2):
        b.swap(qubits[i], qubits[m - 1 - i])
    for j in range(m):
        for k in range(j):
            b.cp(-math.pi / 2 ** (j - k), qubits[j], qubits[k])
        b.h(qubits[j])


def qft(n: int) -> Circuit:
    b = _Builder(f"qft_{n}", n)
    _qft(b, list(range(n)))
    return b.build()


def qftentangled(n: int) -> Circuit:
    b = _Builder(f"qftentangled_{n}", n)
    b.h(n - 1)
    for i in reversed(range(n - 1)):
        b.cx(i + 1, i)
    _qft(b, list(range(n)))
    return b.build()


def wstate(n: int) -> Circuit:
    b = _Builder(f"wstate_{n}", n)
    b.x(0)
    for k in range(n - 1):
        theta = 2 * math.acos(math.sqrt(1 / (n - k)))
        # controlled-ry(theta) from k to k+1, then cx back
        b.ry(theta / 2, k + 1).cx(k, k + 1).ry(-theta / 2, k + 1).cx(k, k + 1)
        b.cx(k + 1, k)
    return b.build()


def qgan(n: int) -> Circuit:
    rng = np.random.default_rng(1700 + n)
    b = _Builder(f"qgan_{n}", n)
    for layer in range(3):
        for q in range(n):
            b.ry(float(rng.uniform(0, math.pi)), q)
        if layer < 2:
            for q in range(n - 1):
                b.cz(q, q + 1)
    return b.build()


def dj(n: int) -> Circuit:
    """Deutsch-Jozsa with a balanced oracle; qubit n-1 is the ancilla."""
    b = _Builder(f"dj_{n}", n)
    anc = n - 1
    flips = [q for q in range(anc) if q % 2 == 1]
    b.x(anc)
    for q in range(n):
        b.h(q)
    for q in flips:
        b.x(q)
    for q in range(anc):
        b.cx(q, anc)
    for q in flips:
        b.x(q)
    for q in range(anc):
        b.h(q)
    return b.build(range(anc))


def _ccz(b: _Builder, a: int, c: int, t: int) -> None:
    b.h(t).ccx(a, c, t).h(t)


def grover(n: int) -> Circuit:
    """Grover search without ancilla marking the all-ones state (n = 2 or 3)."""
    b = _Builder(f"grover-noancilla_{n}", n)
    qs = list(range(n))
    iterations = max(1, int(math.floor(math.pi / 4 * math.sqrt(2 ** n))))
    for q in qs:
        b.h(q)
    for _ in range(iterations):
        if n == 2:
            b.cz(0, 1)
        else:
            _ccz(b, 0, 1, 2)
        for q in qs:
            b.h(q).x(q)
        if n == 2:
            b.cz(0, 1)
        else:
            _ccz(b, 0, 1, 2)
        for q in qs:
            b.x(q).h(q)
    return b.build()


def _qpe(name: str, n: int, phase: float) -> Circuit:
    b = _Builder(name, n)
    m = n - 1
    eig = m
    b.x(eig)
    for q in range(m):
        b.h(q)
    for j in range(m):
        b.cp(2 * math.pi * phase * 2 ** j, j, eig)
    _inverse_qft(b, list(range(m)))
    return b.build(range(m))


def qpeexact(n: int) -> Circuit:
    m = n - 1
    k = (2 ** m) // 3 or 1
    return _qpe(f"qpeexact_{n}", n, k / 2 ** m)


def qpeinexact(n: int) -> Circuit:
    return _qpe(f"qpeinexact_{n}", n, 1 / 3 + 0.02)


def qaoa(n: int) -> Circuit:
    b = _Builder(f"qaoa_{n}", n)
    gamma, beta = 0.7, 0.35
    for q in range(n):
        b.h(q)
    for q in range(n - 1):
        b.rzz(2 * gamma, q, q + 1)
    b.rz(1.1, 0)
    for q in range(n):
        b.rx(2 * beta, q)
    return b.build()


def realamprandom(n: int, reps: int = 2) -> Circuit:
    rng = np.random.default_rng(2200 + n)
    b = _Builder(f"realamprandom_{n}", n)
    for layer in range(reps + 1):
        for q in range(n):
            b.ry(float(rng.uniform(0, 2 * math.pi)), q)
        if layer < reps:
            for q in range(n - 1):
                b.cx(q, q + 1)
    return b.build()


def su2random(n: int, reps: int = 1) -> Circuit:
    rng = np.random.default_rng(2400 + n)
    b = _Builder(f"su2random_{n}", n)
    for layer in range(reps + 1):
        for q in range(n):
            b.ry(float(rng.uniform(0, 2 * math.pi)), q)
            b.rz(float(rng.uniform(0, 2 * math.pi)), q)
        if layer < reps:
            for q in range(n - 1):
                b.cx(q, q + 1)
    return b.build()


CORPUS_RECIPE: list[tuple[Callable[[int], Circuit], tuple[int, ...]]] = [
    (ghz, (3, 4, 5, 6, 7, 8)),
    (graphstate, (3, 5)),
    (qft, (3, 4)),
    (qftentangled, (3, 4)),
    (wstate, (3, 4)),
    (qgan, (3, 4)),
    (dj, (3, 4, 6)),
    (grover, (2, 3)),
    (qpeexact, (3, 4)),
    (qpeinexact, (3, 4)),
    (qaoa, (3, 5)),
    (realamprandom, (3, 4)),
    (su2random, (3, 4)),
]


def desk_corpus() -> list[Circuit]:
    return [build(n) for build, sizes in CORPUS_RECIPE for n in sizes]


def shipped_corpus_dir() -> Path:
    return Path(str(resources.files("qmutlab") / "corpus"))


def write_corpus(directory: Path) -> list[Path]:
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    paths, metas = [], {}
    for c in desk_corpus():
        p = directory / f"{c.name}.qasm"
        p.write_text(serialize_qasm(c), encoding="utf-8", newline="\n")
        paths.append(p)
        metas[c.name] = c.metadata
    (directory / "programs.json").write_text(dump_sidecar(metas), encoding="utf-8", newline="\n")
    return paths


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(prog="python -m qmutlab.corpus", description=__doc__.splitlines()[0])
    ap.add_argument("directory", type=Path)
    args = ap.parse_args(argv)
    for p in write_corpus(args.directory):
        print(p)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
