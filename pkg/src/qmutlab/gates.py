"""Gate catalog: the 19 mutatable gates plus the simulate-only ``cp``.

Unitaries use the textbook operand convention: the first operand is the most
significant bit of the matrix index (``cx`` = control, target).
"""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from math import cos, sin, sqrt
from typing import Callable, Sequence

import numpy as np


class GateType(str, Enum):
    CONTROLLED = "Controlled"
    HADAMARD = "Hadamard"
    PAULI = "Pauli"
    PHASE = "Phase"
    ROTATION = "Rotation"
    SWAP = "Swap"
    T = "T"


class SizeClass(str, Enum):
    SINGLE = "Single"
    MULTI = "Multi"


class UnknownGateError(KeyError):
    def __str__(self) -> str:
        return f"unknown gate: {self.args[0]!r}"


@dataclass(frozen=True)
class GateCatalogEntry:
    name: str
    arity: int
    param_count: int
    gate_type: GateType
    mutatable: bool
    _unitary: Callable[..., np.ndarray]

    @property
    def size_class(self) -> SizeClass:
        return SizeClass.SINGLE if self.arity == 1 else SizeClass.MULTI

    def unitary(self, params: Sequence[float] = ()) -> np.ndarray:
        if len(params) != self.param_count:
            raise ValueError(f"{self.name} takes {self.param_count} parameter(s), got {len(params)}")
        return self._unitary(*params)


_S2 = 1 / sqrt(2)


def _const(m) -> Callable[[], np.ndarray]:
    arr = np.array(m, dtype=complex)
    arr.setflags(write=False)
    return lambda: arr


def _p(lam: float) -> np.ndarray:
    return np.array([[1, 0], [0, np.exp(1j * lam)]], dtype=complex)


def _rx(theta: float) -> np.ndarray:
    c, s = cos(theta / 2), sin(theta / 2)
    return np.array([[c, -1j * s], [-1j * s, c]], dtype=complex)


def _ry(theta: float) -> np.ndarray:
    c, s = cos(theta / 2), sin(theta / 2)
    return np.array([[c, -s], [s, c]], dtype=complex)


def _rz(theta: float) -> np.ndarray:
    return np.diag([np.exp(-0.5j * theta), np.exp(0.5j * theta)])


def _rxx(theta: float) -> np.ndarray:
    c, s = cos(theta / 2), sin(theta / 2)
    xx = np.fliplr(np.eye(4))
    return c * np.eye(4, dtype=complex) - 1j * s * xx


def _rzz(theta: float) -> np.ndarray:
    a, b = np.exp(-0.5j * theta), np.exp(0.5j * theta)
    return np.diag([a, b, b, a])


def _cp(lam: float) -> np.ndarray:
    return np.diag([1, 1, 1, np.exp(1j * lam)]).astype(complex)


def _controlled(u: np.ndarray, n_controls: int) -> np.ndarray:
    dim = u.shape[0] << n_controls
    out = np.eye(dim, dtype=complex)
    out[dim - u.shape[0]:, dim - u.shape[0]:] = u
    return out


_X = [[0, 1], [1, 0]]
_SWAP = [[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]]

_C, _H, _PA, _PH, _R, _SW, _T = GateType

# Catalog order is the enumeration order used by the mutation engine.
_ENTRIES = [
    GateCatalogEntry("ccx", 3, 0, _C, True, _const(_controlled(np.array(_X), 2))),
    GateCatalogEntry("cswap", 3, 0, _C, True, _const(_controlled(np.array(_SWAP), 1))),
    GateCatalogEntry("cx", 2, 0, _C, True, _const(_controlled(np.array(_X), 1))),
    GateCatalogEntry("cz", 2, 0, _C, True, _const(np.diag([1, 1, 1, -1]))),
    GateCatalogEntry("h", 1, 0, _H, True, _const([[_S2, _S2], [_S2, -_S2]])),
    GateCatalogEntry("id", 1, 0, _PA, True, _const(np.eye(2))),
    GateCatalogEntry("p", 1, 1, _PH, True, _p),
    GateCatalogEntry("rx", 1, 1, _R, True, _rx),
    GateCatalogEntry("rxx", 2, 1, _R, True, _rxx),
    GateCatalogEntry("ry", 1, 1, _R, True, _ry),
    GateCatalogEntry("rz", 1, 1, _R, True, _rz),
    GateCatalogEntry("rzz", 2, 1, _R, True, _rzz),
    GateCatalogEntry("s", 1, 0, _PH, True, _const([[1, 0], [0, 1j]])),
    GateCatalogEntry("swap", 2, 0, _SW, True, _const(_SWAP)),
    GateCatalogEntry("sx", 1, 0, _PH, True, _const([[(1 + 1j) / 2, (1 - 1j) / 2], [(1 - 1j) / 2, (1 + 1j) / 2]])),
    GateCatalogEntry("t", 1, 0, _T, True, _const([[1, 0], [0, np.exp(0.25j * np.pi)]])),
    GateCatalogEntry("x", 1, 0, _PA, True, _const(_X)),
    GateCatalogEntry("y", 1, 0, _PA, True, _const([[0, -1j], [1j, 0]])),
    GateCatalogEntry("z", 1, 0, _PA, True, _const([[1, 0], [0, -1]])),
    GateCatalogEntry("cp", 2, 1, _C, False, _cp),
]

CATALOG: dict[str, GateCatalogEntry] = {e.name: e for e in _ENTRIES}
MUTATABLE_GATES: tuple[str, ...] = tuple(e.name for e in _ENTRIES if e.mutatable)


def lookup(name: str) -> GateCatalogEntry:
    try:
        return CATALOG[name]
    except KeyError:
        raise UnknownGateError(name) from None


def taxonomy_of(name: str) -> tuple[GateType, SizeClass]:
    entry = lookup(name)
    return entry.gate_type, entry.size_class


def mutatable_pool(arity: int) -> list[str]:
    """Mutatable gate names of the given arity, in catalog order."""
    return [g for g in MUTATABLE_GATES if CATALOG[g].arity == arity]
