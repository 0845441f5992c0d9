"""Pumped-CPC interaction shapes and their matrices on invariant subspaces.

All matrices are in units of the effective coupling rate, so evolution is
parameterized by the dimensionless angle theta = rate * time.

Conventions, with g the unit-modulus strength phase:

* nondegenerate (a, b, c):  H = g a b+ c+ + h.c.
* degenerate (a, b):        H = g a b+^2 + h.c.
* converter (a, c):         H = g a c+ + h.c.

The element raising the output modes is g * sqrt(...), its mirror is conj(g) * sqrt(...).
"""
from __future__ import annotations

import cmath
import enum
import math
from collections import deque
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import InconsistentBasis, InvalidArgument
from .fock import Occupation


class CouplingKind(str, enum.Enum):
    NONDEGENERATE = "nondegenerate"
    DEGENERATE = "degenerate"
    CONVERTER = "converter"


_ROLES = {
    CouplingKind.NONDEGENERATE: ("a", "b", "c"),
    CouplingKind.DEGENERATE: ("a", "b"),
    CouplingKind.CONVERTER: ("a", "c"),
}


@dataclass(frozen=True)
class Coupling:
    kind: CouplingKind
    modes: tuple[str, ...]
    strength_phase: complex = 1.0 + 0j

    def __post_init__(self):
        kind = CouplingKind(self.kind)
        object.__setattr__(self, "kind", kind)
        object.__setattr__(self, "modes", tuple(self.modes))
        object.__setattr__(self, "strength_phase", complex(self.strength_phase))
        if len(self.modes) != len(_ROLES[kind]):
            raise InvalidArgument(f"{kind.value} coupling needs modes {_ROLES[kind]}, got {self.modes}")
        if len(set(self.modes)) != len(self.modes):
            raise InvalidArgument(f"coupling mode roles must be distinct, got {self.modes}")
        if not math.isclose(abs(self.strength_phase), 1.0, abs_tol=1e-12):
            raise InvalidArgument(f"strength_phase must have unit modulus, got {self.strength_phase}")

    @classmethod
    def nondegenerate(cls, a="a", b="b", c="c", phase: complex = 1.0) -> Coupling:
        return cls(CouplingKind.NONDEGENERATE, (a, b, c), phase)

    @classmethod
    def degenerate(cls, a="a", b="b", phase: complex = 1.0) -> Coupling:
        return cls(CouplingKind.DEGENERATE, (a, b), phase)

    @classmethod
    def converter(cls, a="a", c="c", phase: complex = 1.0) -> Coupling:
        return cls(CouplingKind.CONVERTER, (a, c), phase)

    @property
    def roles(self) -> dict[str, str]:
        return dict(zip(_ROLES[self.kind], self.modes))

    def to_dict(self) -> dict:
        g = self.strength_phase
        return {"type": self.kind.value, **self.roles, "phase": [g.real, g.imag]}

    def local_neighbors(self, occ: Sequence[int]) -> list[tuple[tuple[int, ...], complex]]:
        """Neighbors of a role-occupation tuple with <neighbor|H|occ>."""
        g = self.strength_phase
        out = []
        if self.kind is CouplingKind.NONDEGENERATE:
            na, nb, nc = occ
            if na > 0:
                out.append(((na - 1, nb + 1, nc + 1), g * math.sqrt(na * (nb + 1) * (nc + 1))))
            if nb > 0 and nc > 0:
                out.append(((na + 1, nb - 1, nc - 1), g.conjugate() * math.sqrt((na + 1) * nb * nc)))
        elif self.kind is CouplingKind.DEGENERATE:
            na, nb = occ
            if na > 0:
                out.append(((na - 1, nb + 2), g * math.sqrt(na * (nb + 1) * (nb + 2))))
            if nb > 1:
                out.append(((na + 1, nb - 2), g.conjugate() * math.sqrt((na + 1) * nb * (nb - 1))))
        else:
            na, nc = occ
            if na > 0:
                out.append(((na - 1, nc + 1), g * math.sqrt(na * (nc + 1))))
            if nc > 0:
                out.append(((na + 1, nc - 1), g.conjugate() * math.sqrt((na + 1) * nc)))
        return out

    def neighbors(self, occ: Occupation, index: Sequence[int]) -> list[tuple[Occupation, complex]]:
        """Neighbors of a full occupation tuple; ``index`` locates the role modes."""
        local = tuple(occ[i] for i in index)
        out = []
        for new_local, elem in self.local_neighbors(local):
            new = list(occ)
            for i, n in zip(index, new_local):
                new[i] = n
            out.append((tuple(new), elem))
        return out


def role_index(coupling: Coupling, modes: Sequence[str]) -> tuple[int, ...]:
    modes = tuple(modes)
    missing = [m for m in coupling.modes if m not in modes]
    if missing:
        raise InvalidArgument(f"coupling modes {missing} not in registry {modes}")
    return tuple(modes.index(m) for m in coupling.modes)


def basis_sort_key(index: Sequence[int]):
    """Decreasing occupation of the first role mode, then reverse lexicographic."""

    def key(occ):
        return (-occ[index[0]], tuple(-n for n in occ))

    return key


def reachable_basis(
    seed_support: Iterable[Occupation], coupling: Coupling, modes: Sequence[str]
) -> list[Occupation]:
    """Closure of the seed vectors under repeated application of the coupling."""
    index = role_index(coupling, modes)
    seen = set()
    queue = deque()
    for occ in seed_support:
        occ = tuple(occ)
        if occ not in seen:
            seen.add(occ)
            queue.append(occ)
    while queue:
        occ = queue.popleft()
        for nxt, _ in coupling.neighbors(occ, index):
            if nxt not in seen:
                seen.add(nxt)
                queue.append(nxt)
    return sorted(seen, key=basis_sort_key(index))


def invariant_subspaces(
    support: Iterable[Occupation], coupling: Coupling, modes: Sequence[str]
) -> list[list[Occupation]]:
    """Partition the closure of ``support`` into connected invariant subspaces."""
    index = role_index(coupling, modes)
    assigned: set[Occupation] = set()
    blocks = []
    for occ in sorted(set(map(tuple, support)), key=basis_sort_key(index)):
        if occ in assigned:
            continue
        block = reachable_basis([occ], coupling, modes)
        assigned.update(block)
        blocks.append(block)
    return blocks


@dataclass(frozen=True)
class CouplingMatrix:
    modes: tuple[str, ...]
    basis: tuple[Occupation, ...]
    entries: np.ndarray

    def to_dict(self) -> dict:
        return {
            "modes": list(self.modes),
            "basis": [list(b) for b in self.basis],
            "entries": [[[z.real, z.imag] for z in row] for row in self.entries.tolist()],
        }

    @classmethod
    def from_dict(cls, doc) -> CouplingMatrix:
        entries = np.array([[complex(re, im) for re, im in row] for row in doc["entries"]], dtype=complex)
        entries = entries.reshape(len(doc["basis"]), len(doc["basis"]))
        return cls(tuple(doc["modes"]), tuple(tuple(b) for b in doc["basis"]), entries)


def build_matrix(coupling: Coupling, basis: Sequence[Occupation], modes: Sequence[str]) -> CouplingMatrix:
    """Hermitian matrix of the coupling on a closed basis."""
    modes = tuple(modes)
    basis = tuple(tuple(b) for b in basis)
    pos = {b: i for i, b in enumerate(basis)}
    if len(pos) != len(basis):
        raise InconsistentBasis("basis contains duplicate vectors")
    index = role_index(coupling, modes)
    mat = np.zeros((len(basis), len(basis)), dtype=complex)
    for j, occ in enumerate(basis):
        for nxt, elem in coupling.neighbors(occ, index):
            i = pos.get(nxt)
            if i is None:
                raise InconsistentBasis(f"basis not closed: {occ} couples to {nxt}")
            mat[i, j] = elem
    return CouplingMatrix(modes, basis, mat)


def local_matrix(coupling: Coupling, local_basis: Sequence[tuple[int, ...]]) -> np.ndarray:
    """Matrix on role-occupation tuples only (spectator modes dropped)."""
    pos = {b: i for i, b in enumerate(local_basis)}
    mat = np.zeros((len(local_basis), len(local_basis)), dtype=complex)
    for j, occ in enumerate(local_basis):
        for nxt, elem in coupling.local_neighbors(occ):
            mat[pos[nxt], j] = elem
    return mat


def phase_from_angle(angle: float) -> complex:
    return cmath.exp(1j * angle)
