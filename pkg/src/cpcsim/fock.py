"""Sparse multimode Fock states.

A state is an immutable map from occupation tuples to complex amplitudes.
Tuples are aligned with an ordered registry of mode names carried by the
state; modes absent from a pattern or a serialized vector mean occupation 0.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Iterable, Mapping, Sequence

import numpy as np
from scipy.stats import poisson

from .errors import EmptyProjection, InvalidArgument, TruncationError

PRUNE_THRESHOLD = 1e-15
DEFAULT_TAIL_TOLERANCE = 1e-12

Occupation = tuple[int, ...]


@dataclass(frozen=True)
class ModeId:
    """A named bosonic mode. The frequency is bookkeeping only."""

    name: str
    angular_frequency: float | None = None


class ModeRegistry:
    """Ordered collection of uniquely named modes."""

    def __init__(self, modes: Iterable[ModeId | str] = ()):
        self._modes: dict[str, ModeId] = {}
        for m in modes:
            self.add(m)

    def add(self, mode: ModeId | str) -> ModeId:
        if isinstance(mode, str):
            mode = ModeId(mode)
        if mode.name in self._modes:
            raise InvalidArgument(f"duplicate mode name {mode.name!r}")
        self._modes[mode.name] = mode
        return mode

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(self._modes)

    def __contains__(self, name) -> bool:
        return name in self._modes

    def __getitem__(self, name: str) -> ModeId:
        return self._modes[name]

    def __iter__(self):
        return iter(self._modes.values())

    def __len__(self) -> int:
        return len(self._modes)


@dataclass(frozen=True)
class TruncationPolicy:
    per_mode_cutoff: Mapping[str, int] = field(default_factory=dict)
    tail_tolerance: float = DEFAULT_TAIL_TOLERANCE

    def cutoff(self, mode: str) -> int | None:
        return self.per_mode_cutoff.get(mode)


class QuantumState:
    """Normalized sparse amplitude map with a retained-probability weight.

    ``norm_weight`` is the product of all projection probabilities applied so
    far; ``discarded_mass`` is the probability dropped by truncation when the
    state was built.
    """

    __slots__ = ("_modes", "_amps", "_index", "norm_weight", "discarded_mass")

    def __init__(
        self,
        modes: Sequence[str],
        amplitudes: Mapping[Occupation, complex],
        norm_weight: float = 1.0,
        discarded_mass: float = 0.0,
    ):
        modes = tuple(modes)
        if len(set(modes)) != len(modes):
            raise InvalidArgument(f"duplicate mode names in {modes}")
        amps = {}
        for occ, amp in amplitudes.items():
            occ = tuple(int(n) for n in occ)
            if len(occ) != len(modes):
                raise InvalidArgument(f"occupation {occ} does not match modes {modes}")
            if any(n < 0 for n in occ):
                raise InvalidArgument(f"negative occupation in {occ}")
            amp = complex(amp)
            if abs(amp) >= PRUNE_THRESHOLD:
                amps[occ] = amps.get(occ, 0j) + amp
        object.__setattr__(self, "_modes", modes)
        object.__setattr__(self, "_amps", MappingProxyType(amps))
        object.__setattr__(self, "_index", {m: i for i, m in enumerate(modes)})
        object.__setattr__(self, "norm_weight", float(norm_weight))
        object.__setattr__(self, "discarded_mass", float(discarded_mass))

    def __setattr__(self, name, value):
        raise AttributeError("QuantumState is immutable")

    # construction helpers -------------------------------------------------

    @classmethod
    def from_amplitudes(cls, modes, amplitudes, normalize=True, norm_weight=1.0):
        state = cls(modes, amplitudes, norm_weight=norm_weight)
        if normalize:
            nrm = state.norm()
            if nrm == 0:
                raise InvalidArgument("cannot normalize the zero vector")
            state = state._replace({k: v / nrm for k, v in state._amps.items()})
        return state

    def _replace(self, amplitudes, modes=None, norm_weight=None) -> QuantumState:
        return QuantumState(
            self._modes if modes is None else modes,
            amplitudes,
            self.norm_weight if norm_weight is None else norm_weight,
            self.discarded_mass,
        )

    # accessors -------------------------------------------------------------

    @property
    def modes(self) -> tuple[str, ...]:
        return self._modes

    @property
    def amplitudes(self) -> Mapping[Occupation, complex]:
        return self._amps

    def mode_index(self, mode: str) -> int:
        try:
            return self._index[mode]
        except KeyError:
            raise InvalidArgument(f"unknown mode {mode!r}; state has {self._modes}") from None

    def basis(self) -> list[Occupation]:
        """Support vectors in deterministic (reverse lexicographic) order."""
        return sorted(self._amps, reverse=True)

    def amplitude(self, occupations: Mapping[str, int] | Occupation) -> complex:
        return self._amps.get(self._as_tuple(occupations), 0j)

    def probability(self, occupations: Mapping[str, int] | Occupation) -> float:
        return abs(self.amplitude(occupations)) ** 2

    def norm(self) -> float:
        return math.sqrt(math.fsum(abs(a) ** 2 for a in self._amps.values()))

    def occupation_dict(self, occ: Occupation) -> dict[str, int]:
        return {m: n for m, n in zip(self._modes, occ) if n}

    def _as_tuple(self, occupations) -> Occupation:
        if isinstance(occupations, Mapping):
            unknown = set(occupations) - set(self._modes)
            if unknown:
                raise InvalidArgument(f"unknown modes {sorted(unknown)}")
            return tuple(int(occupations.get(m, 0)) for m in self._modes)
        occ = tuple(occupations)
        if len(occ) != len(self._modes):
            raise InvalidArgument(f"occupation {occ} does not match modes {self._modes}")
        return occ

    def with_modes(self, modes: Iterable[str]) -> QuantumState:
        """Extend the registry with vacuum modes (existing names are kept)."""
        extra = [m for m in modes if m not in self._index]
        if not extra:
            return self
        pad = (0,) * len(extra)
        return self._replace({k + pad: v for k, v in self._amps.items()}, modes=self._modes + tuple(extra))

    def reorder(self, modes: Sequence[str]) -> QuantumState:
        """Same state expressed over ``modes`` (a superset of occupied modes)."""
        modes = tuple(modes)
        state = self.with_modes(modes)
        dropped = [m for m in state.modes if m not in modes]
        for m in dropped:
            i = state.mode_index(m)
            if any(occ[i] for occ in state._amps):
                raise InvalidArgument(f"cannot drop occupied mode {m!r}")
        perm = [state.mode_index(m) for m in modes]
        return state._replace({tuple(k[i] for i in perm): v for k, v in state._amps.items()}, modes=modes)

    def vector(self, basis: Sequence[Occupation]) -> np.ndarray:
        return np.array([self._amps.get(tuple(b), 0j) for b in basis], dtype=complex)

    def __len__(self) -> int:
        return len(self._amps)

    def __repr__(self) -> str:
        terms = " + ".join(f"({a:.4g})|{''.join(map(str, k))}>" for k, a in list(self._amps.items())[:6])
        more = " + ..." if len(self._amps) > 6 else ""
        return f"QuantumState(modes={self._modes}, {terms}{more}, norm_weight={self.norm_weight:.6g})"

    # serialization ---------------------------------------------------------

    def to_dict(self) -> dict:
        return {
            "modes": list(self._modes),
            "norm_weight": self.norm_weight,
            "discarded_mass": self.discarded_mass,
            "amplitudes": [
                {"occupations": self.occupation_dict(occ), "re": amp.real, "im": amp.imag}
                for occ, amp in ((k, self._amps[k]) for k in self.basis())
            ],
        }

    @classmethod
    def from_dict(cls, doc: Mapping) -> QuantumState:
        modes = tuple(doc["modes"])
        amps = {}
        for entry in doc["amplitudes"]:
            occ = entry["occupations"]
            unknown = set(occ) - set(modes)
            if unknown:
                raise InvalidArgument(f"amplitude refers to undeclared modes {sorted(unknown)}")
            amps[tuple(int(occ.get(m, 0)) for m in modes)] = complex(entry["re"], entry["im"])
        return cls(modes, amps, doc.get("norm_weight", 1.0), doc.get("discarded_mass", 0.0))

    def to_json(self, **kwargs) -> str:
        return json.dumps(self.to_dict(), **kwargs)

    @classmethod
    def from_json(cls, text: str) -> QuantumState:
        return cls.from_dict(json.loads(text))


def make_fock(occupations: Mapping[str, int], modes: Sequence[str] | None = None) -> QuantumState:
    """Single Fock basis vector, e.g. ``make_fock({"a": 1, "b": 0, "c": 0})``."""
    for m, n in occupations.items():
        if int(n) != n or n < 0:
            raise InvalidArgument(f"occupation of {m!r} must be a nonnegative integer, got {n}")
    if modes is None:
        modes = tuple(occupations)
    else:
        modes = tuple(modes) + tuple(m for m in occupations if m not in modes)
    occ = tuple(int(occupations.get(m, 0)) for m in modes)
    return QuantumState(modes, {occ: 1.0})


def vacuum(modes: Sequence[str]) -> QuantumState:
    return QuantumState(tuple(modes), {(0,) * len(modes): 1.0})


def poisson_cutoff(mean: float, tail_tolerance: float = DEFAULT_TAIL_TOLERANCE) -> int:
    """Smallest n with P(N > n) <= tail_tolerance for N ~ Poisson(mean)."""
    if mean == 0:
        return 0
    n = int(mean)
    while poisson.sf(n, mean) > tail_tolerance:
        n += 1
    return n


def make_coherent(
    alpha: complex,
    mode: str,
    policy: TruncationPolicy | None = None,
    modes: Sequence[str] | None = None,
) -> QuantumState:
    """Truncated coherent state |alpha> in ``mode``; other listed modes are vacuum.

    Amplitudes are alpha^n / sqrt(n!) up to the cutoff, renormalized. The
    probability beyond the cutoff is recorded in ``discarded_mass``.
    """
    policy = policy or TruncationPolicy()
    mean = abs(alpha) ** 2
    cutoff = policy.cutoff(mode)
    if cutoff is None:
        cutoff = poisson_cutoff(mean, policy.tail_tolerance)
    elif cutoff < 0:
        raise InvalidArgument("cutoff must be nonnegative")
    else:
        tail = float(poisson.sf(cutoff, mean)) if mean > 0 else 0.0
        if tail > policy.tail_tolerance:
            raise TruncationError(
                f"cutoff {cutoff} on mode {mode!r} discards {tail:.3e} > tolerance {policy.tail_tolerance:.1e}"
            )
    modes = tuple(modes) if modes is not None else (mode,)
    if mode not in modes:
        modes = (mode,) + modes
    i = modes.index(mode)
    ns = np.arange(cutoff + 1)
    pmf = poisson.pmf(ns, mean) if mean > 0 else (ns == 0).astype(float)
    kept = math.fsum(pmf)
    phase = alpha / abs(alpha) if alpha != 0 else 1.0
    amps = {}
    for n, p in zip(ns, pmf):
        occ = [0] * len(modes)
        occ[i] = int(n)
        amps[tuple(occ)] = math.sqrt(p / kept) * phase**int(n)
    return QuantumState(modes, amps, discarded_mass=max(0.0, 1.0 - kept))


def _project(state: QuantumState, pattern: Mapping[str, int]) -> tuple[QuantumState, float]:
    idx = [(state.mode_index(m), int(n)) for m, n in pattern.items()]
    kept = {k: v for k, v in state.amplitudes.items() if all(k[i] == n for i, n in idx)}
    prob = math.fsum(abs(v) ** 2 for v in kept.values())
    if prob == 0.0:
        raise EmptyProjection(f"no support matches {dict(pattern)}")
    scale = 1.0 / math.sqrt(prob)
    return state._replace({k: v * scale for k, v in kept.items()}, norm_weight=state.norm_weight * prob), prob


def project(state: QuantumState, mode_pattern: Mapping[str, int]) -> QuantumState:
    """Keep only basis vectors matching ``mode_pattern`` and renormalize.

    The projection probability is folded into ``norm_weight``. Raises
    :class:`EmptyProjection` when nothing survives.
    """
    return _project(state, mode_pattern)[0]


def projection_probability(state: QuantumState, mode_pattern: Mapping[str, int]) -> float:
    idx = [(state.mode_index(m), int(n)) for m, n in mode_pattern.items()]
    return math.fsum(abs(v) ** 2 for k, v in state.amplitudes.items() if all(k[i] == n for i, n in idx))


def marginal_distribution(state: QuantumState, mode: str) -> dict[int, float]:
    i = state.mode_index(mode)
    out: dict[int, float] = {}
    for occ, amp in state.amplitudes.items():
        out[occ[i]] = out.get(occ[i], 0.0) + abs(amp) ** 2
    return dict(sorted(out.items()))


def total_number_distribution(state: QuantumState, modes: Iterable[str]) -> dict[int, float]:
    """Distribution of the summed photon number over ``modes``."""
    idx = [state.mode_index(m) for m in modes]
    out: dict[int, float] = {}
    for occ, amp in state.amplitudes.items():
        n = sum(occ[i] for i in idx)
        out[n] = out.get(n, 0.0) + abs(amp) ** 2
    return dict(sorted(out.items()))


def mean_number(state: QuantumState, mode: str) -> float:
    i = state.mode_index(mode)
    return math.fsum(occ[i] * abs(a) ** 2 for occ, a in state.amplitudes.items())


def _aligned(state: QuantumState, other: QuantumState) -> tuple[QuantumState, QuantumState]:
    modes = state.modes + tuple(m for m in other.modes if m not in state.modes)
    return state.with_modes(modes), other.reorder(modes)


def inner(reference: QuantumState, state: QuantumState) -> complex:
    """<reference|state>, aligning mode registries by name."""
    s, r = _aligned(state, reference)
    ra = r.amplitudes
    return complex(sum(ra[k].conjugate() * v for k, v in s.amplitudes.items() if k in ra))


def fidelity(state: QuantumState, reference: QuantumState) -> float:
    """|<reference|state>|^2 for a pure reference."""
    return min(1.0, abs(inner(reference, state)) ** 2)


def tensor(first: QuantumState, second: QuantumState) -> QuantumState:
    """Product state over the disjoint union of the two registries."""
    overlap = set(first.modes) & set(second.modes)
    if overlap:
        raise InvalidArgument(f"modes {sorted(overlap)} appear in both factors")
    amps = {k1 + k2: a1 * a2 for k1, a1 in first.amplitudes.items() for k2, a2 in second.amplitudes.items()}
    return QuantumState(
        first.modes + second.modes,
        amps,
        first.norm_weight * second.norm_weight,
        1.0 - (1.0 - first.discarded_mass) * (1.0 - second.discarded_mass),
    )
