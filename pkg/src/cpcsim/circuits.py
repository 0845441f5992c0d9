"""CPC circuit elements, sequential execution and circuit builders.

Beam splitters are symmetric with ``i`` on reflection:
a1+ -> t a1+ + i r a2+,  a2+ -> i r a1+ + t a2+,  t = sqrt(T), r = sqrt(1 - T).
With T = 1/2 this sends (|2,0> + |0,2>)/sqrt(2) to i|1,1>.

Polarization qubits use two modes per rail, ``<rail>H`` and ``<rail>V``;
H is logical 0.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping, Sequence, Union

import numpy as np

from .coupling import Coupling
from .errors import EmptyProjection, InvalidArgument
from .evolution import evolve
from .fock import QuantumState, _project

HALF_PI = math.pi / 2
# Degenerate coupling has matrix element sqrt(2) on |1,0> <-> |0,2>, so a full
# transfer needs a shorter interaction.
DEGENERATE_DOUBLING_THETA = math.pi / (2 * math.sqrt(2))


@dataclass(frozen=True)
class CpcGate:
    coupling: Coupling
    theta: float

    @property
    def modes(self):
        return self.coupling.modes


@dataclass(frozen=True)
class BeamSplitter:
    mode1: str
    mode2: str
    transmissivity: float = 0.5

    def __post_init__(self):
        if not 0.0 <= self.transmissivity <= 1.0:
            raise InvalidArgument(f"transmissivity must lie in [0, 1], got {self.transmissivity}")
        if self.mode1 == self.mode2:
            raise InvalidArgument("beam splitter needs two distinct modes")

    @property
    def modes(self):
        return (self.mode1, self.mode2)


@dataclass(frozen=True)
class PhaseShift:
    """Multiplies each basis vector by exp(i * phase * n_mode)."""

    mode: str
    phase: float

    @property
    def modes(self):
        return (self.mode,)


@dataclass(frozen=True)
class Filter:
    """Projective filter.

    ``keep-pattern`` keeps vectors matching ``mode_pattern`` exactly;
    ``reject-on-occupation`` discards any vector with photons in the listed modes.
    """

    mode_pattern: Mapping[str, int]
    policy: str = "keep-pattern"

    def __post_init__(self):
        if self.policy not in ("keep-pattern", "reject-on-occupation"):
            raise InvalidArgument(f"unknown filter policy {self.policy!r}")
        object.__setattr__(self, "mode_pattern", dict(self.mode_pattern))

    def __hash__(self):
        return hash((tuple(sorted(self.mode_pattern.items())), self.policy))

    @property
    def modes(self):
        return tuple(self.mode_pattern)

    def pattern(self) -> dict[str, int]:
        if self.policy == "reject-on-occupation":
            return {m: 0 for m in self.mode_pattern}
        return dict(self.mode_pattern)


@dataclass(frozen=True)
class Herald:
    mode: str
    occupation: int = 1

    @property
    def modes(self):
        return (self.mode,)


@dataclass(frozen=True)
class Relabel:
    """Moves the contents of each key mode into the value mode simultaneously.

    A target that is not also a source must be empty on the whole support;
    a source that is not also a target is left empty.
    """

    mapping: Mapping[str, str]

    def __post_init__(self):
        object.__setattr__(self, "mapping", dict(self.mapping))
        if len(set(self.mapping.values())) != len(self.mapping):
            raise InvalidArgument("relabel targets must be distinct")

    def __hash__(self):
        return hash(tuple(sorted(self.mapping.items())))

    @property
    def modes(self):
        return tuple(self.mapping) + tuple(self.mapping.values())


CircuitElement = Union[CpcGate, BeamSplitter, PhaseShift, Filter, Herald, Relabel]


@dataclass(frozen=True)
class Circuit:
    modes: tuple[str, ...]
    elements: tuple[CircuitElement, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "modes", tuple(self.modes))
        object.__setattr__(self, "elements", tuple(self.elements))
        if len(set(self.modes)) != len(self.modes):
            raise InvalidArgument("circuit declares duplicate modes")
        declared = set(self.modes)
        for i, el in enumerate(self.elements):
            missing = [m for m in el.modes if m not in declared]
            if missing:
                raise InvalidArgument(f"element {i} ({type(el).__name__}) uses undeclared modes {missing}")

    def cpc_stage_count(self) -> int:
        return sum(isinstance(el, CpcGate) for el in self.elements)

    def then(self, other: Circuit) -> Circuit:
        modes = self.modes + tuple(m for m in other.modes if m not in self.modes)
        return Circuit(modes, self.elements + other.elements)


@dataclass(frozen=True)
class CircuitRun:
    final_state: QuantumState | None
    success_probability: float
    event_log: tuple[dict, ...] = field(default_factory=tuple)

    @property
    def failed(self) -> bool:
        return self.final_state is None


def _beam_splitter_outputs(n1: int, n2: int, t: float, r: float) -> dict[tuple[int, int], complex]:
    ir = 1j * r
    out: dict[tuple[int, int], complex] = {}
    norm = 1.0 / math.sqrt(math.factorial(n1) * math.factorial(n2))
    for j in range(n1 + 1):
        c1 = math.comb(n1, j) * t**j * ir ** (n1 - j)
        for l in range(n2 + 1):
            c2 = math.comb(n2, l) * ir**l * t ** (n2 - l)
            p, q = j + l, n1 + n2 - j - l
            amp = norm * c1 * c2 * math.sqrt(math.factorial(p) * math.factorial(q))
            out[(p, q)] = out.get((p, q), 0j) + amp
    return out


def apply_beam_splitter(state: QuantumState, bs: BeamSplitter) -> QuantumState:
    state = state.with_modes(bs.modes)
    i, j = state.mode_index(bs.mode1), state.mode_index(bs.mode2)
    t, r = math.sqrt(bs.transmissivity), math.sqrt(1.0 - bs.transmissivity)
    cache: dict[tuple[int, int], dict] = {}
    out: dict = {}
    for occ, amp in state.amplitudes.items():
        key = (occ[i], occ[j])
        if key not in cache:
            cache[key] = _beam_splitter_outputs(*key, t, r)
        for (p, q), c in cache[key].items():
            new = list(occ)
            new[i], new[j] = p, q
            new = tuple(new)
            out[new] = out.get(new, 0j) + amp * c
    return state._replace(out)


def apply_phase_shift(state: QuantumState, ps: PhaseShift) -> QuantumState:
    state = state.with_modes(ps.modes)
    i = state.mode_index(ps.mode)
    return state._replace({k: v * np.exp(1j * ps.phase * k[i]) for k, v in state.amplitudes.items()})


def apply_relabel(state: QuantumState, rl: Relabel) -> QuantumState:
    state = state.with_modes(rl.modes)
    src = [state.mode_index(m) for m in rl.mapping]
    dst = [state.mode_index(m) for m in rl.mapping.values()]
    fresh = set(dst) - set(src)
    out = {}
    for occ, amp in state.amplitudes.items():
        for d in fresh:
            if occ[d]:
                raise InvalidArgument(f"relabel target {state.modes[d]!r} is occupied")
        new = list(occ)
        for s in src:
            new[s] = 0
        for s, d in zip(src, dst):
            new[d] = occ[s]
        out[tuple(new)] = amp
    return state._replace(out)


def apply_element(state: QuantumState, element: CircuitElement) -> tuple[QuantumState, float]:
    """Apply one element; returns the new state and the element's success probability."""
    if isinstance(element, CpcGate):
        return evolve(state, element.coupling, element.theta).state, 1.0
    if isinstance(element, BeamSplitter):
        return apply_beam_splitter(state, element), 1.0
    if isinstance(element, PhaseShift):
        return apply_phase_shift(state, element), 1.0
    if isinstance(element, Relabel):
        return apply_relabel(state, element), 1.0
    if isinstance(element, Filter):
        return _project(state.with_modes(element.modes), element.pattern())
    if isinstance(element, Herald):
        return _project(state.with_modes(element.modes), {element.mode: element.occupation})
    raise InvalidArgument(f"unknown circuit element {element!r}")


def run(circuit: Circuit, input_state: QuantumState) -> CircuitRun:
    """Apply the elements in order, folding post-selection into the success probability."""
    state = input_state.with_modes(circuit.modes)
    log = []
    for i, element in enumerate(circuit.elements):
        try:
            state, prob = apply_element(state, element)
        except EmptyProjection:
            log.append({"index": i, "element": type(element).__name__, "probability": 0.0, "outcome": "empty"})
            return CircuitRun(None, 0.0, tuple(log))
        log.append({"index": i, "element": type(element).__name__, "probability": prob, "outcome": "ok"})
    return CircuitRun(state, state.norm_weight, tuple(log))


# -- two-qubit gate ---------------------------------------------------------


def cz_circuit(theta: float = math.pi, encoding=(("q0", "q1"), ("r0", "r1")), ancilla: str = "anc") -> Circuit:
    (q0, q1), (r0, r1) = encoding
    modes = (q0, q1, r0, r1, ancilla)
    if len(set(modes)) != len(modes):
        raise InvalidArgument(f"encoding modes overlap: {modes}")
    return Circuit(modes, (CpcGate(Coupling.nondegenerate(ancilla, q1, r1), theta),))


def cz_gate_matrix(theta: float = math.pi, encoding=(("q0", "q1"), ("r0", "r1")), ancilla: str = "anc") -> np.ndarray:
    """Induced two-qubit operation in the basis |00>, |01>, |10>, |11>.

    The CPC coupling acts on (ancilla, logical-1 rail of qubit 1, logical-1
    rail of qubit 2); the ancilla starts and is read out in vacuum.
    """
    circuit = cz_circuit(theta, encoding, ancilla)
    (q0, q1), (r0, r1) = encoding
    rails = [(q0, q1), (r0, r1)]

    def basis_state(x, y):
        occ = {q0: 0, q1: 0, r0: 0, r1: 0, ancilla: 0}
        occ[rails[0][x]] = 1
        occ[rails[1][y]] = 1
        return occ

    labels = [(0, 0), (0, 1), (1, 0), (1, 1)]
    mat = np.zeros((4, 4), dtype=complex)
    for col, (x, y) in enumerate(labels):
        inp = QuantumState(circuit.modes, {tuple(basis_state(x, y)[m] for m in circuit.modes): 1.0})
        out = run(circuit, inp).final_state
        for row, (u, v) in enumerate(labels):
            mat[row, col] = out.amplitude(basis_state(u, v))
    return mat


def equal_up_to_global_phase(a: np.ndarray, b: np.ndarray) -> float:
    """Max entrywise error between ``a`` and ``b`` after the best global phase."""
    a, b = np.asarray(a, dtype=complex), np.asarray(b, dtype=complex)
    overlap = np.vdot(b, a)
    phase = overlap / abs(overlap) if abs(overlap) > 0 else 1.0
    return float(np.max(np.abs(a - phase * b)))


def entanglement_entropy(two_qubit_state: Sequence[complex]) -> float:
    """Von Neumann entropy (bits) of either qubit of a normalized 4-vector."""
    psi = np.asarray(two_qubit_state, dtype=complex).reshape(2, 2)
    s = np.linalg.svd(psi, compute_uv=False) ** 2
    s = s[s > 1e-300]
    return float(-np.sum(s * np.log2(s)))


# -- dual-rail helpers --------------------------------------------------------


def qubit_modes(rail: str) -> tuple[str, str]:
    return (f"{rail}H", f"{rail}V")


def dual_rail_state(rails: Sequence[str], amplitudes: Mapping[str, complex], extra_modes=()) -> QuantumState:
    """Multi-qubit dual-rail state from bitstring amplitudes, e.g. {"00": 1, "11": 1}."""
    modes = tuple(m for r in rails for m in qubit_modes(r)) + tuple(extra_modes)
    amps = {}
    for bits, amp in amplitudes.items():
        if len(bits) != len(rails):
            raise InvalidArgument(f"bitstring {bits!r} does not match {len(rails)} rails")
        occ = [0] * len(modes)
        for q, bit in enumerate(bits):
            occ[2 * q + int(bit)] = 1
        amps[tuple(occ)] = amp
    return QuantumState.from_amplitudes(modes, amps)


def polarization_qubit(alpha: complex, beta: complex, rail: str = "a") -> QuantumState:
    return dual_rail_state([rail], {"0": alpha, "1": beta})


# -- builders -----------------------------------------------------------------


def _doubler(src: str, out1: str, out2: str) -> CpcGate:
    return CpcGate(Coupling.nondegenerate(src, out1, out2), HALF_PI)


def _method1(depth: int) -> Circuit:
    modes = ["a"]
    elements = []
    level = [""]
    for _ in range(depth):
        nxt = []
        for p in level:
            a, b, c = f"a{p}", f"b{p}", f"c{p}"
            a0, a1 = f"a{p}0", f"a{p}1"
            modes += [b, c, a0, a1]
            elements += [
                _doubler(a, b, c),
                CpcGate(Coupling.converter(b, a0), HALF_PI),
                CpcGate(Coupling.converter(c, a1), HALF_PI),
            ]
            nxt += [p + "0", p + "1"]
        level = nxt
    outs = [f"out{i}" for i in range(len(level))]
    modes += outs
    elements.append(Relabel({f"a{p}": o for p, o in zip(level, outs)}))
    return Circuit(tuple(modes), tuple(elements))


def _method2(depth: int) -> Circuit:
    modes = ["a"]
    elements = []
    level = [("a", "")]
    for d in range(depth):
        nxt = []
        freq = "b" if d % 2 == 0 else "a"
        for mode, p in level:
            aux, y0, y1 = f"{mode}x", f"{freq}{p}0", f"{freq}{p}1"
            modes += [aux, y0, y1]
            elements += [
                BeamSplitter(mode, aux, 0.5),
                CpcGate(Coupling.degenerate(mode, y0), DEGENERATE_DOUBLING_THETA),
                # pump phase -i on the second arm sets the relative phase the
                # output beam splitter needs to separate the pair
                CpcGate(Coupling.degenerate(aux, y1, phase=-1j), DEGENERATE_DOUBLING_THETA),
                BeamSplitter(y0, y1, 0.5),
            ]
            nxt += [(y0, p + "0"), (y1, p + "1")]
        level = nxt
    outs = [f"out{i}" for i in range(len(level))]
    modes += outs
    elements.append(Relabel({m: o for (m, _), o in zip(level, outs)}))
    return Circuit(tuple(modes), tuple(elements))


def build_doubling_cascade(depth: int, method: int = 1) -> Circuit:
    """Deterministic cascade mapping one photon in mode ``a`` to 2**depth photons.

    Method 1: nondegenerate doubler at theta = pi/2 followed by two converters
    that return each photon to the input band; 3 CPC stages per doubling.
    Method 2: the input photon is split on a 50:50 beam splitter, each arm is
    doubled by a degenerate CPC stage and the pair is separated by a reverse
    Hong-Ou-Mandel beam splitter; bands alternate between levels.
    Output photons end in modes ``out0 .. out{2**depth - 1}``.
    """
    if depth < 1:
        raise InvalidArgument("depth must be at least 1")
    if method == 1:
        return _method1(depth)
    if method == 2:
        return _method2(depth)
    raise InvalidArgument(f"method must be 1 or 2, got {method}")


def _polarization_doubler(src: str, out1: str, out2: str) -> list[CircuitElement]:
    return [_doubler(s, o1, o2) for s, o1, o2 in zip(qubit_modes(src), qubit_modes(out1), qubit_modes(out2))]


def _copy_to_three(src: str, outs: Sequence[str], tmp: str) -> list[CircuitElement]:
    return _polarization_doubler(src, outs[0], tmp) + _polarization_doubler(tmp, outs[1], outs[2])


def _hadamard(rail: str) -> list[CircuitElement]:
    h, v = qubit_modes(rail)
    return [PhaseShift(v, -HALF_PI), BeamSplitter(h, v, 0.5), PhaseShift(v, -HALF_PI)]


def _preparation(rail: str, alpha: complex, beta: complex) -> list[CircuitElement]:
    """Waveplate taking |H> to alpha|H> + beta|V> (normalized)."""
    nrm = math.hypot(abs(alpha), abs(beta))
    alpha, beta = alpha / nrm, beta / nrm
    h, v = qubit_modes(rail)
    els: list[CircuitElement] = [BeamSplitter(h, v, abs(alpha) ** 2)]
    pa = np.angle(alpha) if abs(alpha) > 0 else 0.0
    pb = np.angle(beta) if abs(beta) > 0 else 0.0
    els += [PhaseShift(h, float(pa)), PhaseShift(v, float(pb - HALF_PI))]
    return els


ENTANGLEMENT_OUTPUTS = {
    "bell": ("b", "c"),
    "ghz": ("b", "d", "e"),
    "shor9": tuple(f"q{i}{j}" for i in range(3) for j in range(3)),
}


def build_entanglement_circuit(kind: str, input_amplitudes: tuple[complex, complex] | None = None) -> Circuit:
    """Polarization-entanglement circuits fed by one photon on rail ``a``.

    * ``bell``: both polarizations of ``a`` are doubled into rails b, c,
      giving alpha|HH> + beta|VV>.
    * ``ghz``: rail c of the bell circuit is doubled again into d, e.
    * ``shor9``: a -> three copies, Hadamard on each, each copied into three,
      giving alpha|+++> + beta|--->, with |+-> = (|000> +- |111>)/sqrt(2).

    If ``input_amplitudes`` is given, a waveplate stage is prepended and the
    circuit expects |H> on rail a.
    """
    els: list[CircuitElement] = []
    if input_amplitudes is not None:
        els += _preparation("a", *input_amplitudes)
    if kind == "bell":
        rails = ["a", "b", "c"]
        els += _polarization_doubler("a", "b", "c")
    elif kind == "ghz":
        rails = ["a", "b", "c", "d", "e"]
        els += _polarization_doubler("a", "b", "c") + _polarization_doubler("c", "d", "e")
    elif kind == "shor9":
        rails = ["a", "t", "p0", "p1", "p2"]
        els += _copy_to_three("a", ["p0", "p1", "p2"], "t")
        for i in range(3):
            els += _hadamard(f"p{i}")
        for i in range(3):
            rails += [f"t{i}", f"q{i}0", f"q{i}1", f"q{i}2"]
            els += _copy_to_three(f"p{i}", [f"q{i}0", f"q{i}1", f"q{i}2"], f"t{i}")
    else:
        raise InvalidArgument(f"unknown entanglement circuit {kind!r}")
    modes = tuple(m for r in rails for m in qubit_modes(r))
    return Circuit(modes, tuple(els))


def entanglement_target(kind: str, alpha: complex, beta: complex) -> QuantumState:
    """Ideal output of :func:`build_entanglement_circuit` over its output rails."""
    rails = ENTANGLEMENT_OUTPUTS[kind]
    if kind in ("bell", "ghz"):
        n = len(rails)
        return dual_rail_state(rails, {"0" * n: alpha, "1" * n: beta})
    plus = {"000": 1 / math.sqrt(2), "111": 1 / math.sqrt(2)}
    minus = {"000": 1 / math.sqrt(2), "111": -1 / math.sqrt(2)}
    amps: dict[str, complex] = {}
    for amp, block in ((alpha, plus), (beta, minus)):
        for b0, c0 in block.items():
            for b1, c1 in block.items():
                for b2, c2 in block.items():
                    key = b0 + b1 + b2
                    amps[key] = amps.get(key, 0) + amp * c0 * c1 * c2
    return dual_rail_state(rails, amps)
