import json

import pytest

from cpcsim.circuit_io import circuit_from_dict, circuit_to_dict, load_circuit_file, save_circuit_file
from cpcsim.circuits import (
    BeamSplitter,
    Circuit,
    CpcGate,
    Filter,
    Herald,
    PhaseShift,
    Relabel,
    build_entanglement_circuit,
    run,
)
from cpcsim.coupling import Coupling
from cpcsim.errors import CircuitFileError
from cpcsim.fock import make_fock

EVERY_KIND = Circuit(
    ("a", "b", "c", "d"),
    (
        CpcGate(Coupling.nondegenerate(phase=1j), 0.4),
        CpcGate(Coupling.degenerate("c", "d"), 0.3),
        CpcGate(Coupling.converter("a", "d"), 1.1),
        BeamSplitter("b", "c", 0.3),
        PhaseShift("b", -0.7),
        Filter({"d": 0}, "reject-on-occupation"),
        Herald("b", 1),
        Relabel({"a": "d", "d": "a"}),
    ),
)


def test_round_trip_every_element(tmp_path):
    path = tmp_path / "c.json"
    save_circuit_file(EVERY_KIND, path, "all kinds")
    back = load_circuit_file(path)
    assert back.modes == EVERY_KIND.modes
    assert len(back.elements) == len(EVERY_KIND.elements)
    for x, y in zip(back.elements, EVERY_KIND.elements):
        assert type(x) is type(y)
    a = run(back, make_fock({"a": 2, "b": 0, "c": 1, "d": 0}))
    b = run(EVERY_KIND, make_fock({"a": 2, "b": 0, "c": 1, "d": 0}))
    assert a.success_probability == pytest.approx(b.success_probability, abs=1e-14)
    for occ, amp in b.final_state.amplitudes.items():
        assert a.final_state.amplitude(occ) == pytest.approx(amp, abs=1e-14)


def test_shor9_round_trip():
    c = build_entanglement_circuit("shor9")
    back, _ = circuit_from_dict(json.loads(json.dumps(circuit_to_dict(c))))
    assert back.cpc_stage_count() == c.cpc_stage_count() == 16


def test_pi_angles_and_mode_frequencies():
    doc = {
        "modes": ["a", "b", {"name": "c", "angular_frequency": 2.6e15}],
        "elements": [{"kind": "cpc", "coupling": {"type": "nondegenerate", "a": "a", "b": "b", "c": "c"}, "theta": "0.5pi"}],
    }
    circuit, registry = circuit_from_dict(doc)
    res = run(circuit, make_fock({"a": 1}))
    assert res.final_state.probability({"b": 1, "c": 1}) == pytest.approx(1.0, abs=1e-15)
    assert registry["c"].angular_frequency == 2.6e15


@pytest.mark.parametrize(
    "doc,match",
    [
        ({"modes": ["a"], "elements": [{"kind": "laser"}]}, "element 0: unknown element kind"),
        ({"modes": ["a"], "elements": [{"kind": "herald", "mode": "a", "color": 1}]}, "unknown keys"),
        ({"modes": ["a", "b"], "elements": [{"kind": "beam_splitter", "mode1": "a", "mode2": "q"}]}, "undeclared mode 'q'"),
        ({"modes": ["a"], "elements": [], "extra": 1}, "unknown top-level keys"),
        ("nonsense", "circuit file must hold"),
    ],
)
def test_file_errors(doc, match):
    with pytest.raises(CircuitFileError, match=match):
        circuit_from_dict(doc)


def test_missing_file():
    with pytest.raises(FileNotFoundError):
        load_circuit_file("/nonexistent/circuit.json")


def test_bare_element_list_infers_modes():
    doc = [{"kind": "beam_splitter", "mode1": "x", "mode2": "y"}, {"kind": "herald", "mode": "z", "occupation": 0}]
    circuit, _ = circuit_from_dict(doc)
    assert circuit.modes == ("x", "y", "z")
