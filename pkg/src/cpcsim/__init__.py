"""cpcsim: exact simulation of coherent photon conversion (CPC) in Fock space."""

__version__ = "0.1.0"

from ._kernels import BACKEND
from .calibration import ExperimentParams, estimate_kappa, power_for_theta, theta_at_power
from .circuits import (
    BeamSplitter,
    Circuit,
    CircuitRun,
    CpcGate,
    Filter,
    Herald,
    PhaseShift,
    Relabel,
    build_doubling_cascade,
    build_entanglement_circuit,
    cz_gate_matrix,
    run,
)
from .coupling import Coupling, CouplingKind, CouplingMatrix, build_matrix, reachable_basis
from .detectors import (
    CascadeSpec,
    DetectorModel,
    dark_click_probability,
    doubling_threshold,
    effective_efficiency,
    residual_efficiency,
    simulate_counts,
)
from .errors import (
    CircuitFileError,
    CPCError,
    EmptyProjection,
    InconsistentBasis,
    InvalidArgument,
    TruncationError,
)
from .evolution import EvolutionResult, evolve, population_trace, return_amplitude
from .fock import (
    ModeId,
    QuantumState,
    TruncationPolicy,
    fidelity,
    make_coherent,
    make_fock,
    marginal_distribution,
    project,
)
from .sources import DcReport, RevivalPeak, SourceReport, heralded_source, improved_dc, revival_scan
