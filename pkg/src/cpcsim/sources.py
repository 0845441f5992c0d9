"""Source protocols built on CPC: filtered heralded single photons, Fock-state
revival peaks and full-revival ("improved") down-conversion."""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from typing import Mapping, Sequence

import numpy as np
from scipy.optimize import minimize_scalar

from .coupling import Coupling
from .errors import EmptyProjection, InvalidArgument
from .evolution import evolve, return_probability
from .fock import (
    QuantumState,
    TruncationPolicy,
    _project,
    make_coherent,
    make_fock,
    marginal_distribution,
    total_number_distribution,
)

SOURCE_MODES = ("a", "b", "c")


@dataclass
class SourceReport:
    """Heralded-source summary.

    ``production_efficiency`` is the herald rate conditional on passing every
    dump-port filter; ``absolute_efficiency`` is the same event per input pulse.
    With the final doubler, ``output_distribution`` is the photon number left
    in the non-herald modes (a + c) given the herald; without it, the mode-a
    distribution after filtering.
    """

    production_efficiency: float
    output_distribution: dict[int, float]
    single_photon_fidelity: float
    higher_order_mass: float
    steps: int
    absolute_efficiency: float = 0.0
    filter_pass_probability: float = 0.0
    herald_probability: float = 0.0
    higher_order_mass_before_herald: float = 0.0
    step_distributions: list[dict[int, float]] = field(default_factory=list)
    efficiency_definition: str = "P(pass filters and herald) / P(pass filters)"

    def to_dict(self) -> dict:
        doc = asdict(self)
        doc["output_distribution"] = {str(k): v for k, v in self.output_distribution.items()}
        doc["step_distributions"] = [{str(k): v for k, v in d.items()} for d in self.step_distributions]
        return doc


def _higher_order(dist: Mapping[int, float]) -> float:
    return math.fsum(p for n, p in dist.items() if n >= 2)


def heralded_source(
    alpha: complex,
    n_steps: int = 5,
    theta_per_step: float | Sequence[float] = math.pi,
    with_final_doubler: bool = True,
    policy: TruncationPolicy | None = None,
) -> SourceReport:
    """Repeated [evolve; keep b = c = 0] filtering of a coherent input in mode a,
    optionally followed by a pi/2 doubler heralded on exactly one b photon."""
    if n_steps < 1:
        raise InvalidArgument("n_steps must be at least 1")
    thetas = [theta_per_step] * n_steps if np.isscalar(theta_per_step) else list(theta_per_step)
    if len(thetas) != n_steps:
        raise InvalidArgument(f"expected {n_steps} per-step angles, got {len(thetas)}")
    coupling = Coupling.nondegenerate(*SOURCE_MODES)
    state = make_coherent(alpha, "a", policy, modes=SOURCE_MODES)
    pass_prob = 1.0
    step_dists = []
    empty = SourceReport(0.0, {}, 0.0, 0.0, n_steps, step_distributions=step_dists)
    for theta in thetas:
        state = evolve(state, coupling, float(theta)).state
        try:
            state, p = _project(state, {"b": 0, "c": 0})
        except EmptyProjection:
            return empty
        pass_prob *= p
        step_dists.append(marginal_distribution(state, "a"))
    filtered = step_dists[-1]
    before = _higher_order(filtered)
    if not with_final_doubler:
        p1 = filtered.get(1, 0.0)
        return SourceReport(
            production_efficiency=p1,
            output_distribution=filtered,
            single_photon_fidelity=p1,
            higher_order_mass=before,
            steps=n_steps,
            absolute_efficiency=p1 * pass_prob,
            filter_pass_probability=pass_prob,
            higher_order_mass_before_herald=before,
            step_distributions=step_dists,
            efficiency_definition="P(one photon in a | pass filters)",
        )
    doubled = evolve(state, coupling, math.pi / 2).state
    try:
        heralded, herald_p = _project(doubled, {"b": 1})
    except EmptyProjection:
        empty.filter_pass_probability = pass_prob
        empty.higher_order_mass_before_herald = before
        return empty
    out = total_number_distribution(heralded, ("a", "c"))
    return SourceReport(
        production_efficiency=herald_p,
        output_distribution=out,
        single_photon_fidelity=out.get(1, 0.0),
        higher_order_mass=_higher_order(out),
        steps=n_steps,
        absolute_efficiency=herald_p * pass_prob,
        filter_pass_probability=pass_prob,
        herald_probability=herald_p,
        higher_order_mass_before_herald=before,
        step_distributions=step_dists,
    )


# -- revival peaks -------------------------------------------------------------


@dataclass(frozen=True)
class RevivalPeak:
    theta_over_pi: float
    transmission: float


def revival_scan(
    n: int,
    theta_max_over_pi: float,
    coarse_step_over_pi: float = 1e-3,
    transmission_floor: float = 0.9,
) -> list[RevivalPeak]:
    """Local maxima of |<n00|U|n00>|^2 above ``transmission_floor``.

    A coarse grid locates candidates; each is refined by a three-point
    parabola and then a bounded scalar search within one grid step.
    """
    if n < 1:
        raise InvalidArgument("n must be at least 1")
    grid = np.arange(0.0, theta_max_over_pi + 0.5 * coarse_step_over_pi, coarse_step_over_pi)
    trans = return_probability(n, grid * math.pi)
    mid = trans[1:-1]
    idx = np.nonzero((mid >= trans[:-2]) & (mid > trans[2:]) & (mid >= transmission_floor))[0] + 1
    peaks = []
    h = coarse_step_over_pi
    for i in idx:
        y0, y1, y2 = trans[i - 1], trans[i], trans[i + 1]
        denom = y0 - 2 * y1 + y2
        x = grid[i] + (0.5 * h * (y0 - y2) / denom if denom != 0 else 0.0)
        res = minimize_scalar(
            lambda t: -return_probability(n, t * math.pi),
            bounds=(grid[i - 1], grid[i + 1]),
            method="bounded",
            options={"xatol": 1e-10},
        )
        if -res.fun >= return_probability(n, x * math.pi):
            x = float(res.x)
        peaks.append(RevivalPeak(float(x), float(return_probability(n, x * math.pi))))
    return peaks


# -- improved down-conversion ----------------------------------------------------


@dataclass
class DcReport:
    single_pair_probability: float
    total_emission_probability: float
    heralded_fidelity: float
    spdc_reference: dict[str, float]
    theta: float = 0.0
    pair_distribution: dict[int, float] = field(default_factory=dict)

    def to_dict(self) -> dict:
        doc = asdict(self)
        doc["pair_distribution"] = {str(k): v for k, v in self.pair_distribution.items()}
        return doc


def spdc_reference(emission_probability: float) -> dict[str, float]:
    """Thermal pair statistics P(k) = (1 - lam) lam^k with P(k >= 1) = lam matched."""
    lam = emission_probability
    return {
        "single_pair_probability": (1 - lam) * lam,
        "total_emission_probability": lam,
        "heralded_fidelity": (1 - lam) if lam > 0 else 0.0,
    }


def _pair_distribution(state: QuantumState) -> dict[int, float]:
    # b and c are always equally occupied from a b=c=0 input
    return marginal_distribution(state, "b")


def improved_dc(
    m: int = 1,
    alpha: complex | None = None,
    mixture: Mapping[int, float] | None = None,
    policy: TruncationPolicy | None = None,
) -> DcReport:
    """Evolve for m full |200> periods (theta = 2 m pi / sqrt 6) and report pair statistics.

    Exactly one of ``alpha`` (coherent input) or ``mixture`` ({n: probability},
    an incoherent Fock mixture) is given. The herald is a non-number-resolving
    click on mode b, so the heralded fidelity with the one-pair state is
    P(one pair) / P(any pair).
    """
    if m < 1:
        raise InvalidArgument("m must be at least 1")
    if (alpha is None) == (mixture is None):
        raise InvalidArgument("give exactly one of alpha or mixture")
    theta = 2 * m * math.pi / math.sqrt(6)
    coupling = Coupling.nondegenerate(*SOURCE_MODES)
    if alpha is not None:
        state = make_coherent(alpha, "a", policy, modes=SOURCE_MODES)
        pairs = _pair_distribution(evolve(state, coupling, theta).state)
    else:
        total = math.fsum(mixture.values())
        if total <= 0 or any(p < 0 for p in mixture.values()):
            raise InvalidArgument("mixture weights must be nonnegative with positive sum")
        pairs = {}
        for n, p in mixture.items():
            out = evolve(make_fock({"a": int(n), "b": 0, "c": 0}), coupling, theta).state
            for k, q in _pair_distribution(out).items():
                pairs[k] = pairs.get(k, 0.0) + p / total * q
        pairs = dict(sorted(pairs.items()))
    single = pairs.get(1, 0.0)
    emission = math.fsum(q for k, q in pairs.items() if k >= 1)
    fid = single / emission if emission > 0 else 0.0
    return DcReport(
        single_pair_probability=single,
        total_emission_probability=emission,
        heralded_fidelity=min(1.0, fid),
        spdc_reference=spdc_reference(emission),
        theta=theta,
        pair_distribution=pairs,
    )
