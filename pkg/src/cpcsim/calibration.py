"""Interaction-strength calibration from measured pair rates.

In the small-angle regime the detected pair rate is
    rate = flux * T1 * T2 * sin^2(kappa * sqrt(P)) ~= flux * T1 * T2 * kappa^2 * P,
so a measured slope (pairs/s per mW) gives kappa in rad per sqrt(mW).
The arm figures are end-to-end transmissions, not loss fractions.
"""
from __future__ import annotations

import json
import math
import warnings
from dataclasses import asdict, dataclass
from pathlib import Path

from .errors import InvalidArgument

SMALL_ANGLE_LIMIT = 0.1
ARM_INTERPRETATION = "arm figures read as end-to-end transmissions T1, T2 (not loss fractions)"


class SmallAngleWarning(UserWarning):
    pass


@dataclass(frozen=True)
class ExperimentParams:
    pair_rate: float  # detected pairs/s per mW of pump
    input_flux: float  # photons/s in mode a
    arm_transmissions: tuple[float, float]
    pump_power: float = 1.0  # mW

    def __post_init__(self):
        object.__setattr__(self, "arm_transmissions", tuple(float(t) for t in self.arm_transmissions))
        if len(self.arm_transmissions) != 2:
            raise InvalidArgument("arm_transmissions needs exactly two values")
        for name, v in (("pair_rate", self.pair_rate), ("input_flux", self.input_flux), ("pump_power", self.pump_power)):
            if not v > 0:
                raise InvalidArgument(f"{name} must be positive, got {v}")
        for t in self.arm_transmissions:
            if not 0 < t <= 1:
                raise InvalidArgument(f"arm transmissions must lie in (0, 1], got {t}")

    @classmethod
    def from_dict(cls, doc) -> ExperimentParams:
        allowed = {"pair_rate", "input_flux", "arm_transmissions", "pump_power"}
        unknown = set(doc) - allowed
        if unknown:
            raise InvalidArgument(f"unknown keys {sorted(unknown)}")
        return cls(**doc)

    @classmethod
    def from_json_file(cls, path) -> ExperimentParams:
        return cls.from_dict(json.loads(Path(path).read_text()))

    def to_dict(self) -> dict:
        doc = asdict(self)
        doc["arm_transmissions"] = list(self.arm_transmissions)
        return doc


def flux_from_pulses(photons_per_pulse: float, rep_rate_hz: float) -> float:
    return photons_per_pulse * rep_rate_hz


def _check_small_angle(theta: float):
    if theta > SMALL_ANGLE_LIMIT:
        warnings.warn(
            f"implied interaction angle {theta:.3g} rad exceeds {SMALL_ANGLE_LIMIT}; linearized rate model is unreliable",
            SmallAngleWarning,
            stacklevel=3,
        )


def estimate_kappa(params: ExperimentParams) -> float:
    """kappa = sqrt(rate / (flux * T1 * T2)) in rad per sqrt(mW)."""
    t1, t2 = params.arm_transmissions
    kappa = math.sqrt(params.pair_rate / (params.input_flux * t1 * t2))
    _check_small_angle(kappa * math.sqrt(params.pump_power))
    return kappa


def theta_at_power(kappa: float, power_mw: float) -> float:
    if kappa <= 0 or power_mw < 0:
        raise InvalidArgument("kappa must be positive and power nonnegative")
    return kappa * math.sqrt(power_mw)


def power_for_theta(kappa: float, theta_target: float) -> float:
    if kappa <= 0 or theta_target < 0:
        raise InvalidArgument("kappa must be positive and theta nonnegative")
    return (theta_target / kappa) ** 2


def calibration_report(params: ExperimentParams, power_mw: float = 1000.0) -> dict:
    kappa = estimate_kappa(params)
    return {
        "params": params.to_dict(),
        "kappa_per_sqrt_mW": kappa,
        "power_mW": power_mw,
        "theta_at_power": theta_at_power(kappa, power_mw),
        "power_for_half_pi_mW": power_for_theta(kappa, math.pi / 2),
        "power_for_pi_mW": power_for_theta(kappa, math.pi),
        "loss_correction_factor": 1.0 / math.sqrt(params.arm_transmissions[0] * params.arm_transmissions[1]),
        "interpretation": ARM_INTERPRETATION,
    }
