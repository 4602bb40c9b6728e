"""
Closed-form precision limits on angular measurements, and the spin sizes
they allow.

Three floors on the angular resolution of an apparatus of mass M, size R,
measuring for a time tau:

    standard quantum limit   dtheta = sqrt(hbar * tau / M) / R
    causal (light crossing)  dtheta = sqrt(hbar / (c * M * R))
    final (Planck length)    dtheta = l_P / R

A resolution dtheta supports distinguishing the outcomes of a spin of size

    s ~ dtheta^-2       (sqrt criterion, resolving 1/sqrt(s) structure)
    s ~ dtheta^-1       (linear criterion, resolving 1/s structure)

Everything is computed in log10 space internally, so decade-level profiles
produce exact integer logs and no intermediate can overflow; linear values
are materialized only on return.
"""

import json
import math
from dataclasses import dataclass

__all__ = [
    "ConstantsProfile",
    "ApparatusScenario",
    "ReportRow",
    "PAPER_OOM",
    "PRECISE",
    "profile_by_name",
    "load_profile",
    "default_scenarios",
    "sql_angle",
    "causal_angle",
    "planck_angle",
    "max_spin",
    "schwarzschild_radius",
    "scenario_report",
]

REGIMES = ("sql", "causal", "planck")
CRITERIA = ("sqrt", "linear")

_FIELDS = ("hbar", "c", "G", "planck_length", "universe_radius", "universe_mass")
_PAPER_OOM_VALUES = {
    "hbar": 1e-34,
    "c": 1e8,
    "G": 1e-10,
    "planck_length": 1e-35,
    "universe_radius": 1e27,
    "universe_mass": 1e53,
}


@dataclass(frozen=True)
class ConstantsProfile:
    """Named set of physical constants, SI units."""

    name: str
    hbar: float
    c: float
    G: float
    planck_length: float
    universe_radius: float
    universe_mass: float

    def __post_init__(self):
        for field in _FIELDS:
            value = getattr(self, field)
            if not (isinstance(value, (int, float)) and value > 0 and math.isfinite(value)):
                raise ValueError(f"constant {field} must be a positive finite number, got {value!r}")
        if self.name == "paper-oom":
            for field, expected in _PAPER_OOM_VALUES.items():
                if getattr(self, field) != expected:
                    raise ValueError(f"paper-oom profile must have {field} = {expected:g}")
        derived = 0.5 * (math.log10(self.hbar) + math.log10(self.G) - 3 * math.log10(self.c))
        if abs(math.log10(self.planck_length) - derived) > 1.0 + 1e-9:
            raise ValueError(
                "planck_length is more than a decade away from sqrt(hbar G / c^3)"
            )


PAPER_OOM = ConstantsProfile("paper-oom", **_PAPER_OOM_VALUES)

# CODATA constants; observable-universe radius and total mass estimates
PRECISE = ConstantsProfile(
    "precise",
    hbar=1.054571817e-34,
    c=2.99792458e8,
    G=6.6743e-11,
    planck_length=1.616255e-35,
    universe_radius=4.40e26,
    universe_mass=1.5e53,
)

_PROFILES = {"paper-oom": PAPER_OOM, "precise": PRECISE}


def profile_by_name(name: str) -> ConstantsProfile:
    if name not in _PROFILES:
        raise ValueError(f"unknown constants profile {name!r}; choose from {sorted(_PROFILES)}")
    return _PROFILES[name]


def load_profile(path) -> ConstantsProfile:
    """Profile from a JSON file: constant fields plus an optional name."""
    with open(path) as fh:
        data = json.load(fh)
    if not isinstance(data, dict):
        raise ValueError("constants profile file must hold a JSON object")
    unknown = set(data) - set(_FIELDS) - {"name"}
    if unknown:
        raise ValueError(f"unknown constants profile keys: {sorted(unknown)}")
    missing = set(_FIELDS) - set(data)
    if missing:
        raise ValueError(f"constants profile missing keys: {sorted(missing)}")
    return ConstantsProfile(data.get("name", "custom"), **{k: float(data[k]) for k in _FIELDS})


@dataclass(frozen=True)
class ApparatusScenario:
    """Measuring device: mass and size, plus an optional integration time."""

    name: str
    mass: float
    size: float
    interaction_time: float = None

    def __post_init__(self):
        for field in ("mass", "size"):
            value = getattr(self, field)
            if not (value > 0 and math.isfinite(value)):
                raise ValueError(f"{field} must be positive and finite, got {value!r}")
        if self.interaction_time is not None and not (
            self.interaction_time > 0 and math.isfinite(self.interaction_time)
        ):
            raise ValueError(f"interaction_time must be positive, got {self.interaction_time!r}")


def default_scenarios(constants: ConstantsProfile) -> list:
    """Tabletop apparatus (1 kg, 1 m, 1 s) and the whole observable universe."""
    return [
        ApparatusScenario("lab", 1.0, 1.0, 1.0),
        ApparatusScenario("universe", constants.universe_mass, constants.universe_radius, None),
    ]


def _log10_angle(scenario: ApparatusScenario, constants: ConstantsProfile, regime: str) -> float:
    lg = math.log10
    if regime == "sql":
        if scenario.interaction_time is None:
            raise ValueError(f"scenario {scenario.name!r} has no interaction time for the sql regime")
        return 0.5 * (lg(constants.hbar) + lg(scenario.interaction_time) - lg(scenario.mass)) - lg(
            scenario.size
        )
    if regime == "causal":
        return 0.5 * (
            lg(constants.hbar) - lg(constants.c) - lg(scenario.mass) - lg(scenario.size)
        )
    if regime == "planck":
        return lg(constants.planck_length) - lg(scenario.size)
    raise ValueError(f"regime must be one of {REGIMES}, got {regime!r}")


def sql_angle(scenario: ApparatusScenario, constants: ConstantsProfile) -> float:
    """Standard-quantum-limit angular resolution, radians."""
    return 10.0 ** _log10_angle(scenario, constants, "sql")


def causal_angle(scenario: ApparatusScenario, constants: ConstantsProfile) -> float:
    """Angular resolution when the integration time is capped at R / c."""
    return 10.0 ** _log10_angle(scenario, constants, "causal")


def planck_angle(scenario: ApparatusScenario, constants: ConstantsProfile) -> float:
    """Planck-length bound on any angular resolution."""
    return 10.0 ** _log10_angle(scenario, constants, "planck")


def _log10_max_spin(scenario, constants, regime, criterion) -> float:
    log_angle = _log10_angle(scenario, constants, regime)
    if criterion == "sqrt":
        return -2.0 * log_angle
    if criterion == "linear":
        return -log_angle
    raise ValueError(f"criterion must be one of {CRITERIA}, got {criterion!r}")


def max_spin(scenario: ApparatusScenario, constants: ConstantsProfile,
             regime: str, criterion: str) -> float:
    """Largest spin whose structure the apparatus can resolve.

    The consistency max_spin = angle^-2 (sqrt) or angle^-1 (linear) holds
    exactly because both are assembled from one log-space angle value.
    """
    return 10.0 ** _log10_max_spin(scenario, constants, regime, criterion)


def schwarzschild_radius(mass: float, constants: ConstantsProfile) -> float:
    """2 G M / c^2."""
    if not (mass > 0 and math.isfinite(mass)):
        raise ValueError(f"mass must be positive, got {mass!r}")
    return 2.0 * constants.G * mass / constants.c**2


@dataclass(frozen=True)
class ReportRow:
    scenario: str
    regime: str
    criterion: str
    log10_angle: float
    angle: float
    log10_spin: float
    spin_bound: float


def scenario_report(scenarios, constants: ConstantsProfile) -> list:
    """All (scenario, regime, criterion) bounds, with exact log10 columns.

    Scenarios without an interaction time skip the sql regime.
    """
    rows = []
    for scenario in scenarios:
        for regime in REGIMES:
            if regime == "sql" and scenario.interaction_time is None:
                continue
            log_angle = _log10_angle(scenario, constants, regime)
            for criterion in CRITERIA:
                log_spin = -2.0 * log_angle if criterion == "sqrt" else -log_angle
                rows.append(
                    ReportRow(
                        scenario.name,
                        regime,
                        criterion,
                        log_angle,
                        10.0**log_angle,
                        log_spin,
                        10.0**log_spin,
                    )
                )
    return rows
