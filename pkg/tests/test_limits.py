import json
import math

import numpy as np
import pytest

from qlab import (
    ApparatusScenario,
    ConstantsProfile,
    PAPER_OOM,
    PRECISE,
    causal_angle,
    default_scenarios,
    load_profile,
    max_spin,
    planck_angle,
    profile_by_name,
    scenario_report,
    schwarzschild_radius,
    sql_angle,
)

# the six headline bounds: (scenario, regime, criterion) -> log10 spin
HEADLINE = {
    ("lab", "sql", "sqrt"): 34.0,
    ("lab", "causal", "sqrt"): 42.0,
    ("universe", "causal", "linear"): 61.0,
    ("lab", "planck", "sqrt"): 70.0,
    ("universe", "causal", "sqrt"): 122.0,
    ("universe", "planck", "sqrt"): 124.0,
}


def report_map(constants):
    rows = scenario_report(default_scenarios(constants), constants)
    return {(r.scenario, r.regime, r.criterion): r for r in rows}


def test_order_of_magnitude_profile_is_exact():
    rows = report_map(PAPER_OOM)
    for key, expect in HEADLINE.items():
        assert rows[key].log10_spin == expect
    # round-number constants keep every column an exact integer
    for row in rows.values():
        assert row.log10_angle == round(row.log10_angle)
        assert row.log10_spin == round(row.log10_spin)


def test_precise_profile_within_two_decades():
    rows = report_map(PRECISE)
    for key, expect in HEADLINE.items():
        assert abs(rows[key].log10_spin - expect) <= 2.0


def test_angle_spin_consistency():
    lab = ApparatusScenario("lab", 1.0, 1.0, 1.0)
    for constants in (PAPER_OOM, PRECISE):
        for angle_of, regime in (
            (sql_angle, "sql"),
            (causal_angle, "causal"),
            (planck_angle, "planck"),
        ):
            angle = angle_of(lab, constants)
            sqrt_bound = max_spin(lab, constants, regime, "sqrt")
            lin_bound = max_spin(lab, constants, regime, "linear")
            # bounds assemble from the angle in log space
            assert np.isclose(math.log10(sqrt_bound), -2 * math.log10(angle), atol=1e-12)
            assert np.isclose(math.log10(lin_bound), -math.log10(angle), atol=1e-12)
            assert np.isclose(sqrt_bound, angle**-2, rtol=1e-12)
            assert np.isclose(lin_bound, 1.0 / angle, rtol=1e-12)


def test_regime_ordering():
    # whenever light crosses the device within the interaction time, the
    # causality cap cannot be tighter than the quantum-limit cap
    for constants in (PAPER_OOM, PRECISE):
        lab = ApparatusScenario("lab", 1.0, 1.0, 1.0)
        assert constants.c * lab.interaction_time >= lab.size
        assert max_spin(lab, constants, "sql", "sqrt") <= max_spin(lab, constants, "causal", "sqrt")


def test_report_skips_sql_without_interaction_time():
    rows = report_map(PAPER_OOM)
    assert ("universe", "sql", "sqrt") not in rows
    assert ("universe", "causal", "sqrt") in rows


def test_schwarzschild_radius():
    assert np.isclose(schwarzschild_radius(1.0, PAPER_OOM), 2e-26, rtol=1e-12)
    assert np.isclose(
        schwarzschild_radius(PAPER_OOM.universe_mass, PAPER_OOM), 2e27, rtol=1e-12
    )
    expect = 2 * PRECISE.G * 1.0 / PRECISE.c**2
    assert schwarzschild_radius(1.0, PRECISE) == expect


def test_profile_by_name():
    assert profile_by_name("paper-oom") is PAPER_OOM
    assert profile_by_name("precise") is PRECISE
    with pytest.raises(ValueError):
        profile_by_name("rough")


def test_profile_file_roundtrip(tmp_path):
    path = tmp_path / "constants.json"
    data = {
        "name": "precise",
        "hbar": PRECISE.hbar,
        "c": PRECISE.c,
        "G": PRECISE.G,
        "planck_length": PRECISE.planck_length,
        "universe_mass": PRECISE.universe_mass,
        "universe_radius": PRECISE.universe_radius,
    }
    path.write_text(json.dumps(data))
    prof = load_profile(path)
    assert prof == PRECISE

    path.write_text(json.dumps({**data, "extra": 1.0}))
    with pytest.raises(ValueError):
        load_profile(path)

    missing = dict(data)
    del missing["hbar"]
    path.write_text(json.dumps(missing))
    with pytest.raises(ValueError):
        load_profile(path)


def test_inconsistent_planck_length_rejected():
    with pytest.raises(ValueError):
        ConstantsProfile(
            "custom",
            hbar=1e-34,
            c=3e8,
            G=7e-11,
            planck_length=1e-20,  # fifteen decades off sqrt(hbar G / c^3)
            universe_mass=1e53,
            universe_radius=1e27,
        )


def test_scenario_report_row_fields():
    rows = scenario_report([ApparatusScenario("bench", 2.0, 0.5, 10.0)], PRECISE)
    regimes = {r.regime for r in rows}
    assert regimes == {"sql", "causal", "planck"}
    for r in rows:
        assert r.scenario == "bench"
        assert r.spin_bound == 10.0**r.log10_spin
        assert r.angle == 10.0**r.log10_angle
