"""Ready-made synthetic scenarios used by the demos, tests, and CLI.

* ``single7``   - seven household-style loads switched one at a time
  (charger, monitor, fan at three speeds, bulb, laptop).
* ``multi5``    - five overlapping loads with events spaced over 4.1 s so
  the differential-vector method applies.
* ``harmonics4`` - four rectifier loads with identical P/|S|/Q that differ
  only in which odd harmonic carries the remaining current.
"""

from __future__ import annotations

import numpy as np

from .synth import ApplianceModel, Mains, ScenarioEvent, ScenarioScript

SCENARIO_IDS = ("single7", "multi5", "harmonics4")

_MAINS = Mains()  # 230 V RMS, 50 Hz

SINGLE7_REGISTRY = {
    "charger": ApplianceModel(kind="rectifier", nominal_power_w=5.0,
                              harmonic_profile={1: 1.0, 3: 0.8, 5: 0.55, 7: 0.3},
                              noise_rms_a=0.02),
    "monitor": ApplianceModel(kind="rectifier", nominal_power_w=35.0,
                              harmonic_profile={1: 1.0, 3: 0.6, 5: 0.35},
                              noise_rms_a=0.02),
    "fan_min": ApplianceModel(kind="reactive", nominal_power_w=30.0,
                              phase_rad=0.45, noise_rms_a=0.02),
    "fan_med": ApplianceModel(kind="reactive", nominal_power_w=45.0,
                              phase_rad=0.38, noise_rms_a=0.02),
    "fan_max": ApplianceModel(kind="reactive", nominal_power_w=60.0,
                              phase_rad=0.30, noise_rms_a=0.02),
    "bulb": ApplianceModel(kind="resistive", nominal_power_w=40.0, noise_rms_a=0.02),
    "laptop": ApplianceModel(kind="rectifier", nominal_power_w=20.0,
                             harmonic_profile={1: 1.0, 3: 0.7, 5: 0.45, 9: 0.2},
                             noise_rms_a=0.02),
}

# noiseless loads: the overlapping scripts add measurement noise once at the
# aggregate, so the noise floor does not leak the number of active loads
MULTI5_REGISTRY = {
    "fan": ApplianceModel(kind="reactive", nominal_power_w=35.0, phase_rad=0.4),
    "coffee": ApplianceModel(kind="resistive", nominal_power_w=800.0),
    "bulb": ApplianceModel(kind="resistive", nominal_power_w=40.0),
    "monitor": ApplianceModel(kind="rectifier", nominal_power_w=80.0,
                              harmonic_profile={1: 1.0, 3: 0.55, 5: 0.3, 7: 0.15}),
    "powerbank": ApplianceModel(kind="rectifier", nominal_power_w=15.0,
                                harmonic_profile={1: 1.0, 3: 0.85, 5: 0.6}),
}

def _harmonic_twin(orders: tuple[int, ...]) -> ApplianceModel:
    # equal fundamental power and equal total harmonic energy -> identical
    # P, |S| and Q across twins; only the harmonic placement differs
    return ApplianceModel(
        kind="rectifier",
        nominal_power_w=100.0,
        harmonic_profile={1: 1.0, **{k: 0.45 for k in orders}},
        noise_rms_a=0.03,
    )


HARMONICS4_REGISTRY = {
    "box_a": _harmonic_twin((3, 7, 11, 15)),
    "box_b": _harmonic_twin((5, 9, 13, 17)),
    "box_c": _harmonic_twin((19, 23, 27, 31)),
    "box_d": _harmonic_twin((21, 25, 29, 33)),
}


def solo_rotation_script(registry: dict[str, ApplianceModel],
                         on_s: float = 6.0, gap_s: float = 1.0) -> ScenarioScript:
    """Each appliance alone in turn: on for on_s, then a gap before the next."""
    events = []
    t = gap_s
    for app_id in sorted(registry):
        events.append(ScenarioEvent(time_s=t, appliance_id=app_id, action="on"))
        events.append(ScenarioEvent(time_s=t + on_s, appliance_id=app_id, action="off"))
        t += on_s + gap_s
    return ScenarioScript(mains=_MAINS, events=tuple(events), duration_s=t + gap_s)


def overlapping_script(registry: dict[str, ApplianceModel], seed: int = 0,
                       rounds: int = 2, gap_s: float = 4.5,
                       noise_rms_a: float = 0.03) -> ScenarioScript:
    """Overlapping on/off toggles, one event every gap_s >= 4.1 s.

    Each round toggles every appliance on and later off, in a seed-shuffled
    order, so multiple loads are active at once while events stay separated
    beyond the 41-window observation span. Measurement noise is aggregate
    level so its floor is independent of the active-load count."""
    rng = np.random.default_rng(seed)
    ids = sorted(registry)
    actions: list[tuple[str, str]] = []
    for _ in range(rounds):
        on_order = [ids[k] for k in rng.permutation(len(ids))]
        off_order = [ids[k] for k in rng.permutation(len(ids))]
        actions += [(a, "on") for a in on_order]
        actions += [(a, "off") for a in off_order]
    events = []
    t = gap_s
    for app_id, action in actions:
        events.append(ScenarioEvent(time_s=round(t, 1), appliance_id=app_id, action=action))
        t += gap_s
    return ScenarioScript(mains=_MAINS, events=tuple(events), duration_s=t + gap_s,
                          noise_rms_a=noise_rms_a)


def builtin_scenario(scenario_id: str, seed: int = 0):
    """Returns (script, registry) for a builtin scenario id."""
    if scenario_id == "single7":
        return solo_rotation_script(SINGLE7_REGISTRY), SINGLE7_REGISTRY
    if scenario_id == "multi5":
        return overlapping_script(MULTI5_REGISTRY, seed=seed), MULTI5_REGISTRY
    if scenario_id == "harmonics4":
        return solo_rotation_script(HARMONICS4_REGISTRY), HARMONICS4_REGISTRY
    raise ValueError(f"unknown scenario id {scenario_id!r} (expected one of {SCENARIO_IDS})")
