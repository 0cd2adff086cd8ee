"""Switching events and the differential feature vector.

A motor hums along while a lamp toggles. The power track crosses the 5 W
threshold at each toggle; the differential vector averages three windows on
each side of the event (1, 10, and 20 windows out) and subtracts, which
cancels the steady background and isolates the toggled load - with the
pre-minus-post sign convention, a turn-on shows up negative.
"""

from nilmedge.events import DeltaBuffer, delta_feature, detect_event, event_guard
from nilmedge.features import extract_features
from nilmedge.signals import window_stream
from nilmedge.synth import (
    ApplianceModel,
    Mains,
    ScenarioEvent,
    ScenarioScript,
    synth_scenario,
)

REGISTRY = {
    "motor": ApplianceModel(kind="reactive", nominal_power_w=120, phase_rad=0.5),
    "lamp": ApplianceModel(kind="resistive", nominal_power_w=60),
}
script = ScenarioScript(
    mains=Mains(),
    events=(
        ScenarioEvent(0.0, "motor", "on"),
        ScenarioEvent(5.0, "lamp", "on"),
        ScenarioEvent(12.0, "lamp", "off"),
    ),
    duration_s=16.0,
    noise_rms_a=0.02,
)
stream, track = synth_scenario(script, REGISTRY, seed=5)

buffer = DeltaBuffer()
events = []
prev_p = None
pending = []
for w in window_stream(stream):
    fv = extract_features(w)
    buffer.push(w.index, fv.values)
    p = fv.values[0]
    if prev_p is not None:
        ev = detect_event(prev_p, p, threshold_w=5.0, window_index=w.index)
        if ev:
            events.append(ev)
            print(f"event at window {ev.window_index}: dP = {ev.delta_p_w:+7.2f} W "
                  f"({ev.direction})")
            pending.append(ev)
    for ev in [e for e in pending if w.index >= e.window_index + 20]:
        delta = delta_feature(buffer, ev.window_index)
        print(f"  delta vector ready: P component {delta[0]:+7.2f} W, "
              f"|S| component {delta[1]:+7.2f} VA")
        pending.remove(ev)
    prev_p = p

flags = event_guard(events)
print(f"\nguard: {sum(flags)}/{len(flags)} events valid "
      f"(none closer than 20 windows to a neighbour)")
