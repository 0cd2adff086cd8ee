"""End-to-end plumbing: turning scenario streams into labeled datasets and
running the online window -> features -> event -> classify loop.

The online classifier processes windows strictly in order. Single-appliance
mode labels the window where the power threshold crossing is observed.
Multi-appliance mode holds each event until 20 more windows have streamed
in, applies the event guard, computes the differential vector, and only
then predicts; events still unresolved at end of stream flush as pending.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .events import (
    DEFAULT_THRESHOLD_W,
    DELTA_HALF_SPAN,
    DELTA_OFFSETS_POST,
    DELTA_OFFSETS_PRE,
    DeltaBuffer,
    SwitchEvent,
    delta_feature,
    delta_feature_from_windows,
    detect_event,
    event_guard,
)
from .features import DEFAULT_LAYOUT, FeatureLayout, extract_features, real_power
from .models.base import BaseModel, classify
from .signals import SampleStream, window_stream
from .synth import LabelTrack
from .train.dataset import Dataset


def window_dataset(
    stream: SampleStream,
    track: LabelTrack,
    layout: FeatureLayout = DEFAULT_LAYOUT,
    class_names: tuple[str, ...] | None = None,
    provenance: str = "synthetic-windows",
) -> Dataset:
    """Steady-state single-appliance dataset: one row per window in which
    exactly one appliance is on and no switch occurs."""
    if class_names is None:
        seen = sorted({app for s in track.active for app in s})
        class_names = tuple(seen)
    index_of = {name: k for k, name in enumerate(class_names)}
    rows, labels = [], []
    for w in window_stream(stream):
        if w.index >= len(track) or w.index in track.toggles:
            continue
        on = track.active[w.index]
        if len(on) != 1:
            continue
        (app,) = on
        rows.append(extract_features(w, layout).values)
        labels.append(index_of[app])
    return Dataset(
        x=np.vstack(rows),
        y=np.array(labels, dtype=np.int64),
        class_names=class_names,
        layout=layout,
        provenance=provenance,
    )


def delta_dataset(
    stream: SampleStream,
    track: LabelTrack,
    layout: FeatureLayout = DEFAULT_LAYOUT,
    class_names: tuple[str, ...] | None = None,
    threshold_w: float = DEFAULT_THRESHOLD_W,
    sign: str = "pre_minus_post",
    provenance: str = "synthetic-delta",
) -> Dataset:
    """Differential-vector dataset: one row per valid detected event whose
    window matches a scripted toggle (within one window of slack)."""
    if class_names is None:
        seen = sorted({app for s in track.active for app in s}
                      | {app for evs in track.toggles.values() for app, _ in evs})
        class_names = tuple(seen)
    index_of = {name: k for k, name in enumerate(class_names)}

    feats, p_track = [], []
    for w in window_stream(stream):
        fv = extract_features(w, layout)
        feats.append(fv.values)
        # detection always runs on real power, even for layouts without it
        if layout.time_domain:
            p_track.append(fv.values[0])
        else:
            p_track.append(real_power(w))

    events: list[SwitchEvent] = []
    for j in range(1, len(feats)):
        ev = detect_event(p_track[j - 1], p_track[j], threshold_w, window_index=j)
        if ev is not None:
            events.append(ev)
    valid = event_guard(events)

    rows, labels = [], []
    for ev, ok in zip(events, valid):
        if not ok:
            continue
        j = ev.window_index
        if j - DELTA_HALF_SPAN < 0 or j + DELTA_HALF_SPAN >= len(feats):
            continue
        label = _matching_toggle(track, j)
        if label is None:
            continue
        pre = [feats[j + off] for off in DELTA_OFFSETS_PRE]
        post = [feats[j + off] for off in DELTA_OFFSETS_POST]
        rows.append(delta_feature_from_windows(pre, post, sign=sign))
        labels.append(index_of[label])
    if not rows:
        raise ValueError("no valid labeled events found in the scenario")
    return Dataset(
        x=np.vstack(rows),
        y=np.array(labels, dtype=np.int64),
        class_names=class_names,
        layout=layout,
        provenance=provenance,
    )


def _matching_toggle(track: LabelTrack, window_index: int) -> str | None:
    for j in (window_index, window_index - 1, window_index + 1):
        if j in track.toggles:
            return track.toggles[j][0][0]
    return None


# --- online classification -----------------------------------------------------

@dataclass(frozen=True)
class StreamLabel:
    window_index: int
    delta_p_w: float
    direction: str
    valid: bool
    status: str  # "labeled" | "invalid" | "pending"
    label: str | None


def classify_stream(
    stream: SampleStream,
    model: BaseModel,
    mode: str = "single",
    threshold_w: float = DEFAULT_THRESHOLD_W,
    sign: str = "pre_minus_post",
) -> list[StreamLabel]:
    """Run the full online pipeline over a stream with the given model."""
    if mode not in ("single", "multi"):
        raise ValueError(f"mode must be 'single' or 'multi', got {mode!r}")
    layout = model.layout

    buffer = DeltaBuffer()
    events: list[SwitchEvent] = []
    open_events: list[SwitchEvent] = []
    out: list[StreamLabel] = []
    prev_p: float | None = None

    def p_of(values: np.ndarray, w) -> float:
        # detection always runs on real power, even for layouts without it
        if layout.time_domain:
            return float(values[0])
        return real_power(w)

    def flush(ev: SwitchEvent) -> StreamLabel:
        others = [e for e in events if e.window_index != ev.window_index]
        clash = any(abs(ev.window_index - o.window_index) <= DELTA_HALF_SPAN for o in others)
        if clash:
            return StreamLabel(ev.window_index, ev.delta_p_w, ev.direction,
                               valid=False, status="invalid", label=None)
        try:
            delta = delta_feature(buffer, ev.window_index, sign=sign)
        except LookupError:
            return StreamLabel(ev.window_index, ev.delta_p_w, ev.direction,
                               valid=True, status="pending", label=None)
        cls = classify(model, delta)
        return StreamLabel(ev.window_index, ev.delta_p_w, ev.direction,
                           valid=True, status="labeled", label=model.class_names[cls])

    for w in window_stream(stream):
        fv = extract_features(w, layout)
        buffer.push(w.index, fv.values)
        p = p_of(fv.values, w)
        if prev_p is not None:
            ev = detect_event(prev_p, p, threshold_w, window_index=w.index)
            if ev is not None:
                events.append(ev)
                if mode == "single":
                    cls = classify(model, fv.values)
                    out.append(StreamLabel(ev.window_index, ev.delta_p_w, ev.direction,
                                           valid=True, status="labeled",
                                           label=model.class_names[cls]))
                else:
                    open_events.append(ev)
        prev_p = p
        if mode == "multi":
            ready = [e for e in open_events if w.index >= e.window_index + DELTA_HALF_SPAN]
            for ev in ready:
                out.append(flush(ev))
                open_events.remove(ev)

    for ev in open_events:  # end of stream: unresolved lookahead
        out.append(StreamLabel(ev.window_index, ev.delta_p_w, ev.direction,
                               valid=True, status="pending", label=None))
    return out


def write_stream_labels_csv(path, labels: list[StreamLabel]) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("window_index,delta_p_w,direction,valid,status,label\n")
        for s in labels:
            fh.write(
                f"{s.window_index},{s.delta_p_w!r},{s.direction},"
                f"{int(s.valid)},{s.status},{s.label or ''}\n"
            )
