"""nilmedge: a desk-scale non-intrusive load monitoring pipeline.

The package walks the whole edge-metering chain on synthetic data: ADC
calibration and windowing (`signals`), appliance/scenario synthesis
(`synth`), power and harmonic features (`features`), switching-event
detection with differential vectors (`events`), four lightweight classifier
families with a common serialization format (`models`), training plus
feature ranking and the feature-count sweep (`train`), and an MCU
cycle/Flash/SRAM cost model (`cost`). `pipeline` ties streams to datasets
and runs the online classifier; `cli` exposes everything as subcommands.
"""

from . import cost, events, features, models, pipeline, sampleio, scenarios, signals, synth, train

__version__ = "0.1.0"

__all__ = [
    "signals",
    "synth",
    "sampleio",
    "features",
    "events",
    "models",
    "train",
    "cost",
    "pipeline",
    "scenarios",
    "__version__",
]
