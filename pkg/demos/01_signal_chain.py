"""From raw ADC codes to analysis windows.

The metering front end hands us 14-bit codes for both channels at 20 kHz.
This walk-through calibrates them to volts/amperes, averages sample pairs
down to 10 kHz, and cuts the stream into the 100 ms windows every later
stage consumes.
"""

import numpy as np

from nilmedge.signals import (
    RawSampleBlock,
    calibrate_raw,
    decimate_stream,
    default_calibration,
    window_stream,
)

rng = np.random.default_rng(0)

# fake one second of 20 kHz ADC output: a 50 Hz mains pattern on both channels
t = np.arange(20_000) / 20_000
coeffs = default_calibration()  # mid-scale code 8192 reads as 0 V / 0 A
codes_v = np.clip(np.round(325 * np.sin(2 * np.pi * 50 * t) / coeffs.gain_v + 8192),
                  0, 16383).astype(int)
codes_i = np.clip(np.round(2.0 * np.sin(2 * np.pi * 50 * t) / coeffs.gain_i + 8192),
                  0, 16383).astype(int)
block = RawSampleBlock(codes_v=codes_v, codes_i=codes_i)

stream_20k = calibrate_raw(block, coeffs)
print(f"calibrated: {len(stream_20k)} samples at {stream_20k.rate_hz} Hz, "
      f"v in [{stream_20k.v.min():.1f}, {stream_20k.v.max():.1f}] V")

stream = decimate_stream(stream_20k)
print(f"decimated: {len(stream)} samples at {stream.rate_hz} Hz "
      f"(pair averaging halves the noise power)")

windows = list(window_stream(stream))
print(f"windowed: {len(windows)} frames of 1000 samples "
      f"({len(stream) - 1000 * len(windows)} trailing samples discarded)")
print(f"window 3 spans t = {3 * 0.1:.1f}..{4 * 0.1:.1f} s, "
      f"v_rms = {np.sqrt(np.mean(windows[3].v ** 2)):.1f} V")
