"""Acquisition-side signal handling: ADC calibration, 2:1 averaging decimation,
and 100 ms windowing of voltage/current sample streams.

The numeric contract mirrors a metering front end that digitizes both channels
with a 14-bit converter at 20 kHz, averages sample pairs down to 10 kHz, and
hands the DSP stage non-overlapping frames of 1000 samples per channel.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator

import numpy as np

ADC_CODE_MAX = 16383  # 14-bit converter, 16384 discrete values
ACQUISITION_RATE_HZ = 20_000
SAMPLE_RATE_HZ = 10_000
WINDOW_SAMPLES = 1000  # 100 ms at 10 kHz


class LengthMismatchError(ValueError):
    """Voltage and current channels differ in length."""


@dataclass(frozen=True)
class CalibrationCoefficients:
    """Affine code-to-unit calibration: value = code * gain + offset."""

    gain_v: float  # volts per code
    offset_v: float  # volts
    gain_i: float  # amperes per code
    offset_i: float  # amperes

    def __post_init__(self):
        if self.gain_v <= 0 or self.gain_i <= 0:
            raise ValueError("calibration gains must be positive")


def default_calibration(v_span: float = 800.0, i_span: float = 100.0) -> CalibrationCoefficients:
    """Bipolar mapping over a unipolar 14-bit converter: mid-scale code 8192
    reads as 0 V / 0 A, full scale spans +-v_span/2 and +-i_span/2."""
    return CalibrationCoefficients(
        gain_v=v_span / 16384.0,
        offset_v=-v_span / 2.0,
        gain_i=i_span / 16384.0,
        offset_i=-i_span / 2.0,
    )


@dataclass(frozen=True)
class RawSampleBlock:
    """Uncalibrated ADC codes for both channels at the acquisition rate."""

    codes_v: np.ndarray
    codes_i: np.ndarray
    rate_hz: int = ACQUISITION_RATE_HZ

    def __post_init__(self):
        object.__setattr__(self, "codes_v", np.asarray(self.codes_v, dtype=np.int64))
        object.__setattr__(self, "codes_i", np.asarray(self.codes_i, dtype=np.int64))
        if self.codes_v.shape != self.codes_i.shape:
            raise LengthMismatchError(
                f"channel lengths differ: {self.codes_v.size} voltage vs {self.codes_i.size} current codes"
            )
        for name, codes in (("voltage", self.codes_v), ("current", self.codes_i)):
            if codes.size and (codes.min() < 0 or codes.max() > ADC_CODE_MAX):
                raise ValueError(f"{name} codes outside the 14-bit range [0, {ADC_CODE_MAX}]")


@dataclass(frozen=True)
class SampleStream:
    """Calibrated paired stream of voltage (V) and current (A) samples."""

    v: np.ndarray
    i: np.ndarray
    rate_hz: int = SAMPLE_RATE_HZ

    def __post_init__(self):
        object.__setattr__(self, "v", np.asarray(self.v, dtype=np.float64))
        object.__setattr__(self, "i", np.asarray(self.i, dtype=np.float64))
        if self.v.shape != self.i.shape:
            raise LengthMismatchError(
                f"channel lengths differ: {self.v.size} voltage vs {self.i.size} current samples"
            )

    def __len__(self) -> int:
        return int(self.v.size)

    @property
    def duration_s(self) -> float:
        return self.v.size / self.rate_hz


@dataclass(frozen=True)
class SampleWindow:
    """One 100 ms frame: exactly 1000 calibrated samples per channel at 10 kHz.

    `index` is the window ordinal within its stream, counted from 0.
    """

    v: np.ndarray
    i: np.ndarray
    index: int = 0
    rate_hz: int = SAMPLE_RATE_HZ

    def __post_init__(self):
        object.__setattr__(self, "v", np.asarray(self.v, dtype=np.float64))
        object.__setattr__(self, "i", np.asarray(self.i, dtype=np.float64))
        if self.v.size != WINDOW_SAMPLES or self.i.size != WINDOW_SAMPLES:
            raise ValueError(
                f"a window holds exactly {WINDOW_SAMPLES} samples per channel, "
                f"got {self.v.size}/{self.i.size}"
            )
        if self.rate_hz != SAMPLE_RATE_HZ:
            raise ValueError(f"window rate must be {SAMPLE_RATE_HZ} Hz")


def calibrate_raw(block: RawSampleBlock, coeffs: CalibrationCoefficients) -> SampleStream:
    """Apply the affine calibration to both channels, preserving length and rate."""
    v = block.codes_v * coeffs.gain_v + coeffs.offset_v
    i = block.codes_i * coeffs.gain_i + coeffs.offset_i
    return SampleStream(v=v, i=i, rate_hz=block.rate_hz)


def decimate_average(samples: np.ndarray) -> np.ndarray:
    """Average consecutive sample pairs: out[k] = (in[2k] + in[2k+1]) / 2.

    Halves both the length and the rate. The input length must be even; the
    caller re-buffers odd tails.
    """
    samples = np.asarray(samples, dtype=np.float64)
    if samples.size % 2 != 0:
        raise ValueError(f"decimation needs an even sample count, got {samples.size}")
    pairs = samples.reshape(-1, 2)
    return (pairs[:, 0] + pairs[:, 1]) / 2.0


def decimate_stream(stream: SampleStream) -> SampleStream:
    """Pair-average both channels of a stream, e.g. 20 kHz -> 10 kHz."""
    return SampleStream(
        v=decimate_average(stream.v),
        i=decimate_average(stream.i),
        rate_hz=stream.rate_hz // 2,
    )


def window_stream(stream: SampleStream) -> Iterator[SampleWindow]:
    """Cut a 10 kHz stream into consecutive non-overlapping 1000-sample windows.

    Windows start at stream sample 0; a trailing partial window is discarded.
    An empty stream yields nothing.
    """
    if stream.rate_hz != SAMPLE_RATE_HZ:
        raise ValueError(f"windowing expects a {SAMPLE_RATE_HZ} Hz stream, got {stream.rate_hz} Hz")
    n_windows = len(stream) // WINDOW_SAMPLES
    for j in range(n_windows):
        lo = j * WINDOW_SAMPLES
        hi = lo + WINDOW_SAMPLES
        yield SampleWindow(v=stream.v[lo:hi], i=stream.i[lo:hi], index=j)
