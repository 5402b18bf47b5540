"""Ground-truth self-interference channel in the complex-baseband domain.

The passband channel (sum of attenuated, delayed copies of the RF transmit
signal) reduces, for ideal up/down conversion, to per-tap complex gains
a_k * exp(-j 2 pi f_c tau_k) acting on fractionally delayed baseband copies.
Delays use the periodic (circular) convention, exact for the bandlimited
periodic extension of a frame; the harness trims guard samples before
measuring.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .signals import BasebandSignal, make_signal

SPEED_OF_LIGHT = 299792458.0

# Fraction of the frame duration a single tap delay may reach.
MAX_DELAY_FRACTION = 0.10

# ADC full scale = this many times the signal RMS; accommodates ~13 dB PAPR
# with negligible clipping.
ADC_FULLSCALE_RMS = 4.0


@dataclass(frozen=True)
class PathLossModel:
    """Capped power-law path loss: loss(x) = min(cap_delta, k_const * x^-alpha)."""

    cap_delta: float
    k_const: float
    alpha: float

    def __post_init__(self):
        if self.cap_delta <= 0 or self.k_const <= 0:
            raise ValueError("path loss constants must be positive")
        if self.alpha <= 2:
            raise ValueError("alpha must exceed 2")

    @classmethod
    def calibrated(cls, cap_db: float, ref_distance_m: float,
                   ref_loss_db: float, alpha: float) -> "PathLossModel":
        """Build a model passing through (ref_distance, ref_loss) below the cap."""
        k = 10.0 ** (ref_loss_db / 10.0) * ref_distance_m ** alpha
        return cls(cap_delta=10.0 ** (cap_db / 10.0), k_const=k, alpha=alpha)


def default_path_loss() -> PathLossModel:
    """Indoor 2.4 GHz-band model: -30 dB at 0.25 m round trip, -20 dB cap."""
    return PathLossModel.calibrated(cap_db=-20.0, ref_distance_m=0.25,
                                    ref_loss_db=-30.0, alpha=4.0)


def path_loss(model: PathLossModel, distance_m: float) -> float:
    """Linear power gain at the given (round-trip) distance; d = 0 hits the cap."""
    if distance_m < 0:
        raise ValueError("distance must be >= 0")
    if distance_m == 0:
        return model.cap_delta
    return float(min(model.cap_delta, model.k_const * distance_m ** -model.alpha))


@dataclass(frozen=True)
class ChannelTap:
    gain: float           # linear amplitude a_k
    delay_s: float        # tau_k >= 0

    def __post_init__(self):
        if self.gain <= 0:
            raise ValueError("tap gain must be positive")
        if self.delay_s < 0:
            raise ValueError("tap delay must be >= 0")


@dataclass(frozen=True)
class MultipathChannel:
    """Taps sorted non-increasing by gain, plus carrier and transmit gain."""

    taps: tuple
    carrier_hz: float
    tx_gain: float = 1.0  # linear power gain G_t

    def __post_init__(self):
        taps = tuple(self.taps)
        if len(taps) < 1:
            raise ValueError("channel needs at least one tap")
        order = np.argsort([-t.gain for t in taps], kind="stable")
        object.__setattr__(self, "taps", tuple(taps[i] for i in order))
        if self.carrier_hz <= 0:
            raise ValueError("carrier_hz must be positive")
        if self.tx_gain <= 0:
            raise ValueError("tx_gain must be positive")

    def with_tx_gain(self, tx_gain: float) -> "MultipathChannel":
        return MultipathChannel(self.taps, self.carrier_hz, tx_gain)


@dataclass(frozen=True)
class ReceiverImpairments:
    noise_power: float = 0.0      # linear, 0 = off
    adc_bits: int = 0             # 0 = ideal
    sample_offset: float = 0.0    # sub-sample delay in seconds, [0, T_s)

    def __post_init__(self):
        if self.noise_power < 0:
            raise ValueError("noise_power must be >= 0")
        if self.adc_bits != 0 and not 4 <= self.adc_bits <= 16:
            raise ValueError("adc_bits must be 0 or in [4, 16]")
        if self.sample_offset < 0:
            raise ValueError("sample_offset must be >= 0")


def taps_from_geometry(distances_m, model: PathLossModel, carrier_hz: float,
                       extra_taps=(), tx_gain: float = 1.0) -> MultipathChannel:
    """Channel from one-way reflector distances plus explicit extra taps.

    Per reflector: round trip 2d, tau = 2d/c, amplitude sqrt(loss(2d)).
    Extra taps (e.g. circulator leakage) are merged as given.
    """
    distances_m = list(distances_m)
    extra = list(extra_taps)
    if not distances_m and not extra:
        raise ValueError("no reflectors and no extra taps")
    taps = list(extra)
    for d in distances_m:
        if d <= 0:
            raise ValueError("reflector distances must be positive")
        rt = 2.0 * d
        taps.append(ChannelTap(gain=float(np.sqrt(path_loss(model, rt))),
                               delay_s=rt / SPEED_OF_LIGHT))
    return MultipathChannel(taps=tuple(taps), carrier_hz=carrier_hz, tx_gain=tx_gain)


def fractional_delay(signal: BasebandSignal, delay_s: float) -> BasebandSignal:
    """Circular sub-sample delay via a frequency-domain phase ramp.

    Exact for the bandlimited periodic extension of the frame; an integer
    sample delay reduces to a circular shift.
    """
    if abs(delay_s) > MAX_DELAY_FRACTION * signal.duration_s:
        raise ValueError("delay exceeds 10% of the signal duration")
    x = signal.samples
    if delay_s == 0.0:
        return signal
    freqs = np.fft.fftfreq(len(x), d=1.0 / signal.sample_rate_hz)
    ramp = np.exp(-2j * np.pi * freqs * delay_s)
    y = np.fft.ifft(np.fft.fft(x) * ramp)
    return make_signal(y, signal.sample_rate_hz)


def apply_channel(channel: MultipathChannel, x: BasebandSignal) -> BasebandSignal:
    """Baseband-equivalent SI: sqrt(G_t) * sum_k a_k e^{-j2 pi f_c tau_k} x(t - tau_k)."""
    if channel.carrier_hz < 2.5 * x.sample_rate_hz:
        raise ValueError("carrier must be >> signal bandwidth (f_c >= 10 W)")
    acc = np.zeros(len(x), dtype=np.complex128)
    for tap in channel.taps:
        phase = np.exp(-2j * np.pi * channel.carrier_hz * tap.delay_s)
        acc += tap.gain * phase * fractional_delay(x, tap.delay_s).samples
    acc *= np.sqrt(channel.tx_gain)
    return make_signal(acc, x.sample_rate_hz)


def impair(rx: BasebandSignal, imp: ReceiverImpairments, seed: int = 0) -> BasebandSignal:
    """Receiver chain: sub-sample offset, complex AWGN, then I/Q quantization.

    The ADC full scale is ADC_FULLSCALE_RMS times the pre-quantizer RMS.
    """
    y = rx
    if imp.sample_offset != 0.0:
        y = fractional_delay(y, imp.sample_offset)
    samples = y.samples.copy()
    if imp.noise_power > 0.0:
        rng = np.random.default_rng(seed)
        scale = np.sqrt(imp.noise_power / 2.0)
        samples = samples + scale * (rng.standard_normal(len(samples))
                                     + 1j * rng.standard_normal(len(samples)))
    if imp.adc_bits != 0:
        rms = np.sqrt(np.mean(np.abs(samples) ** 2))
        if rms > 0:
            full_scale = ADC_FULLSCALE_RMS * rms
            step = 2.0 * full_scale / (1 << imp.adc_bits)
            def q(v):
                return np.clip(np.round(v / step) * step,
                               -full_scale, full_scale - step)
            samples = q(samples.real) + 1j * q(samples.imag)
    return make_signal(samples, rx.sample_rate_hz)
