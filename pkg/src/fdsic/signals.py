"""Baseband waveform generation: single-carrier (sinc/RRC pulse shaped) and OFDM.

The generated frames serve both as the known transmit reference and as the
source of self-interference in the simulator. All generators normalize to
unit mean power and are deterministic for a given seed.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

# Pulse shaping filters are truncated to +-PULSE_SPAN symbol durations with no
# windowing; the resulting sidelobe floor (< -50 dB) sits below every
# tolerance asserted downstream.
PULSE_SPAN = 16

# Fraction of the nominal half-bandwidth by which a truncated sinc pulse may
# spill past the brick-wall edge while still containing 99% of frame energy.
SINC_CONFINEMENT_EPS = 0.1

# Raised-cosine taper length (output samples) applied across OFDM symbol
# junctions via cyclic extension and overlap-add. Sized so the per-symbol
# window skirts fall fast enough to expose the DC notch (>40 dB down) and to
# keep the frame's out-of-band content far below every cancellation floor
# asserted downstream.
OFDM_JUNCTION_TAPER_FRACTION = 0.5  # of the FFT body length

# Carriers nulled on each side of DC (plus DC itself) so the notch is wider
# than the per-symbol spectral kernel.
OFDM_DC_GUARD = 2


@dataclass(frozen=True)
class SignalSpec:
    """Parameters of a generated baseband frame.

    kind: "single-carrier" or "ofdm".
    bandwidth_hz: nominal two-sided bandwidth W; the symbol duration is 1/W.
    oversampling: sample rate / W, integer >= 1.
    pulse: "sinc" or "rrc" (single-carrier only).
    rolloff: RRC roll-off in [0, 1].
    """

    kind: str = "ofdm"
    bandwidth_hz: float = 20e6
    oversampling: int = 4
    num_symbols: int = 12
    constellation: str = "qpsk4"
    pulse: str = "rrc"
    rolloff: float = 0.3
    ofdm_fft_size: int = 1024
    ofdm_used_carriers: int = 620
    seed: int = 0

    def __post_init__(self):
        if self.kind not in ("single-carrier", "ofdm"):
            raise ValueError(f"unknown signal kind {self.kind!r}")
        if self.bandwidth_hz <= 0:
            raise ValueError("bandwidth_hz must be positive")
        if self.oversampling < 1:
            raise ValueError("oversampling must be >= 1")
        if self.num_symbols < 1:
            raise ValueError("num_symbols must be >= 1")
        if self.constellation not in ("qpsk4", "qam16"):
            raise ValueError(f"unknown constellation {self.constellation!r}")
        if self.pulse not in ("sinc", "rrc"):
            raise ValueError(f"unknown pulse {self.pulse!r}")
        if not 0.0 <= self.rolloff <= 1.0:
            raise ValueError("rolloff must be in [0, 1]")
        if self.kind == "ofdm":
            if self.ofdm_used_carriers >= self.ofdm_fft_size:
                raise ValueError("ofdm_used_carriers must be < ofdm_fft_size")

    @property
    def symbol_duration_s(self) -> float:
        return 1.0 / self.bandwidth_hz

    @property
    def sample_rate_hz(self) -> float:
        return self.oversampling * self.bandwidth_hz


@dataclass(frozen=True)
class BasebandSignal:
    """Uniformly sampled complex baseband sequence."""

    samples: np.ndarray
    sample_rate_hz: float
    mean_power: float = field(default=0.0)

    def __post_init__(self):
        arr = np.asarray(self.samples, dtype=np.complex128)
        object.__setattr__(self, "samples", arr)
        if arr.size == 0:
            raise ValueError("empty sample sequence")
        if self.sample_rate_hz <= 0:
            raise ValueError("sample_rate_hz must be positive")
        p = float(np.mean(np.abs(arr) ** 2))
        if self.mean_power == 0.0:
            object.__setattr__(self, "mean_power", p)
        elif p > 0 and abs(self.mean_power - p) > 1e-12 * max(p, 1.0):
            raise ValueError("mean_power inconsistent with samples")

    def __len__(self) -> int:
        return len(self.samples)

    @property
    def duration_s(self) -> float:
        return len(self.samples) / self.sample_rate_hz


def make_signal(samples: np.ndarray, sample_rate_hz: float) -> BasebandSignal:
    """Wrap raw samples, computing the power metadata."""
    return BasebandSignal(samples=np.asarray(samples, dtype=np.complex128),
                          sample_rate_hz=sample_rate_hz)


def _draw_symbols(rng: np.random.Generator, n: int, constellation: str) -> np.ndarray:
    if constellation == "qpsk4":
        pts = (np.array([1 + 1j, 1 - 1j, -1 + 1j, -1 - 1j]) / np.sqrt(2.0))
    elif constellation == "qam16":
        levels = np.array([-3.0, -1.0, 1.0, 3.0])
        grid = (levels[:, None] + 1j * levels[None, :]).ravel()
        pts = grid / np.sqrt(np.mean(np.abs(grid) ** 2))
    else:
        raise ValueError(f"unknown constellation {constellation!r}")
    return pts[rng.integers(0, len(pts), size=n)]


def sinc_pulse(t: np.ndarray) -> np.ndarray:
    """Nyquist sinc pulse sin(pi t)/(pi t) with zeros at nonzero integers."""
    return np.sinc(np.asarray(t, dtype=float))


def rrc_pulse(t: np.ndarray, rolloff: float) -> np.ndarray:
    """Root-raised-cosine pulse, unit symbol duration, peak at t = 0."""
    t = np.asarray(t, dtype=float)
    b = rolloff
    out = np.empty_like(t)
    if b == 0.0:
        return np.sinc(t)
    # removable singularities at t = 0 and t = +-1/(4b)
    sing = np.isclose(np.abs(t), 1.0 / (4.0 * b), atol=1e-10)
    zero = np.isclose(t, 0.0, atol=1e-12)
    reg = ~(sing | zero)
    tr = t[reg]
    num = (np.sin(np.pi * tr * (1 - b))
           + 4 * b * tr * np.cos(np.pi * tr * (1 + b)))
    den = np.pi * tr * (1 - (4 * b * tr) ** 2)
    out[reg] = num / den
    out[zero] = 1 - b + 4 * b / np.pi
    out[sing] = (b / np.sqrt(2.0)) * ((1 + 2 / np.pi) * np.sin(np.pi / (4 * b))
                                      + (1 - 2 / np.pi) * np.cos(np.pi / (4 * b)))
    return out


def _normalize(x: np.ndarray) -> np.ndarray:
    p = np.mean(np.abs(x) ** 2)
    if p == 0:
        raise ValueError("cannot normalize an all-zero frame")
    return x / np.sqrt(p)


def gen_single_carrier(spec: SignalSpec) -> BasebandSignal:
    """Pulse-shaped symbol stream at rate oversampling * W, unit mean power.

    The frame carries the full truncated pulse tails: symbol m is centred at
    sample (PULSE_SPAN + m) * oversampling, and the frame length is
    (num_symbols + 2 * PULSE_SPAN) * oversampling samples.
    """
    if spec.kind != "single-carrier":
        raise ValueError("spec.kind must be 'single-carrier'")
    if spec.pulse == "sinc" and spec.oversampling < 2:
        raise ValueError("sinc pulse requires oversampling >= 2 "
                         "(derivative content would alias)")
    os_ = spec.oversampling
    rng = np.random.default_rng(spec.seed)
    syms = _draw_symbols(rng, spec.num_symbols, spec.constellation)

    n_taps = 2 * PULSE_SPAN * os_ + 1
    t = (np.arange(n_taps) - PULSE_SPAN * os_) / os_
    if spec.pulse == "sinc":
        h = sinc_pulse(t)
    else:
        h = rrc_pulse(t, spec.rolloff)

    train = np.zeros((spec.num_symbols - 1) * os_ + 1, dtype=np.complex128)
    train[::os_] = syms
    x = np.convolve(train, h.astype(np.complex128), mode="full")
    return make_signal(_normalize(x), spec.sample_rate_hz)


def _ofdm_used_bins(fft_size: int, used: int) -> np.ndarray:
    """Symmetric active-carrier indices; DC +- OFDM_DC_GUARD and the band
    edges stay nulled."""
    half = used // 2
    extra = used - 2 * half  # one extra positive carrier when used is odd
    lo = 1 + OFDM_DC_GUARD
    pos = np.arange(lo, lo + half + extra)
    neg = -np.arange(lo, lo + half)
    if pos.max() > fft_size // 2 - 1:
        raise ValueError("used carriers do not fit inside the FFT grid")
    return np.concatenate([pos, neg])


def gen_ofdm(spec: SignalSpec) -> BasebandSignal:
    """Windowed CP-OFDM frame at rate oversampling * W, unit mean power.

    Carriers occupy symmetric bins of the FFT grid (spacing W/fft_size) with
    DC +- OFDM_DC_GUARD and the outer band-edge bins nulled. Each symbol
    carries a cyclic prefix of fft_size/8 core samples and is cyclically
    extended with raised-cosine ramps that overlap-add into its neighbours
    (the last symbol wraps onto the first), so multi-symbol frames are
    exactly one period of a circularly continuous signal. Per-carrier
    content is untouched by the windowing; the symbol spacing stays
    body + cp. A lone symbol has no junctions and is emitted plain so a
    single active carrier stays a pure exponential.
    """
    if spec.kind != "ofdm":
        raise ValueError("spec.kind must be 'ofdm'")
    nfft = spec.ofdm_fft_size
    used = spec.ofdm_used_carriers
    os_ = spec.oversampling
    rng = np.random.default_rng(spec.seed)

    body = nfft * os_
    cp = (nfft // 8) * os_
    sym_len = body + cp
    taper = int(body * OFDM_JUNCTION_TAPER_FRACTION) if spec.num_symbols > 1 else 0
    bins = _ofdm_used_bins(nfft, used)

    if cp + taper > body:
        raise ValueError("taper plus cyclic prefix exceed the symbol body")
    ramp = 0.5 * (1 - np.cos(np.pi * (np.arange(taper) + 0.5) / taper)) if taper else np.zeros(0)
    frame = np.zeros(spec.num_symbols * sym_len, dtype=np.complex128)
    for s in range(spec.num_symbols):
        fd = np.zeros(body, dtype=np.complex128)
        fd[bins % body] = _draw_symbols(rng, used, spec.constellation)
        td = np.fft.ifft(fd) * np.sqrt(body)
        # cyclic head (ramp-up taper + CP), body, cyclic tail (ramp-down
        # taper); ramps overlap the neighbouring symbols on both sides
        ext = np.concatenate([td[body - cp - taper:], td, td[:taper]])
        win = np.ones(len(ext))
        if taper:
            win[:taper] = ramp
            win[-taper:] = ramp[::-1]
        start = s * sym_len - taper
        idx = (start + np.arange(len(ext))) % len(frame)
        np.add.at(frame, idx, ext * win)
    return make_signal(_normalize(frame), spec.sample_rate_hz)


def gen_frame(spec: SignalSpec) -> BasebandSignal:
    """Dispatch on spec.kind."""
    if spec.kind == "ofdm":
        return gen_ofdm(spec)
    return gen_single_carrier(spec)


def papr_db(signal: BasebandSignal) -> float:
    """Peak-to-average power ratio, 10 log10(max|x|^2 / mean|x|^2)."""
    x = signal.samples
    if x.size == 0:
        raise ValueError("empty signal")
    p = np.abs(x) ** 2
    mean = p.mean()
    if mean == 0:
        raise ValueError("zero-power signal")
    return float(10.0 * np.log10(p.max() / mean))
