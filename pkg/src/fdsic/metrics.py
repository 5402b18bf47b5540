"""Measurement utilities: cancellation ratios, Welch PSDs, and the
residual-slope diagnostic that evidences a derivative-shaped residual.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import signal as sp_signal

from .signals import BasebandSignal

CANCELLATION_CAP_DB = 200.0


@dataclass(frozen=True)
class Psd:
    freqs_hz: np.ndarray
    power_db: np.ndarray
    rbw_hz: float

    def __post_init__(self):
        f = np.asarray(self.freqs_hz, dtype=float)
        p = np.asarray(self.power_db, dtype=float)
        if len(f) != len(p):
            raise ValueError("frequency and power lengths differ")
        if np.any(np.diff(f) <= 0):
            raise ValueError("frequencies must be strictly increasing")
        object.__setattr__(self, "freqs_hz", f)
        object.__setattr__(self, "power_db", p)

    @property
    def power_linear(self) -> np.ndarray:
        return 10.0 ** (self.power_db / 10.0)


def cancellation_db(before: BasebandSignal, after: BasebandSignal) -> float:
    """10 log10(P_before / P_after); positive when power was removed."""
    pb = float(np.mean(np.abs(before.samples) ** 2))
    pa = float(np.mean(np.abs(after.samples) ** 2))
    if pb == 0:
        raise ValueError("zero before-power")
    if pa == 0:
        return CANCELLATION_CAP_DB
    return float(min(10.0 * np.log10(pb / pa), CANCELLATION_CAP_DB))


def psd(signal: BasebandSignal, segment_len: int = 1024,
        overlap: int | None = None) -> Psd:
    """Two-sided Hann-windowed averaged periodogram (density scaling).

    Normalized so the integral over frequency equals the mean power.
    """
    n = len(signal)
    if segment_len < 2 or segment_len & (segment_len - 1):
        raise ValueError("segment_len must be a power of two")
    if segment_len > n:
        raise ValueError("segment_len exceeds the signal length")
    if overlap is None:
        overlap = segment_len // 2
    if not 0 <= overlap < segment_len:
        raise ValueError("overlap must be in [0, segment_len)")
    freqs, pxx = sp_signal.welch(signal.samples, fs=signal.sample_rate_hz,
                                 window="hann", nperseg=segment_len,
                                 noverlap=overlap, detrend=False,
                                 return_onesided=False, scaling="density")
    order = np.argsort(freqs)
    return Psd(freqs_hz=freqs[order],
               power_db=10.0 * np.log10(pxx[order] + 1e-300),
               rbw_hz=signal.sample_rate_hz / segment_len)


def slope_diagnostic(p: Psd, band: tuple) -> dict:
    """Fit linear-PSD amplitude against |f| over the band.

    A residual dominated by a derivative component has amplitude
    proportional to |f|; the fit quality (R^2) is the diagnostic. The
    returned slope is the fitted amplitude change expressed in power
    dB per decade between the band edges (20 for amplitude ~ |f|,
    0 for a flat spectrum).
    """
    f_lo, f_hi = band
    if f_lo <= 0 or f_hi <= f_lo:
        raise ValueError("band must satisfy 0 < f_lo < f_hi (DC excluded)")
    absf = np.abs(p.freqs_hz)
    mask = (absf >= f_lo) & (absf <= f_hi)
    if mask.sum() < 8:
        raise ValueError("too few PSD bins in the requested band")
    fv = absf[mask]
    amp = np.sqrt(p.power_linear[mask])
    m, b = np.polyfit(fv, amp, 1)
    fit = m * fv + b
    ss_res = float(np.sum((amp - fit) ** 2))
    ss_tot = float(np.sum((amp - amp.mean()) ** 2))
    r2 = 1.0 - ss_res / ss_tot if ss_tot > 0 else 0.0
    a_lo = max(m * f_lo + b, 1e-300)
    a_hi = max(m * f_hi + b, 1e-300)
    slope = 20.0 * np.log10(a_hi / a_lo) / np.log10(f_hi / f_lo)
    return {"r2": float(r2), "slope_db_per_decade": float(slope)}
