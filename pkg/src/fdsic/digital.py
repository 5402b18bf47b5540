"""Digital-domain cancellation: derivative FIR filters, least-squares
coefficient estimation, reconstruction/subtraction, and complexity counts.

The received residual is modelled as y ~ a0 x - c1 x' + c2 x'' with x', x''
obtained by short FIR differentiators on the known transmit samples; the
coefficients come from a direct 2x2 or 3x3 normal-equation solve.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .signals import BasebandSignal, make_signal

# Exact tap numerators / denominators; divide at use, not at storage.
_FILTER_TABLE = {
    "d1_3tap": ([-1, 0, 1], 1),
    "d1_9tap": ([3, -32, 168, -672, 0, 672, -168, 32, -3], 840),
    "d2_9tap": ([1, 4, 4, -4, 10, -4, 4, 4, 1], 64),
}

# Minimum oversampling for the differentiators to act inside their accurate
# band.
MIN_OVERSAMPLING = 4

MIN_FIT_SAMPLES = 100

CONDITION_LIMIT = 1e12


class IllConditionedFitError(ValueError):
    """Gram matrix of the normal equations is numerically singular."""


@dataclass(frozen=True)
class DerivativeFilter:
    kind: str

    def __post_init__(self):
        if self.kind not in _FILTER_TABLE:
            raise ValueError(f"unknown filter kind {self.kind!r}")

    @property
    def tap_fractions(self) -> tuple:
        nums, den = _FILTER_TABLE[self.kind]
        return tuple(Fraction(n, den) for n in nums)

    @property
    def taps(self) -> np.ndarray:
        nums, den = _FILTER_TABLE[self.kind]
        return np.asarray(nums, dtype=float) / den

    def __len__(self) -> int:
        return len(_FILTER_TABLE[self.kind][0])


D1_3TAP = DerivativeFilter("d1_3tap")
D1_9TAP = DerivativeFilter("d1_9tap")
D2_9TAP = DerivativeFilter("d2_9tap")


@dataclass(frozen=True)
class LsEstimate:
    """Fitted coefficients of the model y ~ a0 x - c1 x' (+ c2 x'')."""

    a0: complex
    c1: complex
    order: int
    residual_power_db: float
    c2: complex | None = None

    def __post_init__(self):
        if self.order not in (1, 2):
            raise ValueError("order must be 1 or 2")
        if self.order == 1 and self.c2 is not None:
            raise ValueError("order-1 estimate must not carry c2")
        if self.order == 2 and self.c2 is None:
            raise ValueError("order-2 estimate requires c2")


def deriv_filter(x: BasebandSignal, f: DerivativeFilter) -> BasebandSignal:
    """Centre-aligned differentiation of the sample stream.

    The tap list is applied so that y[n] = sum_k taps[k] x[n + k - centre]
    (a ramp through d1_3tap yields +2); edges use the zero-padding
    convention and must be excluded by callers.
    """
    if len(x) <= len(f):
        raise ValueError("signal must be longer than the filter")
    y = np.convolve(x.samples, f.taps[::-1], mode="same")
    return make_signal(y, x.sample_rate_hz)


def filter_response(f: DerivativeFilter, normalized_freq_grid) -> np.ndarray:
    """DTFT of the applied filter on a grid of cycles/sample in [0, 0.5]."""
    grid = np.asarray(normalized_freq_grid, dtype=float)
    if grid.size and (grid.min() < 0 or grid.max() > 0.5):
        raise ValueError("grid must lie in [0, 0.5] cycles/sample")
    taps = f.taps
    k = np.arange(len(taps)) - (len(taps) - 1) // 2
    return (taps * np.exp(2j * np.pi * np.outer(grid, k))).sum(axis=-1)


def _design_columns(x: BasebandSignal, order: int, filters) -> list:
    cols = [x.samples]
    d1 = deriv_filter(x, filters[0]).samples
    cols.append(-d1)
    if order == 2:
        d2 = deriv_filter(x, filters[1]).samples
        cols.append(d2)
    return cols


def edge_margin(order: int, filters=(D1_9TAP, D2_9TAP)) -> int:
    m = len(filters[0]) // 2
    if order == 2:
        m = max(m, len(filters[1]) // 2)
    return m


def ls_fit(y: BasebandSignal, x: BasebandSignal, order: int,
           filters=(D1_9TAP, D2_9TAP)) -> LsEstimate:
    """Solve the normal equations for (a0, c1[, c2]) on the aligned window.

    Samples within half a filter length of either end are excluded from both
    the fit and the reported residual. Raises IllConditionedFitError when
    the Gram matrix condition number exceeds 1e12.
    """
    if order not in (1, 2):
        raise ValueError("order must be 1 or 2")
    if len(y) != len(x):
        raise ValueError("y and x must be aligned and equal length")
    if len(x) < MIN_FIT_SAMPLES:
        raise ValueError(f"need at least {MIN_FIT_SAMPLES} samples")
    if x.mean_power == 0:
        raise ValueError("x has zero power")

    cols = _design_columns(x, order, filters)
    m = edge_margin(order, filters)
    sl = slice(m, len(x.samples) - m)
    a = np.stack([c[sl] for c in cols], axis=1)
    b = y.samples[sl]

    gram = a.conj().T @ a
    if np.linalg.cond(gram) > CONDITION_LIMIT:
        raise IllConditionedFitError("normal equations are ill-conditioned")
    coef = np.linalg.solve(gram, a.conj().T @ b)
    resid = b - a @ coef
    resid_db = float(10.0 * np.log10(np.mean(np.abs(resid) ** 2) + 1e-300))
    if order == 1:
        return LsEstimate(a0=complex(coef[0]), c1=complex(coef[1]),
                          order=1, residual_power_db=resid_db)
    return LsEstimate(a0=complex(coef[0]), c1=complex(coef[1]),
                      c2=complex(coef[2]), order=2, residual_power_db=resid_db)


def reconstruct_si(x: BasebandSignal, est: LsEstimate,
                   filters=(D1_9TAP, D2_9TAP)) -> BasebandSignal:
    """a0 x - c1 x' (+ c2 x'') using the same filters as the fit."""
    cols = _design_columns(x, est.order, filters)
    coef = [est.a0, est.c1] + ([est.c2] if est.order == 2 else [])
    acc = np.zeros(len(x.samples), dtype=np.complex128)
    for c, col in zip(coef, cols):
        acc += c * col
    return make_signal(acc, x.sample_rate_hz)


def cancel(y: BasebandSignal, x: BasebandSignal, est: LsEstimate,
           filters=(D1_9TAP, D2_9TAP)) -> BasebandSignal:
    """Subtract the reconstructed SI from the received samples.

    Intended for evaluation outside the training window; the filter edge
    margin still applies at the array ends.
    """
    if len(y) != len(x):
        raise ValueError("y and x must be aligned and equal length")
    si_hat = reconstruct_si(x, est, filters)
    return make_signal(y.samples - si_hat.samples, y.sample_rate_hz)


def complexity(n: int, filter_len: int, tapline_taps: int) -> dict:
    """Complex-operation counts for a training block of N samples.

    proposed_ops          : 4N + 8 (coefficient estimation alone)
    proposed_with_filter  : (2L + 4)N + 8 including the derivative filter
    tapline_ops           : 2KN + 2K^2 for a K-tap delay-line estimator
    """
    if n <= 0 or filter_len <= 0 or tapline_taps <= 0:
        raise ValueError("arguments must be positive integers")
    return {
        "proposed_ops": 4 * n + 8,
        "proposed_with_filter": (2 * filter_len + 4) * n + 8,
        "tapline_ops": 2 * tapline_taps * n + 2 * tapline_taps ** 2,
    }
