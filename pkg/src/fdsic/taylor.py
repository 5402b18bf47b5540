"""Linearized channel coefficients and the analytic error budget.

A multipath SI channel acting on a narrowband signal collapses to
H(f) = C0 + C1 f, with higher orders C_n available when more accuracy is
needed. C_n absorbs the 1/n! factor, so a reconstruction multiplies plain
time derivatives.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import factorial

import numpy as np

from .channel import MultipathChannel, ChannelTap, PathLossModel, path_loss, SPEED_OF_LIGHT
from .signals import BasebandSignal, make_signal

MAX_ORDER = 4

# Leading constant of the first-order error-power bound for unit-power
# sinc-pulse signals: E|error|^2 <= LEMMA_CONST * a^2 (tau/T)^4.
LEMMA_CONST = 0.075

# Empirical leading constant for the second-order remainder, calibrated with
# the exact-delay oracle (asymptotic value 1/252 ~ 0.003968, rounded up).
ORDER2_CONST = 0.0045


@dataclass(frozen=True)
class TaylorChannel:
    """Complex coefficients C_0..C_n of the linearized channel."""

    coeffs: tuple

    def __post_init__(self):
        coeffs = tuple(complex(c) for c in self.coeffs)
        if not 1 <= len(coeffs) <= MAX_ORDER + 1:
            raise ValueError(f"order must be in [0, {MAX_ORDER}]")
        object.__setattr__(self, "coeffs", coeffs)

    @property
    def order(self) -> int:
        return len(self.coeffs) - 1


@dataclass(frozen=True)
class ErrorBudget:
    per_tap_bound: tuple   # linear power per tap
    total_bound: float     # sum of per-tap bounds

    def __post_init__(self):
        if abs(self.total_bound - sum(self.per_tap_bound)) > 1e-12 * max(self.total_bound, 1e-300):
            raise ValueError("total_bound must equal the sum of per-tap bounds")


def taylor_coeffs(channel: MultipathChannel, order: int) -> TaylorChannel:
    """C_n = sum_k (a_k tau_k^n / n!) e^{-j 2 pi f_c tau_k}, n = 0..order."""
    if order < 0:
        raise ValueError("order must be >= 0")
    if order > MAX_ORDER:
        raise ValueError(f"order capped at {MAX_ORDER}")
    coeffs = []
    for n in range(order + 1):
        c = 0.0 + 0.0j
        for tap in channel.taps:
            c += (tap.gain * tap.delay_s ** n / factorial(n)
                  * np.exp(-2j * np.pi * channel.carrier_hz * tap.delay_s))
        coeffs.append(c)
    return TaylorChannel(coeffs=tuple(coeffs))


def reconstruct(tc: TaylorChannel, x: BasebandSignal, derivatives=()) -> BasebandSignal:
    """Model-side SI: sum_n (-1)^n C_n x^(n)(t), alternating signs.

    derivatives[i] must hold the (i+1)-th time derivative of x, in units of
    1/s^(i+1); C_n already contains the 1/n! factor.
    """
    if len(derivatives) < tc.order:
        raise ValueError(f"need {tc.order} derivative(s), got {len(derivatives)}")
    acc = tc.coeffs[0] * x.samples
    for n in range(1, tc.order + 1):
        d = derivatives[n - 1]
        samples = d.samples if isinstance(d, BasebandSignal) else np.asarray(d)
        if len(samples) != len(x.samples):
            raise ValueError("derivative length mismatch")
        acc = acc + (-1) ** n * tc.coeffs[n] * samples
    return make_signal(acc, x.sample_rate_hz)


def lemma_bound(tap: ChannelTap, symbol_T: float, pulse: str = "sinc") -> float:
    """First-order error-power bound 0.075 a^2 (tau/T)^4 for one tap.

    Derived for sinc pulses; for other pulses the same figure is reported but
    carries no guarantee (callers should treat it as indicative only).
    """
    if symbol_T <= 0:
        raise ValueError("symbol duration must be positive")
    return LEMMA_CONST * tap.gain ** 2 * (tap.delay_s / symbol_T) ** 4


def total_error_budget(channel: MultipathChannel, symbol_T: float,
                       order: int = 1) -> ErrorBudget:
    """Per-tap and summed error-power budget of the order-n approximation.

    Order 1 uses the exact sinc-pulse constant; order 2 uses the same form
    with exponent 6 and an oracle-calibrated upper-estimate constant.
    """
    if order == 1:
        const, expo = LEMMA_CONST, 4
    elif order == 2:
        const, expo = ORDER2_CONST, 6
    else:
        raise ValueError("order must be 1 or 2")
    if symbol_T <= 0:
        raise ValueError("symbol duration must be positive")
    per_tap = tuple(const * t.gain ** 2 * (t.delay_s / symbol_T) ** expo
                    for t in channel.taps)
    return ErrorBudget(per_tap_bound=per_tap, total_bound=float(sum(per_tap)))


def distance_error_curve(model: PathLossModel, symbol_T: float, distances_m):
    """Per-distance error contribution loss(d) * (d / (cT))^4, in dB.

    d is the round-trip path length; loss(d) is the power gain a^2 of a path
    of that length, so each point is the a^2 (tau/T)^4 factor of the error
    budget expressed against distance.
    """
    if symbol_T <= 0:
        raise ValueError("symbol duration must be positive")
    out = []
    for d in distances_m:
        if d <= 0:
            raise ValueError("distances must be positive")
        val = path_loss(model, d) * (d / (SPEED_OF_LIGHT * symbol_T)) ** 4
        out.append((float(d), float(10.0 * np.log10(val))))
    return out
