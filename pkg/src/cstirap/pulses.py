"""Pulse envelopes and pump-Stokes pair geometry.

Everything is dimensionless: times in units of the pulse width T, Rabi
frequencies in units of 1/T (hbar = 1). Envelopes are real; complex
character enters only through the per-pair phase factors.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from enum import Enum

import numpy as np

# Gaussian tails below peak*e^-25 are dynamically negligible, so each
# Gaussian is integrated on [center - 5T, center + 5T].
GAUSSIAN_CUTOFF = 5.0


class ShapeKind(Enum):
    GAUSSIAN = "gaussian"
    SINE_SQUARED = "sin2"


@dataclass(frozen=True)
class PulseShape:
    """One envelope: a Gaussian centered at `center_or_start`, or a sin^2
    hump supported on [center_or_start, center_or_start + width]."""

    kind: ShapeKind
    peak: float
    width: float
    center_or_start: float = 0.0

    def __post_init__(self):
        if self.peak < 0:
            raise ValueError("peak Rabi frequency must be >= 0")
        if not self.width > 0:
            raise ValueError("pulse width must be > 0")


@dataclass(frozen=True)
class PulsePair:
    """A pump-Stokes pair with per-field phases.

    With reversed=False the Stokes envelope peaks a delay tau before the
    pump one (counterintuitive STIRAP ordering). reversed=True exchanges
    the two envelopes in time; the phases stay attached to their fields.
    """

    pump: PulseShape
    stokes: PulseShape
    delay: float
    pump_phase: float = 0.0
    stokes_phase: float = 0.0
    reversed: bool = False

    def __post_init__(self):
        if not self.delay > 0:
            raise ValueError("delay must be > 0")


def envelope(shape: PulseShape, t):
    """Real envelope value(s) at time t (scalar or array)."""
    if shape.kind is ShapeKind.GAUSSIAN:
        x = (t - shape.center_or_start) / shape.width
        return shape.peak * np.exp(-x * x)
    x = (t - shape.center_or_start) / shape.width
    inside = (x >= 0.0) & (x <= 1.0)
    return np.where(inside, shape.peak * np.sin(np.pi * np.clip(x, 0.0, 1.0)) ** 2, 0.0)


def pair_envelopes(pair: PulsePair, t):
    """Complex (pump, Stokes) amplitudes at time t.

    Reversal swaps which envelope each field takes; the phase factors
    e^{i alpha}, e^{i beta} are applied per field, never swapped.
    """
    ep = envelope(pair.stokes if pair.reversed else pair.pump, t)
    es = envelope(pair.pump if pair.reversed else pair.stokes, t)
    return ep * np.exp(1j * pair.pump_phase), es * np.exp(1j * pair.stokes_phase)


def default_delay(kind: ShapeKind, width: float = 1.0) -> float:
    """tau = T for Gaussian pairs and T/pi for sin^2 pairs."""
    return width if kind is ShapeKind.GAUSSIAN else width / math.pi


def make_pair(kind: ShapeKind, peak: float, width: float = 1.0, delay: float | None = None,
              pump_phase: float = 0.0, stokes_phase: float = 0.0, reversed: bool = False,
              start: float = 0.0) -> PulsePair:
    """Build a pair in the standard geometry.

    sin^2: Stokes on [start, start+T], pump on [start+tau, start+T+tau].
    Gaussian: Stokes and pump centered at -tau/2 and +tau/2 around the
    midpoint of a [start, start + 2*cutoff*T + tau] window.
    """
    if delay is None:
        delay = default_delay(kind, width)
    if kind is ShapeKind.SINE_SQUARED:
        stokes = PulseShape(kind, peak, width, start)
        pump = PulseShape(kind, peak, width, start + delay)
    else:
        mid = start + GAUSSIAN_CUTOFF * width + delay / 2.0
        stokes = PulseShape(kind, peak, width, mid - delay / 2.0)
        pump = PulseShape(kind, peak, width, mid + delay / 2.0)
    return PulsePair(pump, stokes, delay, pump_phase, stokes_phase, reversed)


def window(pair: PulsePair) -> tuple[float, float]:
    """Integration window covering both envelopes of the pair."""
    if pair.pump.kind is ShapeKind.GAUSSIAN:
        lo = min(pair.pump.center_or_start, pair.stokes.center_or_start)
        hi = max(pair.pump.center_or_start, pair.stokes.center_or_start)
        pad = GAUSSIAN_CUTOFF * max(pair.pump.width, pair.stokes.width)
        return lo - pad, hi + pad
    lo = min(pair.pump.center_or_start, pair.stokes.center_or_start)
    hi = max(pair.pump.center_or_start + pair.pump.width,
             pair.stokes.center_or_start + pair.stokes.width)
    return lo, hi


def duration(pair: PulsePair) -> float:
    t0, t1 = window(pair)
    return t1 - t0


def translate(pair: PulsePair, dt: float) -> PulsePair:
    return replace(
        pair,
        pump=replace(pair.pump, center_or_start=pair.pump.center_or_start + dt),
        stokes=replace(pair.stokes, center_or_start=pair.stokes.center_or_start + dt),
    )


@dataclass(frozen=True)
class PulseTrain:
    """Back-to-back pulse pairs forming one composite sequence in time."""

    pairs: tuple[PulsePair, ...]

    def __post_init__(self):
        if not self.pairs:
            raise ValueError("train needs at least one pair")


def build_train(base: PulsePair, pump_phases, stokes_phases, alternate: bool,
                gap: float = 0.0) -> PulseTrain:
    """Lay out N phased copies of `base`, each shifted by one pair duration
    (+gap); with alternate=True every even pair has its envelopes swapped."""
    n = len(pump_phases)
    if len(stokes_phases) != n:
        raise ValueError("phase lists must have equal length")
    slot = duration(base) + gap
    pairs = []
    for k in range(n):
        p = translate(base, k * slot)
        p = replace(p, pump_phase=pump_phases[k], stokes_phase=stokes_phases[k],
                    reversed=base.reversed ^ (alternate and k % 2 == 1))
        pairs.append(p)
    return PulseTrain(tuple(pairs))


def train_envelopes(train: PulseTrain, t):
    """Complex (pump, Stokes) amplitudes of the whole train at time t."""
    ep = 0j
    es = 0j
    for p in train.pairs:
        a, b = pair_envelopes(p, t)
        ep = ep + a
        es = es + b
    return ep, es


def train_window(train: PulseTrain) -> tuple[float, float]:
    lows, highs = zip(*(window(p) for p in train.pairs))
    return min(lows), max(highs)
