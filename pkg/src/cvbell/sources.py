"""The two parametric sources, built over the modes (A_h, A_v, B_h, B_v).

Both describe the same Gaussian state: a polarization nondegenerate
down-converter squeezing the h and v mode pairs directly, and a network of
four degenerate amplifiers whose outputs are pairwise combined on
pi/2-phase beamsplitters.  The two constructions give identical covariance
matrices at every gain, which is one of the package's tested invariants.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .gaussian import (
    GaussianState,
    apply,
    beamsplitter_pi2,
    mode_permutation,
    single_mode_squeeze,
    two_mode_squeeze,
    vacuum,
)

# Fixed mode layout used everywhere downstream.
A_H, A_V, B_H, B_V = 0, 1, 2, 3
MODE_NAMES = ("A_h", "A_v", "B_h", "B_v")
NUM_MODES = 4


class SourceKind(enum.Enum):
    DOWN_CONVERTER = "down-converter"
    FOUR_OPA_NETWORK = "four-opa"


@dataclass(frozen=True)
class SourceParams:
    """Which source to build and at what parametric gain (chi^2 = G - 1)."""

    kind: SourceKind
    gain: float

    def __post_init__(self):
        if self.gain < 1.0:
            raise ValueError(f"parametric gain must be >= 1, got {self.gain}")


def down_converter(gain: float) -> GaussianState:
    """Polarization nondegenerate down-converter at parametric gain ``gain``.

    Two-mode squeezes the (A_h, B_h) and (A_v, B_v) pairs of the four-mode
    vacuum.  At G -> 1 this reproduces the usual low-conversion pair source
    with chi = sqrt(G - 1).
    """
    state = vacuum(NUM_MODES)
    state = apply(state, two_mode_squeeze(A_H, B_H, gain, NUM_MODES))
    state = apply(state, two_mode_squeeze(A_V, B_V, gain, NUM_MODES))
    return state


def four_opa_network(gain: float) -> GaussianState:
    """Four degenerate amplifiers combined into a polarization-entangled state.

    Each amplifier squeezes a fresh vacuum mode f1..f4; (f1, f2) and
    (f3, f4) are combined on pi/2-phase beamsplitters into (a1, b1) and
    (a2, b2), and the outputs are relabeled a1 -> A_h, a2 -> A_v,
    b1 -> B_h, b2 -> B_v (the a2/b2 beams sit in the vertical polarization
    slot of each spatial beam).
    """
    state = vacuum(NUM_MODES)
    for f in range(4):
        state = apply(state, single_mode_squeeze(f, gain, NUM_MODES))
    state = apply(state, beamsplitter_pi2(0, 1, NUM_MODES))
    state = apply(state, beamsplitter_pi2(2, 3, NUM_MODES))
    # after the beamsplitters the modes are (a1, b1, a2, b2)
    return apply(state, mode_permutation((0, 2, 1, 3)))


def build_source(params: SourceParams) -> GaussianState:
    if params.kind is SourceKind.DOWN_CONVERTER:
        return down_converter(params.gain)
    return four_opa_network(params.gain)


def squeezed_variance(gain: float) -> float:
    """Variance of the squeezed quadrature of one amplifier, (sqrt(G)-sqrt(G-1))^2."""
    if gain < 1.0:
        raise ValueError(f"parametric gain must be >= 1, got {gain}")
    return (np.sqrt(gain) - np.sqrt(gain - 1.0)) ** 2


def squeezing_percent_from_gain(gain: float) -> float:
    """Percentage noise reduction below vacuum, 100 (1 - V_min)."""
    return 100.0 * (1.0 - squeezed_variance(gain))


def gain_from_squeezing_percent(percent: float) -> float:
    """Inverse of :func:`squeezing_percent_from_gain`; percent in [0, 100)."""
    if not 0.0 <= percent < 100.0:
        raise ValueError(f"percent squeezing must be in [0, 100), got {percent}")
    v_min = 1.0 - percent / 100.0
    return (v_min + 2.0 + 1.0 / v_min) / 4.0
