"""Shared helpers: random constructor-built operators and independent oracles."""

from __future__ import annotations

import numpy as np

from cvbell.gaussian import (
    GaussianState,
    SymplecticOp,
    apply,
    beamsplitter_pi2,
    polarization_rotation,
    single_mode_squeeze,
    two_mode_squeeze,
    vacuum,
)


def random_constructor_op(rng: np.random.Generator, num_modes: int) -> SymplecticOp:
    """One operator drawn from the package's constructors with random params."""
    i, j = rng.choice(num_modes, size=2, replace=False)
    kind = rng.integers(0, 4)
    if kind == 0:
        return two_mode_squeeze(int(i), int(j), 1.0 + 2.0 * rng.random(), num_modes)
    if kind == 1:
        return single_mode_squeeze(int(i), 1.0 + 2.0 * rng.random(), num_modes)
    if kind == 2:
        return polarization_rotation(rng.random() * 2 * np.pi, int(i), int(j), num_modes)
    return beamsplitter_pi2(int(i), int(j), num_modes)


def random_state(rng: np.random.Generator, num_modes: int, depth: int = 4) -> GaussianState:
    """A reachable state: vacuum pushed through random constructor ops."""
    state = vacuum(num_modes)
    for _ in range(depth):
        state = apply(state, random_constructor_op(rng, num_modes))
    return state


def pairings(items: list):
    """All perfect matchings of an even-length list (independent enumeration)."""
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for k, partner in enumerate(rest):
        remaining = rest[:k] + rest[k + 1 :]
        for tail in pairings(remaining):
            yield [(first, partner)] + tail


def isserlis_oracle(cov: np.ndarray, flat_indices: list[int]) -> float:
    """Zero-mean Gaussian moment by explicit pairing enumeration."""
    total = 0.0
    for matching in pairings(flat_indices):
        term = 1.0
        for a, b in matching:
            term *= cov[a, b]
        total += term
    return total
