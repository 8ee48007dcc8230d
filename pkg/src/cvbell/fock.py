"""Truncated Fock-space brute force for the photon-counting Bell test.

Everything here is dense matrices over the product occupation basis of the
four modes (A_h, A_v, B_h, B_v), each truncated at ``cutoff`` photons.
Deliberately unoptimized: this module is the independent cross-check for
the Gaussian-moment analytics, so clarity beats speed (at the default
cutoff the space is 625-dimensional and nothing takes long anyway).
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .bell import PORT_PAIRS, AngleSet
from .errors import DegenerateSourceError

_NORM_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class FockState:
    """Pure state over the truncated 4-mode occupation basis.

    ``amplitudes`` has shape (cutoff+1,)*4 indexed by
    (n_Ah, n_Av, n_Bh, n_Bv) and unit norm.
    """

    cutoff: int
    amplitudes: np.ndarray

    def __post_init__(self):
        if self.cutoff < 1:
            raise ValueError("cutoff must be >= 1")
        amp = np.asarray(self.amplitudes, dtype=complex)
        want = (self.cutoff + 1,) * 4
        if amp.shape != want:
            raise ValueError(f"amplitudes must have shape {want}, got {amp.shape}")
        norm = np.linalg.norm(amp)
        if abs(norm - 1.0) > _NORM_TOL:
            raise ValueError(f"state norm {norm} is not 1")
        amp = amp.copy()
        amp.setflags(write=False)
        object.__setattr__(self, "amplitudes", amp)


def build_state(chi: float, cutoff: int = 4, exact: bool = True) -> FockState:
    """Source state at conversion strength ``chi`` (chi^2 = G - 1).

    ``exact`` builds the product of two two-mode squeezed vacua, one for
    the h pair and one for the v pair, with tanh(r) = chi/sqrt(1+chi^2),
    truncated and renormalized.  Otherwise the literal low-conversion
    two-photon approximation vac + chi/sqrt(2) (|1_h 1_h> + |1_v 1_v>) is
    returned (normalized).
    """
    if not 0.0 <= chi < 1.0:
        raise ValueError(f"chi must be in [0, 1), got {chi}")
    if cutoff < 1:
        raise ValueError("cutoff must be >= 1")
    dim = cutoff + 1
    amp = np.zeros((dim,) * 4, dtype=complex)
    if exact:
        lam = chi / np.sqrt(1.0 + chi**2)  # tanh of the squeeze parameter
        for n in range(dim):
            for m in range(dim):
                amp[n, m, n, m] = lam ** (n + m)
    else:
        amp[0, 0, 0, 0] = 1.0
        amp[1, 0, 1, 0] = chi / np.sqrt(2.0)
        amp[0, 1, 0, 1] = chi / np.sqrt(2.0)
    amp /= np.linalg.norm(amp)
    return FockState(cutoff=cutoff, amplitudes=amp)


def overlap(a: FockState, b: FockState) -> float:
    """|<a|b>| of two states on the same truncated basis."""
    if a.cutoff != b.cutoff:
        raise ValueError("states live on different cutoffs")
    return float(abs(np.vdot(a.amplitudes, b.amplitudes)))


@lru_cache(maxsize=4)
def annihilators(cutoff: int) -> tuple[np.ndarray, ...]:
    """Dense annihilation matrices for the four modes at this cutoff."""
    dim = cutoff + 1
    a1 = np.diag(np.sqrt(np.arange(1, dim)), 1).astype(complex)
    eye = np.eye(dim, dtype=complex)
    ops = []
    for mode in range(4):
        factors = [a1 if k == mode else eye for k in range(4)]
        op = factors[0]
        for f in factors[1:]:
            op = np.kron(op, f)
        op.setflags(write=False)
        ops.append(op)
    return tuple(ops)


def analyzer_ops(cutoff: int, theta_a: float, theta_b: float) -> dict[str, np.ndarray]:
    """Annihilators of the rotated ports: keys A+, A-, B+, B-."""
    a_h, a_v, b_h, b_v = annihilators(cutoff)
    ca, sa = np.cos(theta_a), np.sin(theta_a)
    cb, sb = np.cos(theta_b), np.sin(theta_b)
    return {
        "A+": ca * a_h + sa * a_v,
        "A-": ca * a_v - sa * a_h,
        "B+": cb * b_h + sb * b_v,
        "B-": cb * b_v - sb * b_h,
    }


def counting_R(state: FockState, theta_a: float, theta_b: float) -> dict[str, float]:
    """Coincidence rates <N_Ai N_Bj> for all four port pairs.

    The A and B port operators act on different tensor factors and commute,
    so <A^dag A B^dag B> = ||A B psi||^2, manifestly non-negative.
    """
    ops = analyzer_ops(state.cutoff, theta_a, theta_b)
    psi = state.amplitudes.reshape(-1)
    out = {}
    for pp in PORT_PAIRS:
        vec = ops["B" + pp[1]] @ psi
        vec = ops["A" + pp[0]] @ vec
        out[pp] = float(np.real(np.vdot(vec, vec)))
    return out


def counting_E(state: FockState, theta_a: float, theta_b: float) -> float:
    """Normalized photon-counting correlation E at one analyzer setting."""
    r = counting_R(state, theta_a, theta_b)
    denom = sum(r.values())
    if denom <= 1e-30:
        raise DegenerateSourceError(
            "no coincidences in the truncated state; counting statistics are 0/0"
        )
    return (r["++"] + r["--"] - r["+-"] - r["-+"]) / denom


def counting_B(state: FockState, angles: AngleSet) -> float:
    """CHSH combination of the four photon-counting E values."""
    e1 = counting_E(state, angles.theta_a, angles.theta_b)
    e2 = counting_E(state, angles.theta_a_prime, angles.theta_b_prime)
    e3 = counting_E(state, angles.theta_a_prime, angles.theta_b)
    e4 = counting_E(state, angles.theta_a, angles.theta_b_prime)
    return abs(e1 + e2 + e3 - e4)
