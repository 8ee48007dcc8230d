"""Multimode Gaussian states and symplectic quadrature transformations.

Each optical mode carries the conjugate quadrature pair X1 = a + a^dag
(in-phase) and X2 = i(a^dag - a) (out-of-phase), stored mode-major as
(X_{0;1}, X_{0;2}, X_{1;1}, X_{1;2}, ...).  With this normalization the
vacuum has unit variance in every quadrature and [X1, X2] = 2i, encoded by
the block-diagonal symplectic form Omega with 2x2 blocks [[0, 1], [-1, 0]].

States are zero-mean throughout: for bright macroscopic beams the carrier
is absorbed into the fluctuation operators, so a state is fully described
by its real symmetric covariance matrix of symmetric-ordered (Wigner)
moments.  All operations are pure functions returning new values; nothing
here mutates shared state.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

# Construction-time guards.  Structural test invariants are tighter (1e-10
# to 1e-12); these only catch outright misuse.
_SYMMETRY_TOL = 1e-12
_SYMPLECTIC_TOL = 1e-9


class QuadratureIndex(NamedTuple):
    """Addresses one quadrature of one mode; ``quad`` is 1 or 2."""

    mode: int
    quad: int


def symplectic_form(num_modes: int) -> np.ndarray:
    """Return the 2N x 2N symplectic form for ``num_modes`` modes."""
    omega = np.zeros((2 * num_modes, 2 * num_modes))
    for k in range(num_modes):
        omega[2 * k, 2 * k + 1] = 1.0
        omega[2 * k + 1, 2 * k] = -1.0
    return omega


def _readonly(arr: np.ndarray) -> np.ndarray:
    out = np.array(arr, dtype=float)
    out.setflags(write=False)
    return out


@dataclass(frozen=True, eq=False)
class GaussianState:
    """Zero-mean Gaussian state of ``num_modes`` modes.

    ``cov`` is the 2N x 2N matrix of symmetric-ordered second moments
    <X_i X_j> in the mode-major quadrature order described in the module
    docstring; the vacuum is the identity.
    """

    num_modes: int
    cov: np.ndarray

    def __post_init__(self):
        if self.num_modes < 1:
            raise ValueError("num_modes must be >= 1")
        cov = np.asarray(self.cov, dtype=float)
        n = 2 * self.num_modes
        if cov.shape != (n, n):
            raise ValueError(f"covariance must be {n}x{n}, got {cov.shape}")
        if not np.all(np.isfinite(cov)):
            raise ValueError("covariance contains non-finite entries")
        asym = np.max(np.abs(cov - cov.T))
        if asym > _SYMMETRY_TOL:
            raise ValueError(f"covariance asymmetric by {asym:.3e}")
        object.__setattr__(self, "cov", _readonly(cov))

    def index(self, idx: QuadratureIndex | tuple[int, int]) -> int:
        """Flat row/column of a (mode, quad) pair in ``cov``."""
        mode, quad = idx
        if quad not in (1, 2):
            raise ValueError(f"quad must be 1 or 2, got {quad}")
        if not 0 <= mode < self.num_modes:
            raise ValueError(f"mode {mode} out of range for {self.num_modes} modes")
        return 2 * mode + quad - 1


@dataclass(frozen=True, eq=False)
class SymplecticOp:
    """Linear quadrature map X -> mat @ X preserving the symplectic form."""

    mat: np.ndarray

    def __post_init__(self):
        mat = np.asarray(self.mat, dtype=float)
        if mat.ndim != 2 or mat.shape[0] != mat.shape[1] or mat.shape[0] % 2:
            raise ValueError(f"symplectic matrix must be square 2Nx2N, got {mat.shape}")
        omega = symplectic_form(mat.shape[0] // 2)
        defect = np.max(np.abs(mat @ omega @ mat.T - omega))
        if defect > _SYMPLECTIC_TOL:
            raise ValueError(f"matrix violates the symplectic condition by {defect:.3e}")
        object.__setattr__(self, "mat", _readonly(mat))

    @property
    def num_modes(self) -> int:
        return self.mat.shape[0] // 2

    def inverse(self) -> "SymplecticOp":
        """Group inverse, S^-1 = -Omega S^T Omega."""
        omega = symplectic_form(self.num_modes)
        return SymplecticOp(-omega @ self.mat.T @ omega)


def vacuum(num_modes: int) -> GaussianState:
    """Vacuum state: identity covariance, every quadrature at unit variance."""
    if num_modes < 1:
        raise ValueError("need at least one mode")
    return GaussianState(num_modes, np.eye(2 * num_modes))


def apply(state: GaussianState, op: SymplecticOp) -> GaussianState:
    """Evolve ``state`` under ``op``: cov' = S cov S^T."""
    if op.num_modes != state.num_modes:
        raise ValueError(
            f"operator acts on {op.num_modes} modes, state has {state.num_modes}"
        )
    cov = op.mat @ state.cov @ op.mat.T
    cov = 0.5 * (cov + cov.T)
    return GaussianState(state.num_modes, cov)


def _resolve_size(num_modes: int | None, *modes: int) -> int:
    n = max(modes) + 1 if num_modes is None else num_modes
    for m in modes:
        if not 0 <= m < n:
            raise ValueError(f"mode {m} out of range for {n} modes")
    return n


def identity_op(num_modes: int) -> SymplecticOp:
    return SymplecticOp(np.eye(2 * num_modes))


def two_mode_squeeze(i: int, j: int, gain: float, num_modes: int | None = None) -> SymplecticOp:
    """Nondegenerate parametric amplifier coupling modes ``i`` and ``j``.

    Operator map a_i -> sqrt(G) a_i + sqrt(G-1) a_j^dag (and symmetrically
    for j), i.e. X_{i;1}' = sqrt(G) X_{i;1} + sqrt(G-1) X_{j;1} and
    X_{i;2}' = sqrt(G) X_{i;2} - sqrt(G-1) X_{j;2}.  Exactly symplectic at
    every gain since sqrt(G) and sqrt(G-1) are a cosh/sinh pair.
    """
    if i == j:
        raise ValueError("two-mode squeezer needs two distinct modes")
    if gain < 1.0:
        raise ValueError(f"parametric gain must be >= 1, got {gain}")
    n = _resolve_size(num_modes, i, j)
    c = np.sqrt(gain)
    s = np.sqrt(gain - 1.0)
    mat = np.eye(2 * n)
    for a, b in ((i, j), (j, i)):
        mat[2 * a, 2 * a] = c
        mat[2 * a, 2 * b] = s
        mat[2 * a + 1, 2 * a + 1] = c
        mat[2 * a + 1, 2 * b + 1] = -s
    return SymplecticOp(mat)


def single_mode_squeeze(mode: int, gain: float, num_modes: int | None = None) -> SymplecticOp:
    """Degenerate parametric amplifier f -> sqrt(G) f + sqrt(G-1) f^dag.

    Stretches X1 by sqrt(G)+sqrt(G-1) and shrinks X2 by its reciprocal.
    """
    if gain < 1.0:
        raise ValueError(f"parametric gain must be >= 1, got {gain}")
    n = _resolve_size(num_modes, mode)
    stretch = np.sqrt(gain) + np.sqrt(gain - 1.0)
    mat = np.eye(2 * n)
    mat[2 * mode, 2 * mode] = stretch
    mat[2 * mode + 1, 2 * mode + 1] = 1.0 / stretch
    return SymplecticOp(mat)


def polarization_rotation(
    theta: float, mode_h: int, mode_v: int, num_modes: int | None = None
) -> SymplecticOp:
    """Analyzer rotation into the (+, -) polarization basis.

    A_+ = cos(theta) A_h + sin(theta) A_v and A_- = cos(theta) A_v -
    sin(theta) A_h; the plus port lands in the ``mode_h`` slot, the minus
    port in the ``mode_v`` slot.  Acts identically on both quadratures.
    """
    if mode_h == mode_v:
        raise ValueError("polarization rotation needs two distinct modes")
    n = _resolve_size(num_modes, mode_h, mode_v)
    c, s = np.cos(theta), np.sin(theta)
    mat = np.eye(2 * n)
    for q in (0, 1):
        h, v = 2 * mode_h + q, 2 * mode_v + q
        mat[h, h] = c
        mat[h, v] = s
        mat[v, v] = c
        mat[v, h] = -s
    return SymplecticOp(mat)


def beamsplitter_pi2(i: int, j: int, num_modes: int | None = None) -> SymplecticOp:
    """Balanced beamsplitter with a pi/2 relative phase.

    Operator map a_i' = (a_i + i a_j)/sqrt(2), a_j' = (a_i - i a_j)/sqrt(2),
    which on quadratures reads X_{i;1}' = (X_{i;1} - X_{j;2})/sqrt(2),
    X_{i;2}' = (X_{i;2} + X_{j;1})/sqrt(2), X_{j;1}' = (X_{i;1} +
    X_{j;2})/sqrt(2), X_{j;2}' = (X_{i;2} - X_{j;1})/sqrt(2).
    """
    if i == j:
        raise ValueError("beamsplitter needs two distinct modes")
    n = _resolve_size(num_modes, i, j)
    r = 1.0 / np.sqrt(2.0)
    mat = np.eye(2 * n)
    i1, i2, j1, j2 = 2 * i, 2 * i + 1, 2 * j, 2 * j + 1
    for row in (i1, i2, j1, j2):
        mat[row, row] = 0.0
    mat[i1, i1] = r
    mat[i1, j2] = -r
    mat[i2, i2] = r
    mat[i2, j1] = r
    mat[j1, i1] = r
    mat[j1, j2] = r
    mat[j2, i2] = r
    mat[j2, j1] = -r
    return SymplecticOp(mat)


def mode_permutation(new_to_old: Sequence[int]) -> SymplecticOp:
    """Relabeling op: new mode k is old mode ``new_to_old[k]``."""
    order = list(new_to_old)
    if sorted(order) != list(range(len(order))):
        raise ValueError(f"not a permutation of 0..{len(order) - 1}: {order}")
    n = len(order)
    mat = np.zeros((2 * n, 2 * n))
    for new, old in enumerate(order):
        for q in (0, 1):
            mat[2 * new + q, 2 * old + q] = 1.0
    return SymplecticOp(mat)


def reduce_to_modes(state: GaussianState, modes: Sequence[int]) -> GaussianState:
    """Marginal state on ``modes``: covariance sub-block extraction."""
    modes = list(modes)
    if len(set(modes)) != len(modes) or not modes:
        raise ValueError(f"modes must be distinct and non-empty, got {modes}")
    rows = []
    for m in modes:
        if not 0 <= m < state.num_modes:
            raise ValueError(f"mode {m} out of range")
        rows += [2 * m, 2 * m + 1]
    idx = np.asarray(rows)
    return GaussianState(len(modes), state.cov[np.ix_(idx, idx)])


def second_moment(
    state: GaussianState,
    a: QuadratureIndex | tuple[int, int],
    b: QuadratureIndex | tuple[int, int],
) -> float:
    """Symmetric-ordered moment <X_a X_b>, i.e. one covariance entry."""
    return float(state.cov[state.index(a), state.index(b)])


def fourth_moment(
    state: GaussianState, idx: Sequence[QuadratureIndex | tuple[int, int]]
) -> float:
    """<x1 x2 x3 x4> for zero-mean Gaussian variables: the three pairings
    V12 V34 + V13 V24 + V14 V23 of second moments."""
    if len(idx) != 4:
        raise ValueError(f"need exactly 4 indices, got {len(idx)}")
    k = [state.index(i) for i in idx]
    c = state.cov
    return float(
        c[k[0], k[1]] * c[k[2], k[3]]
        + c[k[0], k[2]] * c[k[1], k[3]]
        + c[k[0], k[3]] * c[k[1], k[2]]
    )


def uncertainty_defect(state: GaussianState) -> float:
    """Smallest eigenvalue of cov + i Omega.

    A physical state has cov + i Omega >= 0; values above roughly -1e-10
    certify the uncertainty relation within numerical noise.
    """
    herm = state.cov + 1j * symplectic_form(state.num_modes)
    return float(np.linalg.eigvalsh(herm)[0])


def symplectic_defect(op: SymplecticOp) -> float:
    """Max-norm deviation of S Omega S^T from Omega."""
    omega = symplectic_form(op.num_modes)
    return float(np.max(np.abs(op.mat @ omega @ op.mat.T - omega)))
