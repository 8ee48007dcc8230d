"""Monte Carlo simulation of the synchronized homodyne measurement protocol.

Both observers share prearranged time windows.  In each window every site
independently picks one of its two analyzer angles and one of three
actions: a bright homodyne record of quadrature 1, of quadrature 2, or a
dark record taken with the signal blocked.  A site always reads both of
its analyzer ports (+ and -) in the same window.  Bright outcomes are
drawn from the symmetric-ordered (Wigner) Gaussian of the rotated source
state, which reproduces homodyne statistics exactly because the measured
port quadratures mutually commute; dark outcomes are independent
Gaussians at the dark variance.

The estimators rebuild the dark-noise-subtracted coincidence rate from the
cell means of squared-outcome products: bright x bright cells enter with
+, bright x dark and dark x bright with -, dark x dark with +.  Since the
dark statistics do not depend on the local-oscillator phase, each dark
window serves as a sample for both dark quadrature channels, so the mixed
cells carry weight 2 and the dark-dark cell weight 4.  Every window lands
in exactly one cell per port pair; no data is discarded.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from typing import Iterator, Sequence, TextIO

import numpy as np

from .bell import AngleSet, DetectionParams, PORT_PAIRS, format_float, rotated_state, setting_pairs
from .errors import DegenerateEstimateError, InsufficientDataError
from .gaussian import GaussianState

BRIGHT_Q1, BRIGHT_Q2, DARK = 0, 1, 2
CHOICE_LABELS = ("bright_q1", "bright_q2", "dark")

DATASET_CSV_HEADER = "window_id,site,angle,choice,outcome_plus,outcome_minus"
ESTIMATE_CSV_HEADER = "quantity,value,std_error,n_samples"


@dataclass(frozen=True)
class ProtocolConfig:
    """Run parameters of the measurement protocol.

    ``p_dark`` is the probability that a site's window is dark; the two
    bright quadratures split the rest evenly.  ``n_dark`` and ``n_lo`` feed
    the dark-port validity check: the stray photon number reaching the
    blocked detectors must be negligible against sqrt(n_lo) for the dark
    records to count as vacuum.
    """

    num_windows: int
    rng_seed: int
    angle_choices: AngleSet
    det: DetectionParams = DetectionParams()
    p_dark: float = 1.0 / 3.0
    n_dark: float = 0.0
    n_lo: float = 1e8
    dark_ratio_epsilon: float = 0.01

    def __post_init__(self):
        if self.num_windows < 1:
            raise ValueError("num_windows must be >= 1")
        if not 0.0 < self.p_dark < 1.0:
            raise ValueError(f"p_dark must be in (0, 1), got {self.p_dark}")
        if self.n_dark < 0.0 or self.n_lo < 0.0:
            raise ValueError("n_dark and n_lo must be >= 0")
        if self.dark_ratio_epsilon <= 0.0:
            raise ValueError("dark_ratio_epsilon must be > 0")


@dataclass(frozen=True)
class WindowRecord:
    """One synchronized window: both sites' settings and port outcomes."""

    window_id: int
    angle_a: float
    choice_a: str
    outcome_a_plus: float
    outcome_a_minus: float
    angle_b: float
    choice_b: str
    outcome_b_plus: float
    outcome_b_minus: float


@dataclass(frozen=True)
class EstimateWithError:
    value: float
    std_error: float
    n_samples: int

    def __post_init__(self):
        if self.std_error < 0.0:
            raise ValueError("std_error must be >= 0")
        if self.n_samples < 0:
            raise ValueError("n_samples must be >= 0")


@dataclass(frozen=True, eq=False)
class ProtocolDataset:
    """Column store of the protocol run (one entry per window per column)."""

    angle_a: np.ndarray
    choice_a: np.ndarray
    out_a_plus: np.ndarray
    out_a_minus: np.ndarray
    angle_b: np.ndarray
    choice_b: np.ndarray
    out_b_plus: np.ndarray
    out_b_minus: np.ndarray

    @property
    def num_windows(self) -> int:
        return self.angle_a.shape[0]

    def records(self) -> Iterator[WindowRecord]:
        for w in range(self.num_windows):
            yield WindowRecord(
                window_id=w,
                angle_a=float(self.angle_a[w]),
                choice_a=CHOICE_LABELS[self.choice_a[w]],
                outcome_a_plus=float(self.out_a_plus[w]),
                outcome_a_minus=float(self.out_a_minus[w]),
                angle_b=float(self.angle_b[w]),
                choice_b=CHOICE_LABELS[self.choice_b[w]],
                outcome_b_plus=float(self.out_b_plus[w]),
                outcome_b_minus=float(self.out_b_minus[w]),
            )


def _gaussian_factor(cov: np.ndarray) -> np.ndarray:
    """L with L L^T = cov, tolerant of semidefinite covariances."""
    w, v = np.linalg.eigh(cov)
    return v * np.sqrt(np.clip(w, 0.0, None))


def _quad_rows(modes: Sequence[int], quad: int) -> list[int]:
    return [2 * m + quad - 1 for m in modes]


def run_protocol(src: GaussianState, cfg: ProtocolConfig) -> ProtocolDataset:
    """Generate the window dataset for ``src`` under ``cfg``.

    Deterministic given ``cfg.rng_seed``: settings, choices, and the raw
    normal draws are consumed in a fixed order regardless of which cells
    the windows land in.
    """
    angles = cfg.angle_choices
    thetas_a = (angles.theta_a, angles.theta_a_prime)
    thetas_b = (angles.theta_b, angles.theta_b_prime)
    vv = cfg.det.dark_variance
    excess = cfg.det.excess_bright_noise

    # Joint factors for every (setting_a, setting_b, q_a, q_b) bright-bright
    # cell, plus single-site factors when the other site is dark.
    joint: dict[tuple[int, int, int, int], np.ndarray] = {}
    site_a: dict[tuple[int, int], np.ndarray] = {}
    site_b: dict[tuple[int, int], np.ndarray] = {}
    for sa in (0, 1):
        for sb in (0, 1):
            rot = rotated_state(src, thetas_a[sa], thetas_b[sb])
            for qa in (1, 2):
                rows_a = _quad_rows((0, 1), qa)
                site_a[(sa, qa)] = _gaussian_factor(
                    rot.cov[np.ix_(rows_a, rows_a)]
                )
                for qb in (1, 2):
                    rows = rows_a + _quad_rows((2, 3), qb)
                    joint[(sa, sb, qa, qb)] = _gaussian_factor(
                        rot.cov[np.ix_(rows, rows)]
                    )
            for qb in (1, 2):
                rows_b = _quad_rows((2, 3), qb)
                site_b[(sb, qb)] = _gaussian_factor(
                    rot.cov[np.ix_(rows_b, rows_b)]
                )

    n = cfg.num_windows
    rng = np.random.default_rng(cfg.rng_seed)
    setting_a = rng.integers(0, 2, n)
    setting_b = rng.integers(0, 2, n)
    u_a = rng.random(n)
    u_b = rng.random(n)
    z = rng.standard_normal((n, 4))
    z_excess = rng.standard_normal((n, 4))

    p_bright_half = (1.0 - cfg.p_dark) / 2.0

    def to_choice(u: np.ndarray) -> np.ndarray:
        return np.where(
            u < cfg.p_dark,
            DARK,
            np.where(u < cfg.p_dark + p_bright_half, BRIGHT_Q1, BRIGHT_Q2),
        ).astype(np.int8)

    choice_a = to_choice(u_a)
    choice_b = to_choice(u_b)

    out = np.empty((n, 4))
    sqrt_vv = np.sqrt(vv)
    for sa in (0, 1):
        for sb in (0, 1):
            in_setting = (setting_a == sa) & (setting_b == sb)
            for ca in (BRIGHT_Q1, BRIGHT_Q2, DARK):
                qa = ca + 1
                for cb in (BRIGHT_Q1, BRIGHT_Q2, DARK):
                    qb = cb + 1
                    m = in_setting & (choice_a == ca) & (choice_b == cb)
                    if not m.any():
                        continue
                    if ca != DARK and cb != DARK:
                        out[m] = z[m] @ joint[(sa, sb, qa, qb)].T
                    elif ca != DARK:
                        out[m, :2] = z[m][:, :2] @ site_a[(sa, qa)].T
                        out[m, 2:] = sqrt_vv * z[m][:, 2:]
                    elif cb != DARK:
                        out[m, :2] = sqrt_vv * z[m][:, :2]
                        out[m, 2:] = z[m][:, 2:] @ site_b[(sb, qb)].T
                    else:
                        out[m] = sqrt_vv * z[m]
    if excess > 0.0:
        bright_a = choice_a != DARK
        bright_b = choice_b != DARK
        out[bright_a, :2] += np.sqrt(excess) * z_excess[bright_a][:, :2]
        out[bright_b, 2:] += np.sqrt(excess) * z_excess[bright_b][:, 2:]

    angle_a = np.where(setting_a == 0, thetas_a[0], thetas_a[1])
    angle_b = np.where(setting_b == 0, thetas_b[0], thetas_b[1])
    return ProtocolDataset(
        angle_a=angle_a,
        choice_a=choice_a,
        out_a_plus=out[:, 0],
        out_a_minus=out[:, 1],
        angle_b=angle_b,
        choice_b=choice_b,
        out_b_plus=out[:, 2],
        out_b_minus=out[:, 3],
    )


# Estimator cells: (choice_a, choice_b, weight).  Dark windows stand in for
# both dark quadrature channels, hence the doubled mixed weights.
_CELLS = (
    (BRIGHT_Q1, BRIGHT_Q1, 1.0),
    (BRIGHT_Q1, BRIGHT_Q2, 1.0),
    (BRIGHT_Q2, BRIGHT_Q1, 1.0),
    (BRIGHT_Q2, BRIGHT_Q2, 1.0),
    (BRIGHT_Q1, DARK, -2.0),
    (BRIGHT_Q2, DARK, -2.0),
    (DARK, BRIGHT_Q1, -2.0),
    (DARK, BRIGHT_Q2, -2.0),
    (DARK, DARK, 4.0),
)


def estimate_R(
    dataset: ProtocolDataset,
    port_a: str,
    port_b: str,
    theta_a: float,
    theta_b: float,
) -> EstimateWithError:
    """Dark-noise-subtracted coincidence rate for one port pair and setting.

    Combines the nine cell means of squared-outcome products with the
    weights described in the module docstring and a 1/16 normalization;
    the standard error treats cells as independent (they are disjoint
    window sets).  Angles must match the generating configuration exactly.
    """
    if port_a not in "+-" or port_b not in "+-":
        raise ValueError(f"ports must be '+' or '-', got ({port_a!r}, {port_b!r})")
    s_a = dataset.out_a_plus if port_a == "+" else dataset.out_a_minus
    s_b = dataset.out_b_plus if port_b == "+" else dataset.out_b_minus
    base = (dataset.angle_a == theta_a) & (dataset.angle_b == theta_b)

    total = 0.0
    var = 0.0
    n_used = 0
    for ca, cb, weight in _CELLS:
        m = base & (dataset.choice_a == ca) & (dataset.choice_b == cb)
        count = int(m.sum())
        if count < 2:
            raise InsufficientDataError(
                f"cell (A={CHOICE_LABELS[ca]}@{theta_a:.6g}, "
                f"B={CHOICE_LABELS[cb]}@{theta_b:.6g}) has {count} windows; "
                "need at least 2"
            )
        samples = s_a[m] ** 2 * s_b[m] ** 2
        total += weight * float(samples.mean())
        var += weight**2 * float(samples.var(ddof=1)) / count
        n_used += count
    return EstimateWithError(
        value=total / 16.0,
        std_error=float(np.sqrt(var)) / 16.0,
        n_samples=n_used,
    )


@dataclass(frozen=True)
class SettingEstimate:
    """Sampled rates, E, and first-order errors for one analyzer setting."""

    theta_a: float
    theta_b: float
    r: dict[str, EstimateWithError]
    e: EstimateWithError


@dataclass(frozen=True)
class BellEstimate:
    angles: AngleSet
    settings: tuple[SettingEstimate, SettingEstimate, SettingEstimate, SettingEstimate]
    b: EstimateWithError


def estimate_bell(dataset: ProtocolDataset, angles: AngleSet) -> BellEstimate:
    """All sixteen rate estimates, the four E values, and B with error bars.

    Error propagation is first order and treats the rate estimates as
    independent.  A setting whose rate sum comes out non-positive cannot be
    normalized and raises :class:`DegenerateEstimateError`.  Near-threshold
    sums produce legitimately huge error bars rather than an error: at weak
    squeezing the subtraction leaves a denominator far below the vacuum
    shot noise of individual windows, which is the protocol's fundamental
    signal-to-noise cost.
    """
    settings = []
    e_list = []
    var_b = 0.0
    for ta, tb in setting_pairs(angles):
        r = {pp: estimate_R(dataset, pp[0], pp[1], ta, tb) for pp in PORT_PAIRS}
        denom = sum(est.value for est in r.values())
        denom_se = float(np.sqrt(sum(est.std_error**2 for est in r.values())))
        if denom <= 0.0:
            raise DegenerateEstimateError(
                f"rate sum {denom:.3e} (std error {denom_se:.3e}) at setting "
                f"({ta:.6g}, {tb:.6g}) is not positive; "
                "cannot form normalized probabilities"
            )
        numer = r["++"].value + r["--"].value - r["+-"].value - r["-+"].value
        e = numer / denom
        var_e = 0.0
        for pp in PORT_PAIRS:
            sign = 1.0 if pp in ("++", "--") else -1.0
            var_e += ((sign - e) / denom) ** 2 * r[pp].std_error ** 2
        n_setting = max(est.n_samples for est in r.values())
        settings.append(
            SettingEstimate(
                theta_a=ta,
                theta_b=tb,
                r=r,
                e=EstimateWithError(e, float(np.sqrt(var_e)), n_setting),
            )
        )
        e_list.append(e)
        var_b += var_e
    b = abs(e_list[0] + e_list[1] + e_list[2] - e_list[3])
    return BellEstimate(
        angles=angles,
        settings=tuple(settings),
        b=EstimateWithError(b, float(np.sqrt(var_b)), dataset.num_windows),
    )


def estimate_B(dataset: ProtocolDataset, angles: AngleSet) -> EstimateWithError:
    """The CHSH estimate alone; see :func:`estimate_bell` for the details."""
    return estimate_bell(dataset, angles).b


@dataclass(frozen=True)
class DarkPortCheck:
    ratio: float
    epsilon: float
    passed: bool


def dark_port_check(cfg: ProtocolConfig) -> DarkPortCheck:
    """Validity gate: stray light at the blocked port must be negligible.

    The dark records count as vacuum only if n_dark / sqrt(n_lo) stays
    below ``cfg.dark_ratio_epsilon``.
    """
    if cfg.n_lo <= 0.0:
        raise ValueError("n_lo must be > 0 for the dark-port check")
    ratio = cfg.n_dark / np.sqrt(cfg.n_lo)
    return DarkPortCheck(
        ratio=float(ratio),
        epsilon=cfg.dark_ratio_epsilon,
        passed=bool(ratio < cfg.dark_ratio_epsilon),
    )


def write_dataset_csv(dataset: ProtocolDataset, path_or_file) -> None:
    """One row per site per window, floats at 9 significant digits."""

    def _write(fh: TextIO) -> None:
        fh.write(DATASET_CSV_HEADER + "\n")
        for rec in dataset.records():
            for site, angle, choice, plus, minus in (
                ("A", rec.angle_a, rec.choice_a, rec.outcome_a_plus, rec.outcome_a_minus),
                ("B", rec.angle_b, rec.choice_b, rec.outcome_b_plus, rec.outcome_b_minus),
            ):
                fh.write(
                    f"{rec.window_id},{site},{format_float(angle)},{choice},"
                    f"{format_float(plus)},{format_float(minus)}\n"
                )

    if isinstance(path_or_file, (str, bytes)) or hasattr(path_or_file, "__fspath__"):
        with open(path_or_file, "w", newline="\n") as fh:
            _write(fh)
    else:
        _write(path_or_file)


def write_estimate_csv(
    rows: Sequence[tuple[str, float, float, int]], path, append: bool = False
) -> None:
    """Rows of (quantity, value, std_error, n_samples); header on new files."""
    fresh = not (append and os.path.exists(path))
    mode = "a" if append else "w"
    with open(path, mode, newline="\n") as fh:
        if fresh:
            fh.write(ESTIMATE_CSV_HEADER + "\n")
        for quantity, value, std_error, n_samples in rows:
            fh.write(
                f"{quantity},{format_float(value)},{format_float(std_error)},{n_samples}\n"
            )
