"""Analytic correlation functions, CHSH combination, and angle optimization.

The coincidence rate between the + / - analyzer ports at the two sites is
computed two independent ways from the same covariance matrix:

* ``correlation_R_dark`` evaluates the dark-noise-subtracted second-order
  form used by the measurement protocol, with the dark variance V_v as an
  explicit parameter;
* ``correlation_R_commutator`` evaluates the photon-coincidence
  <A^dag A B^dag B> from symmetric-ordered moments, where the canonical
  commutators contribute the constants that V_v = 1 supplies in the dark
  form.

For every physical state the two agree to numerical precision, which the
test suite enforces.  On top of the rates sit the normalized probabilities,
the correlation E, the CHSH combination B, a deterministic angle optimizer,
and the squeezing sweep that traces how the violation dies off as the
source is driven harder.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Mapping, Sequence

import numpy as np

from .errors import DegenerateSourceError
from .gaussian import GaussianState, apply, fourth_moment, polarization_rotation, second_moment
from .sources import NUM_MODES, down_converter, gain_from_squeezing_percent

PORT_PAIRS = ("++", "--", "+-", "-+")

# Denominators at or below this are treated as a degenerate source.
_DENOMINATOR_FLOOR = 1e-15

SWEEP_CSV_HEADER = (
    "percent_squeezing,gain,b_max,theta_a,theta_a_prime,theta_b,theta_b_prime"
)


@dataclass(frozen=True)
class AngleSet:
    """The four analyzer settings of a CHSH measurement, in radians."""

    theta_a: float
    theta_a_prime: float
    theta_b: float
    theta_b_prime: float

    def __post_init__(self):
        for name, value in self.__dict__.items():
            if not np.isfinite(value):
                raise ValueError(f"{name} must be finite, got {value}")

    def as_tuple(self) -> tuple[float, float, float, float]:
        return (self.theta_a, self.theta_a_prime, self.theta_b, self.theta_b_prime)

    def canonical(self) -> "AngleSet":
        """Angles reduced to [0, pi); rotations act with period pi here."""
        a, ap, b, bp = (float(np.mod(t, np.pi)) for t in self.as_tuple())
        return AngleSet(a, ap, b, bp)


#: Settings achieving the maximal CHSH value for a cosine correlation.
CHSH_MAX_ANGLES = AngleSet(3 * np.pi / 8, np.pi / 8, np.pi / 4, 0.0)


@dataclass(frozen=True)
class DetectionParams:
    """Detector model: dark-channel variance and excess noise on bright records.

    ``dark_variance`` = 1 is the vacuum-limited quantum detector; any excess
    classical noise floor also rides on the bright measurements, which
    ``excess_bright_noise`` adds to every bright quadrature variance.
    """

    dark_variance: float = 1.0
    excess_bright_noise: float = 0.0

    def __post_init__(self):
        if self.dark_variance < 0.0:
            raise ValueError("dark_variance must be >= 0")
        if self.excess_bright_noise < 0.0:
            raise ValueError("excess_bright_noise must be >= 0")


@dataclass(frozen=True)
class SettingResult:
    """Rates, probabilities, and E for one (theta_a, theta_b) setting."""

    theta_a: float
    theta_b: float
    r: Mapping[str, float]
    p: Mapping[str, float]
    e: float


@dataclass(frozen=True)
class BellResult:
    """Full CHSH evaluation: four settings and the combined B."""

    angles: AngleSet
    settings: tuple[SettingResult, SettingResult, SettingResult, SettingResult]
    b: float

    @property
    def e_values(self) -> tuple[float, float, float, float]:
        return tuple(s.e for s in self.settings)


def rotated_state(src: GaussianState, theta_a: float, theta_b: float) -> GaussianState:
    """Send the source through both analyzers.

    Output modes are reinterpreted as (A_+, A_-, B_+, B_-) in slots
    (0, 1, 2, 3).
    """
    if src.num_modes != NUM_MODES:
        raise ValueError(f"source must have {NUM_MODES} modes, got {src.num_modes}")
    state = apply(src, polarization_rotation(theta_a, 0, 1, NUM_MODES))
    return apply(state, polarization_rotation(theta_b, 2, 3, NUM_MODES))


def _port_modes(port_a: str, port_b: str) -> tuple[int, int]:
    try:
        ma = {"+": 0, "-": 1}[port_a]
        mb = {"+": 2, "-": 3}[port_b]
    except KeyError as err:
        raise ValueError(f"ports must be '+' or '-', got ({port_a!r}, {port_b!r})") from err
    return ma, mb


def correlation_R_dark(
    state: GaussianState,
    port_a: str,
    port_b: str,
    det: DetectionParams = DetectionParams(),
) -> float:
    """Dark-noise-subtracted coincidence rate for one port pair.

    Second-order form over the rotated state's variances V and
    cross-correlations, with the dark variance V_v entering the subtraction
    terms and ``excess_bright_noise`` inflating the bright variances.
    """
    ma, mb = _port_modes(port_a, port_b)
    e = det.excess_bright_noise
    vv = det.dark_variance
    va1 = second_moment(state, (ma, 1), (ma, 1)) + e
    va2 = second_moment(state, (ma, 2), (ma, 2)) + e
    vb1 = second_moment(state, (mb, 1), (mb, 1)) + e
    vb2 = second_moment(state, (mb, 2), (mb, 2)) + e
    c11 = second_moment(state, (ma, 1), (mb, 1))
    c22 = second_moment(state, (ma, 2), (mb, 2))
    c21 = second_moment(state, (ma, 2), (mb, 1))
    c12 = second_moment(state, (ma, 1), (mb, 2))
    return (
        2.0 * (c11**2 + c22**2 + c21**2 + c12**2)
        + va1 * vb1 + va2 * vb2 + va2 * vb1 + va1 * vb2
        - 2.0 * vv * (vb1 + vb2)
        - 2.0 * vv * (va1 + va2)
        + 4.0 * vv**2
    ) / 16.0


def correlation_R_commutator(state: GaussianState, port_a: str, port_b: str) -> float:
    """Photon-coincidence <A^dag A B^dag B> from symmetric-ordered moments.

    With A = (X1 - i X2)/2 per port and [X1, X2] = 2i, the coincidence is
    (1/16) <(X_A1^2 + X_A2^2 - 2)(X_B1^2 + X_B2^2 - 2)>; the quartic terms
    factor by Gaussian (Isserlis) pairing and the constants are the
    commutator contributions.
    """
    ma, mb = _port_modes(port_a, port_b)
    quartic = 0.0
    for qa in (1, 2):
        for qb in (1, 2):
            quartic += fourth_moment(
                state, [(ma, qa), (ma, qa), (mb, qb), (mb, qb)]
            )
    va = second_moment(state, (ma, 1), (ma, 1)) + second_moment(state, (ma, 2), (ma, 2))
    vb = second_moment(state, (mb, 1), (mb, 1)) + second_moment(state, (mb, 2), (mb, 2))
    return (quartic - 2.0 * va - 2.0 * vb + 4.0) / 16.0


def e_value(
    src: GaussianState,
    theta_a: float,
    theta_b: float,
    det: DetectionParams = DetectionParams(),
) -> SettingResult:
    """Normalized correlation E for one analyzer setting.

    Raises :class:`DegenerateSourceError` when all four rates vanish (for
    example at gain exactly 1 with an ideal detector), rather than
    silently dividing 0 by 0.
    """
    state = rotated_state(src, theta_a, theta_b)
    r = {
        pp: correlation_R_dark(state, pp[0], pp[1], det) for pp in PORT_PAIRS
    }
    denom = sum(r.values())
    if denom <= _DENOMINATOR_FLOOR:
        raise DegenerateSourceError(
            f"coincidence denominator {denom:.3e} is not positive; "
            "the source produces no usable correlations at this setting"
        )
    p = {pp: r[pp] / denom for pp in PORT_PAIRS}
    e = p["++"] + p["--"] - p["+-"] - p["-+"]
    return SettingResult(theta_a=theta_a, theta_b=theta_b, r=r, p=p, e=e)


# Setting order used throughout: (a,b), (a',b'), (a',b), (a,b').
def setting_pairs(angles: AngleSet) -> tuple[tuple[float, float], ...]:
    return (
        (angles.theta_a, angles.theta_b),
        (angles.theta_a_prime, angles.theta_b_prime),
        (angles.theta_a_prime, angles.theta_b),
        (angles.theta_a, angles.theta_b_prime),
    )


def bell_B(
    src: GaussianState,
    angles: AngleSet,
    det: DetectionParams = DetectionParams(),
) -> BellResult:
    """CHSH combination B = |E(a,b) + E(a',b') + E(a',b) - E(a,b')|."""
    settings = tuple(
        e_value(src, ta, tb, det) for ta, tb in setting_pairs(angles)
    )
    e1, e2, e3, e4 = (s.e for s in settings)
    return BellResult(angles=angles, settings=settings, b=abs(e1 + e2 + e3 - e4))


_INVPHI = (np.sqrt(5.0) - 1.0) / 2.0


def _golden_max(f: Callable[[float], float], lo: float, hi: float, tol: float) -> float:
    """Deterministic golden-section maximizer on [lo, hi]."""
    a, b = lo, hi
    c = b - _INVPHI * (b - a)
    d = a + _INVPHI * (b - a)
    fc, fd = f(c), f(d)
    while (b - a) > tol:
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - _INVPHI * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + _INVPHI * (b - a)
            fd = f(d)
    return 0.5 * (a + b)


def optimize_angles(
    src: GaussianState,
    det: DetectionParams = DetectionParams(),
    grid_step: float = np.pi / 32,
    angle_tol: float = 1e-5,
) -> tuple[AngleSet, float]:
    """Maximize B over analyzer settings.

    theta_b_prime is pinned to 0: a common offset on all four angles leaves
    B unchanged for these polarization-isotropic sources, so one angle is a
    flat direction.  A coarse grid scan (ties broken toward the lowest
    lexicographic angle tuple) seeds cyclic coordinate descent with
    golden-section line searches, refined until no coordinate moves by more
    than ``angle_tol``.
    """
    grid = np.arange(0.0, np.pi, grid_step)
    e_tab = np.array(
        [[e_value(src, ta, tb, det).e for tb in grid] for ta in grid]
    )
    # B on the (theta_a, theta_a', theta_b) grid with theta_b' = 0 (column 0).
    b_grid = np.abs(
        e_tab[:, None, :]          # E(a, b)
        + e_tab[None, :, 0:1]      # E(a', 0)
        + e_tab[None, :, :]        # E(a', b)
        - e_tab[:, None, 0:1]      # E(a, 0)
    )
    best = float(b_grid.max())
    ia, iap, ib = np.argwhere(b_grid >= best - 1e-9)[0]
    x = [float(grid[ia]), float(grid[iap]), float(grid[ib])]

    def b_at(vec: Sequence[float]) -> float:
        angles = AngleSet(vec[0], vec[1], vec[2], 0.0)
        return bell_B(src, angles, det).b

    for _ in range(60):
        moved = 0.0
        for k in range(3):
            lo, hi = x[k] - grid_step, x[k] + grid_step

            def along(v: float, k: int = k) -> float:
                trial = list(x)
                trial[k] = v
                return b_at(trial)

            new = _golden_max(along, lo, hi, angle_tol / 4.0)
            if along(new) >= b_at(x):
                moved = max(moved, abs(new - x[k]))
                x[k] = new
        if moved < angle_tol:
            break

    angles = AngleSet(x[0], x[1], x[2], 0.0).canonical()
    return angles, b_at(x)


@dataclass(frozen=True)
class SweepRow:
    """One squeezing level of the violation-decay sweep."""

    percent_squeezing: float
    gain: float
    b_max: float
    angles: AngleSet
    #: B at a caller-supplied fixed angle set, when requested.
    b_fixed: float | None = None


@dataclass(frozen=True)
class SweepResult:
    rows: tuple[SweepRow, ...]
    #: percent squeezing where b_max crosses 2, if bracketed by the sweep.
    violation_threshold: float | None


def sweep_squeezing(
    s_min: float,
    s_max: float,
    steps: int,
    det: DetectionParams = DetectionParams(),
    source: Callable[[float], GaussianState] | None = None,
    locate_threshold: bool = True,
    fixed_angles: AngleSet | None = None,
) -> SweepResult:
    """B_max versus percentage squeezing over ``steps`` evenly spaced points.

    Angles are re-optimized at every point; passing ``fixed_angles`` also
    records B at that one setting for comparison.  The optimized curve must
    be monotone non-increasing (within 1e-6); a violation of that is a
    computational failure and raises.  When the curve crosses B = 2 inside
    the range and ``locate_threshold`` is set, the crossing is located by
    bisection and recorded on the result.
    """
    if not (0.0 < s_min < s_max < 100.0):
        raise ValueError(
            f"need 0 < s_min < s_max < 100, got ({s_min}, {s_max})"
        )
    if steps < 2:
        raise ValueError("need at least 2 sweep points")
    if source is None:
        source = down_converter

    def b_max_at(percent: float) -> tuple[float, AngleSet]:
        angles, b = optimize_angles(source(gain_from_squeezing_percent(percent)), det)
        return b, angles

    rows = []
    for percent in np.linspace(s_min, s_max, steps):
        b, angles = b_max_at(float(percent))
        b_fixed = None
        if fixed_angles is not None:
            gain = gain_from_squeezing_percent(float(percent))
            b_fixed = bell_B(source(gain), fixed_angles, det).b
        rows.append(
            SweepRow(
                percent_squeezing=float(percent),
                gain=gain_from_squeezing_percent(float(percent)),
                b_max=b,
                angles=angles,
                b_fixed=b_fixed,
            )
        )
    for prev, cur in zip(rows, rows[1:]):
        if cur.b_max > prev.b_max + 1e-6:
            raise RuntimeError(
                "sweep is not monotone non-increasing: "
                f"B({cur.percent_squeezing:.6g}) = {cur.b_max:.9g} > "
                f"B({prev.percent_squeezing:.6g}) = {prev.b_max:.9g}"
            )

    threshold = None
    if locate_threshold:
        above = [r for r in rows if r.b_max > 2.0]
        below = [r for r in rows if r.b_max < 2.0]
        if above and below:
            lo, hi = above[-1].percent_squeezing, below[0].percent_squeezing
            for _ in range(40):
                mid = 0.5 * (lo + hi)
                if b_max_at(mid)[0] > 2.0:
                    lo = mid
                else:
                    hi = mid
                if hi - lo < 1e-3:
                    break
            threshold = 0.5 * (lo + hi)
    return SweepResult(rows=tuple(rows), violation_threshold=threshold)


def format_float(x: float) -> str:
    """Project-wide float formatting: 9 significant digits."""
    return f"{x:.9g}"


def write_sweep_csv(result: SweepResult, path_or_file) -> None:
    """Emit the sweep as CSV with the documented header and LF line endings.

    When the sweep carried a fixed-angle comparison curve, an extra
    ``b_fixed_angles`` column is appended after the documented ones.
    """
    with_fixed = any(row.b_fixed is not None for row in result.rows)

    def _write(fh) -> None:
        header = SWEEP_CSV_HEADER + (",b_fixed_angles" if with_fixed else "")
        fh.write(header + "\n")
        for row in result.rows:
            fields = [
                row.percent_squeezing,
                row.gain,
                row.b_max,
                *row.angles.as_tuple(),
            ]
            if with_fixed:
                fields.append(row.b_fixed)
            fh.write(",".join(format_float(v) for v in fields) + "\n")

    if isinstance(path_or_file, (str, bytes)) or hasattr(path_or_file, "__fspath__"):
        with open(path_or_file, "w", newline="\n") as fh:
            _write(fh)
    else:
        _write(path_or_file)
