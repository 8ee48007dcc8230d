"""Command-line interface.

Subcommands: ``analytic`` (closed-form rates, E, and B), ``optimize``
(angle maximization), ``sweep`` (B_max versus percentage squeezing, CSV),
``simulate`` (Monte Carlo measurement protocol with dark-port gate), and
``oracle`` (truncated Fock-space photon counting).

Exit codes: 0 success, 2 configuration error, 3 degenerate source or
estimate, 4 dark-port check failure.  Flags override an optional
``key = value`` config file (``--config``); hard-coded defaults apply
last.  All floats print with 9 significant digits, so identical flags and
seeds give byte-identical output.
"""

from __future__ import annotations

import argparse
import sys
from typing import Callable, Sequence

import numpy as np

from .bell import (
    AngleSet,
    CHSH_MAX_ANGLES,
    DetectionParams,
    bell_B,
    format_float,
    optimize_angles,
    setting_pairs,
    sweep_squeezing,
    write_sweep_csv,
)
from .errors import DegenerateEstimateError, DegenerateSourceError, InsufficientDataError
from .fock import build_state, counting_B, counting_E
from .protocol import (
    ProtocolConfig,
    dark_port_check,
    estimate_R,
    estimate_bell,
    run_protocol,
    write_dataset_csv,
    write_estimate_csv,
)
from .sources import (
    SourceKind,
    SourceParams,
    build_source,
    gain_from_squeezing_percent,
    squeezing_percent_from_gain,
)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_DEGENERATE = 3
EXIT_DARK_PORT = 4


def parse_angles(text: str) -> AngleSet:
    """'max' for the canonical maximal-violation setting, or 4 comma floats."""
    if text.strip().lower() == "max":
        return CHSH_MAX_ANGLES
    parts = text.split(",")
    if len(parts) != 4:
        raise ValueError(
            f"angles must be 'max' or four comma-separated radians, got {text!r}"
        )
    try:
        values = [float(p) for p in parts]
    except ValueError as err:
        raise ValueError(f"could not parse angles {text!r}: {err}") from err
    return AngleSet(*values)


def load_config_file(path: str) -> dict[str, str]:
    """Parse ``key = value`` lines; '#' starts a comment; keys match flag names."""
    values: dict[str, str] = {}
    with open(path) as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{lineno}: expected 'key = value', got {raw!r}")
            key, value = line.split("=", 1)
            values[key.strip().replace("-", "_")] = value.strip()
    return values


class Settings:
    """Flag values merged over config-file values merged over defaults."""

    def __init__(self, args: argparse.Namespace):
        self.args = args
        self.config = load_config_file(args.config) if args.config else {}

    def get(self, name: str, default=None, conv: Callable = float):
        cli_value = getattr(self.args, name, None)
        if cli_value is not None:
            return cli_value
        if name in self.config:
            return conv(self.config[name])
        return default


def _add_det_options(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--dark-variance", type=float, default=None,
                     help="dark-channel variance V_v (default 1, the vacuum level)")
    sub.add_argument("--excess-bright-noise", type=float, default=None,
                     help="extra classical noise variance on bright records (default 0)")


def _add_source_options(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--source", choices=[k.value for k in SourceKind], default=None,
                     help="source construction (default down-converter)")
    sub.add_argument("--gain", type=float, default=None, help="parametric gain G >= 1")
    sub.add_argument("--percent-squeezing", type=float, default=None,
                     help="source strength as percentage squeezing in [0, 100)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cvbell",
        description="Continuous-variable Bell correlations from parametric sources.",
    )
    parser.add_argument("--config", default=None, help="optional key = value config file")
    subs = parser.add_subparsers(dest="command", required=True)

    p = subs.add_parser("analytic", help="closed-form rates, probabilities, E, and B")
    _add_source_options(p)
    _add_det_options(p)
    p.add_argument("--angles", default=None,
                   help="'max' or theta_a,theta_a_prime,theta_b,theta_b_prime in radians")
    p.add_argument("--output", default=None, help="also write the report to this file")

    p = subs.add_parser("optimize", help="maximize B over analyzer angles")
    _add_source_options(p)
    _add_det_options(p)
    p.add_argument("--grid-step", type=float, default=None,
                   help="coarse grid step in radians (default pi/32)")
    p.add_argument("--angle-tol", type=float, default=None,
                   help="refinement tolerance in radians (default 1e-5)")
    p.add_argument("--output", default=None)

    p = subs.add_parser("sweep", help="B_max versus percentage squeezing, as CSV")
    _add_det_options(p)
    p.add_argument("--source", choices=[k.value for k in SourceKind], default=None)
    p.add_argument("--s-min", type=float, default=None, help="lowest percent squeezing (default 1)")
    p.add_argument("--s-max", type=float, default=None, help="highest percent squeezing (default 99)")
    p.add_argument("--steps", type=int, default=None, help="number of sweep points (default 20)")
    p.add_argument("--fixed-angles", default=None,
                   help="also record B at this fixed angle set as an extra CSV column")
    p.add_argument("--output", required=True, help="CSV output path")

    p = subs.add_parser("simulate", help="Monte Carlo run of the measurement protocol")
    _add_source_options(p)
    _add_det_options(p)
    p.add_argument("--angles", default=None)
    p.add_argument("--num-windows", type=int, default=None,
                   help="number of synchronized windows (default 100000)")
    p.add_argument("--seed", type=int, default=None, help="RNG seed (default 12345)")
    p.add_argument("--p-dark", type=float, default=None,
                   help="probability a site's window is dark (default 1/3)")
    p.add_argument("--n-dark", type=float, default=None,
                   help="stray photon number at the blocked port (default 0)")
    p.add_argument("--n-lo", type=float, default=None,
                   help="local-oscillator photon number (default 1e8)")
    p.add_argument("--dark-ratio-epsilon", type=float, default=None,
                   help="dark-port gate threshold on n_dark/sqrt(n_lo) (default 0.01)")
    p.add_argument("--dataset-csv", default=None, help="write the window records here")
    p.add_argument("--report-csv", default=None, help="write estimates as CSV here")
    p.add_argument("--append-report", action="store_true",
                   help="append to --report-csv instead of overwriting")
    p.add_argument("--output", default=None)

    p = subs.add_parser("oracle", help="truncated Fock-space photon-counting check")
    p.add_argument("--chi", type=float, required=True,
                   help="conversion strength chi in [0, 1); chi^2 = G - 1")
    p.add_argument("--cutoff", type=int, default=None, help="per-mode photon cutoff (default 4)")
    p.add_argument("--state", choices=["exact", "two-photon"], default=None,
                   help="squeezed-vacuum expansion or the literal two-photon state")
    p.add_argument("--angles", default=None)
    p.add_argument("--output", default=None)

    return parser


class _Report:
    """Collects output lines; printed and optionally mirrored to a file."""

    def __init__(self):
        self.lines: list[str] = []

    def add(self, line: str = "") -> None:
        self.lines.append(line)

    def emit(self, output_path: str | None) -> None:
        text = "\n".join(self.lines) + "\n"
        sys.stdout.write(text)
        if output_path:
            with open(output_path, "w", newline="\n") as fh:
                fh.write(text)


def _resolve_source(s: Settings) -> tuple[SourceParams, float]:
    kind_text = s.get("source", "down-converter", str)
    kind = SourceKind(kind_text)
    gain = s.get("gain", None)
    percent = s.get("percent_squeezing", None)
    if (gain is None) == (percent is None):
        raise ValueError("exactly one of --gain and --percent-squeezing is required")
    if gain is None:
        gain = gain_from_squeezing_percent(percent)
    else:
        percent = squeezing_percent_from_gain(gain)
    return SourceParams(kind=kind, gain=float(gain)), float(percent)


def _resolve_det(s: Settings) -> DetectionParams:
    return DetectionParams(
        dark_variance=s.get("dark_variance", 1.0),
        excess_bright_noise=s.get("excess_bright_noise", 0.0),
    )


def _describe_source(rep: _Report, params: SourceParams, percent: float,
                     det: DetectionParams) -> None:
    rep.add(f"source = {params.kind.value}")
    rep.add(f"gain = {format_float(params.gain)}")
    rep.add(f"percent_squeezing = {format_float(percent)}")
    rep.add(f"dark_variance = {format_float(det.dark_variance)}")
    rep.add(f"excess_bright_noise = {format_float(det.excess_bright_noise)}")


def _angle_line(angles: AngleSet) -> str:
    a, ap, b, bp = angles.as_tuple()
    return (
        f"theta_a={format_float(a)} theta_a_prime={format_float(ap)} "
        f"theta_b={format_float(b)} theta_b_prime={format_float(bp)}"
    )


def cmd_analytic(s: Settings) -> int:
    params, percent = _resolve_source(s)
    det = _resolve_det(s)
    angles = parse_angles(s.get("angles", "max", str))
    result = bell_B(build_source(params), angles, det)
    rep = _Report()
    rep.add("command = analytic")
    _describe_source(rep, params, percent, det)
    rep.add(f"angles: {_angle_line(angles)}")
    for setting in result.settings:
        rep.add(
            f"setting theta_a={format_float(setting.theta_a)} "
            f"theta_b={format_float(setting.theta_b)}:"
        )
        for pp in ("++", "--", "+-", "-+"):
            rep.add(f"  R[{pp}] = {format_float(setting.r[pp])}")
        for pp in ("++", "--", "+-", "-+"):
            rep.add(f"  P[{pp}] = {format_float(setting.p[pp])}")
        rep.add(f"  E = {format_float(setting.e)}")
    rep.add(f"B = {format_float(result.b)}")
    rep.emit(s.get("output", None, str))
    return EXIT_OK


def cmd_optimize(s: Settings) -> int:
    params, percent = _resolve_source(s)
    det = _resolve_det(s)
    grid_step = s.get("grid_step", float(np.pi / 32))
    angle_tol = s.get("angle_tol", 1e-5)
    angles, b_max = optimize_angles(build_source(params), det,
                                    grid_step=grid_step, angle_tol=angle_tol)
    rep = _Report()
    rep.add("command = optimize")
    _describe_source(rep, params, percent, det)
    rep.add(f"b_max = {format_float(b_max)}")
    rep.add(f"theta_a = {format_float(angles.theta_a)}")
    rep.add(f"theta_a_prime = {format_float(angles.theta_a_prime)}")
    rep.add(f"theta_b = {format_float(angles.theta_b)}")
    rep.add(f"theta_b_prime = {format_float(angles.theta_b_prime)}")
    rep.emit(s.get("output", None, str))
    return EXIT_OK


def cmd_sweep(s: Settings) -> int:
    det = _resolve_det(s)
    kind = SourceKind(s.get("source", "down-converter", str))
    fixed_text = s.get("fixed_angles", None, str)
    fixed = parse_angles(fixed_text) if fixed_text else None

    def source(gain: float):
        return build_source(SourceParams(kind=kind, gain=gain))

    result = sweep_squeezing(
        s_min=s.get("s_min", 1.0),
        s_max=s.get("s_max", 99.0),
        steps=s.get("steps", 20, int),
        det=det,
        source=source,
        fixed_angles=fixed,
    )
    out = s.get("output", None, str)
    write_sweep_csv(result, out)
    rep = _Report()
    rep.add("command = sweep")
    rep.add(f"source = {kind.value}")
    rep.add(f"rows = {len(result.rows)}")
    rep.add(f"b_max_first = {format_float(result.rows[0].b_max)}")
    rep.add(f"b_max_last = {format_float(result.rows[-1].b_max)}")
    if result.violation_threshold is not None:
        rep.add(
            "violation_threshold_percent = "
            f"{format_float(result.violation_threshold)}"
        )
    else:
        rep.add("violation_threshold_percent = not-bracketed")
    rep.add(f"csv = {out}")
    rep.emit(None)
    return EXIT_OK


def cmd_simulate(s: Settings) -> int:
    params, percent = _resolve_source(s)
    det = _resolve_det(s)
    angles = parse_angles(s.get("angles", "max", str))
    cfg = ProtocolConfig(
        num_windows=s.get("num_windows", 100000, int),
        rng_seed=s.get("seed", 12345, int),
        angle_choices=angles,
        det=det,
        p_dark=s.get("p_dark", 1.0 / 3.0),
        n_dark=s.get("n_dark", 0.0),
        n_lo=s.get("n_lo", 1e8),
        dark_ratio_epsilon=s.get("dark_ratio_epsilon", 0.01),
    )
    check = dark_port_check(cfg)
    src = build_source(params)
    dataset = run_protocol(src, cfg)
    if s.get("dataset_csv", None, str):
        write_dataset_csv(dataset, s.get("dataset_csv", None, str))

    rep = _Report()
    rep.add("command = simulate")
    _describe_source(rep, params, percent, det)
    rep.add(f"angles: {_angle_line(angles)}")
    rep.add(f"num_windows = {cfg.num_windows}")
    rep.add(f"seed = {cfg.rng_seed}")
    status = "PASS" if check.passed else "FAIL"
    rep.add(
        f"dark_port_check: {status} (ratio = {format_float(check.ratio)}, "
        f"epsilon = {format_float(check.epsilon)})"
    )

    csv_rows: list[tuple[str, float, float, int]] = []
    setting_names = ("ab", "apbp", "apb", "abp")
    if not check.passed:
        # Stray light invalidates the dark subtraction: report the raw rate
        # estimates only, never a Bell value.
        for name, (ta, tb) in zip(setting_names, setting_pairs(angles)):
            rep.add(
                f"setting theta_a={format_float(ta)} theta_b={format_float(tb)}:"
            )
            for pp in ("++", "--", "+-", "-+"):
                est = estimate_R(dataset, pp[0], pp[1], ta, tb)
                rep.add(
                    f"  R[{pp}] = {format_float(est.value)} "
                    f"(std_error = {format_float(est.std_error)}, n = {est.n_samples})"
                )
                csv_rows.append((f"r_{name}_{pp}", est.value, est.std_error, est.n_samples))
        rep.add("B withheld: dark-port check failed")
        if s.get("report_csv", None, str):
            write_estimate_csv(csv_rows, s.get("report_csv", None, str),
                               append=bool(s.args.append_report))
        rep.emit(s.get("output", None, str))
        return EXIT_DARK_PORT

    estimate = estimate_bell(dataset, angles)
    analytic = bell_B(src, angles, det)
    for name, setting in zip(setting_names, estimate.settings):
        rep.add(
            f"setting theta_a={format_float(setting.theta_a)} "
            f"theta_b={format_float(setting.theta_b)}:"
        )
        for pp in ("++", "--", "+-", "-+"):
            est = setting.r[pp]
            rep.add(
                f"  R[{pp}] = {format_float(est.value)} "
                f"(std_error = {format_float(est.std_error)}, n = {est.n_samples})"
            )
            csv_rows.append((f"r_{name}_{pp}", est.value, est.std_error, est.n_samples))
        rep.add(
            f"  E = {format_float(setting.e.value)} "
            f"(std_error = {format_float(setting.e.std_error)})"
        )
        csv_rows.append((f"e_{name}", setting.e.value, setting.e.std_error,
                         setting.e.n_samples))
    rep.add(f"B_estimate = {format_float(estimate.b.value)}")
    rep.add(f"B_std_error = {format_float(estimate.b.std_error)}")
    rep.add(f"B_analytic = {format_float(analytic.b)}")
    csv_rows.append(("b_estimate", estimate.b.value, estimate.b.std_error,
                     estimate.b.n_samples))
    csv_rows.append(("b_analytic", analytic.b, 0.0, 0))
    if s.get("report_csv", None, str):
        write_estimate_csv(csv_rows, s.get("report_csv", None, str),
                           append=bool(s.args.append_report))
    rep.emit(s.get("output", None, str))
    return EXIT_OK


def cmd_oracle(s: Settings) -> int:
    chi = s.get("chi", None)
    if chi is None:
        raise ValueError("--chi is required")
    cutoff = s.get("cutoff", 4, int)
    state_kind = s.get("state", "exact", str)
    angles = parse_angles(s.get("angles", "max", str))
    state = build_state(chi, cutoff=cutoff, exact=(state_kind == "exact"))
    rep = _Report()
    rep.add("command = oracle")
    rep.add(f"chi = {format_float(chi)}")
    rep.add(f"cutoff = {cutoff}")
    rep.add(f"state = {state_kind}")
    rep.add(f"angles: {_angle_line(angles)}")
    for ta, tb in setting_pairs(angles):
        e = counting_E(state, ta, tb)
        rep.add(
            f"E(theta_a={format_float(ta)}, theta_b={format_float(tb)}) = "
            f"{format_float(e)}"
        )
    rep.add(f"B = {format_float(counting_B(state, angles))}")
    rep.emit(s.get("output", None, str))
    return EXIT_OK


_COMMANDS = {
    "analytic": cmd_analytic,
    "optimize": cmd_optimize,
    "sweep": cmd_sweep,
    "simulate": cmd_simulate,
    "oracle": cmd_oracle,
}


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        settings = Settings(args)
        return _COMMANDS[args.command](settings)
    except (DegenerateSourceError, DegenerateEstimateError, InsufficientDataError) as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_DEGENERATE
    except (ValueError, OSError) as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
