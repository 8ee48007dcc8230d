#!/usr/bin/env python3
"""Inside the measurement protocol: synchronized windows, random settings,
dark-noise subtraction, and the validity gate on the dark port.
"""

import numpy as np

from cvbell import (
    CHSH_MAX_ANGLES,
    ProtocolConfig,
    dark_port_check,
    down_converter,
    estimate_R,
    gain_from_squeezing_percent,
    run_protocol,
)
from cvbell.bell import correlation_R_dark, rotated_state

gain = gain_from_squeezing_percent(46.0)
src = down_converter(gain)
cfg = ProtocolConfig(num_windows=100_000, rng_seed=3, angle_choices=CHSH_MAX_ANGLES)

dataset = run_protocol(src, cfg)
print(f"{cfg.num_windows} windows; first few records:")
for rec in list(dataset.records())[:4]:
    print(
        f"  window {rec.window_id}: A({rec.choice_a:>9} @ {rec.angle_a:.3f}) -> "
        f"({rec.outcome_a_plus:+.3f}, {rec.outcome_a_minus:+.3f})   "
        f"B({rec.choice_b:>9} @ {rec.angle_b:.3f}) -> "
        f"({rec.outcome_b_plus:+.3f}, {rec.outcome_b_minus:+.3f})"
    )

ta, tb = CHSH_MAX_ANGLES.theta_a, CHSH_MAX_ANGLES.theta_b
rot = rotated_state(src, ta, tb)
print("\nrate estimates against the closed form:")
for ports in ("++", "--", "+-", "-+"):
    est = estimate_R(dataset, ports[0], ports[1], ta, tb)
    exact = correlation_R_dark(rot, ports[0], ports[1])
    pull = (est.value - exact) / est.std_error
    print(
        f"  R[{ports}] = {est.value:+.5f} +/- {est.std_error:.5f}"
        f"   exact {exact:+.5f}   pull {pull:+.2f} sigma"
    )

print("\ndark-port gate:")
for n_dark in (0.0, 1.0, 1e3):
    check = dark_port_check(
        ProtocolConfig(
            num_windows=1,
            rng_seed=0,
            angle_choices=CHSH_MAX_ANGLES,
            n_dark=n_dark,
            n_lo=1e8,
        )
    )
    verdict = "ok, dark records count as vacuum" if check.passed else "NOT dark enough: no Bell claim"
    print(f"  n_dark = {n_dark:>6}: ratio {check.ratio:.2e} -> {verdict}")
