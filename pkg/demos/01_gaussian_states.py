#!/usr/bin/env python3
"""Tour of the Gaussian layer: states, squeezers, and moment evaluation.

Every state is a covariance matrix of the quadratures X1 = a + a^dag,
X2 = i(a^dag - a); the vacuum is the identity and two-mode squeezing
builds the correlations everything else in the package runs on.
"""

import numpy as np

from cvbell import (
    apply,
    fourth_moment,
    second_moment,
    two_mode_squeeze,
    uncertainty_defect,
    vacuum,
)

np.set_printoptions(precision=4, suppress=True)

state = vacuum(2)
print("two-mode vacuum covariance:")
print(state.cov)

gain = 1.25
state = apply(state, two_mode_squeeze(0, 1, gain, 2))
print(f"\nafter two-mode squeezing at gain G = {gain}:")
print(state.cov)

print("\ndiagonal variance 2G - 1       :", second_moment(state, (0, 1), (0, 1)))
print("cross correlation 2 sqrt(G(G-1)):", second_moment(state, (0, 1), (1, 1)))
print("uncertainty defect (>= 0 is physical):", uncertainty_defect(state))

# fourth moments factor into pair products (Gaussian statistics)
idx = [(0, 1), (0, 1), (1, 1), (1, 1)]
v0 = second_moment(state, (0, 1), (0, 1))
v1 = second_moment(state, (1, 1), (1, 1))
c = second_moment(state, (0, 1), (1, 1))
print("\n<X0^2 X1^2> by Isserlis pairing:", fourth_moment(state, idx))
print("V0 V1 + 2 C^2                  :", v0 * v1 + 2 * c**2)
