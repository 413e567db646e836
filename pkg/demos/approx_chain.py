"""How well the first-order effective Hamiltonian tracks the modulated coupling.

Prints the worst stroboscopic infidelity over 10 periods and the one-period
propagator error for a few coupling ratios ``g / delta_omega``.
"""
from __future__ import annotations

import numpy as np

from condsqueeze.experiments import magnus_infidelity, one_period_error

ratios = np.array([0.005, 0.01, 0.02, 0.04])
inf = magnus_infidelity(ratios)
for r, x in zip(ratios, inf):
    print(f"g/dw = {r:<6} infidelity {x:.3e}   one-period error {one_period_error(r):.3e}")
slope = np.polyfit(np.log(ratios), np.log(inf), 1)[0]
print(f"fitted exponent of the infidelity: {slope:.2f}")
