"""Accumulate the geometric phase around a line charge.

The loop integral is compared with the closed form for several radii. With a
permanent moment and a dwell time the beta Sigma^3 sector picks up both the
loop term and the time term.
"""

import math

from dipolephase import DipoleParams, LoopPath, TimeLeg, Wei, analytic_phase, compute_phase

cfg = Wei(lam=1.0, b0=1.0)
params = DipoleParams(alpha_pol=1.0)
print("radius   c_beta (numeric)      -(pi/2) alpha lambda B0")
for radius in (0.5, 1.0, 10.0):
    res = compute_phase(LoopPath(radius=radius, segments=1000), cfg, params)
    print(f"{radius:6.1f}   {res.c_beta:+.15f}   {-math.pi / 2:+.15f}")

print("\nsusceptibility alone contributes the same way:")
res = compute_phase(LoopPath(), cfg, DipoleParams(chi=2.0))
print(f"  chi=2: c_beta = {res.c_beta:+.12f}")

params = DipoleParams(alpha_pol=0.5, mu=0.3)
leg = TimeLeg(tau=4.0)
num = compute_phase(LoopPath(), Wei(2.0, 1.5), params, leg)
ref = analytic_phase(Wei(2.0, 1.5), params, leg)
print(f"\nwith mu=0.3 and tau=4: c_betasigma3 {num.c_betasigma3:.12f} (closed form {ref.c_betasigma3:.12f})")
print(f"                        c_beta       {num.c_beta:.12f} (closed form {ref.c_beta:.12f})")
for note in num.notes:
    print("note:", note)
