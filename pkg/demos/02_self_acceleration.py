"""The main lobe accelerates although no force acts on the wave.

A truncated psi_2 wave in free space: Ehrenfest's theorem pins <x> to a
straight line, yet the brightest lobe bends away with acceleration close
to -a0. This is the self-acceleration the exact solution carries.
"""
import numpy as np

from pcwave import analysis, builtin, run_scenario

cfg = builtin("fig2b")
res = run_scenario(cfg)
rec = res.record
t = np.asarray(rec.times)

print(f"{'t':>6} {'<x>':>10} {'lobe':>10} {'norm':>10}")
for i in range(0, len(t), max(1, len(t) // 10)):
    print(f"{t[i]:6.2f} {rec.mean_x[i]:10.5f} {rec.lobe_x[i]:10.5f} {rec.norm[i]:10.6f}")

acc_mean = analysis.quadratic_acceleration(t, rec.mean_x, 1.0)
acc_lobe = analysis.quadratic_acceleration(t, rec.lobe_x, 1.0)
print(f"\nfitted acceleration over t <= 1: <x> {acc_mean:.2e}, lobe {acc_lobe:.3f} "
      f"(a0 = {cfg.a0:g})")
