"""A wave in an inverted oscillator, centred at x = 12.

A Gaussian started at x = 17 slides off the potential hill to the right.
The truncated psi_2 wave with self-acceleration +5 points back at the hill
top: with w2 = 0.7 its main lobe holds still, with w2 = 0.1 the pull wins
and the lobe drifts toward the centre.
"""
import numpy as np

from pcwave import builtin, run_scenario

for name, label in (("fig3c", "Gaussian, w2=0.7"), ("fig3a", "psi_2, w2=0.7"),
                    ("fig3b", "psi_2, w2=0.1")):
    rec = run_scenario(builtin(name)).record
    t = np.asarray(rec.times)
    lobe = np.asarray(rec.lobe_x)
    i1 = int(np.searchsorted(t, 1.0))
    print(f"{label:18s} lobe x: t=0 {lobe[0]:6.2f}   t=1 {lobe[i1]:6.2f}")
