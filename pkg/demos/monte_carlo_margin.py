"""Vth variation study of the SLC read.

Draw 1000 devices per CT state at sigma = 40 mV, read each under both keys
and look at the SL populations.  The steady-state read model makes the SL
voltage a function of on/off only, so the populations collapse to points
as long as every draw stays on its side of V_R.  Moving V_R toward a level
shows where the margin actually goes.
"""

import numpy as np

from fexor.device import SLC, preset
from fexor.variation import McConfig, run_mc

prof = preset("sim-default", SLC)

rep = run_mc(McConfig(n_samples=1000, sigma_vth=0.04, seed=0), prof)
for combo, v in rep.v_sl_samples.items():
    print(f"CT={combo[0]} key={combo[1]}: SL mean {v.mean():.3f} V, spread {np.ptp(v):.3f} V")
print(f"worst-case margin: {rep.worst_case_margin:.3f} V")

print("\nsweeping the read voltage:")
for v_read in (0.45, 0.6, 1.1, 1.6, 1.7):
    m = run_mc(McConfig(n_samples=1000, v_read=v_read), prof).worst_case_margin
    print(f"  V_R = {v_read:.2f} V -> margin {m:+.3f} V")
