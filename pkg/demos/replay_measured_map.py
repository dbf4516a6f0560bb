"""Replay a Vth map through the band classifier and the read path.

The bundled fixture is synthetic (band centres plus noise, with two cells
moved by hand) and stands in for a measured 8x6 MLC map.  Each Vth is
classified into a CT band, and the same map is read at the experimental
read voltages to give the decryption error map.
"""

import numpy as np

from fexor.replay import bundled_fixture, replay_experiment

fix = bundled_fixture("synthetic_mlc_8x6")
print(fix.provenance)

res = replay_experiment(fix)
print("\nclassified CT:")
print(res.ct_classified)
print("\nerror map:")
print(res.error_map.astype(int))
print(f"\n{res.error_count}/{res.error_map.size} decryption errors ({100 * res.error_rate:.2f}%)")
print("out-of-band cells:", np.argwhere(res.unclassifiable).tolist())
