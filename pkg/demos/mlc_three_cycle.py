"""2-bit MLC decryption in three read cycles.

Cycle 1 reads at V_R2 with the key MSB and yields PT_MSB.  From that we know
CT_MSB, which says whether the LSB lives in the V_R1 read (cycle 2) or the
V_R3 read (cycle 3).  Both cycles run; the decoder picks one per column.
"""

import numpy as np

from fexor import array as fa
from fexor.cipher import SenseThresholds, decrypt_row_mlc, mlc_read_schedule
from fexor.device import MLC, preset

prof = preset("sim-default", MLC).with_(sigma_vth=0.0)
print("read order:", mlc_read_schedule(prof))

th = SenseThresholds.simulation(prof.v_dd)
print("\nCT  key  cycle bits        PT")
for ct in range(4):
    arr = fa.new_array(1, 4, prof, levels=[[ct] * 4])
    key = np.arange(4)
    pt, tr = decrypt_row_mlc(arr, 0, key, th)
    for k in range(4):
        bits = [int(b[k]) for b in tr.bits]
        print(f"{ct:02b}  {k:02b}   {bits}   {pt[k]:02b}")

# with variation the levels blur; widening sigma past the half-gap breaks reads
rng = np.random.default_rng(0)
levels = rng.integers(0, 4, (8, 6))
for sigma in (0.04, 0.15, 0.3):
    noisy = prof.with_(sigma_vth=sigma)
    arr = fa.program_levels(fa.new_array(8, 6, noisy), levels, rng)
    key = np.zeros_like(levels)
    rows = [decrypt_row_mlc(arr, r, key[r], SenseThresholds(0.25, 0.25))[0] for r in range(8)]
    print(f"sigma={sigma:.2f} V: readback accuracy {(np.vstack(rows) == levels).mean():.3f}")
