"""SLC encrypt-store / in-memory decrypt on an 8x6 array.

The ciphertext is a checkerboard, the key is random, and the plaintext is
whatever XORs to that checkerboard.  Decryption folds the key into the
BL/SL polarity of each column, so the SL voltage after one read already
carries PT.
"""

import numpy as np

from fexor import array as fa
from fexor.cipher import SenseThresholds, decrypt_array, encrypt_store, xor_decrypt
from fexor.device import SLC, preset

rng = np.random.default_rng(4)
prof = preset("sim-default", SLC)

ct_target = np.indices((8, 6)).sum(axis=0) % 2
key = rng.integers(0, 2, ct_target.shape)
pt = xor_decrypt(ct_target, key, 1)

arr = fa.new_array(8, 6, prof, rng=rng)
arr = encrypt_store(arr, pt, key, rng)  # reset, then one V_W/3 set step per row
print("stored CT (1 = HVT):")
print(arr.levels)

# the write schedule never stresses a half-selected cell past v_switch
for r in range(arr.rows):
    bias = fa.program_bias(arr.geometry, prof, r, ct_target[r])
    assert fa.disturb_audit(arr, bias, selected=r) == []

th = SenseThresholds.simulation(prof.v_dd)
decoded, traces = decrypt_array(arr, key, th)
print("\nSL voltages, row 0:", np.round(traces[0].sl_voltages[0], 3))
print("decrypted PT matches:", np.array_equal(decoded, pt))

# same array, wrong key: the output is PT ^ key ^ wrong
wrong = 1 - key
bad, _ = decrypt_array(arr, wrong, th)
print("wrong key gives PT ^ 1 everywhere:", np.array_equal(bad, 1 - pt))
