"""Behavioral simulator for single-FeFET in-memory XOR encryption.

Modules
-------
device     single-cell model: Vth levels, conduction, SL settling, write pulses
array      AND-array engine: V_W/3 write schedule, reads, disturb audit
cipher     XOR encrypt/decrypt (SLC single-cycle, MLC three-cycle)
variation  Monte Carlo Vth sensitivity of the SLC read
perf       cycle/throughput model and weight-stationary workload study
replay     measured-Vth fixture replay
"""

from .array import ArrayGeometry, BiasVector, FeArray, new_array
from .cipher import SenseThresholds, decrypt_array, encrypt_store, xor_encrypt
from .device import MLC, SLC, CellState, FerroProfile, load_profile, preset

__version__ = "0.1.0"

__all__ = [
    "ArrayGeometry", "BiasVector", "CellState", "FeArray", "FerroProfile", "MLC", "SLC",
    "SenseThresholds", "decrypt_array", "encrypt_store", "load_profile", "new_array",
    "preset", "xor_encrypt",
]
