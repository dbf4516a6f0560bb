"""In-memory XOR cipher on top of the array engine.

Encryption is an ordinary write of ``CT = PT ^ Key``.  Decryption folds the
key into the BL/SL polarity of each column so the read itself computes the
XOR: a conducting (low-Vth) cell copies BL onto SL, an off cell leaves the
precharge in place.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import array as fa
from .array import FeArray, ModeError
from .device import MLC, SLC, InvalidSymbolError


class IndeterminateSenseError(ValueError):
    """SL voltage fell between the low and high sense bands."""

    def __init__(self, message: str, columns=()):
        super().__init__(message)
        self.columns = tuple(int(c) for c in columns)


@dataclass(frozen=True)
class SenseThresholds:
    """SL decision bands: ``<= v_low_max`` reads 0, ``>= v_high_min`` reads 1.

    When the two are equal there is no gap and anything above the split
    reads 1.
    """

    v_low_max: float
    v_high_min: float

    def __post_init__(self):
        if not 0 <= self.v_low_max <= self.v_high_min:
            raise ValueError("need 0 <= v_low_max <= v_high_min")

    @classmethod
    def simulation(cls, v_dd: float = 0.5) -> "SenseThresholds":
        return cls(0.1 * v_dd, 0.5 * v_dd)

    @classmethod
    def experimental(cls) -> "SenseThresholds":
        return cls(0.1, 0.1)


def sense_thresholds(name: str, v_dd: float = 0.5) -> SenseThresholds:
    if name == "simulation":
        return SenseThresholds.simulation(v_dd)
    if name == "experimental":
        return SenseThresholds.experimental()
    raise ValueError(f"unknown sense-threshold preset {name!r}")


@dataclass
class DecryptTrace:
    """Per-cycle record of one row decryption."""

    v_read: list[float] = field(default_factory=list)
    sl_voltages: list[np.ndarray] = field(default_factory=list)
    bits: list[np.ndarray] = field(default_factory=list)
    indeterminate: list[np.ndarray] = field(default_factory=list)

    @property
    def cycles(self) -> int:
        return len(self.v_read)

    def to_dict(self) -> dict:
        return {
            "cycles": self.cycles,
            "v_read": list(self.v_read),
            "sl_voltages": [v.tolist() for v in self.sl_voltages],
            "bits": [b.tolist() for b in self.bits],
            "indeterminate": [m.tolist() for m in self.indeterminate],
        }


def _check_symbols(m: np.ndarray, max_symbol: int, what: str):
    if m.dtype.kind not in "iub" or m.size and (m.min() < 0 or m.max() > max_symbol):
        raise InvalidSymbolError(f"{what} entries must be integers in 0..{max_symbol}")


def xor_encrypt(pt, key, max_symbol: int = 3) -> np.ndarray:
    """Elementwise XOR; for 2-bit symbols this XORs MSB and LSB independently."""
    pt, key = np.asarray(pt), np.asarray(key)
    if pt.shape != key.shape:
        raise ValueError(f"plaintext {pt.shape} and key {key.shape} shapes differ")
    _check_symbols(pt, max_symbol, "plaintext")
    _check_symbols(key, max_symbol, "key")
    return np.bitwise_xor(pt, key)


xor_decrypt = xor_encrypt


def key_to_bias(key_bit, v_dd: float):
    """Key 1 -> (BL=V_DD, SL=GND); key 0 -> (BL=GND, SL=V_DD)."""
    k = np.asarray(key_bit)
    if not np.isin(k, (0, 1)).all():
        raise InvalidSymbolError("key bits must be 0/1")
    bl = np.where(k == 1, v_dd, 0.0)
    sl = np.where(k == 1, 0.0, v_dd)
    if k.ndim == 0:
        return float(bl), float(sl)
    return bl, sl


def sense(v_sl, key_bit, th: SenseThresholds):
    """Digitize an SL voltage.  *key_bit* does not alter the mapping."""
    bits, unknown = sense_vector(np.atleast_1d(v_sl), th)
    if unknown.any():
        raise IndeterminateSenseError(
            f"SL voltage {float(np.atleast_1d(v_sl)[0]):.4g} V is between "
            f"{th.v_low_max} and {th.v_high_min}"
        )
    return int(bits[0])


def sense_vector(v_sl, th: SenseThresholds) -> tuple[np.ndarray, np.ndarray]:
    """Vectorized sense returning ``(bits, indeterminate_mask)``.

    Indeterminate columns carry bit 0 in *bits*; callers must consult the mask.
    """
    v = np.asarray(v_sl, dtype=float)
    if th.v_low_max == th.v_high_min:
        high = v > th.v_low_max
        return high.astype(np.int8), np.zeros(v.shape, dtype=bool)
    high = v >= th.v_high_min
    low = v <= th.v_low_max
    return high.astype(np.int8), ~(high | low)


def _key_read(array: FeArray, row: int, key_bits, v_read: float, th: SenseThresholds):
    bl, sl = key_to_bias(np.asarray(key_bits), array.profile.v_dd)
    bias = fa.read_bias(array.geometry, array.profile, row, v_read, bl, sl)
    v_sl = fa.read_cycle(array, row, bias, v_read)
    bits, unknown = sense_vector(v_sl, th)
    return v_sl, bits, unknown


def _check_key_row(array: FeArray, key_row, max_symbol: int) -> np.ndarray:
    key = np.asarray(key_row)
    if key.shape != (array.cols,):
        raise ValueError(f"key row must have {array.cols} entries, got shape {key.shape}")
    _check_symbols(key, max_symbol, "key")
    return key


def decrypt_row_slc(array: FeArray, row: int, key_row, th: SenseThresholds):
    """Single-cycle SLC row decryption; mixed keys in one row are fine."""
    if array.mode != SLC:
        raise ModeError("decrypt_row_slc requires an SLC array")
    key = _check_key_row(array, key_row, 1)
    v_read = array.profile.v_read[0]
    v_sl, bits, unknown = _key_read(array, row, key, v_read, th)
    trace = DecryptTrace([v_read], [v_sl], [bits], [unknown])
    if unknown.any():
        cols = np.flatnonzero(unknown)
        raise IndeterminateSenseError(f"row {row}: indeterminate SL at columns {cols.tolist()}", cols)
    return bits.astype(np.int8), trace


def mlc_read_schedule(profile) -> tuple[float, float, float]:
    """WL voltages of the three MLC cycles: V_R2, then V_R1, then V_R3."""
    vr1, vr2, vr3 = sorted(profile.v_read)
    return vr2, vr1, vr3


def decrypt_row_mlc(array: FeArray, row: int, key_row, th: SenseThresholds):
    """Three-cycle MLC row decryption.

    Cycle 1 (V_R2, MSB key) yields PT_MSB.  Cycles 2 (V_R1) and 3 (V_R3) both
    run with the LSB key; the recovered CT_MSB picks which one holds PT_LSB.
    All three cycles always run.
    """
    if array.mode != MLC:
        raise ModeError("decrypt_row_mlc requires an MLC array")
    key = _check_key_row(array, key_row, 3)
    k_msb, k_lsb = key >> 1, key & 1
    vr2, vr1, vr3 = mlc_read_schedule(array.profile)

    trace = DecryptTrace()
    for v_read, kb in ((vr2, k_msb), (vr1, k_lsb), (vr3, k_lsb)):
        v_sl, bits, unknown = _key_read(array, row, kb, v_read, th)
        trace.v_read.append(v_read)
        trace.sl_voltages.append(v_sl)
        trace.bits.append(bits)
        trace.indeterminate.append(unknown)

    pt_msb = trace.bits[0]
    ct_msb = pt_msb ^ k_msb
    pt_lsb = np.where(ct_msb == 0, trace.bits[1], trace.bits[2])
    # only the decisive cycle's ambiguity matters
    bad = trace.indeterminate[0] | np.where(
        ct_msb == 0, trace.indeterminate[1], trace.indeterminate[2]
    )
    if bad.any():
        cols = np.flatnonzero(bad)
        raise IndeterminateSenseError(f"row {row}: undecodable columns {cols.tolist()}", cols)
    return ((pt_msb << 1) | pt_lsb).astype(np.int8), trace


def decrypt_row(array: FeArray, row: int, key_row, th: SenseThresholds):
    if array.mode == SLC:
        return decrypt_row_slc(array, row, key_row, th)
    return decrypt_row_mlc(array, row, key_row, th)


def decrypt_array(array: FeArray, key, th: SenseThresholds, strict: bool = True):
    """Decrypt every row; returns ``(pt_matrix, [trace per row])``.

    With ``strict=False`` undecodable cells come back as -1 instead of raising.
    """
    key = np.asarray(key)
    if key.shape != array.geometry.shape:
        raise ValueError(f"key {key.shape} does not match array {array.geometry.shape}")
    rows, traces = [], []
    for r in range(array.rows):
        try:
            pt, tr = decrypt_row(array, r, key[r], th)
        except IndeterminateSenseError as exc:
            if strict:
                raise
            pt, tr = _decode_partial(array, r, key[r], th)
            pt[list(exc.columns)] = -1
        rows.append(pt)
        traces.append(tr)
    return np.vstack(rows), traces


def _decode_partial(array: FeArray, row: int, key_row, th: SenseThresholds):
    # rerun with a gapless split so every column yields a bit
    mid = (th.v_low_max + th.v_high_min) / 2
    return decrypt_row(array, row, key_row, SenseThresholds(mid, mid))


def encrypt_store(array: FeArray, pt, key, rng: np.random.Generator | None = None) -> FeArray:
    """Write ``pt ^ key`` into the array.

    SLC uses the physical reset + per-row V_W/3 set schedule; MLC uses a
    single-shot level set.
    """
    max_symbol = array.profile.hvt
    ct = xor_encrypt(pt, key, max_symbol=max_symbol)
    if ct.shape != array.geometry.shape:
        raise ValueError(f"data {ct.shape} does not match array {array.geometry.shape}")
    if array.mode == SLC:
        return fa.program_matrix_slc(array, ct, rng)
    return fa.program_levels(array, ct, rng)
