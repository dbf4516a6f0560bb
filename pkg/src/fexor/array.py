"""AND-type FeFET array: gates share a WL per row, drains/sources share BL/SL per column.

:class:`FeArray` is a value.  Every operation returns a new array and leaves
its input untouched.  Cell state is held as two ``rows x cols`` numpy
matrices (stored symbol and sampled Vth) rather than a grid of objects;
``FeArray.cell`` hands out :class:`~fexor.device.CellState` views.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable

import numpy as np

from . import device
from .device import MLC, SLC, CellState, FerroProfile, InvalidSymbolError


class ModeError(ValueError):
    """Operation not available in the array's storage mode."""


@dataclass(frozen=True)
class ArrayGeometry:
    rows: int
    cols: int

    def __post_init__(self):
        if int(self.rows) < 1 or int(self.cols) < 1:
            raise ValueError(f"array needs rows >= 1 and cols >= 1, got {self.rows}x{self.cols}")

    @property
    def shape(self) -> tuple[int, int]:
        return (self.rows, self.cols)

    def check_row(self, row: int) -> int:
        if not 0 <= row < self.rows:
            raise IndexError(f"row {row} out of range for {self.rows} rows")
        return row


@dataclass(frozen=True)
class BiasVector:
    """Line voltages for one array cycle."""

    wl: np.ndarray
    bl: np.ndarray
    sl_precharge: np.ndarray

    def __post_init__(self):
        for name in ("wl", "bl", "sl_precharge"):
            v = np.asarray(getattr(self, name), dtype=float)
            if v.ndim != 1 or not np.all(np.isfinite(v)):
                raise ValueError(f"{name} must be a finite 1-D voltage vector")
            object.__setattr__(self, name, v)
        if len(self.bl) != len(self.sl_precharge):
            raise ValueError("bl and sl_precharge lengths differ")

    def check(self, geometry: ArrayGeometry) -> "BiasVector":
        if len(self.wl) != geometry.rows or len(self.bl) != geometry.cols:
            raise ValueError(
                f"bias is {len(self.wl)}x{len(self.bl)}, array is {geometry.rows}x{geometry.cols}"
            )
        return self


@dataclass(frozen=True)
class FeArray:
    geometry: ArrayGeometry
    levels: np.ndarray
    vth: np.ndarray
    profile: FerroProfile = field(repr=False)

    def __post_init__(self):
        levels = np.array(self.levels, dtype=np.int8)
        vth = np.array(self.vth, dtype=float)
        if levels.shape != self.geometry.shape or vth.shape != self.geometry.shape:
            raise ValueError(f"cell matrices must be {self.geometry.shape}")
        if not np.isin(levels, self.profile.symbols).all():
            raise InvalidSymbolError(f"array holds symbols invalid for {self.profile.mode}")
        if not np.all(np.isfinite(vth)):
            raise ValueError("vth must be finite")
        levels.setflags(write=False)
        vth.setflags(write=False)
        object.__setattr__(self, "levels", levels)
        object.__setattr__(self, "vth", vth)

    @property
    def mode(self) -> str:
        return self.profile.mode

    @property
    def rows(self) -> int:
        return self.geometry.rows

    @property
    def cols(self) -> int:
        return self.geometry.cols

    def cell(self, row: int, col: int) -> CellState:
        return CellState(int(self.levels[row, col]), float(self.vth[row, col]))

    def _evolve(self, levels, vth) -> "FeArray":
        return FeArray(self.geometry, levels, vth, self.profile)

    def same_state(self, other: "FeArray") -> bool:
        return np.array_equal(self.levels, other.levels) and np.array_equal(self.vth, other.vth)


def new_array(
    rows: int,
    cols: int,
    profile: FerroProfile,
    levels=None,
    rng: np.random.Generator | None = None,
) -> FeArray:
    """Array with the given levels (default: all HVT) and freshly sampled Vth."""
    geom = ArrayGeometry(rows, cols)
    if levels is None:
        levels = np.full(geom.shape, profile.hvt, dtype=np.int8)
    levels = np.asarray(levels)
    if not np.isin(levels, profile.symbols).all():
        raise InvalidSymbolError(f"level matrix holds symbols invalid for {profile.mode}")
    return FeArray(geom, levels, _sample(levels, profile, rng), profile)


def _sample(levels: np.ndarray, profile: FerroProfile, rng) -> np.ndarray:
    nominal = profile.vth_table()[levels]
    if rng is None or profile.sigma_vth == 0:
        return nominal
    return nominal + rng.normal(0.0, profile.sigma_vth, size=nominal.shape)


# ----------------------------------------------------------------------
# bias schedules
# ----------------------------------------------------------------------

def reset_bias(geometry: ArrayGeometry, profile: FerroProfile) -> BiasVector:
    """Write step 1: -V_W on every WL with all columns grounded."""
    return BiasVector(
        wl=np.full(geometry.rows, -profile.v_w_reset),
        bl=np.zeros(geometry.cols),
        sl_precharge=np.zeros(geometry.cols),
    )


def program_bias(geometry: ArrayGeometry, profile: FerroProfile, row: int, ct_bits) -> BiasVector:
    """Write step 2 (V_W/3 scheme) for one row.

    Selected WL at +V_W, unselected WLs at +V_W/3; columns that must stay
    HVT get BL = SL = 2V_W/3, the rest are grounded.
    """
    geometry.check_row(row)
    bits = np.asarray(ct_bits)
    if bits.shape != (geometry.cols,):
        raise ValueError(f"ct row must have {geometry.cols} entries, got shape {bits.shape}")
    wl = np.full(geometry.rows, profile.v_inhibit_wl)
    wl[row] = profile.v_w_set
    col_v = np.where(bits == 1, profile.v_inhibit_bl_sl, 0.0)
    return BiasVector(wl=wl, bl=col_v, sl_precharge=col_v.copy())


def _apply_bias(array: FeArray, bias: BiasVector, rng) -> FeArray:
    """Pulse every cell with its WL-to-channel voltage.

    Write schedules tie BL and SL together, so the channel sits at that
    shared potential.
    """
    bias.check(array.geometry)
    if not np.array_equal(bias.bl, bias.sl_precharge):
        raise ValueError("write bias must hold BL and SL at the same potential")
    prof = array.profile
    dv = bias.wl[:, None] - bias.bl[None, :]
    # positive pulses drive toward LVT, negative toward HVT
    target = np.where(dv > 0, prof.lvt, np.where(dv < 0, prof.hvt, array.levels))
    hit = device.switches(bias.wl[:, None], bias.bl[None, :], prof)
    levels = np.where(hit, target, array.levels).astype(np.int8)
    vth = np.where(hit, _sample(levels, prof, rng), array.vth)
    return array._evolve(levels, vth)


# ----------------------------------------------------------------------
# operations
# ----------------------------------------------------------------------

def reset_all(array: FeArray, rng: np.random.Generator | None = None) -> FeArray:
    """Erase every cell to the highest-Vth symbol."""
    return _apply_bias(array, reset_bias(array.geometry, array.profile), rng)


def program_row_slc(
    array: FeArray, row: int, ct_bits, rng: np.random.Generator | None = None
) -> FeArray:
    """Set-to-LVT step of the two-step SLC write for *row*.

    Assumes the array was reset; HVT targets are only inhibited, not erased.
    """
    if array.mode != SLC:
        raise ModeError("program_row_slc requires an SLC array")
    bits = np.asarray(ct_bits)
    if bits.shape != (array.cols,):
        raise ValueError(f"ct row must have {array.cols} entries, got shape {bits.shape}")
    if not np.isin(bits, (0, 1)).all():
        raise InvalidSymbolError("SLC ciphertext must be 0/1")
    return _apply_bias(array, program_bias(array.geometry, array.profile, row, bits), rng)


def program_matrix_slc(array: FeArray, ct, rng: np.random.Generator | None = None) -> FeArray:
    """Full SLC write: reset, then one set step per row."""
    ct = np.asarray(ct)
    if ct.shape != array.geometry.shape:
        raise ValueError(f"ciphertext shape {ct.shape} does not match array {array.geometry.shape}")
    out = reset_all(array, rng)
    for r in range(array.rows):
        out = program_row_slc(out, r, ct[r], rng)
    return out


def program_levels(array: FeArray, levels, rng: np.random.Generator | None = None) -> FeArray:
    """Single-shot direct level set (no write-verify), used for MLC."""
    levels = np.asarray(levels)
    if levels.shape != array.geometry.shape:
        raise ValueError(f"level matrix {levels.shape} does not match array {array.geometry.shape}")
    if not np.isin(levels, array.profile.symbols).all():
        raise InvalidSymbolError(f"level matrix holds symbols invalid for {array.mode}")
    return array._evolve(levels, _sample(levels, array.profile, rng))


def read_bias(geometry: ArrayGeometry, profile: FerroProfile, row: int, v_read: float,
              bl, sl_precharge) -> BiasVector:
    geometry.check_row(row)
    wl = np.full(geometry.rows, profile.unselected_wl_bias)
    wl[row] = v_read
    return BiasVector(wl=wl, bl=bl, sl_precharge=sl_precharge)


def read_cycle(array: FeArray, row: int, bias: BiasVector, v_read: float) -> np.ndarray:
    """One read: *v_read* on the selected WL, bias.wl elsewhere.

    Every cell on a column shares that column's BL/SL, so the column conducts
    if any cell on it is on.  Unselected WLs sit at a negative bias, which
    keeps their cells off under the ideal-switch rule.
    """
    array.geometry.check_row(row)
    bias.check(array.geometry)
    wl = bias.wl.copy()
    wl[row] = v_read
    on = device.conducts(wl[:, None], bias.bl[None, :], bias.sl_precharge[None, :], array.vth)
    return device.settle_sl(on.any(axis=0), bias.bl, bias.sl_precharge, array.profile)


def disturb_audit(
    array: FeArray, bias: BiasVector, selected: int | Iterable[int] | None = None
) -> list[tuple[int, int, float]]:
    """Cells outside the selected row(s) that would see at least v_switch.

    Returns ``(row, col, |dV|)`` triples where |dV| is the larger of the
    WL-BL and WL-SL stresses; an empty list means the cycle is disturb-free.
    """
    bias.check(array.geometry)
    if selected is None:
        sel = set()
    elif isinstance(selected, (int, np.integer)):
        sel = {int(selected)}
    else:
        sel = {int(r) for r in selected}
    dv = np.maximum(
        np.abs(bias.wl[:, None] - bias.bl[None, :]),
        np.abs(bias.wl[:, None] - bias.sl_precharge[None, :]),
    )
    bad = dv >= array.profile.v_switch
    return [
        (int(r), int(c), float(dv[r, c]))
        for r, c in zip(*np.nonzero(bad))
        if int(r) not in sel
    ]


# ----------------------------------------------------------------------
# state dump / load
# ----------------------------------------------------------------------

def dumps_csv(array: FeArray) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n", quoting=csv.QUOTE_NONE)
    w.writerow([f"# rows={array.rows}", f"cols={array.cols}", f"mode={array.mode}"])
    for r in range(array.rows):
        w.writerow([f"{int(l)}:{float(v)!r}" for l, v in zip(array.levels[r], array.vth[r])])
    return buf.getvalue()


def loads_csv(text: str, profile: FerroProfile) -> FeArray:
    lines = text.strip("\n").split("\n")
    header = lines[0].lstrip("#").strip().split(",")
    meta = dict(item.strip().split("=", 1) for item in header)
    rows, cols = int(meta["rows"]), int(meta["cols"])
    if meta["mode"] != profile.mode:
        raise ModeError(f"dump is {meta['mode']}, profile is {profile.mode}")
    body = [line.split(",") for line in lines[1:]]
    if len(body) != rows or any(len(r) != cols for r in body):
        raise ValueError("array dump does not match its header geometry")
    levels = [[int(cell.split(":")[0]) for cell in r] for r in body]
    vth = [[float(cell.split(":")[1]) for cell in r] for r in body]
    return FeArray(ArrayGeometry(rows, cols), levels, vth, profile)


def to_json(array: FeArray) -> dict:
    return {
        "rows": array.rows,
        "cols": array.cols,
        "mode": array.mode,
        "levels": array.levels.tolist(),
        "vth": array.vth.tolist(),
        "profile": array.profile.to_dict(),
    }


def from_json(d: dict) -> FeArray:
    prof = FerroProfile.from_dict(d["profile"])
    if prof.mode != d["mode"]:
        raise ModeError("array mode and profile mode disagree")
    return FeArray(ArrayGeometry(d["rows"], d["cols"]), d["levels"], d["vth"], prof)


def save(array: FeArray, path: str | Path) -> None:
    path = Path(path)
    if path.suffix == ".json":
        path.write_text(json.dumps(to_json(array), indent=2, sort_keys=True) + "\n")
    else:
        path.write_text(dumps_csv(array))


def load(path: str | Path, profile: FerroProfile | None = None) -> FeArray:
    path = Path(path)
    if path.suffix == ".json":
        return from_json(json.loads(path.read_text()))
    text = path.read_text()
    if profile is None:
        mode = SLC if "mode=SLC" in text.split("\n", 1)[0] else MLC
        profile = device.preset("sim-default", mode)
    return loads_csv(text, profile)
