"""Behavioral single-FeFET model.

Polarization is abstracted to a discrete stored symbol whose threshold
voltage is looked up in a :class:`FerroProfile`.  A read is an ideal switch
on gate overdrive, and a write is a thresholded pulse on gate-to-channel
voltage.  Every function here is pure; randomness is passed in explicitly.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field, replace
from importlib import resources
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np

SLC = "SLC"
MLC = "MLC"
MODES = (SLC, MLC)


class InvalidSymbolError(ValueError):
    """A ciphertext symbol outside the alphabet of the active mode."""


class InconsistentPulseError(ValueError):
    """Write pulse polarity disagrees with the requested target state."""


class ProfileError(ValueError):
    """A FerroProfile violates one of its electrical invariants."""


def _int_keys(m: Mapping) -> dict[int, float]:
    return {int(k): float(v) for k, v in m.items()}


@dataclass(frozen=True)
class FerroProfile:
    """Device and bias constants for one storage mode.

    Symbols are plain ints: 0/1 for SLC, 0..3 for MLC (``0b10`` is CT '10').
    ``vth_bands`` optionally lists one ``(lo, hi)`` classification window per
    symbol; when absent the windows are split at the read voltages.
    """

    mode: str = SLC
    v_dd: float = 0.5
    v_w_set: float = 3.6
    v_w_reset: float = 3.2
    v_inhibit_bl_sl: float = 2.4
    v_inhibit_wl: float = 1.2
    v_read: tuple[float, ...] = (1.1,)
    vth_levels: Mapping[int, float] = field(default_factory=lambda: {0: 0.4, 1: 1.75})
    sigma_vth: float = 0.040
    eta_transfer: float = 0.98
    v_switch: float | None = None
    unselected_wl_bias: float = -0.5
    polarization_map: Mapping[int, float] = field(default_factory=lambda: {0: 2.5, 1: -2.5})
    vth_bands: tuple[tuple[float, float], ...] | None = None

    def __post_init__(self):
        object.__setattr__(self, "v_read", tuple(float(v) for v in self.v_read))
        object.__setattr__(self, "vth_levels", _int_keys(self.vth_levels))
        object.__setattr__(self, "polarization_map", _int_keys(self.polarization_map))
        if self.v_switch is None:
            object.__setattr__(self, "v_switch", self.v_w_set / 2)
        if self.vth_bands is not None:
            object.__setattr__(
                self, "vth_bands", tuple((float(lo), float(hi)) for lo, hi in self.vth_bands)
            )
        self.validate()

    # ------------------------------------------------------------------
    @property
    def symbols(self) -> tuple[int, ...]:
        return (0, 1) if self.mode == SLC else (0, 1, 2, 3)

    @property
    def lvt(self) -> int:
        return 0

    @property
    def hvt(self) -> int:
        return self.symbols[-1]

    @property
    def bits_per_cell(self) -> int:
        return 1 if self.mode == SLC else 2

    @property
    def v_w(self) -> float:
        """Write amplitude the V_W/3 inhibit scheme is built around."""
        return self.v_w_set

    @property
    def bands(self) -> tuple[tuple[float, float], ...]:
        if self.vth_bands is not None:
            return self.vth_bands
        edges = (-math.inf, *self.v_read, math.inf)
        return tuple(zip(edges[:-1], edges[1:]))

    def vth_table(self) -> np.ndarray:
        """Nominal Vth indexed by symbol, for vectorized lookup."""
        return np.array([self.vth_levels[s] for s in self.symbols], dtype=float)

    def validate(self) -> None:
        if self.mode not in MODES:
            raise ProfileError(f"mode must be one of {MODES}, got {self.mode!r}")
        syms = self.symbols
        if set(self.vth_levels) != set(syms):
            raise ProfileError(f"vth_levels must cover symbols {syms}")
        if set(self.polarization_map) != set(syms):
            raise ProfileError(f"polarization_map must cover symbols {syms}")
        vth = [self.vth_levels[s] for s in syms]
        pol = [self.polarization_map[s] for s in syms]
        if any(b <= a for a, b in zip(vth, vth[1:])):
            raise ProfileError("vth_levels must be strictly increasing in symbol value")
        if any(b >= a for a, b in zip(pol, pol[1:])):
            raise ProfileError("polarization_map must be strictly decreasing in symbol value")
        if len(self.v_read) != len(syms) - 1:
            raise ProfileError(f"{self.mode} needs {len(syms) - 1} read voltage(s)")
        if vth[0] <= 0:
            raise ProfileError("lowest Vth level must be positive")
        # read window: vth(0) < V_R1 < vth(1) < V_R2 < ...
        for i, vr in enumerate(sorted(self.v_read)):
            if not vth[i] < vr < vth[i + 1]:
                raise ProfileError(
                    f"read voltage {vr} V does not separate Vth levels {vth[i]} and {vth[i + 1]}"
                )
        if not self.v_inhibit_wl < self.v_switch <= self.v_w_set:
            raise ProfileError("need v_inhibit_wl < v_switch <= v_w_set")
        if self.v_w_reset < self.v_switch:
            raise ProfileError("reset pulse amplitude must reach v_switch")
        if max(self.v_read) >= self.v_switch:
            raise ProfileError("read voltages must stay below v_switch (reads are non-destructive)")
        if self.sigma_vth < 0:
            raise ProfileError("sigma_vth must be non-negative")
        if not 0 < self.eta_transfer <= 1:
            raise ProfileError("eta_transfer must lie in (0, 1]")
        if self.vth_bands is not None and len(self.vth_bands) != len(syms):
            raise ProfileError("vth_bands needs one (lo, hi) window per symbol")

    # ------------------------------------------------------------------
    def with_(self, **changes) -> "FerroProfile":
        return replace(self, **changes)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["vth_levels"] = {str(k): v for k, v in self.vth_levels.items()}
        d["polarization_map"] = {str(k): v for k, v in self.polarization_map.items()}
        d["v_read"] = list(self.v_read)
        if self.vth_bands is not None:
            d["vth_bands"] = [list(b) for b in self.vth_bands]
        return d

    @classmethod
    def from_dict(cls, d: Mapping) -> "FerroProfile":
        known = set(cls.__dataclass_fields__)
        unknown = set(d) - known
        if unknown:
            raise ProfileError(f"unknown profile keys: {sorted(unknown)}")
        mode = d.get("mode", SLC)
        base = _MODE_DEFAULTS[mode] if mode in _MODE_DEFAULTS else {}
        merged = {**base, **d}
        if "vth_bands" in merged and merged["vth_bands"] is not None:
            merged["vth_bands"] = tuple(tuple(b) for b in merged["vth_bands"])
        return cls(**merged)


# MLC reads reach 2.5 V, so the default switching onset is moved above the
# highest read voltage instead of v_w_set/2.
_MODE_DEFAULTS: dict[str, dict] = {
    SLC: {},
    MLC: {
        "v_read": (1.1, 1.8, 2.5),
        "vth_levels": {0: 0.4, 1: 1.45, 2: 2.15, 3: 2.85},
        "polarization_map": {0: 2.5, 1: 0.0, 2: -2.5, 3: -5.0},
        "v_switch": 3.05,
    },
}

PRESETS = ("sim-default", "28nm-experimental")


def load_profile(path: str | Path, mode: str | None = None) -> FerroProfile:
    """Load a profile from JSON.

    The file is either a flat mapping of profile fields or a preset-style
    mapping keyed by mode (``{"SLC": {...}, "MLC": {...}}``), in which case
    *mode* picks the section.
    """
    with open(path) as fh:
        data = json.load(fh)
    return _profile_from_json(data, mode)


def _profile_from_json(data: Mapping, mode: str | None) -> FerroProfile:
    if set(data) & set(MODES):
        mode = mode or SLC
        if mode not in data:
            raise ProfileError(f"profile file has no {mode} section")
        section = {k: v for k, v in data[mode].items()}
        section.setdefault("mode", mode)
        return FerroProfile.from_dict(section)
    if mode is not None and data.get("mode", SLC) != mode:
        raise ProfileError(f"profile file is {data.get('mode', SLC)}, requested {mode}")
    return FerroProfile.from_dict(data)


def preset(name: str = "sim-default", mode: str = SLC) -> FerroProfile:
    """One of the bundled profiles: ``sim-default`` or ``28nm-experimental``."""
    if name not in PRESETS:
        raise ProfileError(f"unknown preset {name!r}; choose from {PRESETS}")
    text = resources.files("fexor.data.presets").joinpath(f"{name}.json").read_text()
    return _profile_from_json(json.loads(text), mode)


def save_profile(profile: FerroProfile, path: str | Path) -> None:
    with open(path, "w") as fh:
        json.dump(profile.to_dict(), fh, indent=2, sort_keys=True)
        fh.write("\n")


# ----------------------------------------------------------------------
# cell-level operations
# ----------------------------------------------------------------------

@dataclass(frozen=True)
class CellState:
    level: int
    vth_actual: float


def _check_symbol(level, profile: FerroProfile) -> int:
    try:
        s = int(level)
    except (TypeError, ValueError):
        raise InvalidSymbolError(f"not a symbol: {level!r}") from None
    if s != level or s not in profile.symbols:
        raise InvalidSymbolError(f"symbol {level!r} invalid for {profile.mode}")
    return s


def vth_of(level: int, profile: FerroProfile) -> float:
    return profile.vth_levels[_check_symbol(level, profile)]


def conducts(v_wl, v_bl, v_sl, vth):
    """Ideal-switch conduction test, elementwise over arrays.

    The lower of the two channel terminals acts as source, so the same rule
    covers current flowing BL->SL and SL->BL.
    """
    on = np.asarray(v_wl, dtype=float) - np.minimum(v_bl, v_sl) > vth
    return bool(on) if on.ndim == 0 else on


def settle_sl(on, v_bl, v_sl_precharge, profile: FerroProfile):
    """Steady-state SL voltage after a read: precharge pulled toward BL by eta."""
    pre = np.asarray(v_sl_precharge, dtype=float)
    out = np.where(on, pre + profile.eta_transfer * (np.asarray(v_bl, dtype=float) - pre), pre)
    return float(out) if out.ndim == 0 else out


def sample_vth(level: int, profile: FerroProfile, rng: np.random.Generator | None = None, size=None):
    """Nominal Vth of *level* plus a Gaussian draw of width ``sigma_vth``.

    With ``sigma_vth == 0`` (or no rng) the nominal value is returned exactly.
    """
    nominal = vth_of(level, profile)
    if profile.sigma_vth == 0 or rng is None:
        return nominal if size is None else np.full(size, nominal)
    return nominal + rng.normal(0.0, profile.sigma_vth, size=size)


def switches(v_gate, v_channel, profile: FerroProfile):
    return np.abs(np.asarray(v_gate) - np.asarray(v_channel)) >= profile.v_switch


def apply_write_pulse(
    cell: CellState,
    v_gate: float,
    v_channel: float,
    target_if_switch: int,
    profile: FerroProfile,
    rng: np.random.Generator | None = None,
) -> CellState:
    """Apply one gate pulse to a cell.

    Positive gate-to-channel voltage may only move the cell toward lower Vth,
    negative only toward higher Vth.  Below ``v_switch`` the cell is returned
    unchanged.
    """
    target = _check_symbol(target_if_switch, profile)
    dv = float(v_gate) - float(v_channel)
    if dv > 0 and target > cell.level or dv < 0 and target < cell.level:
        raise InconsistentPulseError(
            f"pulse of {dv:+.3g} V cannot move level {cell.level} to {target}"
        )
    if abs(dv) < profile.v_switch:
        return cell
    return CellState(target, float(sample_vth(target, profile, rng)))


def id_vg_curve(
    cell: CellState,
    v_g_start: float = -0.2,
    v_g_stop: float = 1.8,
    step: float = 0.1,
    v_drain: float = 0.1,
    slope: float = 0.05,
) -> tuple[np.ndarray, np.ndarray]:
    """Normalized transfer curve for plotting: logistic turn-on at vth_actual.

    Returns ``(v_g, i_norm)`` with ``i_norm`` in (0, 1), crossing 0.5 at the
    threshold.  *v_drain* only scales absolute current and is kept for
    parity with the measurement sweep.
    """
    if step <= 0 or not v_g_start < v_g_stop:
        raise ValueError("need step > 0 and v_g_start < v_g_stop")
    n = int(round((v_g_stop - v_g_start) / step)) + 1
    v_g = v_g_start + step * np.arange(n)
    i_norm = 1.0 / (1.0 + np.exp(-(v_g - cell.vth_actual) / slope))
    return v_g, i_norm


def vth_to_symbol(vth, profile: FerroProfile):
    """Classify Vth values into symbols using the profile's bands.

    Bands are half-open ``[lo, hi)``; the last band is closed on the right.
    Values outside every band map to -1.
    """
    vth = np.asarray(vth, dtype=float)
    out = np.full(vth.shape, -1, dtype=int)
    bands = profile.bands
    for sym, (lo, hi) in zip(profile.symbols, bands):
        upper = vth <= hi if sym == profile.symbols[-1] else vth < hi
        out[(vth >= lo) & upper & (out < 0)] = sym
    return out
