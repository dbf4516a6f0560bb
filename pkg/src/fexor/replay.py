"""Replay measured Vth maps through the decryption logic.

A fixture holds a measured Vth matrix, the key used, and the reference
plaintext.  Each Vth is classified into a ciphertext band (for the
encryption error map) and also read through the array model at the
profile's read voltages (for the decryption error map).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import numpy as np

from .array import ArrayGeometry, FeArray
from .cipher import decrypt_array, sense_thresholds
from .device import MLC, SLC, FerroProfile, preset, vth_to_symbol


@dataclass(frozen=True)
class ReplayFixture:
    vth: np.ndarray
    key: np.ndarray
    pt_reference: np.ndarray
    mode: str = MLC
    band_preset: str = "28nm-experimental"
    sense_preset: str = "experimental"
    provenance: str = ""

    def __post_init__(self):
        vth = np.asarray(self.vth, dtype=float)
        key = np.asarray(self.key, dtype=int)
        pt = np.asarray(self.pt_reference, dtype=int)
        if vth.ndim != 2 or key.shape != vth.shape or pt.shape != vth.shape:
            raise ValueError("fixture matrices must share one 2-D shape")
        top = 1 if self.mode == SLC else 3
        for name, m in (("key", key), ("pt_reference", pt)):
            if ((m < 0) | (m > top)).any():
                raise ValueError(f"{name} entries out of range for {self.mode}")
        object.__setattr__(self, "vth", vth)
        object.__setattr__(self, "key", key)
        object.__setattr__(self, "pt_reference", pt)

    @classmethod
    def from_dict(cls, d: dict) -> "ReplayFixture":
        return cls(
            vth=d["vth"], key=d["key"], pt_reference=d["pt_reference"],
            mode=d.get("mode", MLC), band_preset=d.get("band_preset", "28nm-experimental"),
            sense_preset=d.get("sense_preset", "experimental"), provenance=d.get("provenance", ""),
        )

    def to_dict(self) -> dict:
        return {
            "vth": self.vth.tolist(), "key": self.key.tolist(),
            "pt_reference": self.pt_reference.tolist(), "mode": self.mode,
            "band_preset": self.band_preset, "sense_preset": self.sense_preset,
            "provenance": self.provenance,
        }


def load_fixture(path: str | Path) -> ReplayFixture:
    return ReplayFixture.from_dict(json.loads(Path(path).read_text()))


def bundled_fixture(name: str) -> ReplayFixture:
    text = resources.files("fexor.data.fixtures").joinpath(f"{name}.json").read_text()
    return ReplayFixture.from_dict(json.loads(text))


def has_bundled_fixture(name: str) -> bool:
    return resources.files("fexor.data.fixtures").joinpath(f"{name}.json").is_file()


@dataclass
class ReplayResult:
    decoded_pt: np.ndarray
    error_map: np.ndarray
    ct_classified: np.ndarray
    ct_target: np.ndarray
    unclassifiable: np.ndarray
    sl_maps: list[np.ndarray] = field(default_factory=list)

    @property
    def error_count(self) -> int:
        return int(self.error_map.sum())

    @property
    def error_rate(self) -> float:
        return self.error_count / self.error_map.size

    @property
    def encryption_errors(self) -> int:
        return int((self.ct_classified != self.ct_target).sum())

    def to_dict(self) -> dict:
        return {
            "decoded_pt": self.decoded_pt.tolist(),
            "error_map": self.error_map.astype(int).tolist(),
            "error_count": self.error_count,
            "error_rate": self.error_rate,
            "cells": int(self.error_map.size),
            "ct_classified": self.ct_classified.tolist(),
            "ct_target": self.ct_target.tolist(),
            "encryption_errors": self.encryption_errors,
            "unclassifiable": np.argwhere(self.unclassifiable).tolist(),
        }


def replay_experiment(fix: ReplayFixture, profile: FerroProfile | None = None) -> ReplayResult:
    profile = profile or preset(fix.band_preset, fix.mode)
    if profile.mode != fix.mode:
        raise ValueError(f"fixture is {fix.mode}, profile is {profile.mode}")
    ct = vth_to_symbol(fix.vth, profile)
    unclassifiable = ct < 0
    # placeholder level for out-of-band cells; reads only look at vth
    nearest = np.abs(fix.vth[..., None] - profile.vth_table()).argmin(axis=-1)
    levels = np.where(unclassifiable, nearest, ct)

    arr = FeArray(ArrayGeometry(*fix.vth.shape), levels, fix.vth, profile)
    th = sense_thresholds(fix.sense_preset, profile.v_dd)
    decoded, traces = decrypt_array(arr, fix.key, th, strict=False)

    error_map = (decoded != fix.pt_reference) | unclassifiable
    n_cycles = traces[0].cycles
    sl_maps = [np.vstack([t.sl_voltages[i] for t in traces]) for i in range(n_cycles)]
    return ReplayResult(
        decoded_pt=decoded,
        error_map=error_map,
        ct_classified=ct,
        ct_target=np.bitwise_xor(fix.pt_reference, fix.key),
        unclassifiable=unclassifiable,
        sl_maps=sl_maps,
    )
