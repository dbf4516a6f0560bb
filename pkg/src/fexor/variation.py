"""Monte Carlo Vth-variation study of the SLC read.

Each sample index ``i`` owns its own generator seeded from ``(seed, i)``, so
splitting the index range across worker processes gives bit-identical
results to a serial run.  One device per CT state is drawn per sample and
read under both keys.
"""

from __future__ import annotations

import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .cipher import key_to_bias
from .device import SLC, FerroProfile, conducts, settle_sl

COMBOS = ((1, 1), (0, 1), (1, 0), (0, 0))  # (CT, Key)
HIST_EDGES = np.round(np.linspace(-0.05, 0.55, 61), 10)


@dataclass(frozen=True)
class McConfig:
    n_samples: int = 1000
    sigma_vth: float = 0.040
    v_read: float = 1.1
    seed: int = 0

    def __post_init__(self):
        if self.n_samples < 1:
            raise ValueError("n_samples must be >= 1")
        if self.sigma_vth < 0:
            raise ValueError("sigma_vth must be >= 0")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")


@dataclass
class McReport:
    config: McConfig
    vth_samples: dict[int, np.ndarray]
    v_sl_samples: dict[tuple[int, int], np.ndarray]
    worst_case_margin: float
    histogram: dict[tuple[int, int], np.ndarray] = field(default_factory=dict)
    bin_edges: np.ndarray = field(default_factory=lambda: HIST_EDGES.copy())

    def to_dict(self) -> dict:
        return {
            "config": {
                "n_samples": self.config.n_samples,
                "sigma_vth": self.config.sigma_vth,
                "v_read": self.config.v_read,
                "seed": self.config.seed,
            },
            "worst_case_margin": self.worst_case_margin,
            "vth_samples": {f"CT{ct}": v.tolist() for ct, v in self.vth_samples.items()},
            "v_sl_samples": {_combo_name(c): v.tolist() for c, v in self.v_sl_samples.items()},
            "histogram": {
                "bin_edges": self.bin_edges.tolist(),
                "counts": {_combo_name(c): h.tolist() for c, h in self.histogram.items()},
            },
            "summary": {
                _combo_name(c): {"mean": float(v.mean()), "std": float(v.std()),
                                 "min": float(v.min()), "max": float(v.max())}
                for c, v in self.v_sl_samples.items()
            },
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"

    def vth_csv(self) -> str:
        lines = ["sample,vth_ct0,vth_ct1"]
        for i, (a, b) in enumerate(zip(self.vth_samples[0], self.vth_samples[1])):
            lines.append(f"{i},{a!r},{b!r}")
        return "\n".join(lines) + "\n"

    def sl_csv(self) -> str:
        names = [_combo_name(c) for c in COMBOS]
        lines = ["sample," + ",".join(names)]
        cols = [self.v_sl_samples[c] for c in COMBOS]
        for i in range(self.config.n_samples):
            lines.append(f"{i}," + ",".join(repr(float(c[i])) for c in cols))
        return "\n".join(lines) + "\n"


def _combo_name(combo: tuple[int, int]) -> str:
    ct, key = combo
    return f"CT{ct}_Key{key}"


def _draw(seed: int, start: int, stop: int, sigma: float) -> np.ndarray:
    """Standard-normal draws ``z[i, ct]`` for sample indices ``start..stop-1``."""
    z = np.empty((stop - start, 2))
    for j, i in enumerate(range(start, stop)):
        z[j] = np.random.default_rng([seed, i]).standard_normal(2) if sigma > 0 else 0.0
    return z


def _chunks(n: int, parts: int) -> list[tuple[int, int]]:
    bounds = np.linspace(0, n, parts + 1).astype(int)
    return [(int(a), int(b)) for a, b in zip(bounds[:-1], bounds[1:]) if b > a]


def run_mc(cfg: McConfig, profile: FerroProfile, workers: int = 1) -> McReport:
    """Sample Vth for both CT states and settle the SL under both keys."""
    if profile.mode != SLC:
        raise ValueError("Monte Carlo read study is defined on the SLC profile")
    if workers > 1:
        spans = _chunks(cfg.n_samples, workers)
        with ProcessPoolExecutor(max_workers=workers) as ex:
            parts = list(ex.map(_draw, *zip(*[(cfg.seed, a, b, cfg.sigma_vth) for a, b in spans])))
        z = np.vstack(parts)
    else:
        z = _draw(cfg.seed, 0, cfg.n_samples, cfg.sigma_vth)

    vth = {ct: profile.vth_levels[ct] + cfg.sigma_vth * z[:, ct] for ct in (0, 1)}
    v_sl = {}
    for ct, key in COMBOS:
        bl, sl = key_to_bias(key, profile.v_dd)
        on = conducts(cfg.v_read, bl, sl, vth[ct])
        v_sl[(ct, key)] = np.asarray(settle_sl(on, bl, sl, profile), dtype=float)

    report = McReport(cfg, vth, v_sl, 0.0)
    report.histogram = {c: np.histogram(v, bins=HIST_EDGES)[0] for c, v in v_sl.items()}
    report.worst_case_margin = sense_margin(report)
    return report


def sense_margin(report: McReport) -> float:
    """Lowest SL voltage decoded as PT=1 minus highest decoded as PT=0."""
    pt1 = [v for (ct, key), v in report.v_sl_samples.items() if ct ^ key == 1]
    pt0 = [v for (ct, key), v in report.v_sl_samples.items() if ct ^ key == 0]
    if not pt1 or not pt0 or any(v.size == 0 for v in pt1 + pt0):
        raise ValueError("report has an empty PT population")
    return float(min(v.min() for v in pt1) - max(v.max() for v in pt0))
