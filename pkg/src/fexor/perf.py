"""Array-level cycle/throughput model and the weight-stationary workload study.

Cycle counts are kept as :class:`fractions.Fraction` so ratios such as the
2.5/5 = 8/16 = 1/2 latency relation between this scheme and the 2T design
come out exact.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from fractions import Fraction
from importlib import resources
from pathlib import Path
from typing import Iterable, Sequence

ENCRYPT = "encrypt"
DECRYPT = "decrypt"

THIS_WORK = "ThisWork"
PRIOR_FEFET = "PriorFeFET"
AES = "AES"

CLOCK_HZ = 25e6
WRITE_WINDOW_S = 100e-9
LAYOUT_2X2_UM2 = 0.7912  # 45 nm, four cells
AES_AREA_MM2 = 0.00309


@dataclass(frozen=True)
class SenseAmpConfig:
    num_sa: int = 16
    word_bits: int = 128

    def __post_init__(self):
        if self.num_sa < 1 or self.word_bits < 1:
            raise ValueError("num_sa and word_bits must be positive")

    @property
    def dec_cycles(self) -> Fraction:
        return Fraction(math.ceil(self.word_bits / self.num_sa))


@dataclass(frozen=True)
class SchemeTiming:
    name: str
    enc_cycles_per_128b: Fraction
    dec_cycles_per_128b: Fraction
    clock_hz: float = CLOCK_HZ
    devices_per_bit: int = 1
    cell_area_um2_per_bit: float = LAYOUT_2X2_UM2 / 4
    # published throughput that overrides the cycle-derived one (Mbps)
    throughput_mbps_fixed: float | None = None
    # sense-amplifier limited decrypt: scales with SenseAmpConfig
    sa_limited: bool = False

    def __post_init__(self):
        object.__setattr__(self, "enc_cycles_per_128b", Fraction(self.enc_cycles_per_128b))
        object.__setattr__(self, "dec_cycles_per_128b", Fraction(self.dec_cycles_per_128b))
        if min(self.enc_cycles_per_128b, self.dec_cycles_per_128b) <= 0:
            raise ValueError("cycle counts must be positive")
        if self.clock_hz <= 0 or self.devices_per_bit < 1 or self.cell_area_um2_per_bit <= 0:
            raise ValueError("clock, device count and cell area must be positive")

    @property
    def period_s(self) -> float:
        return 1.0 / self.clock_hz


def this_work(clock_hz: float = CLOCK_HZ, sa: SenseAmpConfig = SenseAmpConfig()) -> SchemeTiming:
    # write window rounded to the clock: 100 ns / 40 ns = 2.5 cycles
    enc = Fraction(WRITE_WINDOW_S * clock_hz).limit_denominator(1000)
    return SchemeTiming(THIS_WORK, enc, sa.dec_cycles, clock_hz, 1, LAYOUT_2X2_UM2 / 4,
                        sa_limited=True)


def prior_fefet(clock_hz: float = CLOCK_HZ) -> SchemeTiming:
    """Complementary 2T cell: two write cycles, two key-sharing read passes."""
    return SchemeTiming(PRIOR_FEFET, Fraction(5), Fraction(16), clock_hz, 2, LAYOUT_2X2_UM2 / 2)


def aes(clock_hz: float = CLOCK_HZ) -> SchemeTiming:
    return SchemeTiming(AES, Fraction(231, 2), Fraction(121), clock_hz, 1, LAYOUT_2X2_UM2 / 4,
                        throughput_mbps_fixed=28.32)


def default_schemes() -> dict[str, SchemeTiming]:
    return {s.name: s for s in (this_work(), prior_fefet(), aes())}


# ----------------------------------------------------------------------

def row_cycles(scheme: SchemeTiming, op: str, sa: SenseAmpConfig = SenseAmpConfig()) -> Fraction:
    if op == ENCRYPT:
        return scheme.enc_cycles_per_128b
    if op == DECRYPT:
        return sa.dec_cycles if scheme.sa_limited else scheme.dec_cycles_per_128b
    raise ValueError(f"op must be {ENCRYPT!r} or {DECRYPT!r}")


def throughput_mbps(scheme: SchemeTiming, op: str, sa: SenseAmpConfig = SenseAmpConfig()) -> float:
    if scheme.throughput_mbps_fixed is not None:
        return scheme.throughput_mbps_fixed
    seconds = float(row_cycles(scheme, op, sa)) * scheme.period_s
    return sa.word_bits / seconds / 1e6


def speedup(a: SchemeTiming, b: SchemeTiming, op: str, sa: SenseAmpConfig = SenseAmpConfig(),
            form: str = "throughput") -> float:
    """How much faster *a* is than *b*, by throughput or by per-row latency."""
    if form == "throughput":
        return throughput_mbps(a, op, sa) / throughput_mbps(b, op, sa)
    if form == "latency":
        return float(row_cycles(b, op, sa) / row_cycles(a, op, sa))
    raise ValueError("form must be 'throughput' or 'latency'")


def area_report(scheme: SchemeTiming, array_rows: int = 128, array_cols: int = 128) -> dict:
    bits = array_rows * array_cols
    out = {
        "scheme": scheme.name,
        "ciphertext_bits": bits,
        "devices": bits * scheme.devices_per_bit,
        "devices_per_bit": scheme.devices_per_bit,
        "cell_area_um2_per_bit": scheme.cell_area_um2_per_bit,
        "array_area_um2": bits * scheme.cell_area_um2_per_bit,
    }
    if scheme.name == AES:
        out["engine_area_mm2"] = AES_AREA_MM2
    return out


def benchmark_table(sa: SenseAmpConfig = SenseAmpConfig()) -> dict:
    """Per-scheme cycles, throughput, area and the speedups of ThisWork."""
    schemes = default_schemes()
    ours = schemes[THIS_WORK]
    table = {}
    for name, s in schemes.items():
        table[name] = {
            "enc_cycles": float(row_cycles(s, ENCRYPT, sa)),
            "dec_cycles": float(row_cycles(s, DECRYPT, sa)),
            "enc_throughput_mbps": throughput_mbps(s, ENCRYPT, sa),
            "dec_throughput_mbps": throughput_mbps(s, DECRYPT, sa),
            "area": area_report(s),
        }
    for name in (AES, PRIOR_FEFET):
        b = schemes[name]
        table[THIS_WORK][f"vs_{name}"] = {
            f"{op}_{form}_speedup": speedup(ours, b, op, sa, form)
            for op in (ENCRYPT, DECRYPT) for form in ("throughput", "latency")
        }
    p = area_report(schemes[PRIOR_FEFET])
    o = area_report(ours)
    table[THIS_WORK]["vs_PriorFeFET"]["device_ratio"] = o["devices"] / p["devices"]
    table[THIS_WORK]["vs_PriorFeFET"]["area_per_bit_ratio"] = (
        o["cell_area_um2_per_bit"] / p["cell_area_um2_per_bit"]
    )
    return table


# ----------------------------------------------------------------------
# workload traffic
# ----------------------------------------------------------------------

class InvalidLayerError(ValueError):
    pass


@dataclass(frozen=True)
class WorkloadLayer:
    name: str
    ifmap_h: int
    ifmap_w: int
    filter_h: int
    filter_w: int
    channels: int
    num_filters: int
    stride: int = 1
    bitwidth: int = 8

    def __post_init__(self):
        dims = (self.ifmap_h, self.ifmap_w, self.filter_h, self.filter_w,
                self.channels, self.num_filters, self.stride, self.bitwidth)
        if min(dims) < 1:
            raise InvalidLayerError(f"{self.name}: all dimensions must be >= 1")
        if self.filter_h > self.ifmap_h or self.filter_w > self.ifmap_w:
            raise InvalidLayerError(f"{self.name}: filter larger than input feature map")

    @property
    def ofmap_h(self) -> int:
        return (self.ifmap_h - self.filter_h) // self.stride + 1

    @property
    def ofmap_w(self) -> int:
        return (self.ifmap_w - self.filter_w) // self.stride + 1

    @property
    def window(self) -> int:
        return self.filter_h * self.filter_w * self.channels


@dataclass(frozen=True)
class LayerTraffic:
    name: str
    dec_bits: int
    enc_bits: int
    folds: int


@dataclass(frozen=True)
class TrafficSummary:
    layers: tuple[LayerTraffic, ...]

    @property
    def dec_bits(self) -> int:
        return sum(l.dec_bits for l in self.layers)

    @property
    def enc_bits(self) -> int:
        return sum(l.enc_bits for l in self.layers)


def layer_traffic(layer: WorkloadLayer, pe_rows: int = 32, pe_cols: int = 32) -> TrafficSummary:
    """Weight-stationary traffic: every weight decrypted once, every output encrypted once."""
    if pe_rows < 1 or pe_cols < 1:
        raise ValueError("PE array dimensions must be >= 1")
    folds = math.ceil(layer.window / pe_rows) * math.ceil(layer.num_filters / pe_cols)
    dec = layer.window * layer.num_filters * layer.bitwidth
    enc = layer.ofmap_h * layer.ofmap_w * layer.num_filters * layer.bitwidth
    return TrafficSummary((LayerTraffic(layer.name, dec, enc, folds),))


def workload_traffic(layers: Sequence[WorkloadLayer], pe_rows: int = 32,
                     pe_cols: int = 32) -> TrafficSummary:
    return TrafficSummary(tuple(
        t for layer in layers for t in layer_traffic(layer, pe_rows, pe_cols).layers
    ))


def workload_latency(layers: Sequence[WorkloadLayer], scheme: SchemeTiming,
                     sa: SenseAmpConfig = SenseAmpConfig(), pe_rows: int = 32,
                     pe_cols: int = 32) -> tuple[float, Fraction]:
    """Total crypto latency ``(seconds, cycles)`` for one inference pass."""
    if not layers:
        raise ValueError("workload has no layers")
    dec_c, enc_c = row_cycles(scheme, DECRYPT, sa), row_cycles(scheme, ENCRYPT, sa)
    cycles = Fraction(0)
    for t in workload_traffic(layers, pe_rows, pe_cols).layers:
        cycles += math.ceil(t.dec_bits / sa.word_bits) * dec_c
        cycles += math.ceil(t.enc_bits / sa.word_bits) * enc_c
    return float(cycles) * scheme.period_s, cycles


def workload_study(workloads: dict[str, Sequence[WorkloadLayer]],
                   sa: SenseAmpConfig = SenseAmpConfig()) -> dict:
    """Latency of all three schemes per workload plus the reductions of ThisWork."""
    schemes = default_schemes()
    rows = {}
    for wname, layers in workloads.items():
        lat = {n: workload_latency(layers, s, sa) for n, s in schemes.items()}
        ours = lat[THIS_WORK][1]
        traffic = workload_traffic(layers)
        rows[wname] = {
            "dec_bits": traffic.dec_bits,
            "enc_bits": traffic.enc_bits,
            "latency_s": {n: v[0] for n, v in lat.items()},
            "latency_cycles": {n: float(v[1]) for n, v in lat.items()},
            "ratio_vs_PriorFeFET": float(ours / lat[PRIOR_FEFET][1]),
            "reduction_vs_AES": float(1 - ours / lat[AES][1]),
            "reduction_vs_PriorFeFET": float(1 - ours / lat[PRIOR_FEFET][1]),
        }
    n = len(rows)
    summary = {
        "mean_reduction_vs_AES": sum(r["reduction_vs_AES"] for r in rows.values()) / n,
        "mean_reduction_vs_PriorFeFET": sum(r["reduction_vs_PriorFeFET"] for r in rows.values()) / n,
    }
    return {"workloads": rows, "summary": summary}


# ----------------------------------------------------------------------
# topology files
# ----------------------------------------------------------------------

BUNDLED_TOPOLOGIES = ("alexnet", "mobilenet", "faster_rcnn", "googlenet",
                      "resnet18", "yolo_tiny", "dlrm")


def parse_topology(text: str, bitwidth: int = 8) -> list[WorkloadLayer]:
    """Read SCALE-Sim style rows: name, ifmap_h, ifmap_w, filter_h, filter_w,
    channels, num_filters, stride.  A header line and trailing commas are allowed."""
    layers = []
    for lineno, row in enumerate(csv.reader(text.splitlines()), 1):
        row = [c.strip() for c in row if c.strip()]
        if not row or row[0].startswith("#"):
            continue
        if lineno == 1 and len(row) > 1 and not row[1].lstrip("-").isdigit():
            continue
        if len(row) != 8:
            raise InvalidLayerError(f"line {lineno}: expected 8 fields, got {len(row)}")
        try:
            dims = [int(v) for v in row[1:]]
        except ValueError:
            raise InvalidLayerError(f"line {lineno}: non-integer dimension") from None
        layers.append(WorkloadLayer(row[0], *dims, bitwidth=bitwidth))
    if not layers:
        raise InvalidLayerError("topology has no layers")
    return layers


def load_topology(path: str | Path, bitwidth: int = 8) -> list[WorkloadLayer]:
    return parse_topology(Path(path).read_text(), bitwidth)


def bundled_topology(name: str, bitwidth: int = 8) -> list[WorkloadLayer]:
    text = resources.files("fexor.data.topologies").joinpath(f"{name}.csv").read_text()
    return parse_topology(text, bitwidth)


def bundled_workloads(bitwidth: int = 8) -> dict[str, list[WorkloadLayer]]:
    return {n: bundled_topology(n, bitwidth) for n in BUNDLED_TOPOLOGIES}
