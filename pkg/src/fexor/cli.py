"""Command-line front end.

Every subcommand writes a ``report.json`` (sorted keys, carrying a hash of
its configuration) plus CSV side files into ``--out``.  Exit codes: 0 ok,
1 validation error, 2 runtime error; failures print a JSON error record on
stderr.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from decimal import ROUND_HALF_UP, Decimal
from pathlib import Path

import numpy as np

from . import array as fa
from . import perf
from .cipher import decrypt_array, encrypt_store, sense_thresholds, xor_encrypt
from .device import MLC, SLC, PRESETS, FerroProfile, load_profile, preset
from .fileio import dumps_json, format_matrix, write_matrix_csv, write_report
from .replay import load_fixture, replay_experiment
from .variation import McConfig, run_mc


class ValidationError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ValidationError(message)


def _default_seed() -> int:
    raw = os.environ.get("FEXOR_SEED", "0")
    try:
        return int(raw)
    except ValueError:
        raise ValidationError(f"FEXOR_SEED must be an integer, got {raw!r}") from None


def _profile(args, mode: str) -> FerroProfile:
    src = args.profile
    prof = preset(src, mode) if src in PRESETS else load_profile(src, mode)
    if getattr(args, "sigma", None) is not None:
        prof = prof.with_(sigma_vth=args.sigma)
    return prof


def _out(args) -> Path:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _demo(args, mode: str) -> dict:
    prof = _profile(args, mode)
    rng = np.random.default_rng(args.seed)
    rows, cols = args.rows, args.cols
    checker = np.indices((rows, cols)).sum(axis=0) % 2
    top = prof.hvt
    key = rng.integers(0, top + 1, size=(rows, cols))
    if mode == SLC:
        # checkerboard ciphertext under a random key
        pt = xor_encrypt(checker, key, top)
    else:
        pt = checker * top
    arr = fa.new_array(rows, cols, prof, rng=rng)
    arr = encrypt_store(arr, pt, key, rng)
    th = sense_thresholds(args.sense, prof.v_dd)
    decoded, traces = decrypt_array(arr, key, th, strict=False)

    out = _out(args)
    write_matrix_csv(out / "pt.csv", pt)
    write_matrix_csv(out / "key.csv", key)
    write_matrix_csv(out / "ct.csv", arr.levels)
    write_matrix_csv(out / "vth.csv", arr.vth)
    write_matrix_csv(out / "pt_decrypted.csv", decoded)
    for i in range(traces[0].cycles):
        write_matrix_csv(out / f"sl_cycle{i + 1}.csv", np.vstack([t.sl_voltages[i] for t in traces]))
    fa.save(arr, out / "array.csv")
    (out / "traces.json").write_text(dumps_json([t.to_dict() for t in traces]))

    correct = decoded == pt
    return {
        "mode": mode,
        "accuracy": float(correct.mean()),
        "errors": int((~correct).sum()),
        "cells": int(pt.size),
        "ct_matches_target": bool(np.array_equal(arr.levels, xor_encrypt(pt, key, top))),
        "cycles_per_row": traces[0].cycles,
    }


def cmd_demo_slc(args) -> dict:
    return _demo(args, SLC)


def cmd_demo_mlc(args) -> dict:
    return _demo(args, MLC)


def cmd_mc(args) -> dict:
    prof = _profile(args, SLC)
    cfg = McConfig(n_samples=args.n, sigma_vth=prof.sigma_vth,
                   v_read=args.v_read if args.v_read is not None else prof.v_read[0],
                   seed=args.seed)
    rep = run_mc(cfg, prof, workers=args.workers)
    out = _out(args)
    (out / "vth_samples.csv").write_text(rep.vth_csv())
    (out / "sl_samples.csv").write_text(rep.sl_csv())
    d = rep.to_dict()
    hist = d["histogram"]
    lines = ["bin_lo,bin_hi," + ",".join(sorted(hist["counts"]))]
    edges = hist["bin_edges"]
    for i in range(len(edges) - 1):
        lines.append(f"{edges[i]!r},{edges[i + 1]!r}," +
                     ",".join(str(hist["counts"][k][i]) for k in sorted(hist["counts"])))
    (out / "sl_histogram.csv").write_text("\n".join(lines) + "\n")
    return {"worst_case_margin": d["worst_case_margin"], "summary": d["summary"],
            "histogram": hist}


def cmd_bench(args) -> dict:
    sa = perf.SenseAmpConfig(num_sa=args.num_sa)
    table = perf.benchmark_table(sa)
    out = _out(args)
    lines = ["scheme,enc_cycles,dec_cycles,enc_throughput_mbps,dec_throughput_mbps,devices,"
             "cell_area_um2_per_bit"]
    for name, row in table.items():
        lines.append(f"{name},{row['enc_cycles']},{row['dec_cycles']},"
                     f"{row['enc_throughput_mbps']:.2f},{row['dec_throughput_mbps']:.2f},"
                     f"{row['area']['devices']},{row['area']['cell_area_um2_per_bit']}")
    vs = table[perf.THIS_WORK]["vs_AES"]
    lines.append("")
    lines.append("metric,value")
    lines.append(f"enc_throughput_speedup_vs_AES,{_fmt2(vs['encrypt_throughput_speedup'])}")
    lines.append(f"dec_throughput_speedup_vs_AES,{_fmt2(vs['decrypt_throughput_speedup'])}")
    lines.append(f"enc_latency_speedup_vs_AES,{_fmt2(vs['encrypt_latency_speedup'])}")
    lines.append(f"dec_latency_speedup_vs_AES,{_fmt2(vs['decrypt_latency_speedup'])}")
    text = "\n".join(lines) + "\n"
    (out / "bench.csv").write_text(text)
    return {"table": table, "csv": text}


def _fmt2(x: float) -> str:
    return str(Decimal(repr(x)).quantize(Decimal("0.01"), rounding=ROUND_HALF_UP))


def cmd_workload(args) -> dict:
    sa = perf.SenseAmpConfig(num_sa=args.num_sa)
    if args.topology:
        workloads = {Path(p).stem: perf.load_topology(p, args.bitwidth) for p in args.topology}
    else:
        workloads = perf.bundled_workloads(args.bitwidth)
    study = perf.workload_study(workloads, sa)
    out = _out(args)
    lines = ["workload,dec_bits,enc_bits,latency_ThisWork_s,latency_PriorFeFET_s,latency_AES_s,"
             "reduction_vs_AES,reduction_vs_PriorFeFET"]
    for name, r in study["workloads"].items():
        lat = r["latency_s"]
        lines.append(f"{name},{r['dec_bits']},{r['enc_bits']},{lat['ThisWork']!r},"
                     f"{lat['PriorFeFET']!r},{lat['AES']!r},{r['reduction_vs_AES']!r},"
                     f"{r['reduction_vs_PriorFeFET']!r}")
    (out / "workloads.csv").write_text("\n".join(lines) + "\n")
    return study


def cmd_replay(args) -> dict:
    fix = load_fixture(args.fixture)
    prof = preset(fix.band_preset, fix.mode) if args.profile is None else _profile(args, fix.mode)
    res = replay_experiment(fix, prof)
    out = _out(args)
    write_matrix_csv(out / "pt_decrypted.csv", res.decoded_pt)
    write_matrix_csv(out / "error_map.csv", res.error_map.astype(int))
    write_matrix_csv(out / "ct_classified.csv", res.ct_classified)
    for i, m in enumerate(res.sl_maps, 1):
        write_matrix_csv(out / f"sl_cycle{i}.csv", m)
    d = res.to_dict()
    d["provenance"] = fix.provenance
    return d


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="fexor", description="1T FeFET in-memory XOR cipher simulator")
    sub = p.add_subparsers(dest="command", parser_class=_Parser)

    def common(sp, seed=True):
        sp.add_argument("--out", default="fexor-out", help="output directory")
        sp.add_argument("--profile", default="sim-default",
                        help=f"preset name {PRESETS} or path to a profile JSON")
        if seed:
            sp.add_argument("--seed", type=int, default=None, help="RNG seed (env FEXOR_SEED)")

    for name, fn, rows, cols in (("demo-slc", cmd_demo_slc, 8, 6), ("demo-mlc", cmd_demo_mlc, 8, 6)):
        sp = sub.add_parser(name)
        common(sp)
        sp.add_argument("--rows", type=int, default=rows)
        sp.add_argument("--cols", type=int, default=cols)
        sp.add_argument("--sigma", type=float, default=None, help="Vth sigma override (V)")
        sp.add_argument("--sense", choices=("simulation", "experimental"), default="simulation")
        sp.set_defaults(func=fn)

    sp = sub.add_parser("mc")
    common(sp)
    sp.add_argument("--n", type=int, default=1000)
    sp.add_argument("--sigma", type=float, default=None)
    sp.add_argument("--v-read", type=float, default=None)
    sp.add_argument("--workers", type=int, default=1)
    sp.set_defaults(func=cmd_mc)

    sp = sub.add_parser("bench")
    common(sp, seed=False)
    sp.add_argument("--num-sa", type=int, default=16)
    sp.set_defaults(func=cmd_bench)

    sp = sub.add_parser("workload")
    common(sp, seed=False)
    sp.add_argument("topology", nargs="*", help="SCALE-Sim style topology CSVs (default: bundled)")
    sp.add_argument("--num-sa", type=int, default=16)
    sp.add_argument("--bitwidth", type=int, default=8)
    sp.set_defaults(func=cmd_workload)

    sp = sub.add_parser("replay")
    common(sp, seed=False)
    sp.set_defaults(profile=None)
    sp.add_argument("fixture", help="fixture JSON")
    sp.set_defaults(func=cmd_replay)
    return p


def _config(args) -> dict:
    return {k: v for k, v in sorted(vars(args).items()) if k not in ("func", "out")}


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        if not getattr(args, "command", None):
            raise ValidationError("missing subcommand")
        if hasattr(args, "seed") and args.seed is None:
            args.seed = _default_seed()
        try:
            report = args.func(args)
        except (ValueError, KeyError, FileNotFoundError) as exc:
            raise ValidationError(str(exc)) from exc
        path = write_report(Path(args.out) / "report.json", report, _config(args))
    except ValidationError as exc:
        _error("validation", exc, 1)
        return 1
    except Exception as exc:  # noqa: BLE001
        _error("runtime", exc, 2)
        return 2
    print(json.dumps({"status": "ok", "command": args.command, "report": str(path)}))
    return 0


def _error(kind: str, exc: Exception, code: int) -> None:
    rec = {"status": "error", "kind": kind, "type": type(exc).__name__,
           "message": str(exc), "exit_code": code}
    print(json.dumps(rec, sort_keys=True), file=sys.stderr)


if __name__ == "__main__":
    sys.exit(main())
