"""Cycle model and weight-stationary workload latency.

Per 128-bit row this scheme needs 2.5 cycles to encrypt (a 100 ns write at
25 MHz) and 8 to decrypt (16 sense amplifiers, 8 columns each).  Workload
latency counts how many 128-bit rows of weights get decrypted and how many
rows of outputs get encrypted per inference.
"""

from fexor import perf

table = perf.benchmark_table()
for name, row in table.items():
    print(f"{name:11s} enc {row['enc_cycles']:6.1f} cyc {row['enc_throughput_mbps']:8.2f} Mbps"
          f"   dec {row['dec_cycles']:6.1f} cyc {row['dec_throughput_mbps']:8.2f} Mbps")
vs = table["ThisWork"]["vs_AES"]
print(f"\nvs AES: throughput x{vs['encrypt_throughput_speedup']:.2f} / x{vs['decrypt_throughput_speedup']:.2f},"
      f" latency x{vs['encrypt_latency_speedup']:.2f} / x{vs['decrypt_latency_speedup']:.3f}")

print("\nsense amplifiers vs decrypt throughput:")
for n in (8, 16, 32, 128):
    sa = perf.SenseAmpConfig(num_sa=n)
    print(f"  {n:3d} SAs: {perf.throughput_mbps(perf.this_work(sa=sa), perf.DECRYPT, sa):7.1f} Mbps")

study = perf.workload_study(perf.bundled_workloads())
print("\nworkload            dec Mbit   enc Mbit  reduction vs AES")
for name, r in study["workloads"].items():
    print(f"{name:18s} {r['dec_bits'] / 1e6:9.2f} {r['enc_bits'] / 1e6:10.2f}"
          f"  {100 * r['reduction_vs_AES']:6.2f}%")
print(f"mean reduction vs AES: {100 * study['summary']['mean_reduction_vs_AES']:.2f}%")
