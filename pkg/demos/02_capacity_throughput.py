"""Multiuser capacity and aggregated throughput analytics.

Prints the capacity table (users supported per time-code length L and order
ratio M/N), then the full-load aggregated throughput curves that show why
fewer, wider bins beat more, narrower ones at a fixed spreading factor.

Run:  python3 demos/02_capacity_throughput.py
"""

from tdcslab import m_max, plan_shifts, throughput, u_max
from tdcslab.errors import CapacityError

N = 64
print(f"multiuser capacity at N = {N} (floor(L*N / (N + M)))\n")
ratios = (0.25, 1, 2)
print("  L     M/N=1/4   M/N=1   M/N=2")
for l in (8, 9, 12, 16):
    caps = [u_max(l, N, int(r * N)) for r in ratios]
    print(f"  {l:<5d} {caps[0]:>7d} {caps[1]:>7d} {caps[2]:>7d}")

print("\ncapacity is tight: the table load plans, one more user does not")
plan = plan_shifts(8, N, 16, 64)
print(f"  L=16, M=N: 8 users -> windows at "
      f"{[w.start for w in plan.windows]}")
try:
    plan_shifts(9, N, 16, 64)
except CapacityError as err:
    print(f"  9 users -> {err}")

print("\nfull-load throughput (beta = 3/4), aggregated bps/Hz")
for l, n in ((8, 64), (16, 64), (8, 128), (16, 128)):
    best_u, best = None, 0.0
    u = 1
    while True:
        try:
            t = throughput(u, l, n, beta=0.75)
        except CapacityError:
            break
        if t.aggregate > best:
            best_u, best = u, t.aggregate
        u += 1
    print(f"  L={l:<3d} N={n:<4d} peak eta_agg = {best:.5f} at U = {best_u} "
          f"(M_max there = {m_max(l, n, best_u)})")

print("\nsame spreading factor, different split:")
a = max(throughput(u, 16, 64, 0.75).aggregate for u in range(1, 13))
b = max(throughput(u, 8, 128, 0.75).aggregate for u in range(1, 7))
print(f"  (L=16, N=64): {a:.5f}  vs  (L=8, N=128): {b:.5f}  -> "
      f"{'smaller N wins' if a > b else 'larger N wins'}")
