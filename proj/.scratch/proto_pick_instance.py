#!/usr/bin/env python3
"""Pick a frozen 125-point instantiation that yields k*=6 for many kmeans seeds."""
import numpy as np
from proto_cluster import kmeans_elbow
from proto_validate import run_apacs2

C6 = np.load("centers6.npy"); m6 = np.array([57, 30, 16, 10, 6, 6])
sigma = 100.0
KSEEDS = [777, 1, 2, 3, 42, 99, 123, 1234, 12345, 31415, 2024, 555, 808, 909, 4242, 17, 65537, 1000003, 22, 7]

rows = []
for pseed in range(24):
    rng = np.random.default_rng(9000 + pseed)
    pts = np.vstack([c + rng.normal(0, sigma, (n, 2)) for c, n in zip(C6, m6)])
    fails = 0; worst = np.inf
    for ks in KSEEDS:
        k, w = kmeans_elbow(pts, 15, seed=ks)
        d2 = [w[i-2] - 2*w[i-1] + w[i] for i in range(2, 15)]
        ratio = d2[4] / max(v for i, v in enumerate(d2) if i != 4)
        worst = min(worst, ratio)
        if k != 6: fails += 1
    rows.append((pseed, fails, worst))
    print("pseed %2d: fails=%2d  worst_ratio=%.2f" % (pseed, fails, worst))

good = [r for r in rows if r[1] == 0 and r[2] > 1.25]
print("\ncandidates:", good)
if good:
    ps = max(good, key=lambda r: r[2])[0]
    rng = np.random.default_rng(9000 + ps)
    pts = np.vstack([c + rng.normal(0, sigma, (n, 2)) for c, n in zip(C6, m6)])
    a, ex, it, conv, pref = run_apacs2(pts)
    ncs = len(set(a))
    print("chosen pseed=%d APACS: %d CSs conv=%s iters=%d" % (ps, ncs, conv, it))
    np.save("points125.npy", pts)
    np.save("blob_of.npy", np.repeat(np.arange(6), m6))
