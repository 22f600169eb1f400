#!/usr/bin/env python3
"""End-to-end validation of the engineered dataset + fixed AP convergence rule."""
import numpy as np
from itertools import combinations
from proto_cluster import similarity, ap_assign, net_similarity, oracle, kmeans_elbow
from proto_variants import ap_sweep_v

def run_apacs2(pts, pref=None, damping=0.5, b_m=1000, window=15):
    """convergence requires stable assignment AND non-empty raw exemplar set."""
    Z = similarity(pts, 0.0)
    if pref is None:
        off = Z[~np.eye(len(pts), dtype=bool)]
        pref = float(np.median(off))
    np.fill_diagonal(Z, pref)
    n = len(pts)
    Phi = np.zeros((n, n)); Theta = np.zeros((n, n))
    last = None; stable = 0
    for it in range(1, b_m + 1):
        Phi, Theta = ap_sweep_v(Z, Phi, Theta, damping, sync=False)
        C = Phi + Theta
        arg = np.argmax(C, axis=1)
        raw_ex = [r for r in range(n) if arg[r] == r]
        if not raw_ex:
            stable = 0; last = None
            continue
        assign, ex = ap_assign(Z, Phi, Theta)
        key = tuple(assign)
        if key == last:
            stable += 1
            if stable >= window:
                return assign, ex, it, True, pref
        else:
            stable = 0; last = key
    assign, ex = ap_assign(Z, Phi, Theta)
    return assign, ex, b_m, False, pref

C6 = np.load("centers6.npy")
m6 = np.array([57, 30, 16, 10, 6, 6])
sigma = 100.0

# 1) elbow robustness across instantiation seeds x kmeans seeds
fails = []
for pseed in range(8):
    rng = np.random.default_rng(9000 + pseed)
    pts = np.vstack([c + rng.normal(0, sigma, (n, 2)) for c, n in zip(C6, m6)])
    for kseed in (777, 1, 42, 12345):
        k, w = kmeans_elbow(pts, 15, seed=kseed)
        if k != 6: fails.append((pseed, kseed, k))
    if pseed == 0:
        a, ex, it, conv, pref = run_apacs2(pts)
        print("pseed0 APACS: %d CSs conv=%s it=%d pref=%.4g sizes=%s" %
              (len(set(a)), conv, it, pref, sorted(np.bincount(np.unique(a, return_inverse=True)[1]))))
        try:
            from sklearn.cluster import AffinityPropagation
            sk = AffinityPropagation(damping=0.5, random_state=0, max_iter=2000).fit(pts)
            print("sklearn AP (median pref): %d clusters" % len(sk.cluster_centers_indices_))
        except Exception as e:
            print("sklearn skip:", e)
print("elbow fails:", fails if fails else "none (32/32 -> k*=6)")

# 2) canonical fixtures
rng = np.random.default_rng(5)
blob3 = np.vstack([rng.normal([0,0],1,(8,2)), rng.normal([60,0],1,(8,2)), rng.normal([0,60],1,(8,2))])
print("3-blob k*:", kmeans_elbow(blob3, 10, seed=777)[0])
same = np.ones((9,2)) * 3.25
print("identical-points k*:", kmeans_elbow(same, 5, seed=777)[0])

# 3) 3pt fixture at damping 0.9 with fixed convergence
a, ex, it, conv, pref = run_apacs2(np.array([[0.],[1.],[10.]]), pref=-81.0, damping=0.9)
print("3pt d=0.9:", a, "ex=", ex, "it=", it, "conv=", conv)
a, ex, it, conv, pref = run_apacs2(np.array([[0.],[1.],[10.]]), pref=-81.0, damping=0.5)
print("3pt d=0.5:", a, "ex=", ex, "it=", it, "conv=", conv)

# 4) oracle hit rate at damping 0.9, several generator seeds
for seed in (1234, 777, 2024, 99, 31415, 555):
    ok = 0; rng3 = np.random.default_rng(seed); misses = []
    for f in range(50):
        n = int(rng3.integers(5, 13))
        q = rng3.random((n, 2)) * 100.0
        a4, ex4, it4, conv4, pref4 = run_apacs2(q, damping=0.9)
        ns = net_similarity(q, a4, ex4, pref4)
        opt, _ = oracle(q, pref4)
        hit = ns >= opt - 0.05*abs(opt) - 1e-9
        ok += hit
        if not hit: misses.append((f, n, round(ns,1), round(opt,1), conv4))
    print(f"d=0.9 seed={seed}: {ok}/50", misses[:4])

# 5) preference sweep monotonicity at 0.9
p3 = blob3
cnt = []
for pr in [-1.0, -10.0, -100.0, -1000.0, -10000.0]:
    a3, *_ = run_apacs2(p3, pref=pr, damping=0.9)
    cnt.append(len(set(a3)))
print("pref sweep (d=0.9):", cnt)
