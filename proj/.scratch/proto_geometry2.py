#!/usr/bin/env python3
"""Graded-mass construction: merge the two big blobs first, then accrete
medium and small blobs at equal incremental cost. Polish numerically against
exact partition enumeration, then validate with real kmeans + APACS."""
import numpy as np
from itertools import combinations
from proto_geometry import PARTS

def w_center(C, m):
    best = [np.inf]*7
    bestP = [None]*7
    for P in PARTS:
        k = len(P)
        cost = 0.0
        for block in P:
            w = m[block]; pts = C[block]
            mu = (pts * w[:,None]).sum(0) / w.sum()
            cost += (w * ((pts-mu)**2).sum(1)).sum()
        if cost < best[k]:
            best[k] = cost; bestP[k] = P
    return best, bestP

def build_seed(b, m):
    """constructive: accrete blobs in mass order, each step costing b."""
    order = np.argsort(-m)          # big to small
    C = np.zeros((6, 2))
    placed = [order[0]]
    C[order[0]] = [0, 0]
    angles = [0.0, 2.2, 4.1, 1.05, 5.3]
    for step, idx in enumerate(order[1:]):
        w_g = m[placed].sum()
        mu = m[idx]*w_g/(m[idx]+w_g)
        d = np.sqrt(b/mu)
        cen = (C[placed]*m[placed][:,None]).sum(0)/w_g
        a = angles[step]
        C[idx] = cen + d*np.array([np.cos(a), np.sin(a)])
        placed.append(idx)
    return C

def eval_profile(C, m, sigma, verbose=False):
    W, bp = w_center(C, m)
    intra = float((m*2*sigma**2).sum())
    gains = sorted((mi*sigma**2*(2/np.pi) for mi in m), reverse=True)
    Wk = {k: W[k]+intra for k in range(1,7)}
    Wk[7] = intra - gains[0]
    Wk[8] = intra - gains[0] - gains[1]
    d2 = {k: Wk[k-1]-2*Wk[k]+Wk[k+1] for k in range(2,8)}
    margin = d2[6] - max(v for k,v in d2.items() if k != 6)
    if verbose:
        print("  W(k):", {k:"%.4g"%v for k,v in Wk.items()})
        print("  d2:", {k:"%.4g"%v for k,v in d2.items()})
    return margin, d2

m = np.array([57, 30, 16, 10, 6, 6], dtype=float)
sigma = 100.0
rng = np.random.default_rng(11)

best = (-np.inf, None)
for trial in range(40):
    b = 1.2e7 + 0.8e7*rng.random()
    C = build_seed(b, m)
    # rotate placement angles randomly on later trials
    if trial > 0:
        C = build_seed(b, m)
        th = rng.random(5)*2*np.pi
        order = np.argsort(-m)
        C2 = np.zeros((6,2)); placed=[order[0]]
        for step, idx in enumerate(order[1:]):
            w_g = m[placed].sum()
            mu = m[idx]*w_g/(m[idx]+w_g)
            d = np.sqrt(b/mu)
            cen = (C2[placed]*m[placed][:,None]).sum(0)/w_g
            C2[idx] = cen + d*np.array([np.cos(th[step]), np.sin(th[step])])
            placed.append(idx)
        C = C2
    val, _ = eval_profile(C, m, sigma)
    step = 150.0
    for it in range(1200):
        C2 = C + rng.normal(0, step, (6,2))*(rng.random((6,1))<0.4)
        v2, _ = eval_profile(C2, m, sigma)
        if v2 > val: C, val = C2, v2
        step = max(20.0, step*0.997)
    if val > best[0]: best = (val, C.copy())

val, C = best
print("best margin %.4g" % val)
m_, d2 = eval_profile(C, m, sigma, verbose=True)
print("centers:\n", C.round(1))
print("min sep:", min(np.linalg.norm(C[i]-C[j]) for i,j in combinations(range(6),2)).round(1))
np.save("centers6.npy", C); np.save("masses6.npy", m)
