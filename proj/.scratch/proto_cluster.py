#!/usr/bin/env python3
"""Prototype of the exact clustering numerics that the C++ library will use.

Mirrors the planned implementation:
  - responsibility: phi(r,w) = Z(r,w) - max_{w'!=w} (theta(r,w') + Z(r,w'))
  - availability (off-diag): theta(r,w) = min(0, phi(w,w) + sum_{r' not in {r,w}} max(0, phi(r',w)))
  - availability (diag): theta(w,w) = sum_{r'!=w} max(0, phi(r',w))
  - damping blend new = d*old + (1-d)*computed, R from previous Theta, Theta from new Phi
  - criterion c = Phi + Theta, row argmax (lowest index tie), exemplars = self-argmax rows,
    non-exemplars fall back to most-similar exemplar
  - kmeans++ with 10 restarts, elbow = argmax second difference of WCSS
"""
import numpy as np

def similarity(pts, pref):
    n = len(pts)
    Z = -np.square(pts[:, None, :] - pts[None, :, :]).sum(-1).astype(float)
    np.fill_diagonal(Z, pref)
    return Z

def ap_sweep(Z, Phi, Theta, damping):
    n = Z.shape[0]
    AS = Theta + Z
    newPhi = np.empty_like(Phi)
    for r in range(n):
        row = AS[r].copy()
        # max over w' != w: take top-2
        i1 = int(np.argmax(row)); m1 = row[i1]
        row[i1] = -np.inf
        m2 = np.max(row)
        for w in range(n):
            best = m2 if w == i1 else m1
            newPhi[r, w] = Z[r, w] - best
    Phi = damping * Phi + (1 - damping) * newPhi
    newTheta = np.empty_like(Theta)
    Pp = np.maximum(Phi, 0.0)
    for w in range(n):
        col = Pp[:, w].copy()
        s_all = col.sum() - col[w]  # sum over r' != w
        newTheta[w, w] = s_all
        for r in range(n):
            if r == w: continue
            s = s_all - col[r]
            newTheta[r, w] = min(0.0, Phi[w, w] + s)
    Theta = damping * Theta + (1 - damping) * newTheta
    return Phi, Theta

def ap_assign(Z, Phi, Theta):
    C = Phi + Theta
    n = Z.shape[0]
    arg = np.argmax(C, axis=1)  # numpy argmax takes lowest index on ties
    ex = sorted([r for r in range(n) if arg[r] == r])
    if not ex:
        ex = [int(np.argmax(np.diag(C)))]
    assign = np.empty(n, dtype=int)
    for r in range(n):
        if arg[r] in ex or r in ex:
            assign[r] = r if r in ex else arg[r]
        else:
            # most similar exemplar
            sims = [(Z[r, e], -e) for e in ex]
            assign[r] = ex[int(np.argmax([Z[r, e] for e in ex]))]
    return assign, ex

def run_apacs(pts, b_m=1000, damping=0.5, pref=None, window=15):
    Z = similarity(pts, 0.0)
    if pref is None:
        off = Z[~np.eye(len(pts), dtype=bool)]
        pref = float(np.median(off))
    np.fill_diagonal(Z, pref)
    n = len(pts)
    Phi = np.zeros((n, n)); Theta = np.zeros((n, n))
    last = None; stable = 0; it = 0
    for it in range(1, b_m + 1):
        Phi, Theta = ap_sweep(Z, Phi, Theta, damping)
        assign, ex = ap_assign(Z, Phi, Theta)
        key = tuple(assign)
        if key == last:
            stable += 1
            if stable >= window:
                return assign, ex, it, True, pref
        else:
            stable = 0; last = key
    assign, ex = ap_assign(Z, Phi, Theta)
    return assign, ex, it, False, pref

def net_similarity(pts, assign, ex, pref):
    Z = similarity(pts, pref)
    tot = 0.0
    for r in range(len(pts)):
        tot += pref if r == assign[r] else Z[r, assign[r]]
    return tot

def oracle(pts, pref):
    n = len(pts)
    Z = similarity(pts, pref)
    best = (-np.inf, None)
    for mask in range(1, 1 << n):
        ex = [i for i in range(n) if mask >> i & 1]
        obj = sum(pref for _ in ex)
        for r in range(n):
            if not (mask >> r & 1):
                obj += max(Z[r, e] for e in ex)
        if obj > best[0] + 1e-12:
            best = (obj, ex)
    return best

# ---- kmeans / elbow ----
def kmeans_once(pts, k, rng):
    n = len(pts)
    centers = [pts[rng.integers(n)]]
    for _ in range(1, k):
        d2 = np.min([np.square(pts - c).sum(1) for c in centers], axis=0)
        tot = d2.sum()
        if tot <= 0:
            centers.append(pts[rng.integers(n)]); continue
        x = rng.random() * tot
        acc = 0.0; idx = n - 1
        for i in range(n):
            acc += d2[i]
            if acc >= x: idx = i; break
        centers.append(pts[idx])
    C = np.array(centers)
    for _ in range(100):
        d = np.square(pts[:, None, :] - C[None, :, :]).sum(-1)
        a = np.argmin(d, axis=1)
        newC = C.copy()
        for j in range(k):
            m = pts[a == j]
            if len(m): newC[j] = m.mean(0)
        if np.allclose(newC, C): break
        C = newC
    d = np.square(pts[:, None, :] - C[None, :, :]).sum(-1)
    a = np.argmin(d, axis=1)
    wcss = sum(np.square(pts[i] - C[a[i]]).sum() for i in range(len(pts)))
    return wcss, a, C

def kmeans_elbow(pts, k_max, seed, restarts=10):
    rng = np.random.default_rng(seed)
    wcss = []
    for k in range(1, k_max + 1):
        best = min(kmeans_once(pts, k, rng)[0] for _ in range(restarts))
        wcss.append(best)
    if wcss[0] <= 1e-12:
        return 1, wcss
    best_k, best_d2 = 1, -np.inf
    for k in range(2, k_max):          # interior: k=2..k_max-1
        d2 = wcss[k - 2] - 2 * wcss[k - 1] + wcss[k]
        if d2 > best_d2:
            best_d2, best_k = d2, k
    return best_k, wcss

# ---------------- experiments ----------------
if __name__ == "__main__":
    # 1. tiny fixture {0,1,10}, pref=-81 (median)
    pts = np.array([[0.0], [1.0], [10.0]])
    a, ex, it, conv, pref = run_apacs(pts)
    print("3pt fixture: pref=%g assign=%s exemplars=%s iters=%d conv=%s" % (pref, a, ex, it, conv))
    print("  net-sim:", net_similarity(pts, a, ex, pref), " oracle:", oracle(pts, -81.0))

    # 2. Melbourne-like dataset: 6 precinct blobs -> meters about centroid
    rng = np.random.default_rng(20260415)
    centers_ll = np.array([
        [-37.8136, 144.9631],  # CBD core
        [-37.8149, 144.9460],  # Docklands
        [-37.8010, 144.9640],  # Carlton
        [-37.8226, 144.9648],  # Southbank
        [-37.8080, 144.9800],  # East Melbourne
        [-37.8000, 144.9430],  # North Melbourne
    ])
    counts = [25, 20, 20, 20, 20, 20]
    sigma_deg_lat = 100.0 / 111132.0   # ~100 m std dev
    rows = []
    for c, n in zip(centers_ll, counts):
        lat = c[0] + rng.normal(0, sigma_deg_lat, n)
        lon = c[1] + rng.normal(0, sigma_deg_lat / np.cos(np.radians(-37.81)), n)
        rows += list(zip(lat, lon))
    rows = np.array(rows)
    # project (equirectangular about centroid)
    lat0, lon0 = rows.mean(0)
    R = 6371000.0
    x = np.radians(rows[:, 1] - lon0) * R * np.cos(np.radians(lat0))
    y = np.radians(rows[:, 0] - lat0) * R
    P = np.column_stack([x, y])
    kstar, wcss = kmeans_elbow(P, 15, seed=777)
    print("melbourne-like: k* =", kstar)
    print("  wcss:", ["%.3g" % w for w in wcss])
    a, ex, it, conv, pref = run_apacs(P)
    sizes = np.bincount([list(sorted(set(a))).index(v) for v in a])
    print("  apacs: %d CSs, iters=%d conv=%s med-pref=%.4g sizes=%s" % (len(set(a)), it, conv, pref, sorted(sizes)))

    # 3. preference sweep monotonicity on 3-blob fixture
    rng2 = np.random.default_rng(42)
    blob = lambda cx, cy: rng2.normal([cx, cy], 1.0, (4, 2))
    p3 = np.vstack([blob(0, 0), blob(50, 0), blob(0, 50)])
    cnt = []
    for pr in [-1.0, -10.0, -100.0, -1000.0, -10000.0]:
        a3, *_ = run_apacs(p3, pref=pr)
        cnt.append(len(set(a3)))
    print("pref sweep counts (pref decreasing):", cnt)

    # 4. oracle-vs-APACS hit rate on 50 random fixtures, n<=12
    ok = 0; worst = 1.0
    rng3 = np.random.default_rng(1234)
    for f in range(50):
        n = int(rng3.integers(5, 13))
        q = rng3.random((n, 2)) * 100.0
        a4, ex4, it4, conv4, pref4 = run_apacs(q)
        ns = net_similarity(q, a4, ex4, pref4)
        opt, _ = oracle(q, pref4)
        ratio_ok = ns >= opt - 0.05 * abs(opt) - 1e-9
        ok += ratio_ok
        if opt != 0: worst = min(worst, 1 - (opt - ns) / abs(opt))
        if not ratio_ok:
            print("  MISS fixture %d: n=%d ns=%.4f opt=%.4f conv=%s" % (f, n, ns, opt, conv4))
    print("oracle check: %d/50 within 5%%; worst ratio=%.4f" % (ok, worst))
