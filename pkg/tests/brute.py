"""Naive reference for the patch confidence chain.

Written with plain Python loops and no imports from the package. The
extremal couplings are built by greedy quantile matching rather than CDF
differencing, and covariances come from coupling moments rather than the
CDF identity, so agreement with the production path is a real check.
"""

import math

SNAP = 1e-12


def pmf(idx, bins):
    counts = [0] * bins
    for i in idx:
        counts[i] += 1
    return [c / len(idx) for c in counts]


def comonotone(px, py):
    """North-west corner rule on ascending marginals."""
    n = len(px)
    joint = [[0.0] * n for _ in range(n)]
    a, b = list(px), list(py)
    i = j = 0
    while i < n and j < n:
        m = min(a[i], b[j])
        joint[i][j] += m
        a[i] -= m
        b[j] -= m
        if a[i] <= 1e-15:
            i += 1
        if j < n and b[j] <= 1e-15:
            j += 1
    return joint


def antimonotone(px, py):
    """Match ascending source mass against descending target mass."""
    n = len(px)
    flipped = comonotone(px, list(reversed(py)))
    return [[flipped[i][n - 1 - j] for j in range(n)] for i in range(n)]


def normalize(joint):
    total = sum(sum(row) for row in joint)
    return [[v / total for v in row] for row in joint]


def moment_cov(joint):
    n = len(joint)
    ex = sum(i * joint[i][j] for i in range(n) for j in range(n))
    ey = sum(j * joint[i][j] for i in range(n) for j in range(n))
    exy = sum(i * j * joint[i][j] for i in range(n) for j in range(n))
    return exy - ex * ey


def pearson(xs, ys):
    n = len(xs)
    mx = sum(xs) / n
    my = sum(ys) / n
    sxx = sum((x - mx) ** 2 for x in xs) / n
    syy = sum((y - my) ** 2 for y in ys) / n
    sxy = sum((x - mx) * (y - my) for x, y in zip(xs, ys)) / n
    return sxy, math.sqrt(sxx), math.sqrt(syy)


def model(xs, ys, bins):
    px = pmf(xs, bins)
    py = pmf(ys, bins)
    up = normalize(comonotone(px, py))
    lo = normalize(antimonotone(px, py))
    cov, sx, sy = pearson(xs, ys)
    prod = [[px[i] * py[j] for j in range(bins)] for i in range(bins)]
    if sx * sy == 0:
        return prod, px, py, (0.0, 0.0, 0.0)
    rho_u = moment_cov(up) / (sx * sy)
    rho_l = moment_cov(lo) / (sx * sy)
    rho = min(max(cov / (sx * sy), rho_l), rho_u)
    if rho > 0:
        w, edge = rho / rho_u, up
    elif rho < 0:
        w, edge = rho / rho_l, lo
    else:
        w, edge = 0.0, prod
    if abs(w - 1) <= SNAP:
        w = 1.0
    if abs(w) <= SNAP:
        w = 0.0
    joint = [[w * edge[i][j] + (1 - w) * prod[i][j] for j in range(bins)] for i in range(bins)]
    return joint, px, py, (rho, rho_l, rho_u)


def score(xs, ys, bins):
    joint, px, py, _ = model(xs, ys, bins)
    mi = 0.0
    for i in range(bins):
        for j in range(bins):
            if joint[i][j] > 0:
                mi += joint[i][j] * math.log2(joint[i][j] / (px[i] * py[j]))
    hx = -sum(p * math.log2(p) for p in px if p > 0)
    hy = -sum(p * math.log2(p) for p in py if p > 0)
    if hx + hy == 0:
        return 0.0
    s = min(max(2 * mi / (hx + hy), 0.0), 1.0)
    if s >= 1 - SNAP:
        return 1.0
    if s <= SNAP:
        return 0.0
    return s


def quantize(v, bins):
    return min(int(math.floor(v * bins)), bins - 1)
