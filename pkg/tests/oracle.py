"""Straight-line pure-Python DPC-KNN used as an independent reference.

No numpy, no log-domain tricks: densities are exp(-mean) and scores are
rho * delta exactly as written in the formulas.
"""

import math


def sqdist(a, b):
    total = 0.0
    for x, y in zip(a, b):
        total += (float(x) - float(y)) ** 2
    return total


def distance_table(vectors):
    return [[sqdist(a, b) for b in vectors] for a in vectors]


def densities(vectors, k):
    n = len(vectors)
    k = min(k, n - 1)
    table = distance_table(vectors)
    rho = []
    for i in range(n):
        others = sorted(table[i][j] for j in range(n) if j != i)
        total = 0.0
        for v in others[:k]:
            total += v
        rho.append(math.exp(-total / k))
    return rho


def distance_indices(vectors, rho):
    table = distance_table(vectors)
    n = len(vectors)
    delta = []
    for i in range(n):
        denser = [j for j in range(n) if rho[j] > rho[i]]
        if denser:
            delta.append(min(table[i][j] for j in denser))
        else:
            delta.append(max(table[i]))
    return delta


def naive_cluster(vectors, c, k):
    """Returns (centers, assignment, merged) with merged as lists of floats."""
    n = len(vectors)
    if n == 1 or c >= n:
        return list(range(n)), list(range(n)), [[float(v) for v in row] for row in vectors]
    table = distance_table(vectors)
    rho = densities(vectors, k)
    delta = distance_indices(vectors, rho)
    score = [rho[i] * delta[i] for i in range(n)]
    chosen = sorted(range(n), key=lambda i: (-score[i], i))[:c]
    centers = sorted(chosen)
    assignment = []
    for i in range(n):
        if i in centers:
            assignment.append(centers.index(i))
            continue
        best = None
        for s, ctr in enumerate(centers):
            d = table[i][ctr]
            if best is None or d < best[0]:
                best = (d, s)
        assignment.append(best[1])
    merged = []
    for s in range(len(centers)):
        rows = [vectors[i] for i in range(n) if assignment[i] == s]
        dim = len(rows[0])
        merged.append([math.fsum(float(r[d]) for r in rows) / len(rows) for d in range(dim)])
    return centers, assignment, merged


def naive_matmul(a, b):
    rows, inner, cols = len(a), len(b), len(b[0])
    return [[math.fsum(float(a[i][t]) * float(b[t][j]) for t in range(inner)) for j in range(cols)]
            for i in range(rows)]
