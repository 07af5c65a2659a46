"""Brute-force counterparts of the fast kernels.

Nothing here buckets or hashes values; counts come from direct comparison of
every candidate tuple, so an agreement with the fast path is meaningful.
"""
from __future__ import annotations

from itertools import permutations, product

import numpy as np

from .sets import FSet


def _pair_equalities(vals: np.ndarray, chunk: int = 2048) -> int:
    """#{(i, j) : vals[i] == vals[j]} by comparing every pair."""
    vals = np.asarray(vals, dtype=np.int64).ravel()
    total = 0
    for lo in range(0, vals.size, chunk):
        total += int((vals[lo:lo + chunk, None] == vals[None, :]).sum())
    return total


def energy_quadruples(a, b, p: int, op: str) -> int:
    """#{(a1, a2, b1, b2) : a1 o b1 = a2 o b2}; zeros skipped for products."""
    a, b = list(a), list(b)
    if op == "*":
        a = [x for x in a if x % p]
        b = [x for x in b if x % p]
    f = (lambda x, y: (x + y) % p) if op == "+" else (lambda x, y: x * y % p)
    return _pair_equalities(np.array([f(x, y) for x in a for y in b], dtype=np.int64))


def energy_quadruple_loop(a, b, p: int, op: str) -> int:
    """Literal four-fold loop; only for tiny sets."""
    f = (lambda x, y: (x + y) % p) if op == "+" else (lambda x, y: x * y % p)
    if op == "*":
        a = [x for x in a if x % p]
        b = [x for x in b if x % p]
    return sum(1 for a1, a2, b1, b2 in product(a, a, b, b) if f(a1, b1) == f(a2, b2))


def power_energy(a, d: int, p: int) -> int:
    a = list(a)
    return _pair_equalities(np.array([(pow(x, d, p) + pow(y, d, p)) % p for x in a for y in a]))


def collision_energy(lines, a, p: int) -> int:
    """#{(l, l', x, x') : l(x) = l'(x')} over (m, b) pairs."""
    return _pair_equalities(np.array([(m * x + b) % p for m, b in lines for x in a]))


def sumset(a, b, p: int) -> set:
    return {(x + y) % p for x in a for y in b}


def productset(a, b, p: int) -> set:
    return {x * y % p for x in a for y in b}


def ratioset(a, b, p: int) -> set:
    return {x * pow(y, -1, p) % p for x in a for y in b if y % p}


def collinear_triples_det(points, p: int) -> int:
    """Ordered triples of distinct points with vanishing 3x3 determinant."""
    pts = np.unique(np.mod(np.asarray(points, dtype=np.int64).reshape(-1, 2), p), axis=0)
    n = pts.shape[0]
    if n < 3:
        return 0
    x, y = pts[:, 0], pts[:, 1]
    total = 0
    idx = np.arange(n)
    for i in range(n):
        # det [[1,1,1],[x_i,x_j,x_k],[y_i,y_j,y_k]] for all j, k
        dxj = (x - x[i])[:, None]
        dyj = (y - y[i])[:, None]
        det = (dxj * (y - y[i])[None, :] - dyj * (x - x[i])[None, :]) % p
        ok = det == 0
        ok &= (idx[:, None] != i) & (idx[None, :] != i) & (idx[:, None] != idx[None, :])
        total += int(ok.sum())
    return total


def _line_through(P, Q, p: int) -> tuple:
    """Normalised (a, b, c) with a x + b y = c through two distinct points."""
    a = (Q[1] - P[1]) % p
    b = (P[0] - Q[0]) % p
    c = (a * P[0] + b * P[1]) % p
    lead = a if a else b
    s = pow(lead, -1, p)
    return (a * s % p, b * s % p, c * s % p)


def lines_and_directions(points, p: int) -> tuple[int, int, dict]:
    pts = sorted({(x % p, y % p) for x, y in points})
    lines, dirs = set(), set()
    pinned = {q: set() for q in pts}
    for P, Q in permutations(pts, 2):
        ln = _line_through(P, Q, p)
        lines.add(ln)
        dirs.add(ln[:2])
        pinned[P].add(ln)
    return len(lines), len(dirs), {q: len(s) for q, s in pinned.items()}


def max_collinear(points, p: int) -> int:
    pts = sorted({tuple(int(c) % p for c in q) for q in points})
    n = len(pts)
    if n <= 2:
        return n
    best = 2
    for i in range(n):
        for j in range(i + 1, n):
            d = [(pts[j][t] - pts[i][t]) % p for t in range(len(pts[i]))]
            cnt = 0
            for q in pts:
                e = [(q[t] - pts[i][t]) % p for t in range(len(q))]
                # e parallel to d  <=>  all 2x2 minors vanish
                if all((d[s] * e[t] - d[t] * e[s]) % p == 0
                       for s in range(len(d)) for t in range(s + 1, len(d))):
                    cnt += 1
            best = max(best, cnt)
    return best


def pencil(lines, p: int) -> int:
    """Largest set of concurrent or parallel lines, by checking every line pair's meeting point."""
    lines = sorted({(m % p, b % p) for m, b in lines})
    if len(lines) <= 1:
        return len(lines)
    best = 1
    for (m1, b1), (m2, b2) in permutations(lines, 2):
        if m1 == m2:
            cnt = sum(1 for m, _ in lines if m == m1)
        else:
            x0 = (b2 - b1) * pow(m1 - m2, -1, p) % p
            y0 = (m1 * x0 + b1) % p
            cnt = sum(1 for m, b in lines if (m * x0 + b - y0) % p == 0)
        best = max(best, cnt)
    return best


def point_plane_incidences(points, planes, p: int, pw=None, qw=None) -> tuple[int, int]:
    points = [tuple(map(int, q)) for q in points]
    planes = [tuple(map(int, h)) for h in planes]
    qw = [1] * len(points) if qw is None else list(qw)
    pw = [1] * len(planes) if pw is None else list(pw)
    count = weighted = 0
    for (u, v, w, c), wp in zip(planes, pw):
        for (x, y, z), wq in zip(points, qw):
            if (u * x + v * y + w * z - c) % p == 0:
                count += 1
                weighted += wp * wq
    return count, weighted


def point_line_incidences(points, lines, verticals, p: int) -> int:
    pts = {(x % p, y % p) for x, y in points}
    total = 0
    for m, b in lines:
        total += sum(1 for x, y in pts if (m * x + b - y) % p == 0)
    for c in verticals:
        total += sum(1 for x, _ in pts if x == c % p)
    return total


def cross_ratios(a, p: int) -> tuple[set, set]:
    a = list(a)
    r = {(x - y) * (z - w) * pow((x - z) * (y - w), -1, p) % p for x, y, z, w in permutations(a, 4)}
    r_inf = {(x - y) * pow(z - y, -1, p) % p for x, y, z in permutations(a, 3)}
    return r, r_inf


def image_set(lines, a, p: int) -> set:
    return {(m * x + b) % p for m, b in lines for x in a}


def six_tuple_count(a, p: int) -> int:
    """#{(a,b,c,a',b',c') : (a-b)/(c-b) = (a'-b')/(c'-b'), each triple pairwise distinct}."""
    vals = [(x - y) * pow(z - y, -1, p) % p for x, y, z in permutations(list(a), 3)]
    return _pair_equalities(np.array(vals, dtype=np.int64))


def plane_count_by_dedup(p: int) -> int:
    """Distinct affine planes of F_p^3 by normalising every nonzero covector."""
    seen = set()
    for u, v, w, c in product(range(p), repeat=4):
        if (u, v, w) == (0, 0, 0):
            continue
        lead = u or v or w
        s = pow(lead, -1, p)
        seen.add((u * s % p, v * s % p, w * s % p, c * s % p))
    return len(seen)


def as_list(s: FSet) -> list[int]:
    return s.tolist()
