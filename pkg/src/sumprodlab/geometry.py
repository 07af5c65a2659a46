"""Lines, image sets, pencils, collinearity and incidence counting over F_p.

Line keys are exact: a non-vertical line y = m x + b is keyed ``m*p + b`` and
a vertical line x = c is keyed ``p*p + c``.  Point pairs are bucketed by the
key of the line through them; everything about lines spanned by a point set
(triples, line counts, directions, pinned lines) is read off those buckets.
"""
from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from functools import lru_cache
from math import isqrt, sqrt
from typing import Optional, Sequence

import numpy as np

from .field import PrimeField, as_field
from .sets import FSet, _same, eval_expr

BRUTE_FORCE_PAIRS = 10_000


class GeometryError(ValueError):
    pass


@lru_cache(maxsize=16)
def _inv_table(p: int) -> np.ndarray:
    return PrimeField(p).inverse_table()


def inv_mod(x: np.ndarray, p: int) -> np.ndarray:
    """Elementwise inverse; entries equal to 0 map to 0."""
    x = np.mod(np.asarray(x, dtype=np.int64), p)
    if p <= 1 << 22:
        return _inv_table(p)[x]
    return np.array([pow(int(t), -1, p) if t else 0 for t in x.ravel().tolist()],
                    dtype=np.int64).reshape(x.shape)


# --- line families ----------------------------------------------------------

@dataclass(frozen=True)
class Line:
    m: int
    b: int
    vertical: bool = False

    def key(self, p: int) -> int:
        return p * p + self.b if self.vertical else self.m * p + self.b


@dataclass(frozen=True, eq=False)
class LineSet:
    """Duplicate-free lines y = m x + b, plus optional vertical lines x = c.

    Vertical lines exist only for planar incidence counting; image sets and
    collision energies reject them.
    """

    field: PrimeField
    m: np.ndarray
    b: np.ndarray
    verticals: np.ndarray = dc_field(default_factory=lambda: np.empty(0, np.int64))
    provenance: str = "custom"
    dropped: int = 0

    @classmethod
    def from_pairs(cls, p, pairs, verticals: Sequence[int] = (), provenance: str = "custom",
                   dropped: int = 0) -> "LineSet":
        f = as_field(p)
        arr = np.asarray(list(pairs), dtype=np.int64).reshape(-1, 2) % f.p
        keys = np.unique(arr[:, 0] * f.p + arr[:, 1])
        vx = np.unique(np.asarray(list(verticals), dtype=np.int64) % f.p)
        return cls(f, keys // f.p, keys % f.p, vx, provenance, dropped)

    @property
    def p(self) -> int:
        return self.field.p

    def __len__(self):
        return int(self.m.size + self.verticals.size)

    def coeffs(self) -> tuple[np.ndarray, np.ndarray]:
        if self.verticals.size:
            raise GeometryError("vertical lines cannot be evaluated at an abscissa")
        return self.m, self.b

    def lines(self) -> list[Line]:
        out = [Line(int(m), int(b)) for m, b in zip(self.m.tolist(), self.b.tolist())]
        return out + [Line(0, int(c), True) for c in self.verticals.tolist()]

    def keys(self) -> np.ndarray:
        p = self.p
        return np.concatenate([self.m * p + self.b, p * p + self.verticals])


def grid_lines_product(b: FSet, c: FSet) -> LineSet:
    """Lines y = b x + c over B x C; their image set on A is BA + C."""
    f = _same(b, c)
    bs = b.elems[b.elems != 0]
    dropped = (len(b) - bs.size) * len(c)
    mm, bb = np.meshgrid(bs, c.elems, indexing="ij")
    return LineSet.from_pairs(f, np.stack([mm.ravel(), bb.ravel()], 1),
                              provenance="grid_product", dropped=dropped)


def grid_lines_sum(b: FSet, c: FSet) -> LineSet:
    """Lines y = b x + b c; their image set on A is B(A + C)."""
    f = _same(b, c)
    bs = b.elems[b.elems != 0]
    dropped = (len(b) - bs.size) * len(c)
    mm, cc = np.meshgrid(bs, c.elems, indexing="ij")
    return LineSet.from_pairs(f, np.stack([mm.ravel(), mm.ravel() * cc.ravel()], 1),
                              provenance="grid_sum", dropped=dropped)


def image_set(lines: LineSet, a: FSet) -> FSet:
    if lines.field != a.field:
        raise GeometryError("lines and set over different fields")
    m, b = lines.coeffs()
    vals = np.multiply.outer(m, a.elems) + b[:, None]
    return FSet.of(a.field, vals.ravel())


# --- collinearity -----------------------------------------------------------

def _normalize_dirs(d: np.ndarray, p: int) -> np.ndarray:
    """Scale each direction row so its first nonzero coordinate is 1."""
    nz = d != 0
    lead_idx = nz.argmax(axis=1)
    lead = d[np.arange(d.shape[0]), lead_idx]
    return d * inv_mod(lead, p)[:, None] % p


def max_collinear(points, p: int) -> int:
    """Largest number of the given (2D or 3D) points on one line; weights ignored."""
    pts = np.unique(np.mod(np.asarray(points, dtype=np.int64), p), axis=0)
    n = pts.shape[0]
    if n <= 2:
        return n
    dim = pts.shape[1]
    radix = p ** np.arange(dim - 1, -1, -1, dtype=np.int64)
    best = 2
    for i in range(n - 2):
        d = (pts[i + 1:] - pts[i]) % p
        keys = _normalize_dirs(d, p) @ radix
        top = int(np.unique(keys, return_counts=True)[1].max()) + 1
        if top > best:
            best = top
            if best == n - i:
                break
        if n - i <= best:
            break
    return best


def pencil_stat(lines: LineSet) -> int:
    """Largest number of concurrent or mutually parallel lines.

    Dually, the largest number of collinear covectors (m, b): lines through
    (x0, y0) have b = y0 - x0 m, parallel lines share m.
    """
    m, b = lines.coeffs()
    if m.size == 0:
        return 0
    return max_collinear(np.stack([m, b], 1), lines.p)


# --- pair bucketing in the plane ---------------------------------------------

@dataclass(frozen=True)
class _PairBuckets:
    p: int
    n: int
    i: np.ndarray
    j: np.ndarray
    keys: np.ndarray

    def line_counts(self) -> np.ndarray:
        return np.unique(self.keys, return_counts=True)[1]


def _grid(a: FSet, b: FSet) -> np.ndarray:
    xx, yy = np.meshgrid(a.elems, b.elems, indexing="ij")
    return np.stack([xx.ravel(), yy.ravel()], 1)


def _pair_buckets(pts: np.ndarray, p: int) -> _PairBuckets:
    pts = np.unique(np.mod(pts, p), axis=0)
    n = pts.shape[0]
    i, j = np.triu_indices(n, 1)
    x1, y1 = pts[i, 0], pts[i, 1]
    dx = (pts[j, 0] - x1) % p
    dy = (pts[j, 1] - y1) % p
    vert = dx == 0
    slope = dy * inv_mod(dx, p) % p
    icpt = (y1 - slope * x1) % p
    keys = np.where(vert, p * p + x1, slope * p + icpt)
    return _PairBuckets(p, n, i, j, keys)


def _points_per_line(pair_counts: np.ndarray) -> np.ndarray:
    # a line with k points holds C(k, 2) pairs
    return np.array([(1 + isqrt(1 + 8 * int(c))) // 2 for c in pair_counts.tolist()],
                    dtype=np.int64)


def collinear_triples_points(pts, p: int) -> int:
    """Ordered triples of pairwise-distinct points of ``pts`` on a common line."""
    pts = np.asarray(pts, dtype=np.int64).reshape(-1, 2)
    if pts.shape[0] < 3:
        return 0
    k = _points_per_line(_pair_buckets(pts, p).line_counts())
    return sum(int(t) * (int(t) - 1) * (int(t) - 2) for t in k.tolist() if t >= 3)


def collinear_triples(a: FSet) -> int:
    """T(A) for the grid A x A (ordered, pairwise-distinct points)."""
    return collinear_triples_grid(a, a)


def collinear_triples_grid(a: FSet, b: FSet) -> int:
    """Collinear triples in A x B."""
    _same(a, b)
    if len(b) > len(a):
        a, b = b, a
    return collinear_triples_points(_grid(a, b), a.p)


@dataclass
class LineDirectionStats:
    lines: int
    directions: int
    per_point_pinned: dict

    @property
    def pinned_min(self) -> int:
        return min(self.per_point_pinned.values()) if self.per_point_pinned else 0

    @property
    def pinned_second_min(self) -> int:
        vals = sorted(self.per_point_pinned.values())
        return vals[1] if len(vals) > 1 else (vals[0] if vals else 0)


def line_and_direction_sets(a: FSet, b: Optional[FSet] = None) -> LineDirectionStats:
    """Distinct connecting lines and directions of A x B, and lines pinned at each point."""
    b = a if b is None else b
    p = a.p
    pts = np.unique(_grid(a, b), axis=0)
    if pts.shape[0] < 2:
        raise GeometryError("need at least two points")
    pb = _pair_buckets(pts, p)
    lines = np.unique(pb.keys)
    slopes = np.where(pb.keys >= p * p, p, pb.keys // p)
    directions = np.unique(slopes).size
    # distinct (point, line) incidences among pairs
    owner = np.concatenate([pb.i, pb.j])
    k2 = np.concatenate([pb.keys, pb.keys])
    pl = np.unique(owner * (p * p + p) + k2)
    counts = np.bincount(pl // (p * p + p), minlength=pts.shape[0])
    pinned = {(int(x), int(y)): int(c) for (x, y), c in zip(pts.tolist(), counts.tolist())}
    return LineDirectionStats(int(lines.size), int(directions), pinned)


def connecting_lines(a: FSet, b: Optional[FSet] = None) -> LineSet:
    """All lines through at least two points of A x B (verticals included)."""
    b = a if b is None else b
    p = a.p
    keys = np.unique(_pair_buckets(_grid(a, b), p).keys)
    nv = keys[keys < p * p]
    return LineSet(a.field, nv // p, nv % p, keys[keys >= p * p] - p * p, "connecting")


def point_line_incidences(points, lines: LineSet) -> int:
    """Incidences between planar points and lines (vertical lines allowed)."""
    p = lines.p
    pts = np.unique(np.mod(np.asarray(points, dtype=np.int64).reshape(-1, 2), p), axis=0)
    if pts.shape[0] == 0 or len(lines) == 0:
        return 0
    x, y = pts[:, 0], pts[:, 1]
    total = 0
    if lines.verticals.size:
        cx = np.bincount(x, minlength=p)
        total += int(cx[lines.verticals].sum())
    if lines.m.size:
        order = np.argsort(lines.m, kind="stable")
        m_sorted, b_sorted = lines.m[order], lines.b[order]
        slopes, starts = np.unique(m_sorted, return_index=True)
        bounds = list(starts.tolist()) + [m_sorted.size]
        for s, lo, hi in zip(slopes.tolist(), bounds[:-1], bounds[1:]):
            icpt = np.bincount((y - s * x) % p, minlength=p)
            total += int(icpt[b_sorted[lo:hi]].sum())
    return total


# --- three-space ------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class PointSet3:
    p: int
    coords: np.ndarray   # (n, 3)
    weights: np.ndarray  # (n,), positive integers

    @classmethod
    def build(cls, p: int, coords, weights=None) -> "PointSet3":
        c = np.mod(np.asarray(coords, dtype=np.int64).reshape(-1, 3), p)
        w = np.ones(c.shape[0], np.int64) if weights is None else np.asarray(weights, np.int64)
        if w.size and w.min() < 1:
            raise GeometryError("weights must be positive integers")
        uniq, inv = np.unique(c, axis=0, return_inverse=True)
        merged = np.zeros(uniq.shape[0], np.int64)
        np.add.at(merged, inv.ravel(), w)
        return cls(p, uniq, merged)

    def __len__(self):
        return int(self.coords.shape[0])

    @property
    def total_weight(self) -> int:
        return int(self.weights.sum())

    @property
    def max_weight(self) -> int:
        return int(self.weights.max()) if len(self) else 0


@dataclass(frozen=True, eq=False)
class PlaneSet3:
    """Planes u x + v y + w z = c, stored normalised (first nonzero of u, v, w is 1)."""

    p: int
    coeffs: np.ndarray   # (m, 4)
    weights: np.ndarray

    @classmethod
    def build(cls, p: int, coeffs, weights=None) -> "PlaneSet3":
        c = np.mod(np.asarray(coeffs, dtype=np.int64).reshape(-1, 4), p)
        if c.shape[0] and (c[:, :3] == 0).all(axis=1).any():
            raise GeometryError("plane normal must be nonzero")
        if c.shape[0]:
            c = _normalize_dirs(c, p)
        w = np.ones(c.shape[0], np.int64) if weights is None else np.asarray(weights, np.int64)
        if w.size and w.min() < 1:
            raise GeometryError("weights must be positive integers")
        uniq, inv = np.unique(c, axis=0, return_inverse=True)
        merged = np.zeros(uniq.shape[0], np.int64)
        np.add.at(merged, inv.ravel(), w)
        return cls(p, uniq, merged)

    def __len__(self):
        return int(self.coeffs.shape[0])

    @property
    def total_weight(self) -> int:
        return int(self.weights.sum())

    @property
    def max_weight(self) -> int:
        return int(self.weights.max()) if len(self) else 0


@dataclass(frozen=True)
class GeometryStats:
    k: Optional[int] = None   # max collinear points
    M: Optional[int] = None   # max pencil size


@dataclass(frozen=True)
class IncidenceResult:
    count: int
    weighted: int
    n_points: int
    n_planes: int
    W: int
    w: int
    stats: GeometryStats

    @property
    def m(self) -> int:
        """Size of the smaller family."""
        return min(self.n_points, self.n_planes)

    @property
    def n(self) -> int:
        return max(self.n_points, self.n_planes)


def _incidence_counts(q: PointSet3, planes: PlaneSet3) -> tuple[int, int]:
    p = q.p
    if len(q) == 0 or len(planes) == 0:
        return 0, 0
    if len(q) * len(planes) < BRUTE_FORCE_PAIRS:
        ev = (q.coords @ planes.coeffs[:, :3].T - planes.coeffs[:, 3]) % p == 0
        return int(ev.sum()), int(q.weights @ ev @ planes.weights)
    count = weighted = 0
    normals = planes.coeffs[:, :3]
    order = np.lexsort((planes.coeffs[:, 3], normals[:, 2], normals[:, 1], normals[:, 0]))
    nc = normals[order]
    cs = planes.coeffs[order, 3]
    pw = planes.weights[order]
    change = np.flatnonzero((np.diff(nc, axis=0) != 0).any(axis=1)) + 1
    bounds = [0] + change.tolist() + [nc.shape[0]]
    for lo, hi in zip(bounds[:-1], bounds[1:]):
        vals = q.coords @ nc[lo] % p
        plain = np.bincount(vals, minlength=p)
        wsum = np.zeros(p, np.int64)
        np.add.at(wsum, vals, q.weights)
        count += int(plain[cs[lo:hi]].sum())
        weighted += int(wsum[cs[lo:hi]] @ pw[lo:hi])
    return count, weighted


def point_plane_incidences(q: PointSet3, planes: PlaneSet3, k: Optional[int] = None,
                           with_k: bool = True) -> IncidenceResult:
    """Exact |I(Q, Pi)| and the weighted count sum w(q) w(pi) [q in pi].

    Planes sharing a normal are handled together: one evaluation of the normal
    on every point, bucketed by value, answers all of them.  ``k`` (max
    collinear points) is computed unless supplied or ``with_k`` is False.
    """
    if q.p != planes.p:
        raise GeometryError("points and planes over different fields")
    count, weighted = _incidence_counts(q, planes)
    if k is None and with_k:
        k = max_collinear(q.coords, q.p)
    return IncidenceResult(count, weighted, len(q), len(planes),
                           max(q.total_weight, planes.total_weight),
                           max(q.max_weight, planes.max_weight, 1), GeometryStats(k=k))


def collision_points_planes(lines: LineSet, a: FSet) -> tuple[PointSet3, PlaneSet3]:
    """Points (m, b, a') and planes a x + y - m' z = b' whose incidences are E(L, A).

    (m, b, a') lies on the plane of (a, m', b') iff m a + b = m' a' + b'.
    """
    p = a.p
    m, b = lines.coeffs()
    if m.size == 0 or len(a) == 0:
        return PointSet3.build(p, np.empty((0, 3))), PlaneSet3.build(p, np.empty((0, 4)))
    lm = np.repeat(m, len(a))
    lb = np.repeat(b, len(a))
    xs = np.tile(a.elems, m.size)
    pts = np.stack([lm, lb, xs], 1)
    pls = np.stack([xs, np.ones_like(xs), -lm, lb], 1)
    return PointSet3.build(p, pts), PlaneSet3.build(p, pls)


def collision_k(lines: LineSet, a: FSet) -> int:
    """Max collinear points of the collision point set P x A.

    A line parallel to the z axis meets it in |A| points; any other line
    projects injectively to a line of the covector plane.
    """
    m, b = lines.coeffs()
    if m.size == 0 or len(a) == 0:
        return 0
    return max(len(a), max_collinear(np.stack([m, b], 1), a.p))


# --- cross-ratios and distances ----------------------------------------------

@dataclass(frozen=True)
class CrossRatios:
    R: FSet
    R_inf: FSet
    has_infinity: bool = False


def _distinct_mask(*idx):
    mask = np.ones(np.broadcast(*idx).shape, dtype=bool)
    for s in range(len(idx)):
        for t in range(s + 1, len(idx)):
            mask &= idx[s] != idx[t]
    return mask


def cross_ratio_sets(a: FSet, include_degenerate: bool = False) -> CrossRatios:
    """R(A) and R_inf(A).

    By default a, b, c, d are pairwise distinct, so both sets avoid 0, 1 and
    infinity.  With ``include_degenerate`` all quadruples with a defined value
    enter; ``has_infinity`` then records whether infinity occurred.
    """
    p = a.p
    n = len(a)
    x = a.elems
    f = a.field
    # pinned at infinity
    I, J, K = np.ix_(range(n), range(n), range(n))
    num = (x[I] - x[J]) % p
    den = (x[K] - x[J]) % p
    num, den = np.broadcast_arrays(num, den)
    mask = _distinct_mask(I, J, K) if not include_degenerate else (den != 0)
    r_inf = num[mask] * inv_mod(den[mask], p) % p
    # full cross-ratio
    I, J, K, L = np.ix_(range(n), range(n), range(n), range(n))
    num = (x[I] - x[J]) * (x[K] - x[L]) % p
    den = (x[I] - x[K]) * (x[J] - x[L]) % p
    num, den = np.broadcast_arrays(num, den)
    has_inf = False
    if include_degenerate:
        defined = (num != 0) | (den != 0)
        has_inf = bool(((den == 0) & defined).any())
        mask = defined & (den != 0)
    else:
        mask = _distinct_mask(I, J, K, L)
    r = num[mask] * inv_mod(den[mask], p) % p
    return CrossRatios(FSet.of(f, r), FSet.of(f, r_inf), has_inf)


def pinned_cross_ratios(a: FSet, c: int) -> FSet:
    """{(a-b)(c-d)/((a-c)(b-d))} with c fixed and a, b, d distinct elements of A minus c."""
    p = a.p
    x = a.elems[a.elems != c % p]
    n = x.size
    I, J, L = np.ix_(range(n), range(n), range(n))
    num = (x[I] - x[J]) * (c - x[L]) % p
    den = (x[I] - c) * (x[J] - x[L]) % p
    num, den = np.broadcast_arrays(num, den)
    mask = _distinct_mask(I, J, L)
    return FSet.of(a.field, num[mask] * inv_mod(den[mask], p) % p)


@dataclass(frozen=True)
class DistanceSets:
    quadratic: FSet
    cubic: FSet


def distance_sets(a: FSet) -> DistanceSets:
    env = {"A": a}
    return DistanceSets(eval_expr("(A-A)^2 + (A-A)^2", env), eval_expr("(A-A)^3 + (A-A)^3", env))


def incidence_bound(n: int, m: int, k: int) -> float:
    """n sqrt(m) + k n, with m <= n."""
    return n * sqrt(m) + k * n


def weighted_incidence_bound(W: int, w: int, k: int) -> float:
    return W ** 1.5 * w ** 0.5 + k * w * W
