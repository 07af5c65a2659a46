"""Representation functions and energies.

Every energy is the second moment of a representation function: bucket the
|A||B| values of ``a o b`` (``np.bincount`` over residues, or ``np.unique``
when p is large) and sum the squared bucket counts.  The O(n^4) loops live in
:mod:`sumprodlab.oracles` and only serve as cross-checks.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .report import CheckReport
from .sets import FSet, _same, productset, sumset, translate, power_values

# bincount over p buckets is used below this modulus
_BINCOUNT_MAX_P = 1 << 22
_INT64_SAFE = 1 << 62


class EnergyOverflow(OverflowError):
    pass


@dataclass(frozen=True)
class RepFunction:
    """``counts[i]`` solutions for value ``values[i]``."""

    p: int
    values: np.ndarray
    counts: np.ndarray

    @property
    def total(self) -> int:
        return int(self.counts.sum())

    def __getitem__(self, v: int) -> int:
        i = np.searchsorted(self.values, int(v) % self.p)
        if i < self.values.size and self.values[i] == int(v) % self.p:
            return int(self.counts[i])
        return 0

    def as_dict(self) -> dict[int, int]:
        return dict(zip(self.values.tolist(), self.counts.tolist()))

    def second_moment(self) -> int:
        return _sum_squares(self.counts)

    @property
    def support(self) -> np.ndarray:
        return self.values


def _sum_squares(counts: np.ndarray) -> int:
    counts = counts.astype(np.int64)
    total = int(counts.sum())
    if total and total * int(counts.max()) >= _INT64_SAFE:
        return sum(int(c) * int(c) for c in counts.tolist())
    return int(np.dot(counts, counts))


def bucket(values: np.ndarray, p: int) -> RepFunction:
    values = np.mod(np.asarray(values, dtype=np.int64).ravel(), p)
    if p <= _BINCOUNT_MAX_P:
        c = np.bincount(values, minlength=p)
        nz = np.flatnonzero(c)
        return RepFunction(p, nz.astype(np.int64), c[nz].astype(np.int64))
    v, c = np.unique(values, return_counts=True)
    return RepFunction(p, v.astype(np.int64), c.astype(np.int64))


def rep_function(kind: str, a: FSet, b: FSet) -> RepFunction:
    """Exact ``r(v) = #{(x, y) in A x B : x o y = v}`` with o one of + - * /.

    ``kind`` is "sum", "diff", "product" or "ratio"; ratio skips zero divisors.
    """
    f = _same(a, b)
    x, y = a.elems, b.elems
    if kind == "sum":
        vals = np.add.outer(x, y)
    elif kind == "diff":
        vals = np.subtract.outer(x, y)
    elif kind == "product":
        vals = np.multiply.outer(x, y)
    elif kind == "ratio":
        nz = y[y != 0]
        inv = np.array([pow(int(t), -1, f.p) for t in nz.tolist()], dtype=np.int64)
        vals = np.multiply.outer(x, inv)
    else:
        raise ValueError(f"unknown representation kind {kind!r}")
    return bucket(vals, f.p)


def additive_energy(a: FSet, b: Optional[FSet] = None) -> int:
    """E(A, B) = #{a1 + b1 = a2 + b2}."""
    return rep_function("sum", a, a if b is None else b).second_moment()


def multiplicative_energy(a: FSet, b: Optional[FSet] = None) -> int:
    """E^x(A, B) = #{a1 b1 = a2 b2}, zeros excluded from both sets."""
    b = a if b is None else b
    return rep_function("product", a.nonzero(), b.nonzero()).second_moment()


def power_energy(a: FSet, d: int) -> int:
    """E_d(A) = #{(a, b, c, e) in A^4 : a^d + b^d = c^d + e^d}.

    The power map is applied with multiplicities, so a d-to-1 map is not
    undercounted.
    """
    if int(d) < 1:
        raise ValueError("d must be a positive integer")
    w = power_values(a, d)
    return bucket(np.add.outer(w, w), a.p).second_moment()


def image_rep(lines, a: FSet) -> RepFunction:
    """r_{L(A)}(y) = #{(line, x) in L x A : m x + b = y}."""
    if lines.field != a.field:
        raise ValueError("lines and set over different fields")
    m, b = lines.coeffs()
    vals = np.multiply.outer(m, a.elems) + b[:, None]
    return bucket(vals, a.p)


def collision_energy(lines, a: FSet) -> int:
    """E(L, A) = #{(l, l', x, x') : l(x) = l'(x')}."""
    return image_rep(lines, a).second_moment()


# --- energy bound reports ---------------------------------------------------

def energy_bound_report(kind: str, a: FSet, b: Optional[FSet] = None,
                        c: Optional[FSet] = None, alpha: int = 1) -> CheckReport:
    """Measured energy against the main expression of one of the upper bounds.

    kind:
      ``eq10``   E^x(A) vs |A||A+A|^{3/2}
      ``add_bc`` E(A,B) vs (|A||BC|)^{3/2}|C|^{-1/2} + M|A||BC|/|C|, M = max(|A|,|BC|)
      ``mult_bpc`` E^x(A,B) vs (|A||B+C|)^{3/2}|C|^{-1/2} + M|A||B+C|/|C|
      ``mult_shift`` E^x(A,B) vs (|A||Z|)^{3/2}|C|^{-1/2} + |A||Z|^2/|C|, Z = A(B+alpha)C
    """
    b = a if b is None else b
    c = a if c is None else c
    p = a.p
    na, nc = len(a), len(c)
    params: dict = {}
    if kind == "eq10":
        lhs = multiplicative_energy(a)
        s = len(sumset(a, a))
        rhs = na * s ** 1.5
        ok = na * na * s < p * p
        params["A+A"] = s
    elif kind == "add_bc":
        lhs = additive_energy(a, b)
        bc = len(productset(b, c))
        m = max(na, bc)
        rhs = (na * bc) ** 1.5 / nc ** 0.5 + m * na * bc / nc
        ok = na * nc * bc < p * p
        params["BC"] = bc
    elif kind == "mult_bpc":
        lhs = multiplicative_energy(a, b)
        bpc = len(sumset(b, c))
        m = max(na, bpc)
        rhs = (na * bpc) ** 1.5 / nc ** 0.5 + m * na * bpc / nc
        ok = na * nc * bpc < p * p
        params["B+C"] = bpc
    elif kind == "mult_shift":
        if alpha % p == 0:
            raise ValueError("alpha must be nonzero")
        lhs = multiplicative_energy(a, b)
        z = len(productset(productset(a, translate(b, alpha)), c))
        rhs = (na * z) ** 1.5 / nc ** 0.5 + na * z * z / nc
        ok = na * nc * z < p * p
        params["alpha"] = alpha % p
        params["A(B+alpha)C"] = z
    else:
        raise ValueError(f"unknown energy bound {kind!r}")
    return CheckReport(f"energy_bounds_{kind}", p, lhs, rhs, constraint_ok=bool(ok),
                       relation="<<", params=params, size_A=na, size_B=len(b))

