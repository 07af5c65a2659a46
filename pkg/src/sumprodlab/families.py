"""Deterministic set generators and the sphere/all-planes configuration.

Random subsets use a pinned algorithm so catalogues are portable:

* stream: Philox4x64-10 (counter-based) keyed by the seed, read through
  ``numpy.random.Philox(key=seed).random_raw``;
* draw below ``k``: take 64-bit words, reject any word >= 2**64 - 2**64 % k,
  return ``word % k``;
* sample: partial Fisher-Yates over the sorted pool (``0..p-1``, or
  ``1..p-1`` when zero-free); step ``i`` swaps position ``i`` with
  ``i + draw(len(pool) - i)``; the first ``n`` positions are the subset.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Union

import numpy as np

from .field import PrimeField, as_field
from .geometry import PlaneSet3, PointSet3
from .sets import FSet

SPHERE_MAX_P = 31
KINDS = ("interval", "ap", "gp", "subgroup", "random", "union")
_ALIASES = {"arithmetic_progression": "ap", "geometric_progression": "gp",
            "multiplicative_subgroup": "subgroup"}


class FamilyError(ValueError):
    pass


class ResourceError(RuntimeError):
    pass


@dataclass(frozen=True)
class FamilySpec:
    """A set recipe such as ``gp(start=1,ratio=2,size=5)``.

    Parameters by kind: interval(start, size); ap(start, step, size);
    gp(start, ratio, size); subgroup(order); random(size, seed, zero_free);
    union(children...).
    """

    kind: str
    params: tuple = ()
    children: tuple = ()

    def __post_init__(self):
        kind = _ALIASES.get(self.kind, self.kind)
        if kind not in KINDS:
            raise FamilyError(f"unknown family kind {self.kind!r}")
        object.__setattr__(self, "kind", kind)
        if isinstance(self.params, dict):
            object.__setattr__(self, "params", tuple(sorted(self.params.items())))

    @classmethod
    def make(cls, kind: str, **params) -> "FamilySpec":
        return cls(kind, tuple(sorted(params.items())))

    def get(self, key, default=None):
        return dict(self.params).get(key, default)

    def __str__(self):
        if self.kind == "union":
            return "union(" + ",".join(str(c) for c in self.children) + ")"
        return f"{self.kind}(" + ",".join(f"{k}={v}" for k, v in self.params) + ")"

    @classmethod
    def parse(cls, text: str) -> "FamilySpec":
        spec, rest = _parse_spec(text.replace(" ", ""))
        if rest:
            raise FamilyError(f"trailing text in family spec: {rest!r}")
        return spec


def _parse_value(v: str):
    if v.lower() in ("true", "false"):
        return v.lower() == "true"
    try:
        return int(v)
    except ValueError:
        raise FamilyError(f"family parameters must be integers or booleans, got {v!r}") from None


def _parse_spec(text: str):
    m = re.match(r"([a-z_]+)\(", text)
    if not m:
        raise FamilyError(f"cannot parse family spec {text!r}")
    kind = m.group(1)
    rest = text[m.end():]
    if _ALIASES.get(kind, kind) == "union":
        children = []
        while True:
            child, rest = _parse_spec(rest)
            children.append(child)
            if rest.startswith(","):
                rest = rest[1:]
                continue
            if rest.startswith(")"):
                return cls_union(children), rest[1:]
            raise FamilyError(f"bad union syntax near {rest!r}")
    close = rest.find(")")
    if close < 0:
        raise FamilyError(f"unclosed family spec {text!r}")
    body, rest = rest[:close], rest[close + 1:]
    params = {}
    for item in filter(None, body.split(",")):
        if "=" not in item:
            raise FamilyError(f"expected key=value in {item!r}")
        k, v = item.split("=", 1)
        params[k] = _parse_value(v)
    return FamilySpec(kind, tuple(sorted(params.items()))), rest


def cls_union(children) -> FamilySpec:
    return FamilySpec("union", (), tuple(children))


# --- generators -------------------------------------------------------------

class _Philox:
    def __init__(self, seed: int):
        if seed < 0:
            raise FamilyError("seed must be nonnegative")
        self._bits = np.random.Philox(key=int(seed))
        self._buf: list[int] = []

    def word(self) -> int:
        if not self._buf:
            self._buf = self._bits.random_raw(256).tolist()[::-1]
        return self._buf.pop()

    def below(self, k: int) -> int:
        limit = (1 << 64) - (1 << 64) % k
        while True:
            w = self.word()
            if w < limit:
                return w % k


def random_subset(p: Union[int, PrimeField], n: int, seed: int, zero_free: bool = False) -> FSet:
    f = as_field(p)
    lo = 1 if zero_free else 0
    size = f.p - lo
    if not 0 <= n <= size:
        raise FamilyError(f"cannot draw {n} elements from a pool of {size}")
    rng = _Philox(seed)
    swapped: dict[int, int] = {}  # sparse Fisher-Yates over lo..p-1
    out = []
    for i in range(n):
        j = i + rng.below(size - i)
        vi, vj = swapped.get(i, i + lo), swapped.get(j, j + lo)
        swapped[j] = vi
        out.append(vj)
    return FSet.of(f, out)


def primitive_root(p: int) -> int:
    """Smallest generator of F_p^*."""
    n = p - 1
    primes, m, q = [], n, 2
    while q * q <= m:
        if m % q == 0:
            primes.append(q)
            while m % q == 0:
                m //= q
        q += 1
    if m > 1:
        primes.append(m)
    for g in range(2, p):
        if all(pow(g, n // q, p) != 1 for q in primes):
            return g
    return 1  # p = 2 is excluded by PrimeField; keeps the function total


def subgroup(p: Union[int, PrimeField], order: int) -> FSet:
    f = as_field(p)
    if order < 1 or (f.p - 1) % order:
        raise FamilyError(f"order {order} does not divide p - 1 = {f.p - 1}")
    h = pow(primitive_root(f.p), (f.p - 1) // order, f.p)
    return FSet.of(f, [pow(h, k, f.p) for k in range(order)])


def generate(spec: Union[FamilySpec, str], p: Union[int, PrimeField]) -> FSet:
    if isinstance(spec, str):
        spec = FamilySpec.parse(spec)
    f = as_field(p)
    g = spec.get
    if spec.kind == "union":
        if not spec.children:
            raise FamilyError("union needs at least one child")
        vals = np.concatenate([generate(c, f).elems for c in spec.children])
        return FSet.of(f, vals)
    if spec.kind == "subgroup":
        return subgroup(f, int(g("order")))
    if spec.kind == "random":
        return random_subset(f, int(g("size")), int(g("seed", 0)), bool(g("zero_free", False)))
    size = int(g("size"))
    if not 0 <= size <= f.p:
        raise FamilyError(f"size {size} exceeds p = {f.p}")
    start = int(g("start", 1))
    if spec.kind in ("interval", "ap"):
        step = 1 if spec.kind == "interval" else int(g("step", 1))
        if step % f.p == 0:
            raise FamilyError("progression step must be nonzero mod p")
        out = FSet.of(f, [start + k * step for k in range(size)])
    else:  # gp
        ratio = int(g("ratio", 2))
        if start % f.p == 0 or ratio % f.p == 0:
            raise FamilyError("geometric progression needs nonzero start and ratio")
        out = FSet.of(f, [start * pow(ratio, k, f.p) for k in range(size)])
    if len(out) != size:
        raise FamilyError(f"{spec} wraps around and yields only {len(out)} distinct elements")
    return out


# --- extremal incidence configuration ---------------------------------------

def all_planes(p: int) -> np.ndarray:
    """Every affine plane of F_p^3 once, covector normalised to leading 1."""
    r = np.arange(p, dtype=np.int64)
    vv, ww = np.meshgrid(r, r, indexing="ij")
    normals = [np.stack([np.ones(p * p, np.int64), vv.ravel(), ww.ravel()], 1),
               np.stack([np.zeros(p, np.int64), np.ones(p, np.int64), r], 1),
               np.array([[0, 0, 1]], dtype=np.int64)]
    nrm = np.concatenate(normals)
    return np.concatenate([np.column_stack([nrm, np.full(len(nrm), c)]) for c in range(p)])


def sphere_planes_config(p: Union[int, PrimeField]) -> tuple[PointSet3, PlaneSet3]:
    """Q = unit sphere x^2 + y^2 + z^2 = 1, Pi = all planes of F_p^3."""
    f = as_field(p)
    if f.p > SPHERE_MAX_P:
        raise ResourceError(f"sphere configuration is enumerated only for p <= {SPHERE_MAX_P}")
    r = np.arange(f.p, dtype=np.int64)
    x, y, z = (a.ravel() for a in np.meshgrid(r, r, r, indexing="ij"))
    on = (x * x + y * y + z * z - 1) % f.p == 0
    q = PointSet3.build(f.p, np.stack([x[on], y[on], z[on]], 1))
    return q, PlaneSet3.build(f.p, all_planes(f.p))
