"""Runnable checks for the sum-product inequalities.

Exact checks are theorems with explicit constant 1 and pass or fail.  All
other checks are asymptotic (``<<`` / ``>>`` with unspecified constants): they
record lhs, rhs and the ratio and are always report-only.  Each check states
its size hypothesis; rows from instances outside it carry
``constraint_ok = false``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from itertools import combinations
from typing import Callable, Optional, Sequence

import numpy as np

from . import geometry as geo
from .energy import (additive_energy, collision_energy, energy_bound_report,
                     multiplicative_energy)
from .field import threshold
from .report import REPORT_ONLY, CheckReport, exact_report
from .sets import FSet, eval_expr, iterated_sumset, power_values, sumset


class HarnessError(ValueError):
    pass


@dataclass
class Instance:
    """Bound inputs for a check run: sets A, B, C and scalars alpha, beta, d."""

    A: FSet
    B: Optional[FSet] = None
    C: Optional[FSet] = None
    alpha: int = 1
    beta: int = 1
    d: int = 2
    family: str = ""
    seed: Optional[int] = None
    _memo: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        for s in (self.B, self.C):
            if s is not None and s.field != self.A.field:
                raise HarnessError("bound sets live over different fields")

    @property
    def p(self) -> int:
        return self.A.p

    @property
    def b(self) -> FSet:
        return self.A if self.B is None else self.B

    @property
    def c(self) -> FSet:
        return self.A if self.C is None else self.C

    def size(self, expr: str) -> int:
        return len(self.set(expr))

    def set(self, expr: str) -> FSet:
        if expr not in self._memo:
            env = {"A": self.A, "B": self.b, "C": self.c, "alpha": self.alpha, "beta": self.beta}
            self._memo[expr] = eval_expr(expr, env)
        return self._memo[expr]

    def cached(self, key, fn):
        if key not in self._memo:
            self._memo[key] = fn()
        return self._memo[key]

    @cached_property
    def triples(self) -> int:
        return geo.collinear_triples(self.A)

    @cached_property
    def nonzero(self) -> FSet:
        return self.A.nonzero()


@dataclass(frozen=True)
class CheckSpec:
    name: str
    klass: str          # "exact", "asymptotic" or "mixed"
    inputs: tuple
    hypothesis: str
    run: Callable[[Instance], list]
    doc: str = ""


REGISTRY: dict[str, CheckSpec] = {}


def register(name: str, klass: str, inputs: Sequence[str], hypothesis: str, doc: str = ""):
    def deco(fn):
        REGISTRY[name] = CheckSpec(name, klass, tuple(inputs), hypothesis, fn, doc)
        return fn
    return deco


def _asym(name, inst: Instance, lhs, rhs, ok, relation=">>", **params) -> CheckReport:
    return CheckReport(name, inst.p, lhs, rhs, constraint_ok=bool(ok), relation=relation,
                       params=params, status=REPORT_ONLY)


def _zero_flag(inst: Instance, rep: CheckReport) -> CheckReport:
    if 0 in inst.A:
        rep.params["zero_in_A"] = 1
    return rep


# --- exact checks -------------------------------------------------------------

@register("cauchy_schwarz_sum", "exact", ("A", "B"), "none",
          "|A+B| E(A,B) >= |A|^2 |B|^2, also with A-B")
def _cs_sum(inst: Instance):
    a, b = inst.A, inst.b
    e = inst.cached(("E", "A", "B"), lambda: additive_energy(a, b))
    target = len(a) ** 2 * len(b) ** 2
    return [exact_report("cauchy_schwarz_sum", inst.p, inst.size("A+B") * e, target, ">="),
            exact_report("cauchy_schwarz_sum_diff", inst.p, inst.size("A-B") * e, target, ">=")]


@register("cauchy_schwarz_prod", "exact", ("A", "B"), "zeros removed from A and B",
          "|AB| E^x(A,B) >= |A|^2 |B|^2, also with A/B")
def _cs_prod(inst: Instance):
    a, b = inst.A.nonzero(), inst.b.nonzero()
    e = multiplicative_energy(a, b)
    target = len(a) ** 2 * len(b) ** 2
    env = {"A": a, "B": b}
    return [exact_report("cauchy_schwarz_prod", inst.p, len(eval_expr("A*B", env)) * e, target, ">="),
            exact_report("cauchy_schwarz_prod_ratio", inst.p, len(eval_expr("A/B", env)) * e,
                         target, ">=")]


@register("ruzsa_distance", "exact", ("A", "B", "C"), "none", "|A-B| |C| <= |A+C| |B+C|")
def _ruzsa(inst: Instance):
    return [exact_report("ruzsa_distance", inst.p, inst.size("A-B") * len(inst.c),
                         inst.size("A+C") * inst.size("B+C"), "<=")]


@register("plunnecke_2pl", "exact", ("A", "B", "C"), "none", "|A+B| |C| <= |A+C| |B+C|")
def _pl2(inst: Instance):
    return [exact_report("plunnecke_2pl", inst.p, inst.size("A+B") * len(inst.c),
                         inst.size("A+C") * inst.size("B+C"), "<=")]


FATPL_PAIRS = ((1, 1), (2, 1), (1, 2), (2, 2), (3, 1), (1, 3))


@register("plunnecke_fatpl", "exact", ("A", "B"), "n, m >= 1, n + m <= 4",
          "|nB - mB| <= K^(n+m) |A| with K = |A+B|/|A|")
def _fatpl(inst: Instance):
    a, b = inst.A, inst.b
    k = Fraction(inst.size("A+B"), len(a))
    out = []
    for n, m in FATPL_PAIRS:
        lhs = len(iterated_sumset(b, n, m))
        rep = exact_report("plunnecke_fatpl", inst.p, lhs, k ** (n + m) * len(a), "<=")
        rep.params.update(n=n, m=m)
        out.append(rep)
    return out


@dataclass
class Witness:
    X: Optional[FSet]
    K: Fraction
    delta: Fraction
    k: int
    searched: int

    @property
    def found(self) -> bool:
        return self.X is not None


WITNESS_MAX = 12


def plunnecke_refinement_witness(a: FSet, b: FSet, delta=Fraction(1, 2), k: int = 2) -> Witness:
    """Exhaustive search for X in A, |X| >= (1-delta)|A|, with |X + kB| <= (K/delta)^k |X|.

    Larger subsets are tried first.  ``X is None`` in the result would
    contradict the Pluennecke-Ruzsa refinement lemma.
    """
    if len(a) > WITNESS_MAX:
        raise HarnessError(f"exhaustive witness search limited to |A| <= {WITNESS_MAX}")
    if not 1 <= k <= 3:
        raise HarnessError("k must be 1, 2 or 3")
    delta = Fraction(delta)
    if not 0 < delta < 1:
        raise HarnessError("delta must lie in (0, 1)")
    K = Fraction(len(sumset(a, b)), len(a))
    kb = iterated_sumset(b, k)
    bound = (K / delta) ** k
    lo = max(1, math.ceil((1 - delta) * len(a)))
    elems = a.tolist()
    searched = 0
    for size in range(len(elems), lo - 1, -1):
        for xs in combinations(elems, size):
            searched += 1
            X = FSet.of(a.field, xs)
            if len(sumset(X, kb)) <= bound * size:
                return Witness(X, K, delta, k, searched)
    return Witness(None, K, delta, k, searched)


@register("plunnecke_witness", "exact", ("A", "B"), f"|A| <= {WITNESS_MAX}; delta = 1/2, k = 2",
          "a refinement X of A with |X + 2B| <= (2K)^2 |X| exists")
def _witness(inst: Instance):
    if len(inst.A) > WITNESS_MAX:
        return []
    w = plunnecke_refinement_witness(inst.A, inst.b)
    rep = exact_report("plunnecke_witness", inst.p, int(w.found), 1, "==")
    rep.params.update(searched=w.searched, X=len(w.X) if w.found else 0)
    return [rep]


def cube_identity_holds(p: int) -> int:
    """Number of (a, b) in F_p^2 with b^3 - a^3 = 3d[(a + d/2)^2 + d^2/12], d = b - a."""
    if p <= 3:
        raise HarnessError("the identity needs p > 3")
    r = np.arange(p, dtype=object) if p > 2_000_000 else np.arange(p, dtype=np.int64)
    a = r[:, None]
    b = r[None, :]
    d = (b - a) % p
    half, twelfth = pow(2, -1, p), pow(12, -1, p)
    s = (a + d * half % p) % p
    lhs = (b * b % p * b - a * a % p * a) % p
    rhs = 3 * d % p * ((s * s + d * d % p * twelfth) % p) % p
    return int((lhs == rhs).sum())


# --- sum-product ----------------------------------------------------------------

def _variants(inst: Instance, base: str):
    yield base, "A+A", "AA"
    yield base + "_diff", "A-A", "AA"
    yield base + "_ratio", "A+A", "A/A"


@register("sp_sum3prod2", "asymptotic", ("A",), "|A| < p^(3/5)", "|A+A|^3 |AA|^2 >> |A|^6")
def _sp32(inst: Instance):
    n = len(inst.A)
    ok = n < threshold(inst.p, 3, 5)
    return [_zero_flag(inst, _asym(name, inst, inst.size(s) ** 3 * inst.size(m) ** 2, n ** 6, ok))
            for name, s, m in _variants(inst, "sp_sum3prod2")]


@register("sp_65", "asymptotic", ("A",), "|A| < p^(5/8)", "|A+A| + |AA| >> |A|^(6/5)")
def _sp65(inst: Instance):
    n = len(inst.A)
    ok = n < threshold(inst.p, 5, 8)
    return [_zero_flag(inst, _asym(name, inst, inst.size(s) + inst.size(m), n ** 1.2, ok))
            for name, s, m in _variants(inst, "sp_65")]


@register("ratio_translates", "asymptotic", ("A", "B", "alpha", "beta"),
          "|B| <= |A| <= |B|^2, |A|^(1/3)|B|^(4/3) < p, (alpha, beta) != (0, 0); "
          "second row: |A|^(2/5)|B|^(6/5) < p",
          "|(A+alpha)/(B+beta)|^2 |A/B|^3 >> |A|^4 |B|^2")
def _ratio_translates(inst: Instance):
    a, b = inst.A.nonzero(), inst.b.nonzero()
    na, nb = len(a), len(b)
    env = {"A": a, "B": b, "alpha": inst.alpha, "beta": inst.beta}
    shifted = len(eval_expr("(A+alpha)/(B+beta)", env))
    ratio = len(eval_expr("A/B", env))
    nontrivial = (inst.alpha % inst.p, inst.beta % inst.p) != (0, 0)
    sizes_ok = nb <= na <= nb * nb and nontrivial
    ok1 = sizes_ok and na ** (1 / 3) * nb ** (4 / 3) < inst.p
    ok2 = sizes_ok and na ** 0.4 * nb ** 1.2 < inst.p
    params = dict(alpha=inst.alpha % inst.p, beta=inst.beta % inst.p)
    return [_asym("ratio_translates", inst, shifted ** 2 * ratio ** 3, na ** 4 * nb ** 2, ok1, **params),
            _asym("ratio_translates_sum", inst, ratio + shifted, na ** 0.8 * nb ** 0.4, ok2, **params)]


@register("expanders_32", "asymptotic", ("A",), "|A| < p^(2/3)", "|A+AA|, |A(A+A)| >> |A|^(3/2)")
def _expanders(inst: Instance):
    n = len(inst.A)
    ok = n < threshold(inst.p, 2, 3)
    return [_asym("expanders_32", inst, inst.size(e), n ** 1.5, ok, expr=e)
            for e in ("A+AA", "A(A+A)")]


@register("fourfold_85", "asymptotic", ("A",), "|A| < p^(5/8)",
          "|AA+AA| + |(A+A)(A+A)| >> |A|^(8/5)")
def _fourfold(inst: Instance):
    n = len(inst.A)
    lhs = inst.size("AA+AA") + inst.size("(A+A)(A+A)")
    return [_asym("fourfold_85", inst, lhs, n ** 1.6, n < threshold(inst.p, 5, 8))]


@register("powers_d", "asymptotic", ("A", "d"), "|A| < p^(3/5) d^(1/5), 0 < d < |A|",
          "|AA| >> |A|^2/d  or  |AA|^3 |A^d+A^d|^2 >> |A|^6/d")
def _powers(inst: Instance):
    n, d = len(inst.A), int(inst.d)
    aa = inst.size("AA")
    w = power_values(inst.A, d)
    pd = len(FSet.of(inst.A.field, np.add.outer(w, w).ravel()))
    ok = 0 < d < n and n < threshold(inst.p, 3, 5) * d ** 0.2
    branches = [(aa, n * n / d), (aa ** 3 * pd ** 2, n ** 6 / d)]
    ratios = [l / r for l, r in branches]
    i = int(np.argmax(ratios))
    lhs, rhs = branches[i]
    return [_asym("powers_d", inst, lhs, rhs, ok, d=d, branch=i + 1)]


# --- line geometry --------------------------------------------------------------

@register("triples_upper", "asymptotic", ("A",), "|A| < p^(2/3)", "T(A) << |A|^(9/2)")
def _triples(inst: Instance):
    n = len(inst.A)
    return [_asym("triples_upper", inst, inst.triples, n ** 4.5, n < threshold(inst.p, 2, 3), "<<")]


@register("beck_lines", "asymptotic", ("A",), "|A| < p^(2/3)",
          "P = A x A, n = |P|: lines >> n^(3/2), directions >> n^(3/4), pinned lines >> n^(6/10)")
def _beck(inst: Instance):
    na = len(inst.A)
    if na < 2:
        return []
    n = na * na
    ok = na < threshold(inst.p, 2, 3)
    st = geo.line_and_direction_sets(inst.A)
    return [_asym("beck_lines", inst, st.lines, n ** 1.5, ok, quantity="lines"),
            _asym("beck_lines", inst, st.directions, n ** 0.75, ok, quantity="directions"),
            _asym("beck_lines", inst, st.pinned_min, n ** 0.6, ok, quantity="pinned_min",
                  second_min=st.pinned_second_min)]


def _grid_points(a: FSet, b: FSet) -> np.ndarray:
    xx, yy = np.meshgrid(a.elems, b.elems, indexing="ij")
    return np.stack([xx.ravel(), yy.ravel()], 1)


@register("st_incidences", "asymptotic", ("A",), "|A| < p^(2/3)",
          "I(A x A, L) << n^(3/4) m^(2/3) + m for m lines")
def _st(inst: Instance):
    a = inst.A
    n = len(a) ** 2
    ok = len(a) < threshold(inst.p, 2, 3)
    pts = _grid_points(a, a)
    out = []
    for label, lines in (("connecting", geo.connecting_lines(a)),
                         ("grid_product", geo.grid_lines_product(a, a))):
        m = len(lines)
        if not m:
            continue
        inc = geo.point_line_incidences(pts, lines)
        out.append(_asym("st_incidences", inst, inc, n ** 0.75 * m ** (2 / 3) + m, ok, "<<",
                         lines=label, m=m))
    return out


@register("crossratio_32", "mixed", ("A",), "|A| < p^(2/3); exact rows: none",
          "|R_inf(A)| >> |A|^(3/2); exact: |R_inf| T(A) >= (|A|(|A|-1)(|A|-2))^2 and R(A) "
          "contains every pinned cross-ratio set")
def _crossratio(inst: Instance):
    a = inst.A
    n = len(a)
    if n < 3:
        return []
    cr = inst.cached("cross", lambda: geo.cross_ratio_sets(a))
    out = [_asym("crossratio_32", inst, len(cr.R_inf), n ** 1.5, n < threshold(inst.p, 2, 3),
                 R=len(cr.R))]
    cs = exact_report("crossratio_32_cs", inst.p, len(cr.R_inf) * inst.triples,
                      (n * (n - 1) * (n - 2)) ** 2, ">=")
    out.append(cs)
    if n >= 4:
        pinned = max(len(geo.pinned_cross_ratios(a, c)) for c in a.tolist())
        out.append(exact_report("crossratio_32_pinned", inst.p, len(cr.R), pinned, ">="))
    return out


@register("translate_prod_majority", "asymptotic", ("A",), "2 <= |A| < p^(2/3)",
          "|A(A-a)| >> |A|^(5/4) for at least |A|/2 values a in A")
def _majority(inst: Instance):
    a = inst.A
    n = len(a)
    if n < 2:
        return []
    sizes = sorted((len(eval_expr("A(A-t)", {"A": a, "t": t})) for t in a.tolist()), reverse=True)
    # the c at which #{a : |A(A-a)| >= c |A|^(5/4)} drops below |A|/2
    crossing = sizes[math.ceil(n / 2) - 1]
    return [_zero_flag(inst, _asym("translate_prod_majority", inst, crossing, n ** 1.25,
                                   n < threshold(inst.p, 2, 3), min=sizes[-1], max=sizes[0]))]


@register("grid_triples", "asymptotic", ("A", "B"), "|B| <= |A| < p^(2/3)",
          "T(A x B) << n^(9/4) + |A|^3 |B|;  I(A x B, L) << n^(3/4) m^(2/3) + m + n")
def _grid_triples(inst: Instance):
    a, b = inst.A, inst.b
    if len(b) > len(a):
        a, b = b, a
    n = len(a) * len(b)
    ok = len(a) < threshold(inst.p, 2, 3)
    t = geo.collinear_triples_grid(a, b)
    lines = geo.connecting_lines(a, b)
    inc = geo.point_line_incidences(_grid_points(a, b), lines)
    m = len(lines)
    return [_asym("grid_triples", inst, t, n ** 2.25 + len(a) ** 3 * len(b), ok, "<<"),
            _asym("grid_triples", inst, inc, n ** 0.75 * m ** (2 / 3) + m + n, ok, "<<",
                  quantity="incidences", m=m)]


# --- products of translates -------------------------------------------------------

@register("extractor_translate", "asymptotic", ("A", "alpha"), "|A| < p^(8/13), alpha != 0",
          "|A(A+alpha)| >> |A|^(9/8)")
def _extractor(inst: Instance):
    n = len(inst.A)
    ok = n < threshold(inst.p, 8, 13) and inst.alpha % inst.p != 0
    return [_zero_flag(inst, _asym("extractor_translate", inst, inst.size("A(A+alpha)"), n ** 1.125,
                                   ok, alpha=inst.alpha % inst.p))]


@register("shift_intersection", "asymptotic", ("A", "alpha"),
          "alpha != 0; |A| < p^(8/13) (first row), |A| < p^(2/3) (second row)",
          "|A & (A+alpha)| << |AA|^(8/9)  and  << |AA|^(4/3) |A|^(-1/2)")
def _shift(inst: Instance):
    n = len(inst.A)
    lhs = inst.size("A & (A+alpha)")
    aa = inst.size("AA")
    nz = inst.alpha % inst.p != 0
    return [_asym("shift_intersection", inst, lhs, aa ** (8 / 9), nz and n < threshold(inst.p, 8, 13),
                  "<<", alpha=inst.alpha % inst.p),
            _asym("shift_intersection_2", inst, lhs, aa ** (4 / 3) / n ** 0.5,
                  nz and n < threshold(inst.p, 2, 3), "<<", alpha=inst.alpha % inst.p)]


# --- polynomial images ------------------------------------------------------------

@register("squares_pair", "asymptotic", ("A",), "|A| < p^(3/5)",
          "|A+A|^3 |A^2+A^2|^4 >> |A|^8;  |A+A^2| >> |A|^(11/10)")
def _squares(inst: Instance):
    n = len(inst.A)
    ok = n < threshold(inst.p, 3, 5)
    return [_asym("squares_pair", inst, inst.size("A+A") ** 3 * inst.size("A^2+A^2") ** 4, n ** 8, ok),
            _asym("squares_pair_2", inst, inst.size("A+A^2"), n ** 1.1, ok)]


@register("cubes_pair", "mixed", ("A",), "|A| < p^(3/5); identity row: p > 3",
          "|A-A|^3 |A^3+A^3| >> |A|^(17/4);  |A+A^3| >> |A|^(29/28);  cube-difference identity")
def _cubes(inst: Instance):
    n = len(inst.A)
    ok = n < threshold(inst.p, 3, 5)
    out = [_asym("cubes_pair", inst, inst.size("A-A") ** 3 * inst.size("A^3+A^3"), n ** 4.25, ok),
           _asym("cubes_pair_2", inst, inst.size("A+A^3"), n ** (29 / 28), ok)]
    if inst.p > 3:
        held = _identity_cache(inst.p)
        out.append(exact_report("cubes_pair_identity", inst.p, held, inst.p * inst.p, "=="))
    return out


_IDENTITY: dict[int, int] = {}


def _identity_cache(p: int) -> int:
    if p not in _IDENTITY:
        _IDENTITY[p] = cube_identity_holds(p)
    return _IDENTITY[p]


@register("distances", "asymptotic", ("A",), "|A| < p^(8/15) (quadratic), |A| < p^(7/12) (cubic)",
          "|(A-A)^2+(A-A)^2| >> |A|^(9/8);  |(A-A)^3+(A-A)^3| >> |A|^(36/35)")
def _distances(inst: Instance):
    n = len(inst.A)
    ds = geo.distance_sets(inst.A)
    return [_asym("distances", inst, len(ds.quadratic), n ** 1.125, n < threshold(inst.p, 8, 15),
                  kind="quadratic"),
            _asym("distances", inst, len(ds.cubic), n ** (36 / 35), n < threshold(inst.p, 7, 12),
                  kind="cubic")]


# --- reciprocals --------------------------------------------------------------------

@register("reciprocals_pair", "asymptotic", ("A",), "|A| < p^(5/8)",
          "|A+A| + |1/A+1/A| >> |A|^(16/15);  |A+A^-1| >> |A|^(31/30)")
def _recip(inst: Instance):
    n = len(inst.A)
    ok = n < threshold(inst.p, 5, 8)
    return [_zero_flag(inst, _asym("reciprocals_pair", inst, inst.size("A+A") + inst.size("1/A+1/A"),
                                   n ** (16 / 15), ok)),
            _zero_flag(inst, _asym("reciprocals_pair_2", inst, inst.size("A+A^-1"), n ** (31 / 30), ok))]


@register("hyperbola_intersection", "asymptotic", ("A", "alpha"), "|A| < p^(5/8), alpha != 0",
          "|A & alpha/A| << |A+A|^(15/16)")
def _hyperbola(inst: Instance):
    n = len(inst.A)
    ok = n < threshold(inst.p, 5, 8) and inst.alpha % inst.p != 0
    return [_asym("hyperbola_intersection", inst, inst.size("A & alpha/A"),
                  inst.size("A+A") ** (15 / 16), ok, "<<", alpha=inst.alpha % inst.p)]


@register("recip_threefold", "asymptotic", ("A",), "|A| < p^(8/15) (stated); |A| < p^(8/13) also recorded",
          "|1/A + 1/(A+A)| >> |A|^(9/8)")
def _recip3(inst: Instance):
    n = len(inst.A)
    lhs = inst.size("1/A + 1/(A+A)")
    return [_zero_flag(inst, _asym("recip_threefold", inst, lhs, n ** 1.125,
                                   n < threshold(inst.p, 8, 15),
                                   below_p_8_13=int(n < threshold(inst.p, 8, 13))))]


# --- image sets, incidences, energies -----------------------------------------------

def _grid_family(kind: str, b: FSet, c: FSet) -> geo.LineSet:
    return geo.grid_lines_sum(b, c) if kind == "sum" else geo.grid_lines_product(b, c)


@register("image_set_bounds", "asymptotic", ("A", "B", "C"), "|L||A| < p^2 (energy and size rows)",
          "E(L,A) << |L|^(3/2)|A|^(3/2) + k|L||A|;  |L(A)| >> min(sqrt(|L||A|), |L||A|/k);  "
          "|B(A+C)|, |BA+C| >> min(sqrt(|A||B||C|), |A||B||C|/M, p)")
def _image(inst: Instance):
    a, b, c = inst.A.nonzero(), inst.b.nonzero(), inst.c.nonzero()
    out = []
    for kind, expr in (("sum", "B(A+C)"), ("product", "BA+C")):
        lines = inst.cached(("lines", kind), lambda: _grid_family(kind, b, c))
        nl, na = len(lines), len(a)
        M = geo.pencil_stat(lines)
        k = max(na, M)
        ok = nl * na < inst.p ** 2
        e = collision_energy(lines, a)
        img = len(geo.image_set(lines, a))
        out.append(_asym("image_set_bounds", inst, e, (nl * na) ** 1.5 + k * nl * na, ok, "<<",
                         grid=kind, quantity="energy", k=k, pencil=M))
        out.append(_asym("image_set_bounds", inst, img, min(math.sqrt(nl * na), nl * na / k), ok,
                         grid=kind, quantity="size", k=k))
        triple = na * len(b) * len(c)
        mx = max(na, len(b), len(c))
        env = {"A": a, "B": b, "C": c}
        out.append(_asym("image_set_bounds_cor", inst, len(eval_expr(expr, env)),
                         min(math.sqrt(triple), triple / mx, inst.p), True, expr=expr))
    return out


@register("incidence_bound", "asymptotic", ("A", "B", "C"), "m <= n, m < p^2",
          "I(Q, Pi) << n sqrt(m) + k n for the collision configuration of B(A+C)")
def _incidence(inst: Instance):
    a, b, c = inst.A.nonzero(), inst.b.nonzero(), inst.c.nonzero()
    lines = inst.cached(("lines", "sum"), lambda: _grid_family("sum", b, c))
    q, pl = geo.collision_points_planes(lines, a)
    k = geo.collision_k(lines, a)
    res = geo.point_plane_incidences(q, pl, k=k)
    return [_asym("incidence_bound", inst, res.count, geo.incidence_bound(res.n, res.m, k),
                  res.m < inst.p ** 2, "<<", config="collision", k=k, n=res.n, m=res.m)]


def weighted_power_config(lines: geo.LineSet, a: FSet, d: int):
    """Collision configuration over the multiset of d-th powers of A.

    Points (m, b, t) and planes t x + y - m' z = b' for t in A^d, each carrying
    the multiplicity of t; the weighted incidence count is the collision energy
    of L against that multiset.
    """
    vals, mult = np.unique(power_values(a, d), return_counts=True)
    m, bb = lines.coeffs()
    lm, lb = np.repeat(m, vals.size), np.repeat(bb, vals.size)
    t = np.tile(vals, m.size)
    w = np.tile(mult, m.size)
    q = geo.PointSet3.build(a.p, np.stack([lm, lb, t], 1), w)
    pl = geo.PlaneSet3.build(a.p, np.stack([t, np.ones_like(t), -lm, lb], 1), w)
    k = max(int(vals.size), geo.max_collinear(np.stack([m, bb], 1), a.p)) if m.size else 0
    return q, pl, k


@register("incidence_bound_weighted", "asymptotic", ("A", "d"), "W/w < p^2",
          "I_w << W^(3/2) w^(1/2) + k w W, weights from the d-th power map")
def _incidence_w(inst: Instance):
    a = inst.A.nonzero()
    lines = inst.cached(("lines", "sum"), lambda: _grid_family("sum", a, a))
    q, pl, k = weighted_power_config(lines, a, inst.d)
    res = geo.point_plane_incidences(q, pl, k=k)
    return [_asym("incidence_bound_weighted", inst, res.weighted,
                  geo.weighted_incidence_bound(res.W, res.w, k), res.W / res.w < inst.p ** 2, "<<",
                  d=inst.d, W=res.W, w=res.w, k=k)]


@register("energy_bounds", "asymptotic", ("A", "B", "C", "alpha"),
          "eq10: |A|^2|A+A| < p^2; add_bc: |A||C||BC| < p^2; mult_bpc: |A||C||B+C| < p^2; "
          "mult_shift: |A||C||A(B+alpha)C| < p^2, alpha != 0",
          "energy upper bounds (report-only)")
def _energy(inst: Instance):
    a, b, c = inst.A.nonzero(), inst.b.nonzero(), inst.c.nonzero()
    out = [energy_bound_report("eq10", a),
           energy_bound_report("add_bc", a, b, c),
           energy_bound_report("mult_bpc", a, b, c)]
    if inst.alpha % inst.p:
        out.append(energy_bound_report("mult_shift", a, b, c, inst.alpha))
    return out


# --- running ------------------------------------------------------------------------

def run_check(name: str, inst: Instance) -> list[CheckReport]:
    """Run one registered check; rows are tagged with the instance metadata."""
    try:
        spec = REGISTRY[name]
    except KeyError:
        raise HarnessError(f"unknown check {name!r}") from None
    rows = spec.run(inst)
    for r in rows:
        r.family = inst.family
        r.seed = inst.seed
        if r.size_A is None:
            r.size_A = len(inst.A)
        if r.size_B is None and ("B" in spec.inputs):
            r.size_B = len(inst.b)
    return rows


@dataclass
class Fit:
    slope: float
    intercept: float
    residual: float
    n: int


def exponent_fit(results: Sequence[tuple[float, float]]) -> Fit:
    """Least-squares fit of log(value) against log(size); the slope is the observed exponent.

    ``residual`` is the root-mean-square residual in log space.
    """
    pts = [(float(s), float(v)) for s, v in results]
    if len(pts) < 3:
        raise HarnessError("exponent fit needs at least three points")
    if any(s <= 0 or v <= 0 for s, v in pts):
        raise HarnessError("exponent fit needs positive sizes and values")
    x = np.log([s for s, _ in pts])
    y = np.log([v for _, v in pts])
    design = np.column_stack([x, np.ones_like(x)])
    (slope, icpt), *_ = np.linalg.lstsq(design, y, rcond=None)
    resid = y - design @ np.array([slope, icpt])
    return Fit(float(slope), float(icpt), float(math.sqrt(np.mean(resid ** 2))), len(pts))


def summarize(reports: Sequence[CheckReport]) -> dict:
    """Min/median ratio per check name over rows satisfying their constraint.

    Ties for the extreme rows break lexicographically by (p, family, seed).
    """
    by_name: dict[str, list[CheckReport]] = {}
    for r in reports:
        if r.constraint_ok and r.klass != "exact":
            by_name.setdefault(r.name, []).append(r)
    out = {}
    for name, rows in sorted(by_name.items()):
        rows = sorted(rows, key=lambda r: (r.ratio, r.p, r.family, r.seed or 0))
        ratios = [r.ratio for r in rows]
        out[name] = dict(n=len(rows), min=ratios[0], median=float(np.median(ratios)),
                         max=ratios[-1], argmax=(rows[-1].p, rows[-1].family, rows[-1].seed))
    return out
