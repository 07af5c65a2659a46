"""Fast-kernel versus brute-force comparisons behind ``sumprodlab oracle``.

Every case draws its own instance from a numpy Generator seeded by the run
seed, so a run is reproducible.  Fast kernels are looked up through their
modules at call time, which lets tests swap one out to confirm a mismatch is
caught.

Desk-scale limits (exceeding them is a configuration error):

* primes up to ``MAX_P``;
* set sizes up to ``MAX_SIZE``, and smaller for the cubic and quartic cases
  (triples, max_collinear, pencil, cross ratios): see ``OracleCase.max_size``;
* at most ``MAX_INSTANCES`` instances per case.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np

from . import energy, geometry, oracles, sets
from .families import all_planes, random_subset
from .field import is_prime
from .sets import FSet

MAX_P = 1009
MAX_SIZE = 20
MAX_INSTANCES = 500


class OracleLimitError(ValueError):
    pass


@dataclass(frozen=True)
class OracleCase:
    name: str
    run: Callable[[int, np.random.Generator, int], tuple]
    max_size: int = MAX_SIZE
    max_p: int = MAX_P


@dataclass(frozen=True)
class OracleResult:
    case: str
    p: int
    index: int
    fast: object
    slow: object

    @property
    def ok(self) -> bool:
        return self.fast == self.slow


def _draw(p: int, rng: np.random.Generator, cap: int, lo: int = 1, zero_free: bool = False) -> FSet:
    n = int(rng.integers(lo, min(cap, p - 1) + 1))
    return random_subset(p, n, int(rng.integers(0, 2 ** 32)), zero_free)


def _lines(p: int, rng: np.random.Generator, cap: int) -> geometry.LineSet:
    b = _draw(p, rng, cap, zero_free=True)
    c = _draw(p, rng, cap)
    kind = geometry.grid_lines_sum if rng.integers(2) else geometry.grid_lines_product
    return kind(b, c)


def _random_lines(p: int, rng: np.random.Generator, count: int) -> geometry.LineSet:
    pairs = rng.integers(0, p, size=(count, 2))
    return geometry.LineSet.from_pairs(p, pairs)


def _pairs(lines: geometry.LineSet) -> list:
    m, b = lines.coeffs()
    return list(zip(m.tolist(), b.tolist()))


def _energy_add(p, rng, cap):
    a, b = _draw(p, rng, cap), _draw(p, rng, cap)
    return energy.additive_energy(a, b), oracles.energy_quadruples(a.tolist(), b.tolist(), p, "+")


def _energy_mult(p, rng, cap):
    a, b = _draw(p, rng, cap), _draw(p, rng, cap)
    return energy.multiplicative_energy(a, b), oracles.energy_quadruples(a.tolist(), b.tolist(), p, "*")


def _energy_power(p, rng, cap):
    a = _draw(p, rng, cap)
    d = int(rng.integers(1, 6))
    return energy.power_energy(a, d), oracles.power_energy(a.tolist(), d, p)


def _energy_collision(p, rng, cap):
    lines, a = _lines(p, rng, cap), _draw(p, rng, cap)
    return energy.collision_energy(lines, a), oracles.collision_energy(_pairs(lines), a.tolist(), p)


def _set_ops(p, rng, cap):
    a, b = _draw(p, rng, cap), _draw(p, rng, cap)
    fast = (sets.sumset(a, b).tolist(), sets.productset(a, b).tolist(), sets.ratioset(a, b).tolist())
    la, lb = a.tolist(), b.tolist()
    slow = tuple(sorted(f(la, lb, p)) for f in (oracles.sumset, oracles.productset, oracles.ratioset))
    return fast, slow


def _triples(p, rng, cap):
    a = _draw(p, rng, cap)
    pts = [(x, y) for x in a.tolist() for y in a.tolist()]
    return geometry.collinear_triples(a), oracles.collinear_triples_det(pts, p)


def _lines_dirs(p, rng, cap):
    a, b = _draw(p, rng, cap, lo=2), _draw(p, rng, cap, lo=2)
    st = geometry.line_and_direction_sets(a, b)
    pts = [(x, y) for x in a.tolist() for y in b.tolist()]
    nl, nd, pinned = oracles.lines_and_directions(pts, p)
    return (st.lines, st.directions, st.pinned_min), (nl, nd, min(pinned.values()))


def _max_collinear(p, rng, cap):
    pts = rng.integers(0, p, size=(int(rng.integers(1, cap * 3)), 3))
    return geometry.max_collinear(pts, p), oracles.max_collinear(pts.tolist(), p)


def _pencil(p, rng, cap):
    lines = _random_lines(p, rng, int(rng.integers(1, cap * 2)))
    return geometry.pencil_stat(lines), oracles.pencil(_pairs(lines), p)


def _point_plane(p, rng, cap):
    n = int(rng.integers(1, cap * 4))
    pts = rng.integers(0, p, size=(n, 3))
    raw = rng.integers(0, p, size=(n, 4))
    raw = raw[np.any(raw[:, :3] != 0, axis=1)]
    qw = rng.integers(1, 4, size=n)
    pw = rng.integers(1, 4, size=len(raw))
    q = geometry.PointSet3.build(p, pts, qw)
    pl = geometry.PlaneSet3.build(p, raw, pw)
    res = geometry.point_plane_incidences(q, pl, with_k=False)
    slow = oracles.point_plane_incidences(q.coords.tolist(), pl.coeffs.tolist(), p,
                                          pl.weights.tolist(), q.weights.tolist())
    return (res.count, res.weighted), slow


def _collision_identity(p, rng, cap):
    lines, a = _lines(p, rng, cap), _draw(p, rng, cap, zero_free=True)
    q, pl = geometry.collision_points_planes(lines, a)
    return energy.collision_energy(lines, a), geometry.point_plane_incidences(q, pl, with_k=False).count


def _point_line(p, rng, cap):
    pts = rng.integers(0, p, size=(int(rng.integers(1, cap * 4)), 2))
    lines = _random_lines(p, rng, int(rng.integers(1, cap * 2)))
    verts = sorted(set(rng.integers(0, p, size=int(rng.integers(0, 4))).tolist()))
    ls = geometry.LineSet(lines.field, lines.m, lines.b, np.array(verts, dtype=np.int64))
    uniq = np.unique(pts % p, axis=0)
    return geometry.point_line_incidences(uniq, ls), \
        oracles.point_line_incidences(uniq.tolist(), _pairs(lines), verts, p)


def _cross_ratios(p, rng, cap):
    a = _draw(p, rng, cap, lo=4)
    cr = geometry.cross_ratio_sets(a)
    r, r_inf = oracles.cross_ratios(a.tolist(), p)
    return (cr.R.tolist(), cr.R_inf.tolist()), (sorted(r), sorted(r_inf))


def _image(p, rng, cap):
    lines, a = _lines(p, rng, cap), _draw(p, rng, cap)
    return geometry.image_set(lines, a).tolist(), sorted(oracles.image_set(_pairs(lines), a.tolist(), p))


def _plane_count(p, rng, cap):
    return len(all_planes(p)), oracles.plane_count_by_dedup(p)


ORACLES: dict[str, OracleCase] = {c.name: c for c in (
    OracleCase("energy_additive", _energy_add),
    OracleCase("energy_multiplicative", _energy_mult),
    OracleCase("energy_power", _energy_power),
    OracleCase("energy_collision", _energy_collision, max_size=14),
    OracleCase("set_operations", _set_ops),
    OracleCase("collinear_triples", _triples, max_size=12),
    OracleCase("lines_directions", _lines_dirs, max_size=8),
    OracleCase("max_collinear", _max_collinear, max_size=10),
    OracleCase("pencil", _pencil, max_size=10),
    OracleCase("point_plane", _point_plane),
    OracleCase("collision_identity", _collision_identity, max_size=14),
    OracleCase("point_line", _point_line),
    OracleCase("cross_ratios", _cross_ratios, max_size=8),
    OracleCase("image_set", _image, max_size=14),
    OracleCase("plane_count", _plane_count, max_p=13),
)}


def run_oracles(primes: Sequence[int], instances: int = 10, seed: int = 0,
                names: Optional[Sequence[str]] = None, max_size: Optional[int] = None) -> list[OracleResult]:
    """Run each named case ``instances`` times per prime.

    Cases whose own ``max_p`` is below a prime are skipped for that prime.
    """
    names = list(ORACLES) if not names else list(names)
    for n in names:
        if n not in ORACLES:
            raise OracleLimitError(f"unknown oracle {n!r}")
    if not 1 <= instances <= MAX_INSTANCES:
        raise OracleLimitError(f"instances must be in 1..{MAX_INSTANCES}")
    if max_size is not None and not 1 <= max_size <= MAX_SIZE:
        raise OracleLimitError(f"oracle set sizes are limited to {MAX_SIZE}")
    for p in primes:
        if p > MAX_P or not is_prime(p) or p < 3:
            raise OracleLimitError(f"oracle primes must be odd primes <= {MAX_P}, got {p}")
    out = []
    for ci, name in enumerate(names):
        case = ORACLES[name]
        cap = min(case.max_size, max_size or MAX_SIZE)
        for p in primes:
            if p > case.max_p:
                continue
            rng = np.random.default_rng([seed, ci, p])
            reps = 1 if name == "plane_count" else instances
            for i in range(reps):
                fast, slow = case.run(p, rng, cap)
                out.append(OracleResult(name, p, i, fast, slow))
    return out
