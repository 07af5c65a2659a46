"""Instance catalogues: which sets the checks and sweeps run on."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

from .families import FamilyError, FamilySpec, generate, random_subset
from .harness import Instance
from .sets import FSet

DEFAULT_PRIMES = (101, 1009)
DEFAULT_SIZES = (6, 8, 12, 16)
DEFAULT_FAMILIES = ("interval(start=1)", "ap(start=1,step=3)", "gp(start=1,ratio=2)",
                    "subgroup()", "random(zero_free=true)")


@dataclass(frozen=True)
class Task:
    """One instance recipe; picklable so worker processes can rebuild it."""

    p: int
    family: str
    seed: int
    alpha: int = 1
    beta: int = 1
    d: int = 2

    def build(self) -> Instance:
        spec = FamilySpec.parse(self.family)
        a = generate(spec, self.p)
        b, c = companions(self.p, len(a), self.seed)
        return Instance(a, b, c, self.alpha, self.beta, self.d, family=self.family, seed=self.seed)


def companions(p: int, n: int, seed: int) -> tuple[FSet, FSet]:
    """B and C for an instance with |A| = n: zero-free random sets of size ceil(n/2), at least 2.

    The sizes keep |B| <= |A| <= |B|^2 whenever n >= 2.
    """
    m = min(max(2, math.ceil(n / 2)), p - 1)
    return random_subset(p, m, 2 * seed + 1, True), random_subset(p, m, 2 * seed + 2, True)


def largest_divisor_at_most(n: int, cap: int) -> int:
    return max(d for d in range(1, min(n, cap) + 1) if n % d == 0)


def sized(family: str, size: int, p: int, seed: int) -> Optional[FamilySpec]:
    """Fill in the size of a family template; None when the template cannot reach it.

    Subgroups take the largest order dividing p - 1 that is at most ``size``;
    random templates without a seed get ``seed``.
    """
    spec = FamilySpec.parse(family)
    params = dict(spec.params)
    if spec.kind == "union":
        return spec
    if spec.kind == "subgroup":
        params["order"] = largest_divisor_at_most(p - 1, size)
    else:
        params["size"] = size
        if spec.kind == "random":
            params.setdefault("seed", seed)
    out = FamilySpec(spec.kind, tuple(sorted(params.items())))
    try:
        generate(out, p)
    except FamilyError:
        return None
    return out


def template_label(family: str) -> str:
    """Family text with size/order removed, used to group sweep rows."""
    spec = FamilySpec.parse(family)
    if spec.kind == "union":
        return str(spec)
    keep = tuple((k, v) for k, v in spec.params if k not in ("size", "order"))
    return str(FamilySpec(spec.kind, keep))


def tasks(primes: Sequence[int], families: Iterable[str], sizes: Sequence[int], seed: int = 0,
          alpha: int = 1, beta: int = 1, d: int = 2) -> list[Task]:
    """Cartesian product of primes, family templates and sizes, deduplicated in order.

    With an empty ``sizes`` the family texts are used as given.
    """
    out, seen = [], set()
    families = list(families)
    for p in primes:
        for fi, fam in enumerate(families):
            specs = [FamilySpec.parse(fam)] if not sizes else \
                [sized(fam, n, p, seed + 7919 * fi + n) for n in sizes]
            for spec in specs:
                if spec is None:
                    continue
                key = (p, str(spec))
                if key in seen:
                    continue
                seen.add(key)
                out.append(Task(p, str(spec), seed + len(out), alpha, beta, d))
    return out


def default_tasks(seed: int = 0) -> list[Task]:
    return tasks(DEFAULT_PRIMES, DEFAULT_FAMILIES, DEFAULT_SIZES, seed)
