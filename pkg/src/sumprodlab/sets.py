"""Canonical subsets of F_p and the set expressions built from them.

An :class:`FSet` is a sorted, duplicate-free array of residues.  Binary
operations pick between two kernels: a sparse one (outer operation followed by
``np.unique``) and, for sumsets of dense sets, a bitset one (boolean mask
rolled by each element of the smaller set).
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field as dc_field
from pathlib import Path
from typing import Callable, Iterable, Mapping, Union

import numpy as np

from .field import NUMPY_SAFE_P, DomainError, FieldError, PrimeField, as_field

DENSE_RATIO = 1 / 64


class SetFileError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class FSet:
    """Finite subset of F_p.

    ``dropped`` counts pairs or elements discarded by the zero conventions
    (ratio sets skip zero divisors, reciprocals skip zero).  It does not take
    part in equality.
    """

    field: PrimeField
    elems: np.ndarray
    dropped: int = dc_field(default=0, compare=False)

    def __post_init__(self):
        if not self.field.numpy_safe:
            raise FieldError(f"p = {self.field.p} is too large for int64 set kernels "
                             f"(limit {NUMPY_SAFE_P}); use Elem arithmetic instead")
        arr = np.asarray(self.elems, dtype=np.int64)
        arr.setflags(write=False)
        object.__setattr__(self, "elems", arr)

    @classmethod
    def of(cls, p, values: Iterable[int], dropped: int = 0) -> "FSet":
        f = as_field(p)
        if not f.numpy_safe:
            raise FieldError(f"p = {f.p} is too large for int64 set kernels (limit {NUMPY_SAFE_P})")
        arr = np.fromiter((int(v) % f.p for v in values), dtype=np.int64) \
            if not isinstance(values, np.ndarray) else values.astype(np.int64, copy=False)
        return cls(f, np.unique(np.mod(arr, f.p)), dropped)

    @classmethod
    def _raw(cls, f: PrimeField, sorted_unique: np.ndarray, dropped: int = 0) -> "FSet":
        return cls(f, sorted_unique, dropped)

    @classmethod
    def from_mask(cls, f: PrimeField, mask: np.ndarray) -> "FSet":
        return cls(f, np.flatnonzero(mask).astype(np.int64))

    @classmethod
    def full(cls, p) -> "FSet":
        f = as_field(p)
        return cls(f, np.arange(f.p, dtype=np.int64))

    @property
    def p(self) -> int:
        return self.field.p

    def __len__(self):
        return int(self.elems.size)

    def __iter__(self):
        return (int(x) for x in self.elems)

    def __contains__(self, x) -> bool:
        x = int(x) % self.p
        i = np.searchsorted(self.elems, x)
        return bool(i < self.elems.size and self.elems[i] == x)

    def __eq__(self, other):
        if not isinstance(other, FSet):
            return NotImplemented
        return self.field == other.field and np.array_equal(self.elems, other.elems)

    def __hash__(self):
        return hash((self.p, self.elems.tobytes()))

    def __repr__(self):
        body = ", ".join(map(str, self.elems[:12].tolist()))
        if len(self) > 12:
            body += ", ..."
        return f"FSet(p={self.p}, {{{body}}})"

    def tolist(self) -> list[int]:
        return self.elems.tolist()

    @property
    def is_dense(self) -> bool:
        return len(self) > self.p * DENSE_RATIO

    def mask(self) -> np.ndarray:
        m = np.zeros(self.p, dtype=bool)
        m[self.elems] = True
        return m

    def nonzero(self) -> "FSet":
        if len(self) and self.elems[0] == 0:
            return FSet._raw(self.field, self.elems[1:], 1)
        return self

    def issubset(self, other: "FSet") -> bool:
        return bool(np.isin(self.elems, other.elems).all())


def _same(a: FSet, b: FSet) -> PrimeField:
    if a.field != b.field:
        raise FieldError(f"sets over different fields: {a.p} vs {b.p}")
    if not a.field.numpy_safe:
        raise FieldError(f"p = {a.p} too large for the vectorised kernels")
    return a.field


def _outer_unique(f: PrimeField, values: np.ndarray, dropped: int = 0) -> FSet:
    return FSet._raw(f, np.unique(np.mod(values, f.p)), dropped)


def _sum_bitset(a: FSet, b: FSet) -> FSet:
    big, small = (a, b) if len(a) >= len(b) else (b, a)
    base = big.mask()
    out = np.zeros(a.p, dtype=bool)
    for s in small.elems.tolist():
        out |= np.roll(base, s)
    return FSet.from_mask(a.field, out)


def negate(a: FSet) -> FSet:
    return FSet.of(a.field, -a.elems)


def sumset(a: FSet, b: FSet) -> FSet:
    f = _same(a, b)
    if not len(a) or not len(b):
        return FSet._raw(f, np.empty(0, np.int64))
    if a.is_dense and b.is_dense:
        return _sum_bitset(a, b)
    return _outer_unique(f, np.add.outer(a.elems, b.elems).ravel())


def diffset(a: FSet, b: FSet) -> FSet:
    f = _same(a, b)
    if not len(a) or not len(b):
        return FSet._raw(f, np.empty(0, np.int64))
    if a.is_dense and b.is_dense:
        return _sum_bitset(a, negate(b))
    return _outer_unique(f, np.subtract.outer(a.elems, b.elems).ravel())


def productset(a: FSet, b: FSet) -> FSet:
    f = _same(a, b)
    return _outer_unique(f, np.multiply.outer(a.elems, b.elems).ravel())


def _inverses(f: PrimeField, arr: np.ndarray) -> np.ndarray:
    # arr must be nonzero residues
    return np.array([pow(int(x), -1, f.p) for x in arr.tolist()], dtype=np.int64)


def ratioset(a: FSet, b: FSet) -> FSet:
    """``{a / b : b != 0}``; ``dropped`` counts the skipped (a, 0) pairs."""
    f = _same(a, b)
    nz = b.elems[b.elems != 0]
    dropped = len(a) * (len(b) - nz.size)
    return _outer_unique(f, np.multiply.outer(a.elems, _inverses(f, nz)).ravel(), dropped)


def power_set(a: FSet, d: int) -> FSet:
    if int(d) < 1:
        raise ValueError("power must be a positive integer")
    f = a.field
    return FSet.of(f, [pow(int(x), int(d), f.p) for x in a.elems.tolist()])


def power_values(a: FSet, d: int) -> np.ndarray:
    """``a**d`` for each element, with repetitions (the power map may be many-to-one)."""
    f = a.field
    return np.array([pow(int(x), int(d), f.p) for x in a.elems.tolist()], dtype=np.int64)


def reciprocal_set(a: FSet) -> FSet:
    nz = a.elems[a.elems != 0]
    return FSet.of(a.field, _inverses(a.field, nz), dropped=len(a) - nz.size)


def translate(a: FSet, alpha: int) -> FSet:
    return FSet.of(a.field, a.elems + int(alpha) % a.p)


def dilate(a: FSet, lam: int) -> FSet:
    lam = int(lam) % a.p
    if lam == 0:
        raise DomainError("dilation by zero")
    return FSet.of(a.field, a.elems * lam)


def intersect(a: FSet, b: FSet) -> FSet:
    f = _same(a, b)
    return FSet._raw(f, np.intersect1d(a.elems, b.elems, assume_unique=True))


def union(a: FSet, b: FSet) -> FSet:
    f = _same(a, b)
    return FSet._raw(f, np.union1d(a.elems, b.elems))


def iterated_sumset(b: FSet, n: int, m: int = 0) -> FSet:
    """``nB - mB``; with ``m = 0`` this is the n-fold sumset."""
    if n < 0 or m < 0 or n + m == 0:
        raise ValueError("need n, m >= 0 with n + m >= 1")
    out = None
    for _ in range(n):
        out = b if out is None else sumset(out, b)
    for _ in range(m):
        out = negate(b) if out is None else diffset(out, b)
    return out


def refine_drop(a: FSet, predicate: Callable[[FSet], bool]) -> tuple[FSet, bool]:
    """Drop the largest residue until ``predicate`` holds.

    Returns the refined set and whether the predicate was satisfied (False
    means every element was thrown away without success).
    """
    arr = a.elems
    for k in range(arr.size, -1, -1):
        cand = FSet._raw(a.field, arr[:k])
        if k and predicate(cand):
            return cand, True
        if not k:
            return cand, bool(predicate(cand))
    raise AssertionError("unreachable")


# --- set expressions --------------------------------------------------------

_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z0-9_]*)|(\S))")
_OPS = {"·": "*", "−": "-", "∩": "&", "×": "*"}


class ExprError(ValueError):
    pass


@dataclass
class Node:
    op: str
    args: tuple = ()
    value: object = None


def _tokenize(text: str) -> list[tuple[str, object]]:
    toks = []
    pos = 0
    text = text.strip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            break
        pos = m.end()
        num, name, sym = m.groups()
        if num is not None:
            toks.append(("num", int(num)))
        elif name is not None:
            toks.append(("name", name))
        else:
            toks.append(("op", _OPS.get(sym, sym)))
    return toks


class _Parser:
    """Precedence, loosest first: ``&``; ``+ -``; ``* /`` and juxtaposition; unary ``-``; ``^``."""

    def __init__(self, text: str, names: set[str]):
        self.toks = _tokenize(text)
        self.i = 0
        self.names = names

    def peek(self):
        return self.toks[self.i] if self.i < len(self.toks) else (None, None)

    def take(self, op=None):
        tok = self.peek()
        if op is not None and tok != ("op", op):
            raise ExprError(f"expected {op!r}, got {tok[1]!r}")
        self.i += 1
        return tok

    def parse(self) -> Node:
        node = self.intersection()
        if self.i != len(self.toks):
            raise ExprError(f"unexpected token {self.peek()[1]!r}")
        return node

    def intersection(self):
        node = self.additive()
        while self.peek() == ("op", "&"):
            self.take()
            node = Node("&", (node, self.additive()))
        return node

    def additive(self):
        node = self.multiplicative()
        while self.peek() in (("op", "+"), ("op", "-")):
            op = self.take()[1]
            node = Node(op, (node, self.multiplicative()))
        return node

    def _starts_atom(self):
        kind, val = self.peek()
        return kind in ("name", "num") or (kind == "op" and val == "(")

    def multiplicative(self):
        node = self.unary()
        while True:
            if self.peek() in (("op", "*"), ("op", "/")):
                op = self.take()[1]
                node = Node(op, (node, self.unary()))
            elif self._starts_atom():
                node = Node("*", (node, self.unary()))
            else:
                return node

    def unary(self):
        if self.peek() == ("op", "-"):
            self.take()
            return Node("neg", (self.unary(),))
        return self.power()

    def power(self):
        node = self.atom()
        if self.peek() == ("op", "^"):
            self.take()
            neg = False
            if self.peek() == ("op", "-"):
                self.take()
                neg = True
            kind, val = self.take()
            if kind != "num":
                raise ExprError("exponent must be an integer literal")
            node = Node("^", (node,), -val if neg else val)
        return node

    def atom(self):
        kind, val = self.take()
        if kind == "num":
            return Node("num", value=val)
        if kind == "name":
            if val in self.names:
                return Node("name", value=val)
            # "AA", "BA" -> products of single-letter names
            if all(ch in self.names for ch in val):
                node = Node("name", value=val[0])
                for ch in val[1:]:
                    node = Node("*", (node, Node("name", value=ch)))
                return node
            raise ExprError(f"unbound name {val!r}")
        if (kind, val) == ("op", "("):
            node = self.intersection()
            self.take(")")
            return node
        raise ExprError(f"unexpected token {val!r}")


def parse_expr(text: str, names: Iterable[str]) -> Node:
    return _Parser(text, set(names)).parse()


Value = Union[FSet, int]


def _eval(node: Node, env: Mapping[str, Value], f: PrimeField) -> Value:
    if node.op == "num":
        return int(node.value) % f.p
    if node.op == "name":
        v = env[node.value]
        return v if isinstance(v, FSet) else int(v) % f.p
    if node.op == "neg":
        v = _eval(node.args[0], env, f)
        return (-v) % f.p if isinstance(v, int) else dilate(v, -1)
    if node.op == "^":
        v = _eval(node.args[0], env, f)
        e = int(node.value)
        if isinstance(v, int):
            if v == 0 and e < 0:
                raise DomainError("zero to a negative power")
            return pow(v, e, f.p)
        if e == -1:
            return reciprocal_set(v)
        if e < 0:
            return reciprocal_set(power_set(v, -e))
        return power_set(v, e)
    x = _eval(node.args[0], env, f)
    y = _eval(node.args[1], env, f)
    sx, sy = isinstance(x, FSet), isinstance(y, FSet)
    op = node.op
    if not sx and not sy:
        if op == "+":
            return (x + y) % f.p
        if op == "-":
            return (x - y) % f.p
        if op == "*":
            return x * y % f.p
        if op == "/":
            if y == 0:
                raise DomainError("division by zero")
            return x * pow(y, -1, f.p) % f.p
        raise ExprError(f"operator {op!r} needs sets")
    if op == "&":
        if not (sx and sy):
            raise ExprError("intersection needs two sets")
        return intersect(x, y)
    if sx and sy:
        return {"+": sumset, "-": diffset, "*": productset, "/": ratioset}[op](x, y)
    if op == "+":
        return translate(x, y) if sx else translate(y, x)
    if op == "-":
        return translate(x, -y) if sx else translate(dilate(y, -1), x)
    if op == "*":
        if (y if sx else x) == 0:
            return FSet.of(f, [0]) if len(x if sx else y) else FSet.of(f, [])
        return dilate(x, y) if sx else dilate(y, x)
    # division
    if sx:
        if y == 0:
            raise DomainError("division by zero")
        return dilate(x, pow(y, -1, f.p))
    rec = reciprocal_set(y)
    if x == 0:
        return FSet.of(f, [0] if len(rec) else [], dropped=rec.dropped)
    out = dilate(rec, x)
    return FSet(out.field, out.elems, rec.dropped)


def eval_expr(expr: Union[str, Node], bindings: Mapping[str, Value]) -> FSet:
    """Evaluate a set expression such as ``"(A-A)^2 + (A-A)^2"`` or ``"A & (A+1)"``.

    Bindings map names to FSets or scalars; integer literals act as scalars, so
    ``A+1`` is a translate, ``3A`` a dilate and ``A^-1`` the reciprocal set.
    Intermediate sets are materialised in tree order.
    """
    sets = [v for v in bindings.values() if isinstance(v, FSet)]
    if not sets:
        raise ExprError("at least one set binding is required")
    f = sets[0].field
    for s in sets[1:]:
        _same(sets[0], s)
    node = parse_expr(expr, bindings.keys()) if isinstance(expr, str) else expr
    out = _eval(node, bindings, f)
    if not isinstance(out, FSet):
        raise ExprError("expression evaluates to a scalar, not a set")
    return out


# --- set files --------------------------------------------------------------

def read_set(path: Union[str, Path]) -> FSet:
    lines = Path(path).read_text().splitlines()
    header = None
    values: list[int] = []
    seen: dict[int, int] = {}
    for lineno, raw in enumerate(lines, 1):
        s = raw.strip()
        if not s:
            continue
        if header is None:
            parts = s.split()
            if len(parts) != 2 or parts[0] != "p":
                raise SetFileError(f"{path}:{lineno}: expected 'p <prime>' header")
            try:
                header = PrimeField(int(parts[1]))
            except (ValueError, FieldError) as exc:
                raise SetFileError(f"{path}:{lineno}: {exc}") from None
            continue
        try:
            v = int(s)
        except ValueError:
            raise SetFileError(f"{path}:{lineno}: not a decimal residue: {s!r}") from None
        if not 0 <= v < header.p:
            raise SetFileError(f"{path}:{lineno}: residue {v} outside [0, {header.p})")
        if v in seen:
            raise SetFileError(f"{path}:{lineno}: duplicate residue {v} (first on line {seen[v]})")
        seen[v] = lineno
        values.append(v)
    if header is None:
        raise SetFileError(f"{path}: missing 'p <prime>' header")
    return FSet.of(header, values)


def format_set(a: FSet) -> str:
    return "".join([f"p {a.p}\n"] + [f"{v}\n" for v in a.tolist()])


def write_set(a: FSet, path: Union[str, Path]) -> None:
    Path(path).write_text(format_set(a))
