"""Prime-field arithmetic and primitive affine objects over F_p."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

import numpy as np

# Vectorised kernels multiply two residues in int64.
NUMPY_SAFE_P = 3_037_000_493

_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


class FieldError(ValueError):
    """Invalid field construction or mixed moduli."""


class DomainError(ArithmeticError):
    """Operation outside its mathematical domain (e.g. inverting zero)."""


def is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin, exact for every n < 3.3e24."""
    if n < 2:
        return False
    for q in _MR_BASES:
        if n % q == 0:
            return n == q
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _MR_BASES:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


@dataclass(frozen=True)
class PrimeField:
    p: int

    def __post_init__(self):
        p = self.p
        if not isinstance(p, (int, np.integer)) or isinstance(p, bool):
            raise FieldError(f"modulus must be an integer, got {p!r}")
        object.__setattr__(self, "p", int(p))
        if self.p < 3 or self.p % 2 == 0:
            raise FieldError(f"modulus must be an odd prime, got {self.p}")
        if self.p >= 1 << 64:
            raise FieldError("modulus must fit in a 64-bit word")
        if not is_prime(self.p):
            raise FieldError(f"{self.p} is not prime")

    def __call__(self, value: int) -> "Elem":
        return Elem(int(value) % self.p, self)

    def __repr__(self):
        return f"F_{self.p}"

    @property
    def numpy_safe(self) -> bool:
        return self.p <= NUMPY_SAFE_P

    def elements(self):
        return [Elem(i, self) for i in range(self.p)]

    def inverse_table(self) -> np.ndarray:
        """Batch-inversion pass: ``t[x] = x^-1`` for x != 0, ``t[0] = 0``.

        Prefix products plus a single exponentiation, so O(p) multiplications.
        """
        p = self.p
        prefix = [1] * p
        acc = 1
        for x in range(1, p):
            prefix[x] = acc
            acc = acc * x % p
        inv_acc = pow(acc, p - 2, p)
        table = [0] * p
        for x in range(p - 1, 0, -1):
            table[x] = inv_acc * prefix[x] % p
            inv_acc = inv_acc * x % p
        return np.array(table, dtype=np.int64)


def as_field(p: Union[int, PrimeField]) -> PrimeField:
    return p if isinstance(p, PrimeField) else PrimeField(p)


@dataclass(frozen=True)
class Elem:
    residue: int
    field: PrimeField

    def __post_init__(self):
        if not 0 <= self.residue < self.field.p:
            raise FieldError(f"residue {self.residue} outside [0, {self.field.p})")

    def _coerce(self, other) -> int:
        if isinstance(other, Elem):
            if other.field != self.field:
                raise FieldError(f"mixed moduli {self.field.p} and {other.field.p}")
            return other.residue
        if isinstance(other, (int, np.integer)):
            return int(other) % self.field.p
        return NotImplemented

    def _wrap(self, v: int) -> "Elem":
        return Elem(v % self.field.p, self.field)

    def __add__(self, other):
        o = self._coerce(other)
        return NotImplemented if o is NotImplemented else self._wrap(self.residue + o)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        return NotImplemented if o is NotImplemented else self._wrap(self.residue - o)

    def __rsub__(self, other):
        o = self._coerce(other)
        return NotImplemented if o is NotImplemented else self._wrap(o - self.residue)

    def __mul__(self, other):
        o = self._coerce(other)
        return NotImplemented if o is NotImplemented else self._wrap(self.residue * o)

    __rmul__ = __mul__

    def __neg__(self):
        return self._wrap(-self.residue)

    def inv(self) -> "Elem":
        return fp_inv(self)

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return self * fp_inv(self._wrap(o))

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return fp_inv(self) * o

    def __pow__(self, e: int):
        return fp_pow(self, e)

    def __int__(self):
        return self.residue

    def __index__(self):
        return self.residue

    def __repr__(self):
        return f"{self.residue} (mod {self.field.p})"


def _check(a: Elem, b: Elem):
    if a.field != b.field:
        raise FieldError(f"mixed moduli {a.field.p} and {b.field.p}")


def fp_add(a: Elem, b: Elem) -> Elem:
    _check(a, b)
    return Elem((a.residue + b.residue) % a.field.p, a.field)


def fp_mul(a: Elem, b: Elem) -> Elem:
    _check(a, b)
    return Elem(a.residue * b.residue % a.field.p, a.field)


def fp_inv(a: Elem) -> Elem:
    if a.residue == 0:
        raise DomainError("zero has no multiplicative inverse")
    return Elem(pow(a.residue, -1, a.field.p), a.field)


def fp_pow(a: Elem, b: Union[Elem, int]) -> Elem:
    """``a ** b``; an Elem exponent is taken by its residue. Negative exponents invert."""
    e = b.residue if isinstance(b, Elem) else int(b)
    if e < 0:
        return fp_pow(fp_inv(a), -e)
    return Elem(pow(a.residue, e, a.field.p), a.field)


def threshold(p: Union[int, PrimeField], num: int, den: int) -> float:
    """Real number ``p ** (num/den)`` used by the size constraints."""
    if den <= 0:
        raise ValueError("denominator must be positive")
    q = p.p if isinstance(p, PrimeField) else int(p)
    return math.exp(num / den * math.log(q))


@dataclass(frozen=True)
class Point3:
    x: int
    y: int
    z: int


@dataclass(frozen=True)
class Plane3:
    """The plane ``u*x + v*y + w*z = c``."""

    u: int
    v: int
    w: int
    c: int

    def __post_init__(self):
        if (self.u, self.v, self.w) == (0, 0, 0):
            raise FieldError("plane normal (u, v, w) must be nonzero")

    def contains(self, q: Point3, p: int) -> bool:
        return (self.u * q.x + self.v * q.y + self.w * q.z - self.c) % p == 0

    def normalized(self, p: int) -> "Plane3":
        lead = next(t for t in (self.u, self.v, self.w) if t % p)
        s = pow(lead, -1, p)
        return Plane3(self.u * s % p, self.v * s % p, self.w * s % p, self.c * s % p)
