import itertools
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from sumprodlab.field import (DomainError, FieldError, Plane3, Point3, PrimeField, fp_add, fp_inv,
                              fp_mul, fp_pow, is_prime, threshold)


def trial_division(n):
    return n >= 2 and all(n % k for k in range(2, math.isqrt(n) + 1))


def test_is_prime_matches_trial_division():
    assert [n for n in range(3000) if is_prime(n)] == [n for n in range(3000) if trial_division(n)]


@pytest.mark.parametrize("n", [2 ** 61 - 1, 1_000_000_007, 3_037_000_493, 18446744073709551557])
def test_is_prime_large(n):
    assert is_prime(n)


@pytest.mark.parametrize("n", [561, 3215031751, 2 ** 61 + 1, 18446744073709551615])
def test_is_prime_rejects_composites(n):
    assert not is_prime(n)


@pytest.mark.parametrize("bad", [2, 4, 9, 1, 0, -7, 2 ** 64 + 13])
def test_field_rejects_bad_moduli(bad):
    with pytest.raises(FieldError):
        PrimeField(bad)


@pytest.mark.parametrize("p", [3, 5, 7, 11, 13])
def test_field_axioms_exhaustive(p):
    F = PrimeField(p)
    els = [F(x) for x in range(p)]
    zero, one = F(0), F(1)
    for a, b in itertools.product(els, repeat=2):
        assert a + b == b + a and a * b == b * a
        assert (a - b) + b == a
    for a, b, c in itertools.product(els, repeat=3):
        assert (a + b) + c == a + (b + c)
        assert (a * b) * c == a * (b * c)
        assert a * (b + c) == a * b + a * c
    for a in els:
        assert a + zero == a and a * one == a and a + (-a) == zero
        if a != zero:
            assert fp_mul(fp_inv(a), a) == one


def test_spec_examples():
    F = PrimeField(7)
    assert fp_inv(F(2)) == F(4)
    assert fp_pow(F(3), 6) == F(1)
    G = PrimeField(101)
    assert all(fp_mul(fp_inv(G(x)), G(x)) == G(1) for x in range(1, 101))


def test_inverse_of_zero_is_domain_error():
    with pytest.raises(DomainError):
        fp_inv(PrimeField(7)(0))
    with pytest.raises(DomainError):
        PrimeField(7)(3) / 0


def test_mixed_moduli_rejected():
    with pytest.raises(FieldError):
        fp_add(PrimeField(5)(1), PrimeField(7)(1))
    with pytest.raises(FieldError):
        PrimeField(5)(1) * PrimeField(7)(1)


def test_negative_exponent_and_division():
    F = PrimeField(11)
    assert fp_pow(F(3), -1) == fp_inv(F(3))
    assert F(6) / F(3) == F(2)
    assert 1 / F(2) == F(6)


def test_inverse_table():
    F = PrimeField(101)
    inv = F.inverse_table()
    assert inv[0] == 0
    assert np.all(np.arange(1, 101) * inv[1:] % 101 == 1)


@given(st.sampled_from([5, 7, 101, 1009, 2 ** 31 - 1]), st.integers(), st.integers())
def test_elem_matches_python_ints(p, a, b):
    F = PrimeField(p)
    x, y = F(a), F(b)
    assert int(x + y) == (a + b) % p
    assert int(x * y) == (a * b) % p
    assert int(x - y) == (a - b) % p


def test_large_prime_field_stays_exact():
    p = 18446744073709551557
    F = PrimeField(p)
    assert not F.numpy_safe
    x = F(p - 2)
    assert int(x * x) == 4
    assert fp_mul(fp_inv(x), x) == F(1)


def test_threshold_values():
    assert threshold(101, 3, 5) == pytest.approx(15.95, abs=0.01)
    assert threshold(7, 1, 1) == pytest.approx(7)
    assert threshold(31, 2, 3) == pytest.approx(9.87, abs=0.01)
    with pytest.raises(ValueError):
        threshold(7, 1, 0)


def test_plane_geometry():
    with pytest.raises(FieldError):
        Plane3(0, 0, 0, 1)
    h = Plane3(2, 4, 6, 2)
    n = h.normalized(7)
    assert (n.u, n.v, n.w, n.c) == (1, 2, 3, 1)
    assert h.contains(Point3(1, 0, 0), 7) and n.contains(Point3(1, 0, 0), 7)
