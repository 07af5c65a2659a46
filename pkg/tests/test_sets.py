import pytest
from hypothesis import given, settings, strategies as st

from sumprodlab import oracles
from sumprodlab.families import subgroup
from sumprodlab.field import DomainError, FieldError
from sumprodlab.sets import (ExprError, FSet, SetFileError, diffset, dilate, eval_expr, format_set,
                             intersect, iterated_sumset, power_set, productset, ratioset, read_set,
                             reciprocal_set, refine_drop, sumset, translate, write_set)

PRIMES = [5, 7, 11, 13, 101, 257]


@st.composite
def field_sets(draw, n_sets=2, max_size=30):
    p = draw(st.sampled_from(PRIMES))
    out = [FSet.of(p, draw(st.lists(st.integers(0, p - 1), max_size=max_size))) for _ in range(n_sets)]
    return (p, *out)


def S(p, *xs):
    return FSet.of(p, xs)


def test_fset_canonical_form():
    a = FSet.of(7, [10, 3, 3, -1])
    assert a.tolist() == [3, 6]
    assert a == S(7, 3, 6) and len(a) == 2 and 6 in a and 4 not in a
    assert FSet.of(7, []).tolist() == []


def test_sumset_examples():
    assert sumset(S(7, 1, 2, 3), S(7, 1, 2, 3)).tolist() == [2, 3, 4, 5, 6]
    a = S(11, 2, 5, 9)
    assert sumset(a, S(11, 0)) == a
    assert sumset(FSet.full(5), S(5, 1)).tolist() == [0, 1, 2, 3, 4]


def test_productset_examples():
    assert productset(S(7, 1, 2, 3), S(7, 1, 2, 3)).tolist() == [1, 2, 3, 4, 6]
    a = S(11, 2, 5, 9)
    assert productset(a, S(11, 1)) == a
    assert ratioset(S(7, 1, 2, 4), S(7, 1, 2, 4)).tolist() == [1, 2, 4]


def test_ratioset_by_zero_flags_drop():
    r = ratioset(S(7, 1, 2), S(7, 0))
    assert len(r) == 0 and r.dropped == 2


def test_power_set_examples():
    assert power_set(S(7, 1, 2, 3), 2).tolist() == [1, 2, 4]
    a = S(13, 3, 4, 8)
    assert power_set(a, 1) == a
    assert power_set(S(7, 1, 2, 4), 3).tolist() == [1]
    with pytest.raises(ValueError):
        power_set(a, 0)


def test_reciprocal_examples():
    assert reciprocal_set(S(7, 1, 2, 4)).tolist() == [1, 2, 4]
    assert reciprocal_set(S(7, 1)).tolist() == [1]
    a = S(11, 0, 3, 7)
    assert reciprocal_set(reciprocal_set(a)) == a.nonzero()
    z = reciprocal_set(S(7, 0))
    assert len(z) == 0 and z.dropped == 1


def test_translate_dilate_examples():
    assert translate(S(7, 1, 2, 3), 1).tolist() == [2, 3, 4]
    assert dilate(S(7, 1, 2, 3), 1).tolist() == [1, 2, 3]
    assert dilate(S(7, 1, 2, 3), 3).tolist() == [2, 3, 6]
    with pytest.raises(DomainError):
        dilate(S(7, 1), 7)


def test_eval_expr_examples():
    assert eval_expr("A·A + A", {"A": S(7, 1, 2)}).tolist() == [2, 3, 4, 5, 6]
    assert eval_expr("(A−A)^2 + (A−A)^2", {"A": S(7, 0, 1)}).tolist() == [0, 1, 2]
    a = S(11, 1, 4, 6)
    assert eval_expr("A ∩ (A+0)", {"A": a}) == a


def test_eval_expr_grammar():
    a, b = S(11, 1, 2, 5), S(11, 3, 4)
    env = {"A": a, "B": b, "alpha": 2}
    assert eval_expr("AB", env) == productset(a, b)
    assert eval_expr("A*B", env) == productset(a, b)
    assert eval_expr("A/B", env) == ratioset(a, b)
    assert eval_expr("A-B", env) == diffset(a, b)
    assert eval_expr("A(A+alpha)", env) == productset(a, translate(a, 2))
    assert eval_expr("3A", env) == dilate(a, 3)
    assert eval_expr("A^-1", env) == reciprocal_set(a)
    assert eval_expr("1/A", env) == reciprocal_set(a)
    assert eval_expr("alpha/A", env) == dilate(reciprocal_set(a), 2)
    assert eval_expr("A & (A+alpha)", env) == intersect(a, translate(a, 2))
    assert eval_expr("-A", env).tolist() == [6, 9, 10]
    assert eval_expr("A+A+A", env) == iterated_sumset(a, 3)
    assert eval_expr("AA+AA", env) == sumset(productset(a, a), productset(a, a))


@pytest.mark.parametrize("bad", ["A+", "A + Z", "(A", "A ^ B", "A $ A", "2+3"])
def test_eval_expr_errors(bad):
    with pytest.raises(ExprError):
        eval_expr(bad, {"A": S(7, 1, 2)})


def test_mixed_fields_rejected():
    with pytest.raises(FieldError):
        sumset(S(5, 1), S(7, 1))
    with pytest.raises(FieldError):
        eval_expr("A+B", {"A": S(5, 1), "B": S(7, 1)})


def test_refine_drop_examples():
    a = S(101, 1, 2, 3)
    assert refine_drop(a, lambda s: True) == (a, True)
    out, ok = refine_drop(a, lambda s: len(s) <= 2)
    assert ok and out.tolist() == [1, 2]
    interval = FSet.of(101, range(1, 41))
    out, ok = refine_drop(interval, lambda s: len(s) ** 2 * len(sumset(s, s)) < 101 ** 2)
    n = len(out)
    assert ok and out.tolist() == list(range(1, n + 1))
    assert n ** 2 * (2 * n - 1) < 101 ** 2 <= (n + 1) ** 2 * (2 * n + 1)
    empty, ok = refine_drop(a, lambda s: False)
    assert not ok and len(empty) == 0


def test_subgroup_ratio_sets_are_closed():
    for p in [q for q in range(3, 62) if all(q % k for k in range(2, q))]:
        for d in range(1, p):
            if (p - 1) % d == 0:
                h = subgroup(p, d)
                assert ratioset(h, h) == h
                assert productset(h, h) == h


@settings(max_examples=150, deadline=None)
@given(field_sets())
def test_set_operations_match_oracles(args):
    p, a, b = args
    la, lb = a.tolist(), b.tolist()
    assert sumset(a, b).tolist() == sorted(oracles.sumset(la, lb, p))
    assert productset(a, b).tolist() == sorted(oracles.productset(la, lb, p))
    assert ratioset(a, b).tolist() == sorted(oracles.ratioset(la, lb, p))
    assert diffset(a, b).tolist() == sorted({(x - y) % p for x in la for y in lb})
    assert sumset(a, b) == sumset(b, a) and productset(a, b) == productset(b, a)


@settings(max_examples=100, deadline=None)
@given(field_sets(max_size=200))
def test_dense_and_sparse_paths_agree(args):
    p, a, b = args
    expect = sorted(oracles.sumset(a.tolist(), b.tolist(), p))
    assert sumset(a, b).tolist() == expect
    assert diffset(a, b).tolist() == sorted({(x - y) % p for x in a.tolist() for y in b.tolist()})


@settings(max_examples=100, deadline=None)
@given(field_sets())
def test_size_bounds(args):
    p, a, b = args
    if not len(a) or not len(b):
        return
    s = len(sumset(a, b))
    assert max(len(a), len(b)) <= s <= min(p, len(a) * len(b))
    an, bn = a.nonzero(), b.nonzero()
    if len(an) and len(bn):
        assert max(len(an), len(bn)) <= len(productset(an, bn)) <= min(p, len(an) * len(bn))
    assert 0 in diffset(a, a)
    if len(an):
        assert 1 in ratioset(an, an)


def test_set_file_roundtrip(tmp_path):
    a = S(101, 50, 3, 7)
    path = tmp_path / "a.txt"
    write_set(a, path)
    assert path.read_text() == "p 101\n3\n7\n50\n"
    assert read_set(path) == a


@pytest.mark.parametrize("text,where", [
    ("p 101\n3\n3\n", ":3: duplicate"),
    ("3\n", ":1: expected"),
    ("p 100\n3\n", ":1:"),
    ("p 7\n9\n", ":2: residue 9"),
    ("p 7\nx\n", ":2: not a decimal"),
])
def test_set_file_errors_name_the_line(tmp_path, text, where):
    path = tmp_path / "bad.txt"
    path.write_text(text)
    with pytest.raises(SetFileError, match=where):
        read_set(path)


def test_format_set_is_sorted():
    assert format_set(FSet.of(7, [4, 1])) == "p 7\n1\n4\n"


def test_iterated_sumset():
    b = S(101, 0, 1)
    assert iterated_sumset(b, 3).tolist() == [0, 1, 2, 3]
    assert iterated_sumset(b, 1, 2).tolist() == [0, 1, 99, 100]
    with pytest.raises(ValueError):
        iterated_sumset(b, 0, 0)


def test_large_prime_rejected_by_set_kernels():
    with pytest.raises(FieldError, match="too large"):
        FSet.of(18446744073709551557, [1, 2])
    p = 3_037_000_493
    a = FSet.of(p, [p - 1, 2])
    assert sumset(a, a).tolist() == [1, 4, p - 2]
    assert productset(a, a).tolist() == [1, 4, p - 2]
