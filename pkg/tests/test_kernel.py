from __future__ import annotations

import random

import pytest

from curva.errors import PrecisionError, ValidationError
from curva.kernel import (
    BiPoly,
    Echelon,
    INF,
    ONE,
    Scalar,
    Series,
    ZERO,
    ext_min,
    format_scalar,
    kernel,
    parse_scalar,
    rank,
    resultant_in_t,
    solve,
)
from curva.kernel.linalg import scalar_row_to_int


def S(d, trunc=12):
    return Series({e: Scalar(c) for e, c in d.items()}, trunc)


# -- scalars ---------------------------------------------------------------


def test_scalar_arithmetic_exact():
    a = Scalar(1, 2)
    b = Scalar(3, -1)
    assert a * b == Scalar(5, 5)
    assert (a * b) / b == a
    assert a - a == ZERO
    assert a.inverse() * a == ONE


def test_scalar_serialization_roundtrip():
    cases = [Scalar(1, 0), Scalar(-3, 0), Scalar(0, 1),
             parse_scalar("2/3"), parse_scalar("1/2-3/4*i"),
             parse_scalar("-5/7+1/2*i")]
    for s in cases:
        assert parse_scalar(format_scalar(s)) == s


def test_extnat():
    assert INF + 3 is INF
    assert ext_min(INF, 5, 7) == 5
    assert INF > 10**9
    assert ext_min(INF) is INF


# -- series ------------------------------------------------------------------


def test_series_add_mul_derivative():
    t2, t3 = S({2: 1}), S({3: 1})
    assert (t2 + t3).terms == {2: ONE, 3: ONE}
    assert (t2 * t3).terms == {5: ONE}
    d = S({6: 1, 7: 1}).derivative()
    assert d.terms == {5: Scalar(6), 6: Scalar(7)}


def test_series_trunc_propagation():
    a = S({2: 1}, trunc=5)
    b = S({3: 1}, trunc=9)
    assert (a + b).trunc == 5
    assert (a * b).trunc == min(5 + 3, 9 + 2)


def test_series_compose_examples():
    f = S({2: 1})
    g = S({1: 1, 2: 1})
    assert f.compose(g).terms == {2: ONE, 3: Scalar(2), 4: ONE}
    ident = S({1: 1})
    assert ident.compose(g).terms == g.truncate(ident.compose(g).trunc).terms
    f3 = S({3: 1})
    assert f3.compose(S({1: 2})).terms == {3: Scalar(8)}


def test_series_compose_rejects_constant_term():
    with pytest.raises(ValidationError):
        S({2: 1}).compose(S({0: 1, 1: 1}))


def test_reparam_inverse():
    assert S({1: 2}).reparam_inverse().terms == {1: parse_scalar("1/2")}
    rho = S({1: 1, 2: 1}, trunc=9)
    inv = rho.reparam_inverse()
    assert rho.compose(inv).terms == {1: ONE}
    assert inv.compose(rho).terms == {1: ONE}
    ident = S({1: 1})
    assert ident.reparam_inverse().terms == {1: ONE}


def test_reparam_inverse_rejects_zero_linear():
    with pytest.raises(ValidationError):
        S({2: 1}).reparam_inverse()


def test_ord_of_product_adds():
    rnd = random.Random(5)
    for _ in range(25):
        a = Series({e: Scalar(rnd.randint(1, 9))
                    for e in rnd.sample(range(1, 7), 3)}, 14)
        b = Series({e: Scalar(rnd.randint(1, 9))
                    for e in rnd.sample(range(1, 7), 3)}, 14)
        p = a * b
        assert min(p.terms) == min(a.terms) + min(b.terms)


def test_ord_precision_error():
    empty = Series({}, 6)
    with pytest.raises(PrecisionError):
        empty.ord()


def test_unit_root_and_division():
    s = S({0: 1, 1: 2, 2: 3}, trunc=10)
    r = s.unit_nth_root(3)
    assert (r * r * r).terms == s.terms
    a = S({3: 1, 5: 1}, trunc=12)
    b = S({1: 1, 2: 1}, trunc=12)
    q = a.div_unit(b)
    assert (q * b).truncate(q.trunc).terms == a.truncate(q.trunc).terms


# -- bivariate polynomials & resultants ------------------------------------------


def X():
    return BiPoly.X()


def Y():
    return BiPoly.Y()


def test_resultant_cusp():
    p = [X(), BiPoly.zero(), BiPoly.const(Scalar(-1))]
    q = [Y(), BiPoly.zero(), BiPoly.zero(), BiPoly.const(Scalar(-1))]
    r = resultant_in_t(p, q).primitive()
    expect = (Y() * Y() - X() * X() * X()).primitive()
    assert r == expect or r == (-(Y() * Y() - X() * X() * X())).primitive()


def test_resultant_linear():
    r = resultant_in_t([X(), BiPoly.const(Scalar(-1))],
                       [Y(), BiPoly.const(Scalar(-1))]).primitive()
    assert r in ((Y() - X()).primitive(), (X() - Y()).primitive())
    r2 = resultant_in_t([X(), BiPoly.const(Scalar(-1))], [Y()])
    assert r2.primitive() == Y().primitive()


def test_resultant_rejects_constants():
    with pytest.raises(ValidationError):
        resultant_in_t([X()], [Y()])


def test_resultant_vanishes_on_parametrization():
    rnd = random.Random(9)
    for _ in range(5):
        xs = {2: Scalar(1), 3: Scalar(rnd.randint(-3, 3))}
        ys = {3: Scalar(1), 4: Scalar(rnd.randint(-3, 3))}
        p = [X()] + [BiPoly.const(-c) for _, c in sorted(xs.items())]
        # build coefficient lists indexed by power of t
        p = [X(), BiPoly.zero(), BiPoly.const(-xs[2]),
             BiPoly.const(-xs.get(3, ZERO))]
        q = [Y(), BiPoly.zero(), BiPoly.zero(), BiPoly.const(-ys[3]),
             BiPoly.const(-ys.get(4, ZERO))]
        res = resultant_in_t(p, q)
        pull = res.pullback(Series(xs, 16), Series(ys, 16))
        assert pull.is_known_zero()


def test_bipoly_divexact():
    f = Y() * Y() - X() * X() * X()
    g = f * (X() + Y())
    assert g.divexact(f) == (X() + Y())
    assert (g + BiPoly.const(ONE)).divexact(f) is None


# -- linear algebra ---------------------------------------------------------------


def test_rank_kernel_solve():
    ident = [[ONE if i == j else ZERO for j in range(3)] for i in range(3)]
    assert rank(ident) == 3
    ker = kernel([[ONE, ONE]])
    assert ker.dim == 1
    v = ker.basis[0]
    assert v[0] + v[1] == ZERO
    sol = solve([[ONE, ZERO], [ZERO, ONE]], [Scalar(2), Scalar(3)])
    assert sol == [Scalar(2), Scalar(3)]


def test_solve_inconsistent_returns_none():
    assert solve([[ONE], [ONE]], [ONE, Scalar(2)]) is None


def test_rank_invariant_under_row_permutation():
    rnd = random.Random(3)
    rows = [[Scalar(rnd.randint(-5, 5)) for _ in range(5)] for _ in range(4)]
    base = rank(rows)
    for _ in range(6):
        rnd.shuffle(rows)
        assert rank(rows) == base


def test_echelon_matches_rank():
    rnd = random.Random(4)
    rows = [[Scalar(rnd.randint(-4, 4)) for _ in range(6)]
            for _ in range(5)]
    ech = Echelon(6)
    grew = sum(ech.add(scalar_row_to_int(row)) for row in rows)
    assert grew == rank(rows)
