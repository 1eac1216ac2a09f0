from __future__ import annotations

import pytest

from curva import corpus
from curva.errors import ValidationError
from curva.kernel import BiPoly, INF, ONE, Scalar, Series, ZERO
from curva.curve import (
    GroupElement,
    apply_group,
    compose_elements,
    make_branch,
    multigerm,
    puiseux_block_form,
    subgroup_for,
    tangent_slope,
    to_block_form,
)
import curva.invariants as inv

T = 16


def S(d, trunc=T):
    return Series({e: Scalar(c) for e, c in d.items()}, trunc)


def smooth(slope, trunc=T, extra=None):
    terms = {1: Scalar(slope)}
    if extra:
        terms.update({e: Scalar(c) for e, c in extra.items()})
    return make_branch(S({1: 1}, trunc), Series(terms, trunc))


# -- slopes ------------------------------------------------------------------------


def test_tangent_slopes():
    assert tangent_slope(make_branch(S({2: 1}), S({3: 1}))) == ZERO
    b = make_branch(S({3: 1}), S({3: 2, 4: 1}))
    assert tangent_slope(b) == Scalar(2)
    assert tangent_slope(make_branch(S({5: 1}), S({4: 1}))) is INF


def test_branch_primitivity():
    with pytest.raises(ValidationError):
        make_branch(S({4: 1}), S({6: 1}))
    make_branch(S({4: 1}), S({6: 1}), check_primitive=False)


# -- the group action -----------------------------------------------------------------


def test_apply_group_identity():
    cusp = multigerm([make_branch(S({2: 1}), S({3: 1}))])
    g = GroupElement((Series.t(T),), (BiPoly.X(), BiPoly.Y()), "A1")
    out = apply_group(cusp, g)
    assert out.branches[0].x.terms == cusp.branches[0].x.terms
    assert out.branches[0].y.terms == cusp.branches[0].y.terms


def test_apply_group_sigma_quadratic():
    cusp = multigerm([make_branch(S({2: 1}), S({3: 1}))])
    g = GroupElement((Series.t(T),),
                     (BiPoly.X(), BiPoly.Y() + BiPoly.monomial(2, 0)), "A1")
    out = apply_group(cusp, g)
    assert out.branches[0].y.terms == {3: ONE, 4: ONE}


def test_apply_group_reparam_scaling():
    cusp = multigerm([make_branch(S({2: 1}), S({3: 1}))])
    g = GroupElement((S({1: 2}),), (BiPoly.X(), BiPoly.Y()), "A")
    out = apply_group(cusp, g)
    assert out.branches[0].x.terms == {2: Scalar(1) / Scalar(4)}
    assert out.branches[0].y.terms == {3: Scalar(1) / Scalar(8)}


def test_group_action_composition():
    cusp = multigerm([make_branch(S({2: 1}), S({3: 1}))])
    for seed in (1, 2, 3):
        g = corpus.random_group_element(1, T, seed, "A")
        h = corpus.random_group_element(1, T, seed + 100, "A")
        lhs = apply_group(apply_group(cusp, g), h)
        rhs = apply_group(cusp, compose_elements(h, g))
        tr = min(lhs.branches[0].trunc(), rhs.branches[0].trunc())
        assert lhs.branches[0].x.truncate(tr) == rhs.branches[0].x.truncate(tr)
        assert lhs.branches[0].y.truncate(tr) == rhs.branches[0].y.truncate(tr)


def test_group_element_validation():
    with pytest.raises(ValidationError):
        GroupElement((Series.t(T),),
                     (BiPoly.X() + BiPoly.Y(), BiPoly.X() + BiPoly.Y()),
                     "A").validate(1)
    with pytest.raises(ValidationError):
        GroupElement((S({1: 2}),), (BiPoly.X(), BiPoly.Y()),
                     "A1").validate(1)


# -- block forms -----------------------------------------------------------------------


def test_two_lines_block_form():
    mg = multigerm([smooth(2), smooth(3)])
    bf, g, perm = to_block_form(mg)
    assert bf.blocks.count == 2
    assert bf.blocks.slopes[0] == ZERO
    assert bf.blocks.slopes[1] is INF


def test_single_cusp_block_form():
    mg = multigerm([make_branch(S({2: 1}), S({3: 1}))])
    bf, _, _ = to_block_form(mg)
    assert bf.blocks.count == 1
    assert bf.blocks.slopes == (ZERO,)
    assert bf.branches[0].x.terms == {2: ONE}


def test_three_slopes_to_zero_inf_one():
    mg = multigerm([smooth(1), smooth(2), smooth(5)])
    bf, _, _ = to_block_form(mg)
    assert bf.blocks.count == 3
    slopes = [tangent_slope(b) for b in bf.branches]
    assert slopes[0] == ZERO
    assert slopes[1] is INF
    assert slopes[2] == Scalar(1)


def test_subgroup_table():
    assert subgroup_for(1) == "Atilde1"
    assert subgroup_for(2) == "A1"
    assert subgroup_for(5) == "A1"


# -- Puiseux block form ----------------------------------------------------------------


def test_puiseux_monomializes_first_component():
    mg = multigerm([make_branch(S({2: 1, 3: 1}), S({3: 1}))])
    bf, _, _ = to_block_form(mg)
    pf, log = puiseux_block_form(bf)
    b = pf.branches[0]
    assert set(b.x.terms) == {2}
    assert b.n == 2
    # the value semiring is unchanged by the reparametrization
    g_before = inv.value_set(mg, inv.GAMMA)
    g_after = inv.value_set(pf, inv.GAMMA)
    assert g_before.box == g_after.box
    assert g_before.conductor == g_after.conductor


def test_puiseux_keeps_second_block_monomial_in_y():
    mg = multigerm([smooth(0, extra={2: 1}),
                    make_branch(S({2: 1, 3: 1}), S({1: 1}))])
    bf, _, _ = to_block_form(mg)
    pf, _ = puiseux_block_form(bf)
    i2 = 1
    assert pf.in_second_block(i2)
    assert set(pf.branches[i2].y.terms) == {1}


def test_puiseux_precision_error():
    from curva.errors import PrecisionError

    # (t^3, t^4) is 6-determined but only known to order 4
    mg = multigerm([make_branch(S({3: 1}, trunc=5), S({4: 1}, trunc=5))])
    bf, _, _ = to_block_form(mg)
    with pytest.raises(PrecisionError):
        puiseux_block_form(bf)
