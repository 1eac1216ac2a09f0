from __future__ import annotations

import itertools

import pytest

from curva.errors import ValidationError
from curva.kernel import BiPoly, INF, Scalar
import curva.invariants as inv
import curva.moduli as mod
import curva.normalform as nform


# -- closed-form rules ------------------------------------------------------------


def test_ordinary_fiber_rule_values():
    assert mod.ordinary_fiber_rule(4, (0, 1), 2)
    assert not mod.ordinary_fiber_rule(4, (0,), 2)
    for J_size in (1, 2, 3):
        assert mod.ordinary_fiber_rule(4, tuple(range(J_size)), 3)


def test_nm_fiber_rule_values():
    # <2,3>/6 with r=2 at the diagonal 7: c=1, 7-6=1 not in <2,3>
    assert not mod.nm_fiber_rule(2, 3, 2, (0,), 7)
    assert mod.nm_fiber_rule(2, 3, 2, (0, 1), 7)
    assert not mod.nm_fiber_rule(2, 3, 2, (0, 1), 1)  # 1 not in <2,3>
    assert mod.nm_fiber_rule(2, 3, 2, (0,), 12)  # beyond r*n*m


def test_dimension_closed_forms():
    assert [mod.ordinary_dim_closed(r) for r in (3, 4, 5, 6, 7)] == \
        [0, 1, 2, 4, 6]
    assert [mod.nm23_dim_closed(r) for r in (1, 2, 3, 4)] == [0, 1, 4, 11]


def test_e_closed_forms():
    assert mod.ordinary_e_closed(7, 2) == 4
    assert mod.ordinary_e_closed(7, 3) == 7
    assert mod.nm23_e_closed(2, 4) == 2
    assert mod.nm23_e_closed(2, 5) == 1
    assert all(mod.nm23_e_closed(2, k) == 2 for k in range(6, 15))
    assert mod.nm23_e_closed(4, 11) == 4  # e(3r-1) = r for even r


# -- sampling ---------------------------------------------------------------------------


def test_sample_ordinary_generators():
    mg = mod.sample_generic(mod.ClassSpec(mod.ORDINARY, r=3, seed=1))
    ctx = inv.context(mg)
    # nu(f_i) = (1, ..., infinity at i, ..., 1)
    for i in range(3):
        vec = inv.valuation(mg, ctx.equations[i])
        assert vec[i] is INF
        assert all(vec[j] == 1 for j in range(3) if j != i)
    # the semiring box is exactly the closure of those generators
    vs = inv.value_set(mg, inv.GAMMA)
    gens = [tuple(INF if i == j else 1 for j in range(3)) for i in range(3)]
    oracle = mod.semiring_box_closure(gens, vs.bounds)
    assert vs.box == oracle


def test_sample_nm_contact():
    mg = mod.sample_generic(mod.ClassSpec(mod.NM, n=2, m=3, r=2, seed=5))
    assert inv.intersection_mult(mg, 0, 1) == 6
    ctx = inv.context(mg)
    assert ctx.mus == (2, 2)
    assert inv.valuation(mg, BiPoly.X()) == (2, 2)
    assert inv.valuation(mg, BiPoly.Y()) == (3, 3)


def test_sample_nm_gamma_generators_match_box():
    mg = mod.sample_generic(mod.ClassSpec(mod.NM, n=2, m=3, r=2, seed=5))
    vs = inv.value_set(mg, inv.GAMMA)
    gens = [(2, 2), (3, 3), (6, INF), (INF, 6)]
    oracle = mod.semiring_box_closure(gens, vs.bounds)
    assert vs.box == oracle


def test_sample_irreducible():
    mg = mod.sample_generic(mod.ClassSpec(mod.IRREDUCIBLE, gens=(2, 3),
                                          seed=1))
    b = mg.branches[0]
    assert b.x.ord_lb() == 2 and b.y.ord_lb() == 3


def test_sample_validation_rejects_bad_spec():
    with pytest.raises(ValidationError):
        mod.ClassSpec(mod.NM, n=2, m=4, r=2).validate()


# -- profiles -----------------------------------------------------------------------------


def test_ordinary_profiles_match_lemma():
    for r, seed in ((4, 1), (5, 2)):
        mg = mod.sample_generic(mod.ClassSpec(mod.ORDINARY, r=r, seed=seed))
        prof = mod.e_profile(mg, r + 1)
        for k in range(2, r + 2):
            assert prof[k - 1] == mod.ordinary_e_closed(r, k), (r, k)


def test_nm23_profile_small():
    mg = mod.sample_generic(mod.ClassSpec(mod.NM, n=2, m=3, r=2, seed=1))
    prof = mod.e_profile(mg, 8)
    assert prof[3] == 2 and prof[4] == 1
    assert prof[5] == 2 and prof[6] == 2 and prof[7] == 2


def test_nm_small_e_values_other_classes():
    # <2,5>: e(6)=1, e(7)=1; <3,4>: e(5)=1, e(6)=1 (from the m+1/m+2 case
    # analysis)
    mg = mod.sample_generic(mod.ClassSpec(mod.NM, n=2, m=5, r=2, seed=3))
    prof = mod.e_profile(mg, 7)
    assert prof[5] == 1 and prof[6] == 1
    mg2 = mod.sample_generic(mod.ClassSpec(mod.NM, n=3, m=4, r=2, seed=3))
    prof2 = mod.e_profile(mg2, 6)
    assert prof2[4] == 1 and prof2[5] == 1


def test_moduli_dimension_values():
    res = mod.moduli_dimension(mod.ClassSpec(mod.ORDINARY, r=6, seed=1))
    assert res["dimension"] == 4
    res = mod.moduli_dimension(mod.ClassSpec(mod.NM, n=2, m=3, r=3, seed=1))
    assert res["dimension"] == 4
    for gens in ((2, 5), (3, 4), (3, 5)):
        res = mod.moduli_dimension(
            mod.ClassSpec(mod.IRREDUCIBLE, gens=gens, seed=1))
        assert res["dimension"] == 0, gens


def test_profile_with_oracle_reports_agreement():
    out = mod.profile_with_oracle(mod.ClassSpec(mod.ORDINARY, r=5, seed=1), 6)
    assert out["agreement"] is True
    assert out["e_profile"][1] == 4
    assert out["closed_forms"][1] == 4
    out = mod.profile_with_oracle(
        mod.ClassSpec(mod.NM, n=2, m=5, r=2, seed=3), 7)
    assert out["agreement"] is True
    assert out["closed_forms"][5] == 1 and out["closed_forms"][6] == 1


def test_granger_lk_sum_r5():
    r = 5
    mg = mod.sample_generic(mod.ClassSpec(mod.ORDINARY, r=r, seed=4))
    table, _ = nform.lk_table(mg, r)
    total = (r - 3) - 1
    for k in range(2, r + 1):
        total += r - len(table[k])
    assert total == mod.ordinary_dim_closed(r)


# -- pre-normal forms ---------------------------------------------------------------------


def test_nm_support_pattern_231():
    assert mod.nm_support_pattern(2, 3, 1) == [[3]]


def test_nm_support_pattern_232():
    pattern = mod.nm_support_pattern(2, 3, 2)
    assert pattern[0] == [3]
    assert pattern[1] == [3, 5]


def test_pre_normal_form_builds_and_matches_reduction():
    spec = mod.ClassSpec(mod.NM, n=2, m=3, r=2, seed=0)
    coeffs = {(0, 3): Scalar(1), (1, 3): Scalar(2), (1, 5): Scalar(7)}
    mg = mod.pre_normal_form(spec, coeffs)
    assert set(mg.branches[0].y.terms) == {3}
    assert set(mg.branches[1].y.terms) == {3, 5}
    # the reduction of a generic sample stays inside the pattern
    sample = mod.sample_generic(mod.ClassSpec(mod.NM, n=2, m=3, r=2, seed=9))
    nf = nform.g_normal_form(sample)
    pattern = mod.nm_support_pattern(2, 3, 2)
    for i, b in enumerate(nf.psi.branches):
        support = set(b.y.terms)
        assert support <= set(pattern[i]), (i, sorted(support))


def test_ordinary_normal_form_support():
    r = 6
    mg = mod.sample_generic(mod.ClassSpec(mod.ORDINARY, r=r, seed=2))
    nf = nform.g_normal_form(mg)
    for i, b in enumerate(nf.psi.branches):
        comp = b.component(nf.psi.designated(i))
        for j in sorted(comp.terms):
            if j == 1:
                continue
            # surviving positions obey i not in L_j: j <= (i-2)/2 for j >= 3,
            # plus the i >= 4 positions at j = 2 (0-based i >= 4)
            if j == 2:
                assert i >= 4
            else:
                assert 2 * j + 1 <= i, (i, j)


def test_fiber_rules_match_machinery_ordinary4():
    r = 4
    mg = mod.sample_generic(mod.ClassSpec(mod.ORDINARY, r=r, seed=1))
    for k in range(0, r):
        gamma = tuple(k for _ in range(r))
        for size in range(1, r + 1):
            for J in itertools.combinations(range(r), size):
                got = inv.fiber_nonempty(mg, inv.GAMMA, J, gamma,
                                         want_witness=False)[0]
                assert got == mod.ordinary_fiber_rule(r, J, k), (k, J)
