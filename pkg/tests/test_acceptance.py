"""Acceptance suite: one test per criterion, exact tolerances throughout.

Each test prints a single [AC-nn] PASS line (visible with pytest -s); any
assertion failure marks the criterion failed.
"""

from __future__ import annotations

import itertools
import time

from curva import corpus
from curva.kernel import BiPoly, ONE, Scalar, Series
from curva.curve import (
    apply_group,
    make_branch,
    multigerm,
    puiseux_block_form,
    to_block_form,
)
import curva.invariants as inv
import curva.moduli as mod
import curva.normalform as nform


def _report(tag: str, detail: str):
    print(f"[{tag}] PASS {detail}")


def S(d, trunc):
    return Series({e: Scalar(c) for e, c in d.items()}, trunc)


def _pipeline(mg):
    bf, _, _ = to_block_form(mg)
    pf, _ = puiseux_block_form(bf)
    return pf


# -- criterion 1: ordinary-point fibers --------------------------------------------


def test_ac01_ordinary_fibers():
    t0 = time.time()
    for r in (4, 5, 6):
        t_r = time.time()
        mg = mod.sample_generic(mod.ClassSpec(mod.ORDINARY, r=r, seed=11))
        for k in range(0, r + 1):
            gamma = tuple(k for _ in range(r))
            for size in range(1, r + 1):
                for J in itertools.combinations(range(r), size):
                    got = inv.fiber_nonempty(mg, inv.GAMMA, J, gamma,
                                             want_witness=False)[0]
                    want = mod.ordinary_fiber_rule(r, J, k)
                    assert got == want, (r, k, J)
        assert time.time() - t_r < 120, f"r={r} exceeded 2 minutes"
    _report("AC-01", f"ordinary fibers r=4,5,6 match the closed rule "
            f"({time.time() - t0:.1f}s)")


# -- criterion 2: ordinary e-profile and dimension -----------------------------------


def test_ac02_ordinary_profiles_and_dimension():
    t0 = time.time()
    expected_dim = {5: 2, 6: 4, 7: 6}  # (r-2)^2/4 even, (r-1)(r-3)/4 odd
    for r in (5, 6, 7):
        for seed in (1, 2, 3):
            mg = mod.sample_generic(mod.ClassSpec(mod.ORDINARY, r=r,
                                                  seed=seed))
            prof = mod.e_profile(mg, r + 1)
            assert prof[1] == 4, (r, seed)
            for k in range(3, r + 2):
                assert prof[k - 1] == min(2 * k + 1, r), (r, seed, k)
            res = mod.moduli_dimension(
                mod.ClassSpec(mod.ORDINARY, r=r, seed=seed), mg)
            assert res["dimension"] == expected_dim[r], (r, seed)
            assert res["agreement"]
    elapsed = time.time() - t0
    assert elapsed < 300, "exceeded 5 minutes"
    _report("AC-02", f"e(2)=4, e(k)=min(2k+1,r), dims {expected_dim} "
            f"({elapsed:.1f}s)")


# -- criterion 3: the (2,3) class ---------------------------------------------------------


def test_ac03_nm23_profiles_and_dimensions():
    t0 = time.time()
    expected_dim = {2: 1, 3: 4, 4: 11}
    for r in (2, 3, 4):
        for seed in (1, 2, 3):
            spec = mod.ClassSpec(mod.NM, n=2, m=3, r=r, seed=seed)
            mg = mod.sample_generic(spec)
            prof = mod.e_profile(mg, 3 * r)
            assert prof[3] == 2, (r, seed)
            assert prof[4] == 1, (r, seed)
            for k in range(6, 3 * r + 1):
                assert prof[k - 1] == mod.nm23_e_closed(r, k), (r, seed, k)
            if r % 2 == 0 and 3 * r - 1 >= 6:
                assert prof[3 * r - 2] == r
            res = mod.moduli_dimension(spec, mg)
            assert res["dimension"] == expected_dim[r], (r, seed)
    elapsed = time.time() - t0
    assert elapsed < 600, "exceeded 10 minutes"
    _report("AC-03", f"(2,3)-class e-profiles and dims {expected_dim} "
            f"({elapsed:.1f}s)")


# -- criterion 4: degenerate classifications ------------------------------------------------


def test_ac04_degenerate_classifications():
    t0 = time.time()
    nf = nform.full_normal_form(corpus.smooth_line())
    assert nf.psi.branches[0].x.terms == {1: ONE}
    assert nf.psi.branches[0].y.terms == {}

    for m, tail in ((3, {3: 2, 4: 1}), (5, {5: 3, 6: 1, 7: 2}),
                    (7, {7: 1, 9: 1, 11: 1})):
        trunc = 2 * m
        mg = multigerm([make_branch(S({2: 1}, trunc), S(tail, trunc))])
        nf = nform.full_normal_form(mg)
        assert nf.psi.branches[0].x.terms == {2: ONE}, m
        assert nf.psi.branches[0].y.terms == {m: ONE}, m

    lines = multigerm([make_branch(S({1: 1}, 6), S({1: 2}, 6)),
                       make_branch(S({1: 1}, 6), S({1: 3}, 6))])
    nf = nform.full_normal_form(lines)
    assert nf.psi.branches[0].x.terms == {1: ONE}
    assert nf.psi.branches[0].y.terms == {}
    assert nf.psi.branches[1].x.terms == {}
    assert nf.psi.branches[1].y.terms == {1: ONE}

    for name, builder in corpus.DETERMINACY_CORPUS.items():
        mg = builder()
        assert inv.determinacy_bounds_definitional(mg) == \
            inv.determinacy_bounds(mg), name
    _report("AC-04", f"(t,0), (t^2,t^m) m=3,5,7, node, and the d-table on "
            f"{len(corpus.DETERMINACY_CORPUS)} curves ({time.time() - t0:.1f}s)")


# -- criterion 5: the irreducible Zariski example ---------------------------------------------


def test_ac05_zariski_example():
    t0 = time.time()
    z = corpus.zariski_467()
    omega0 = (BiPoly.monomial(0, 1, Scalar(6)), BiPoly.monomial(1, 0, Scalar(-4)))
    assert inv.form_valuation(z, omega0[0], omega0[1]) == (11,)

    pf = _pipeline(z)
    table, _ = nform.lk_table(pf, 9)
    assert table[7] == ()   # lambda = 7 survives
    assert table[8] == (0,)
    lam_g_in = [k for k in range(5, 9) if table[k] == (0,)]
    assert lam_g_in == [8]

    nf = nform.full_normal_form(z)
    assert nf.psi.branches[0].x.terms == {4: ONE}
    assert nf.psi.branches[0].y.terms == {6: ONE, 7: ONE}

    scaled = multigerm([make_branch(S({4: 1}, 18), S({6: 1, 7: 2}, 18))])
    nf2 = nform.full_normal_form(scaled)
    assert nf2.psi.branches[0].y.terms == {6: ONE, 7: ONE}

    bad = multigerm([make_branch(S({4: 1}, 18), S({6: 1}, 18),
                                 check_primitive=False)])
    res = nform.equivalent(z, bad)
    assert not res.equivalent
    _report("AC-05", f"nu(phi*(6YdX-4XdY))=11, lambda=7, normal form kept, "
            f"(t^4,t^6) rejected ({time.time() - t0:.1f}s)")


# -- criterion 6: invariance suite -------------------------------------------------------------


def _tie_permutations(mg):
    """Permutations preserving blocks and multiplicities."""
    blocks = mg.blocks
    groups = []
    for blk in range(blocks.count):
        members = list(blocks.members(blk, mg.r))
        by_mult = {}
        for i in members:
            by_mult.setdefault(mg.branches[i].n, []).append(i)
        groups.extend(by_mult.values())
    perms = [list(range(mg.r))]
    for group in groups:
        new = []
        for base in perms:
            for pi in itertools.permutations(group):
                cand = base[:]
                for slot, src in zip(group, pi):
                    cand[slot] = base[src]
                new.append(cand)
        perms = new
    return {tuple(p) for p in perms}


def _boxes_match_up_to_ties(vs_a, vs_b, pf_a):
    if vs_a.conductor == vs_b.conductor and vs_a.box == vs_b.box:
        return True
    for perm in _tie_permutations(pf_a):
        cond = tuple(vs_b.conductor[p] for p in perm)
        box = frozenset(tuple(v[p] for p in perm) for v in vs_b.box)
        if cond == vs_a.conductor and box == vs_a.box:
            return True
    return False


def test_ac06_invariance_suite():
    t0 = time.time()
    for name, builder in corpus.INVARIANCE_CORPUS.items():
        mg = builder()
        gamma_base = inv.value_set(mg, inv.GAMMA)
        lambda_base = inv.value_set(mg, inv.LAMBDA)
        kappa_base = inv.kappa(mg)
        pf_base = _pipeline(mg)
        lg_base = inv.value_set(pf_base, inv.LAMBDA_G)
        for seed in range(20):
            g = corpus.random_group_element(mg.r, mg.min_trunc(),
                                            1000 + seed, "A")
            perm = corpus.random_permutation(mg.r, 2000 + seed)
            moved = apply_group(mg, g, perm)
            inverse = [0] * mg.r
            for slot, src in enumerate(perm):
                inverse[src] = slot

            def unperm(vec):
                return tuple(vec[inverse[i]] for i in range(mg.r))

            assert tuple(sorted(inv.kappa(moved))) == \
                tuple(sorted(kappa_base)), (name, seed)
            vs = inv.value_set(moved, inv.GAMMA)
            assert frozenset(unperm(v) for v in vs.box) == gamma_base.box, \
                (name, seed)
            assert unperm(vs.conductor) == gamma_base.conductor
            lam = inv.value_set(moved, inv.LAMBDA)
            assert frozenset(unperm(v) for v in lam.box) == lambda_base.box
            pf_moved = _pipeline(moved)
            lg = inv.value_set(pf_moved, inv.LAMBDA_G)
            assert _boxes_match_up_to_ties(lg_base, lg, pf_base), (name, seed)
            res = nform.equivalent(mg, moved)
            assert res.equivalent, (name, seed)
            assert res.permutation is not None
            assert res.certificate is not None
    elapsed = time.time() - t0
    assert elapsed < 600, "exceeded 10 minutes"
    _report("AC-06", f"Gamma/Lambda/LambdaG/kappa invariant and orbits "
            f"recognized over 5 curves x 20 elements ({elapsed:.1f}s)")


# -- criterion 7: uniqueness of the unipotent normal form ----------------------------------------


def test_ac07_uniqueness():
    t0 = time.time()
    from curva.curve import subgroup_for

    for name, builder in corpus.INVARIANCE_CORPUS.items():
        mg = builder()
        base = nform.full_normal_form(mg)
        bf, _, _ = to_block_form(mg)
        flavor = subgroup_for(bf.blocks.count)
        for seed in range(10):
            g = corpus.random_group_element(mg.r, mg.min_trunc(),
                                            3000 + seed, flavor)
            moved = apply_group(mg, g)
            nf = nform.full_normal_form(moved)
            assert nf.psi == base.psi, (name, seed)
            assert nf.parameter_vector == base.parameter_vector
    _report("AC-07", f"normal forms bit-identical across 5 curves x 10 "
            f"unipotent moves ({time.time() - t0:.1f}s)")


# -- criterion 8: the Pol identity ------------------------------------------------------------


def _translated_box_equal(jac, lam, kap):
    region = tuple(min(jb, lb + k - 1)
                   for jb, lb, k in zip(jac.bounds, lam.bounds, kap))

    def clamp(v):
        return tuple(min(a, m) for a, m in zip(v, region))

    return {clamp(v) for v in jac.box} == \
        {clamp(tuple(a + k - 1 for a, k in zip(v, kap))) for v in lam.box}


def test_ac08_pol_identity():
    t0 = time.time()
    curves = {
        "cusp": corpus.cusp(),
        "tangent_cusps": corpus.tangent_cusp_pair(),
        "node": corpus.node(),
        "nm232": mod.sample_generic(mod.ClassSpec(mod.NM, n=2, m=3, r=2,
                                                  seed=13)),
    }
    for name, mg in curves.items():
        jac = inv.jacobian_value_set(mg)
        lam = inv.value_set(mg, inv.LAMBDA)
        assert _translated_box_equal(jac, lam, inv.kappa(mg)), name
    _report("AC-08", f"nu(J(f)) = Lambda + kappa - 1 on {list(curves)} "
            f"({time.time() - t0:.1f}s)")


# -- criterion 9: semiring laws ----------------------------------------------------------------


def test_ac09_semiring_laws():
    t0 = time.time()
    for name, builder in corpus.ALL_CURVES.items():
        mg = builder()
        vs = inv.value_set(mg, inv.GAMMA)
        vs.validate()  # conductor laws and +/inf closure in the box
        lam = inv.value_set(mg, inv.LAMBDA)
        for v in vs.box:
            if any(c == 0 for c in v):
                continue
            clamped = tuple(min(c, b) for c, b in zip(v, lam.bounds))
            assert clamped in lam.box, (name, v)
    _report("AC-09", f"semiring closure, conductor laws, Gamma-0 in Lambda "
            f"on {len(corpus.ALL_CURVES)} curves ({time.time() - t0:.1f}s)")


# -- criterion 10: L_k cross-validation -----------------------------------------------------------


def _glex_max_star(pf, k):
    r = pf.r
    gamma = tuple(k for _ in range(r))
    fiber = {}
    for size in range(1, r + 1):
        for J in itertools.combinations(range(r), size):
            fiber[J] = inv.fiber_nonempty(pf, inv.LAMBDA_G, J, gamma,
                                          want_witness=False)[0]

    def star(L):
        outside = [i for i in range(r) if i not in L]
        for l in L:
            if not any(fiber[tuple(sorted((l,) + extra))]
                       for size in range(len(outside) + 1)
                       for extra in itertools.combinations(outside, size)):
                return False
        return True

    for size in range(r, -1, -1):
        best = [L for L in itertools.combinations(range(r), size) if star(L)]
        if best:
            return max(best, key=lambda L: tuple(1 if i in L else 0
                                                 for i in range(r)))
    return ()


def test_ac10_lk_cross_validation():
    t0 = time.time()
    curves = {
        "node": corpus.node(),
        "tangent_cusps": corpus.tangent_cusp_pair(),
        "ordinary3": corpus.ordinary_triple(),
        "nm232": mod.sample_generic(mod.ClassSpec(mod.NM, n=2, m=3, r=2,
                                                  seed=17)),
        "ordinary4": mod.sample_generic(mod.ClassSpec(mod.ORDINARY, r=4,
                                                      seed=17)),
    }
    for name, mg in curves.items():
        pf = _pipeline(mg)
        dmax = max(inv.determinacy_bounds(pf))
        table, _ = nform.lk_table(pf, max(dmax - 1, 1))
        for k in range(1, dmax):
            assert table[k] == _glex_max_star(pf, k), (name, k)
    _report("AC-10", f"greedy L_k = graded-lex max over the fiber condition "
            f"on {list(curves)} ({time.time() - t0:.1f}s)")
