"""Normal forms under the unipotent group and the equivalence decision.

The reduction engine eliminates, order by order, the designated-component
coefficients at the positions L_k where the achievable-jet subspace projects
onto.  Each elimination is realized by an explicit group element (a sigma
built from the solved 1-form and the matching reparametrizations), applied
exactly; nonlinear corrections may disturb lower orders, which a bounded
repair loop re-eliminates.  Homothety normalization and the equivalence
verdict work through exact monomial-equation systems, never through actual
roots.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field, replace
from math import lcm
from typing import Optional

from .arith import solve_monomial_system
from .errors import GuardError, ValidationError
from .kernel import BiPoly, ONE, Scalar, Series, ZERO, Subspace
from .kernel.linalg import solve
from .curve import (
    Branch,
    GroupElement,
    Multigerm,
    puiseux_block_form,
    subgroup_for,
    to_block_form,
)
from . import invariants as inv


@dataclass(frozen=True)
class LogStep:
    """One replayable move: a group element and/or a branch permutation."""

    note: str
    element: Optional[GroupElement] = None
    perm: Optional[tuple] = None


@dataclass(frozen=True)
class JetSubspace:
    k: int
    U: Subspace
    witnesses: tuple  # one (eta1, eta2) BiPoly pair per basis vector


@dataclass
class NormalFormResult:
    psi: Multigerm
    Lk_table: dict
    group_log: list
    parameter_vector: tuple  # ((i, j, Scalar), ...) over n_i < j <= k0
    k0: int
    normalized_index: Optional[tuple] = None
    certificate: Optional[dict] = None
    reports: dict = field(default_factory=dict)

    def parameter_values(self) -> tuple:
        return tuple(entry[2] for entry in self.parameter_vector)


# -- state validation ------------------------------------------------------------


def _require_puiseux(mg: Multigerm):
    if mg.blocks is None:
        raise ValidationError("Puiseux block form required (no block data)")
    for i, b in enumerate(mg.branches):
        comp = b.component("x" if mg.designated(i) == "y" else "y")
        if comp.is_known_zero():
            continue
        if set(comp.terms) != {b.n}:
            raise ValidationError(
                f"branch {i + 1} is not in Puiseux block form"
            )


def _designated_coeff(mg: Multigerm, i: int, k: int) -> Scalar:
    return mg.branches[i].component(mg.designated(i)).coeff(k)


def _nondesignated(mg: Multigerm, i: int) -> str:
    return "x" if mg.designated(i) == "y" else "y"


# -- jet subspaces and L_k ----------------------------------------------------------


def _lambda_g_family(mg: Multigerm, k: int):
    windows = tuple(k + 2 for _ in range(mg.r))
    fam, _ = inv.stabilized_family(mg, inv.LAMBDA_G, windows)
    return fam


def compute_Lk(mg: Multigerm, k: int, fam=None, cross_check: bool = False) -> tuple:
    """Greedy graded-lex-maximal set of positions whose order-k coefficients
    the unipotent group can cancel simultaneously.

    With ``cross_check`` (r <= 4) the answer is re-derived from the
    normalized-form value-set fibers of the diagonal vector and compared.
    """
    _require_puiseux(mg)
    if fam is None:
        fam = _lambda_g_family(mg, k)
    ech = fam.echelon()
    for i in range(mg.r):
        for l in range(k):
            ech.add(fam.crow(i, l))
    out = []
    for i in range(mg.r):
        if ech.add(fam.crow(i, k)):
            out.append(i)
    result = tuple(out)
    if cross_check:
        if mg.r > 4:
            raise ValidationError("L_k cross-check supported for r <= 4")
        alt = _lk_from_fibers(mg, k)
        if alt != result:
            raise GuardError(
                f"L_{k} mismatch: greedy {result} vs fiber condition {alt}"
            )
    return result


def _lk_from_fibers(mg: Multigerm, k: int) -> tuple:
    """Graded-lex maximum over all subsets satisfying the fiber condition:
    each l in L must carry a nonempty diagonal fiber over some J containing
    l and avoiding the rest of L."""
    r = mg.r
    gamma = tuple(k for _ in range(r))
    fibers = {}
    for size in range(1, r + 1):
        for J in itertools.combinations(range(r), size):
            fibers[J] = inv.fiber_nonempty(mg, inv.LAMBDA_G, J, gamma,
                                           want_witness=False)[0]

    def satisfies(L):
        outside = [i for i in range(r) if i not in L]
        for l in L:
            if not any(fibers[tuple(sorted((l,) + extra))]
                       for size in range(len(outside) + 1)
                       for extra in itertools.combinations(outside, size)):
                return False
        return True

    for size in range(r, -1, -1):
        good = [L for L in itertools.combinations(range(r), size)
                if satisfies(L)]
        if good:
            return max(good, key=lambda L: tuple(1 if i in L else 0
                                                 for i in range(r)))
    return ()


def lk_table(mg: Multigerm, k_max: int) -> dict:
    """L_k for every k <= k_max in one incremental echelon pass."""
    _require_puiseux(mg)
    fam = _lambda_g_family(mg, k_max)
    ech = fam.echelon()
    out = {}
    for k in range(1, k_max + 1):
        for i in range(mg.r):
            ech.add(fam.crow(i, k - 1))
        work = ech.clone()
        L = []
        for i in range(mg.r):
            if work.add(fam.crow(i, k)):
                L.append(i)
        out[k] = tuple(L)
    return out, fam.degree


def jet_subspace(mg: Multigerm, k: int) -> JetSubspace:
    """The subspace of coefficient vectors achievable as k-jets of the
    normalized-form ideal, with witnessing 1-forms."""
    _require_puiseux(mg)
    fam = _lambda_g_family(mg, k)
    L = compute_Lk(mg, k, fam)
    basis = []
    wits = []
    for l in L:
        targets = {j: (ONE if j == l else ZERO) for j in L}
        combo = _solve_targets(fam, k, targets)
        if combo is None:
            raise GuardError("jet subspace witness solve failed")
        vec = tuple(_apply_functional(fam, i, k, combo) for i in range(mg.r))
        basis.append(vec)
        wits.append(_combo_to_form(fam, combo))
    for vec in basis:
        for i, b in enumerate(mg.branches):
            if k <= b.n and not vec[i].is_zero():
                raise GuardError("nonzero jet coordinate at k <= n_i")
    return JetSubspace(k, Subspace.from_rows(mg.r, basis), tuple(wits))


def _generator_order(fam, g: int) -> int:
    col = fam.columns[g]
    best = 10**9
    for i in range(fam.r):
        start = fam.offsets[i]
        w = fam.windows[i]
        o = next((l for l in range(w) if not col[start + l].is_zero()), w)
        best = min(best, o)
    return best


def _solve_targets(fam, k: int, targets: dict, allowed=None):
    """A generator combination with all orders < k zero and prescribed
    order-k values at the target positions, preferring high-order
    generators so corrections land as high as possible."""
    ngens = len(fam.labels)
    pool = range(ngens) if allowed is None else allowed
    order = sorted(pool,
                   key=lambda g: (-_generator_order(fam, g), fam.labels[g]))
    if not order:
        return None
    rows = []
    rhs = []
    for i in range(fam.r):
        for l in range(k):
            srow = fam.srow(i, l)
            if any(not srow[g].is_zero() for g in order):
                rows.append([srow[g] for g in order])
                rhs.append(ZERO)
    for i, val in sorted(targets.items()):
        srow = fam.srow(i, k)
        rows.append([srow[g] for g in order])
        rhs.append(val)
    sol = solve(rows, rhs)
    if sol is None:
        return None
    combo = [ZERO] * ngens
    for pos, g in enumerate(order):
        combo[g] = sol[pos]
    return combo


def _graded_generators(fam, mg: Multigerm, k: int):
    """Generators whose group-element realization provably cannot disturb
    any order <= k: the eta part driving each branch's reparametrization
    must pull back to order >= k there."""
    out = []
    ords = []
    for br in mg.branches:
        big = 10**9
        ox = br.x.ord_lb() if not br.x.is_known_zero() else big
        oy = br.y.ord_lb() if not br.y.is_known_zero() else big
        ords.append((ox, oy))
    for g, label in enumerate(fam.labels):
        tag, a, b = label
        ok = True
        for i in range(mg.r):
            ox, oy = ords[i]
            pull = a * ox + b * oy
            if mg.in_second_block(i):
                if tag == "dX" and pull < k:
                    ok = False
                    break
            else:
                if tag == "dY" and pull < k:
                    ok = False
                    break
        if ok:
            out.append(g)
    return out


def _apply_functional(fam, i: int, k: int, combo) -> Scalar:
    srow = fam.srow(i, k)
    acc = ZERO
    for c, v in zip(srow, combo):
        if not v.is_zero():
            acc = acc + c * v
    return acc


def _combo_to_form(fam, combo):
    """(eta1, eta2) with omega = eta2 dX - eta1 dY."""
    eta1 = BiPoly.zero()
    eta2 = BiPoly.zero()
    for c, label in zip(combo, fam.labels):
        if c.is_zero():
            continue
        tag, a, b = label
        if tag == "dX":
            eta2 = eta2 + BiPoly.monomial(a, b, c)
        else:
            eta1 = eta1 + BiPoly.monomial(a, b, c)
    return eta1, eta2


# -- the reduction engine --------------------------------------------------------------


class _Reducer:
    def __init__(self, mg: Multigerm):
        _require_puiseux(mg)
        self.ctx = inv.context(mg)
        self.mg0 = self.ctx.work
        self.mg = self.ctx.work
        self.d = self.ctx.dbounds
        self.K = max(self.d)
        self.flavor = subgroup_for(mg.blocks.count)
        self.log: list = []
        self.Lk: dict = {}
        self.degree = 0
        self.applications = 0
        self.guard = 3 * self.K * mg.r + 16

    def lk(self, k: int) -> tuple:
        if not self.Lk:
            table, degree = lk_table(self.mg0, self.K - 1)
            self.Lk = table
            self.degree = degree
        return self.Lk.get(k, ())

    def _bump(self):
        self.applications += 1
        if self.applications > self.guard:
            raise GuardError(
                "reduction repair loop exceeded its application budget"
            )

    def _dirty_at(self, k: int) -> bool:
        for i, b in enumerate(self.mg.branches):
            if not (b.n < k < self.d[i]):
                continue
            comp = b.component(_nondesignated(self.mg, i))
            if not comp.terms.get(k, ZERO).is_zero():
                return True
            if i in self.lk(k) and not _designated_coeff(self.mg, i, k).is_zero():
                return True
        return False

    def _lowest_dirty(self, upto: int):
        n_min = min(b.n for b in self.mg.branches)
        for k in range(n_min + 1, upto + 1):
            if self._dirty_at(k):
                return k
        return None

    def _kill_nondesignated(self, i: int, k: int):
        b = self.mg.branches[i]
        comp_name = _nondesignated(self.mg, i)
        comp = b.component(comp_name)
        c = comp.terms.get(k, ZERO)
        if c.is_zero():
            return
        n = b.n
        lead = comp.terms[n]
        coeff = -c / (Scalar(n) * lead)
        eps = Series({k - n + 1: coeff}, b.trunc())
        t_eps = Series.t(b.trunc()) + eps
        new_x = b.x.compose(t_eps)
        new_y = b.y.compose(t_eps)
        self.mg = self.mg.with_branch(i, Branch(new_x, new_y))
        reps = [Series.t(b.trunc()) for _ in range(self.mg.r)]
        reps[i] = t_eps.reparam_inverse()
        self.log.append(LogStep(
            f"monomial cleanup branch {i + 1} order {k}",
            GroupElement(tuple(reps), (BiPoly.X(), BiPoly.Y()), self.flavor),
        ))
        self._bump()
        check = self.mg.branches[i].component(comp_name).terms.get(k, ZERO)
        if not check.is_zero():
            raise GuardError("monomial cleanup failed to cancel the target")

    def _eliminate_designated(self, k: int):
        L = self.lk(k)
        targets = {}
        for i in L:
            if not (self.mg.branches[i].n < k < self.d[i]):
                continue
            c = _designated_coeff(self.mg, i, k)
            if c.is_zero():
                continue
            targets[i] = c if self.mg.in_second_block(i) else -c
        if not targets:
            return
        combo = None
        fam = None
        clean = False
        for extra in (0, 2, 4):
            fam = inv.build_family_from(
                inv.FamilySource(self.mg), inv.LAMBDA_G,
                self.degree + extra, tuple(k + 2 for _ in range(self.mg.r)),
            )
            graded = _graded_generators(fam, self.mg, k)
            combo = _solve_targets(fam, k, targets, graded)
            if combo is not None:
                clean = True
                break
            combo = _solve_targets(fam, k, targets)
            if combo is not None:
                break
        if combo is None:
            raise GuardError(
                f"elimination solve failed at order {k} for {sorted(targets)}"
            )
        eta1, eta2 = _combo_to_form(fam, combo)
        self._apply_form(eta1, eta2, k, sorted(targets))
        residual = [i for i in targets
                    if not _designated_coeff(self.mg, i, k).is_zero()]
        if residual and clean:
            raise GuardError(
                f"graded elimination left a nonzero coefficient at order {k}"
            )

    def _apply_form(self, eta1: BiPoly, eta2: BiPoly, k: int, positions):
        mg = self.mg
        new_branches = []
        reps = []
        for i, b in enumerate(mg.branches):
            trunc = b.trunc()
            pull1 = eta1.pullback(b.x, b.y)
            pull2 = eta2.pullback(b.x, b.y)
            if mg.in_second_block(i):
                dcomp = b.y.derivative()
                eps = -(pull2.div_unit(dcomp)) if not pull2.is_known_zero() \
                    else Series({}, trunc)
            else:
                dcomp = b.x.derivative()
                eps = -(pull1.div_unit(dcomp)) if not pull1.is_known_zero() \
                    else Series({}, trunc)
            if not eps.is_known_zero() and min(eps.terms) < 2:
                raise GuardError("reparametrization correction below order 2")
            t_eps = Series.t(trunc) + eps
            x1 = b.x.compose(t_eps)
            y1 = b.y.compose(t_eps)
            new_x = x1 + eta1.pullback(x1, y1)
            new_y = y1 + eta2.pullback(x1, y1)
            new_branches.append(Branch(new_x, new_y))
            reps.append(t_eps.reparam_inverse())
        self.mg = replace(mg, branches=tuple(new_branches))
        sigma = (BiPoly.X() + eta1, BiPoly.Y() + eta2)
        self.log.append(LogStep(
            f"eliminate order {k} at positions {[p + 1 for p in positions]}",
            GroupElement(tuple(reps), sigma, self.flavor),
        ))
        self._bump()

    def run(self):
        n_min = min(b.n for b in self.mg.branches)
        k = n_min + 1
        while k < self.K:
            for i, b in enumerate(self.mg.branches):
                if b.n < k < self.d[i]:
                    self._kill_nondesignated(i, k)
            self._eliminate_designated(k)
            lowest = self._lowest_dirty(k)
            if lowest is not None:
                k = lowest
            else:
                k += 1
        if self._lowest_dirty(self.K - 1) is not None:
            raise GuardError("reduction terminated with dirty positions")


def g_normal_form(mg: Multigerm) -> NormalFormResult:
    """Reduce a Puiseux block form to the unique unipotent normal form.

    Branch order is kept stable: equal-multiplicity branches within a block
    stay in their input order, and the equivalence decision re-introduces
    that permutation freedom explicitly.
    """
    red = _Reducer(mg)
    red.run()
    d = red.d
    branches = tuple(
        Branch(b.x.truncate(d[i]), b.y.truncate(d[i]))
        for i, b in enumerate(red.mg.branches)
    )
    psi = replace(red.mg, branches=branches)
    log = list(red.log)
    for k in range(min(b.n for b in psi.branches) + 1, red.K):
        red.lk(k)
    k0 = _k0_bound(psi)
    params = _parameter_vector(psi, k0)
    for (i, j, val) in params:
        if i in red.Lk.get(j, ()) and not val.is_zero():
            raise GuardError("normal form kept a coefficient at an L_k slot")
    return NormalFormResult(
        psi=psi,
        Lk_table={k: L for k, L in sorted(red.Lk.items())},
        group_log=log,
        parameter_vector=params,
        k0=k0,
        reports={"applications": red.applications, "d": list(d)},
    )


def _k0_bound(mg: Multigerm) -> int:
    """k0 = min{z : the diagonal z-vector dominates the Lambda_G conductor}
    = max coordinate of that conductor."""
    fam, _ = inv.stabilized_family(mg, inv.LAMBDA_G)
    bound = tuple(w - 2 for w in fam.windows)
    cond = fam.conductor(bound)
    return max(cond)


def _parameter_vector(mg: Multigerm, k0: int) -> tuple:
    out = []
    for i, b in enumerate(mg.branches):
        comp = b.component(mg.designated(i))
        for j in range(b.n + 1, k0 + 1):
            val = comp.terms.get(j, ZERO) if j < comp.trunc else ZERO
            out.append((i, j, val))
    return tuple(out)


# -- homothety action ----------------------------------------------------------------


def _homothety_rows(mg: Multigerm, other: Multigerm):
    """Monomial equations sending the normal form mg to other by an element
    of the homothety group (unknowns alpha, delta, u_1..u_r; delta == alpha
    when s >= 3).  Returns (rows, rhs, nvars) or None when supports differ."""
    s = mg.blocks.count
    merged = s >= 3
    nvars = (1 if merged else 2) + mg.r

    def var_alpha():
        return 0

    def var_delta():
        return 0 if merged else 1

    def u_index(i):
        return (1 if merged else 2) + i

    rows = []
    rhs = []
    for i in range(mg.r):
        a = mg.branches[i]
        b = other.branches[i]
        if a.n != b.n:
            return None
        n = a.n
        in_b2 = mg.in_second_block(i)
        lead_a = a.component(_nondesignated(mg, i)).terms[n]
        lead_b = b.component(_nondesignated(other, i)).terms[n]
        row = [0] * nvars
        row[var_delta() if in_b2 else var_alpha()] += 1
        row[u_index(i)] -= n
        rows.append(row)
        rhs.append(lead_b / lead_a)
        ca = a.component(mg.designated(i))
        cb = b.component(other.designated(i))
        support = set(ca.terms) | set(cb.terms)
        for j in sorted(support):
            va = ca.terms.get(j, ZERO)
            vb = cb.terms.get(j, ZERO)
            if va.is_zero() != vb.is_zero():
                return None
            if va.is_zero():
                continue
            row = [0] * nvars
            row[var_alpha() if in_b2 else var_delta()] += 1
            row[u_index(i)] -= j
            rows.append(row)
            rhs.append(vb / va)
    return rows, rhs, nvars


def homothety_between(mg: Multigerm, other: Multigerm):
    """(solvable over C*, Q(i) witness or None) for an H (or H') element
    carrying one normal form exactly onto the other."""
    packed = _homothety_rows(mg, other)
    if packed is None:
        return False, None
    rows, rhs, nvars = packed
    return solve_monomial_system(rows, rhs)


def _homothety_element(mg: Multigerm, witness, s: int) -> GroupElement:
    merged = s >= 3
    alpha = witness[0]
    delta = witness[0] if merged else witness[1]
    us = witness[(1 if merged else 2):]
    trunc = mg.min_trunc()
    reps = tuple(Series({1: u}, trunc) for u in us)
    sigma = (BiPoly.monomial(1, 0, alpha), BiPoly.monomial(0, 1, delta))
    return GroupElement(reps, sigma, "Hprime" if merged else "H")


def a_normal_form(nf: NormalFormResult, s: int) -> NormalFormResult:
    """Homothety-normalize a unipotent normal form: leading coefficients to 1
    and the first nonzero parameter to 1, whenever the needed roots exist in
    Q(i); otherwise emit the exponent certificate."""
    psi = nf.psi
    r = psi.r
    merged = s >= 3
    nvars = (1 if merged else 2) + r
    rows = []
    rhs = []
    for i in range(r):
        b = psi.branches[i]
        n = b.n
        lead = b.component(_nondesignated(psi, i)).terms[n]
        row = [0] * nvars
        in_b2 = psi.in_second_block(i)
        row[(0 if merged else 1) if in_b2 else 0] += 1
        row[(1 if merged else 2) + i] -= n
        rows.append(row)
        rhs.append(lead.inverse())
    first = next(((i, j, v) for (i, j, v) in nf.parameter_vector
                  if not v.is_zero()), None)
    normalized_index = None
    if first is not None:
        i0, j0, v0 = first
        row = [0] * nvars
        in_b2 = psi.in_second_block(i0)
        if in_b2:
            row[0] += 1  # alpha scales the designated x-component
        else:
            row[0 if merged else 1] += 1  # delta scales the y-component
        row[(1 if merged else 2) + i0] -= j0
        rows.append(row)
        rhs.append(v0.inverse())
        normalized_index = (i0, j0)
    ok, witness = solve_monomial_system(rows, rhs)
    certificate = {"relations": rows, "targets": [str(q) for q in rhs]}
    if witness is None and first is not None:
        # retry with leads only
        rows = rows[:-1]
        rhs = rhs[:-1]
        ok, witness = solve_monomial_system(rows, rhs)
        normalized_index = None
    if witness is None:
        return replace(nf, certificate=certificate)
    helem = _homothety_element(psi, witness, s)
    from .curve import apply_group

    scaled = apply_group(psi, helem)
    scaled = replace(scaled, blocks=psi.blocks)
    log = nf.group_log + [LogStep("homothety normalization", helem)]
    params = _parameter_vector(scaled, nf.k0)
    out = replace(nf, psi=scaled, group_log=log, parameter_vector=params,
                  normalized_index=normalized_index, certificate=None)
    if psi.r == 1:
        out = _lambda_extra_normalization(out)
    return out


def _lambda_extra_normalization(nf: NormalFormResult) -> NormalFormResult:
    """Irreducible branches: scale the first coefficient above the initial
    exponent that survives elimination to 1 when its root exists."""
    psi = nf.psi
    b = psi.branches[0]
    comp = b.component(psi.designated(0))
    if comp.is_known_zero():
        return nf
    v1 = min(comp.terms)
    lam = None
    for j in sorted(comp.terms):
        if j > v1:
            lam = j
            break
    if lam is None:
        return nf
    from .arith import gaussian_nth_root

    blam = comp.terms[lam]
    c = gaussian_nth_root(blam, lam - v1)
    if c is None:
        return replace(nf, certificate={"lambda": lam,
                                        "relation": f"c^{lam - v1}",
                                        "target": str(blam)})
    n = b.n
    trunc = b.trunc()
    helem = GroupElement(
        (Series({1: c}, trunc),),
        (BiPoly.monomial(1, 0, c**n), BiPoly.monomial(0, 1, c**v1)),
        "H",
    )
    from .curve import apply_group

    scaled = apply_group(psi, helem)
    scaled = replace(scaled, blocks=psi.blocks)
    log = nf.group_log + [LogStep("lambda coefficient normalization", helem)]
    params = _parameter_vector(scaled, nf.k0)
    return replace(nf, psi=scaled, group_log=log, parameter_vector=params)


def homothety_compatible(p, pprime, scheme):
    """Decide the printed table conditions: existence of c in C* with
    c^(E_ij) relating the two parameter vectors entrywise.

    p, pprime: sequences of (i, j, Scalar) with matching positions.
    scheme: dict with keys s, n (multiplicities), block (block index per
    branch position), i0, j0.
    """
    s = scheme["s"]
    n = scheme["n"]
    blocks = scheme["block"]
    i0 = scheme["i0"]
    j0 = scheme["j0"]
    n0 = n[i0]
    dens = [n[i] * n0 for i in range(len(n))]
    N = lcm(*dens) if dens else 1
    rows = []
    rhs = []
    for (i, j, va), (i2, j2, vb) in zip(p, pprime):
        if (i, j) != (i2, j2):
            raise ValidationError("parameter vectors have mismatched shapes")
        if va.is_zero() != vb.is_zero():
            return False, None
        if va.is_zero():
            continue
        if s == 1:
            e = (j * n0 - j0 * n[i]) * N // (n[i] * n0)
        elif s == 2 and blocks[i0] == 0:
            if blocks[i] == 0:
                e = (j * n0 - j0 * n[i]) * N // (n[i] * n0)
            else:
                e = (j * j0 - n0 * n[i]) * N // (n[i] * n0)
        elif s == 2:
            e = (j * n0 - j0 * n[i]) * N // (n[i] * n0)
        else:
            e = (j - n[i]) * N // n[i]
        rows.append([e])
        rhs.append(va / vb)
    if s >= 3:
        rows.append([(j0 - n0) * N // n0])
        rhs.append(Scalar(1))
    ok, witness = solve_monomial_system(rows, rhs)
    cert = {
        "exponents": [row[0] for row in rows],
        "targets": [str(q) for q in rhs],
        "scale_denominator": N,
        "witness": None if witness is None else str(witness[0]),
    }
    return ok, cert


# -- full pipeline ----------------------------------------------------------------------


def full_normal_form(mg: Multigerm) -> NormalFormResult:
    """Block form, Puiseux block form, unipotent normal form, homothety
    normalization, with a combined replayable log."""
    bf, mob, perm = to_block_form(mg)
    log = [LogStep("block form (Moebius + sort)", mob, perm)]
    pf, mono_log = puiseux_block_form(bf)
    log.extend(LogStep("puiseux monomialization", g) for g in mono_log)
    nf = g_normal_form(pf)
    nf = replace(nf, group_log=log + nf.group_log)
    return a_normal_form(nf, pf.blocks.count)


def replay_log(mg: Multigerm, log) -> Multigerm:
    """Re-apply a group log to the input multigerm."""
    from .curve import apply_group

    cur = mg
    for step in log:
        if step.element is not None:
            cur = apply_group(cur, step.element, step.perm)
        elif step.perm is not None:
            cur = Multigerm(tuple(cur.branches[p] for p in step.perm), None)
    return cur


# -- analytic equivalence ------------------------------------------------------------------


@dataclass
class EquivalenceResult:
    equivalent: bool
    permutation: Optional[tuple] = None
    certificate: Optional[dict] = None
    distinguisher: Optional[str] = None

    def to_json(self):
        return {
            "equivalent": self.equivalent,
            "permutation": None if self.permutation is None
            else list(self.permutation),
            "certificate": self.certificate,
            "distinguisher": self.distinguisher,
        }


def _branch_fingerprint(b: Branch, window: int):
    """(n, semigroup staircase over a shared window) - a sound per-branch
    topological profile usable even on degraded inputs: achieved orders
    below the trunc are exact whatever the unknown tail is."""
    orders = inv.branch_semigroup_orders(b, window)
    return (b.n, tuple(orders))


def _zariski_profile(mg: Multigerm, window: int):
    """Multiset of per-branch profiles; with the intersection matrix this
    pins the value semiring."""
    return sorted(_branch_fingerprint(b, window) for b in mg.branches)


def equivalent(a: Multigerm, b: Multigerm) -> EquivalenceResult:
    """Decide analytic equivalence of two parametrized multigerms."""
    if a.r != b.r:
        return EquivalenceResult(False, distinguisher="Gamma")
    window = min(br.trunc() for mg in (a, b) for br in mg.branches) - 1
    prof_a = _zariski_profile(a, window)
    prof_b = _zariski_profile(b, window)
    if prof_a != prof_b:
        return EquivalenceResult(False, distinguisher="Gamma")
    # degraded inputs (non-primitive parametrizations) stop here
    for mg in (a, b):
        from .kernel import support_gcd

        for br in mg.branches:
            if support_gcd(br.x, br.y) != 1:
                raise ValidationError(
                    "non-primitive parametrization: branch profiles agree, "
                    "deeper comparison impossible"
                )
    nfa = full_normal_form(a)
    ctx_a = inv.context(nfa.psi)
    bfb, _, _ = to_block_form(b)
    deepest = "Gamma"
    r = a.r
    for perm, candidate in _matchings(nfa.psi, bfb):
        ctx_c = None
        try:
            pf, _ = puiseux_block_form(candidate)
            nfc = g_normal_form(pf)
            ctx_c = inv.context(nfc.psi)
        except (ValidationError, GuardError):
            continue
        if ctx_c.inter != ctx_a.inter or ctx_c.kappa != ctx_a.kappa:
            continue
        deepest = _max_stage(deepest, "LambdaG")
        if nfc.Lk_table != nfa.Lk_table:
            continue
        if nfc.psi.blocks.slopes != nfa.psi.blocks.slopes:
            deepest = _max_stage(deepest, "parameters")
            continue
        deepest = _max_stage(deepest, "parameters")
        ok, witness = homothety_between(nfc.psi, nfa.psi)
        if ok:
            cert = {
                "homothety_witness": None if witness is None
                else [str(w) for w in witness],
                "normal_form": None,
            }
            return EquivalenceResult(True, perm, cert, None)
    return EquivalenceResult(False, distinguisher=deepest)


_STAGES = {"Gamma": 0, "LambdaG": 1, "parameters": 2}


def _max_stage(cur: str, new: str) -> str:
    return new if _STAGES[new] > _STAGES[cur] else cur


def _matchings(target: Multigerm, bf: Multigerm):
    """Candidate re-blockings of bf compatible with target's block layout.

    Yields (perm, multigerm-in-target-aligned-block-form).  perm[i] is the
    index in bf of the branch placed at slot i.
    """
    tb = target.blocks
    sb = bf.blocks
    if tb.count != sb.count:
        return
    t_blocks = [list(tb.members(blk, target.r)) for blk in range(tb.count)]
    s_blocks = [list(sb.members(blk, bf.r)) for blk in range(sb.count)]
    t_sig = [sorted(target.branches[i].n for i in blk) for blk in t_blocks]
    s_sig = [sorted(bf.branches[i].n for i in blk) for blk in s_blocks]
    for block_map in itertools.permutations(range(sb.count)):
        if any(t_sig[i] != s_sig[block_map[i]] for i in range(tb.count)):
            continue
        # Moebius sending the mapped blocks' current slopes to 0, inf, 1
        from .curve import GroupElement as GE, _mobius_matrix, mobius_apply

        slopes = [sb.slopes[block_map[i]] for i in range(min(3, tb.count))]
        try:
            matrix = _mobius_matrix(slopes)
        except ValidationError:
            continue
        a_, b_, c_, d_ = matrix
        sigma = (BiPoly({(1, 0): a_, (0, 1): b_}),
                 BiPoly({(1, 0): c_, (0, 1): d_}))
        trunc = bf.min_trunc()
        gel = GE(tuple(Series.t(trunc) for _ in range(bf.r)), sigma, "A")
        within_choices = []
        for i in range(tb.count):
            src = s_blocks[block_map[i]]
            perms = _within_block_bijections(
                [bf.branches[j].n for j in src],
                [target.branches[j].n for j in t_blocks[i]],
            )
            within_choices.append([tuple(src[p] for p in pi) for pi in perms])
        for combo in itertools.product(*within_choices):
            perm = tuple(itertools.chain.from_iterable(combo))
            try:
                from .curve import apply_group

                moved = apply_group(bf, gel, perm)
            except ValidationError:
                continue
            starts = []
            pos = 0
            new_slopes = []
            for i in range(tb.count):
                starts.append(pos)
                pos += len(t_blocks[i])
                new_slopes.append(
                    mobius_apply(matrix, sb.slopes[block_map[i]]))
            from .curve import BlockStructure

            cand = Multigerm(moved.branches,
                             BlockStructure(tuple(starts), tuple(new_slopes)))
            try:
                from .curve import _check_block_form

                _check_block_form(cand)
            except ValidationError:
                continue
            yield perm, cand


def _within_block_bijections(src_mults, dst_mults):
    """Index permutations of the source block matching the (sorted)
    multiplicity pattern of the destination block."""
    idx = list(range(len(src_mults)))
    seen = set()
    for pi in itertools.permutations(idx):
        if [src_mults[p] for p in pi] != dst_mults:
            continue
        if pi in seen:
            continue
        seen.add(pi)
        yield pi
