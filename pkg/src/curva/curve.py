"""Branches, multigerms, block structure, and the S x A group action.

A multigerm is an ordered tuple of primitive branch parametrizations
t -> (x(t), y(t)).  This module reduces multigerms to block form (tangent
slopes normalized to 0, infinity, 1 by a Moebius change of coordinates) and
to Puiseux block form (one component per branch made exactly monomial by a
reparametrization).

Working over Q(i) we cannot always scale a leading coefficient to 1 (that
may need an n-th root), so block forms carry their leading coefficients and
all later normalization happens through exact power relations.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Optional

from .errors import PrecisionError, ValidationError
from .kernel import (
    INF,
    BiPoly,
    ONE,
    Scalar,
    Series,
    ZERO,
    support_gcd,
)


# -- branches and multigerms ---------------------------------------------------


@dataclass(frozen=True)
class Branch:
    x: Series
    y: Series

    @property
    def n(self) -> int:
        """Multiplicity: minimum order of the two components."""
        return min(self.x.ord_lb(), self.y.ord_lb())

    def trunc(self) -> int:
        return min(self.x.trunc, self.y.trunc)

    def component(self, name: str) -> Series:
        return self.x if name == "x" else self.y

    def sort_key(self):
        return (self.n, self.x.sort_key(), self.y.sort_key())


def make_branch(x: Series, y: Series, check_primitive: bool = True) -> Branch:
    if x.is_known_zero() and y.is_known_zero():
        raise ValidationError("branch with both components zero")
    b = Branch(x, y)
    n = b.n
    if n < 1:
        raise ValidationError("branch must vanish at the origin (order >= 1)")
    if min(x.trunc, y.trunc) < n + 1:
        raise PrecisionError(
            "branch trunc must exceed the multiplicity", required=n + 1
        )
    if check_primitive:
        g = support_gcd(x, y)
        if g != 1:
            raise ValidationError(
                f"parametrization is not primitive (exponent gcd {g})"
            )
    return b


@dataclass(frozen=True)
class BlockStructure:
    """Partition of branch indices into tangent blocks with their slopes."""

    starts: tuple  # k_1=0 < k_2 < ... (0-based block start indices)
    slopes: tuple  # one ExtScalar per block

    @property
    def count(self) -> int:
        return len(self.starts)

    def block_of(self, i: int) -> int:
        blk = 0
        for b, st in enumerate(self.starts):
            if i >= st:
                blk = b
        return blk

    def members(self, blk: int, r: int):
        lo = self.starts[blk]
        hi = self.starts[blk + 1] if blk + 1 < len(self.starts) else r
        return range(lo, hi)


@dataclass(frozen=True)
class Multigerm:
    branches: tuple
    blocks: Optional[BlockStructure] = None

    @property
    def r(self) -> int:
        return len(self.branches)

    def multiplicities(self) -> tuple:
        return tuple(b.n for b in self.branches)

    def with_branch(self, i: int, b: Branch) -> "Multigerm":
        lst = list(self.branches)
        lst[i] = b
        return replace(self, branches=tuple(lst))

    def in_second_block(self, i: int) -> bool:
        return self.blocks is not None and self.blocks.count >= 2 and \
            self.blocks.block_of(i) == 1

    def designated(self, i: int) -> str:
        """The component whose terms the normal-form machinery eliminates."""
        return "x" if self.in_second_block(i) else "y"

    def min_trunc(self) -> int:
        return min(b.trunc() for b in self.branches)


def multigerm(branches, blocks=None) -> Multigerm:
    if not branches:
        raise ValidationError("multigerm needs at least one branch")
    return Multigerm(tuple(branches), blocks)


ExtScalar = object  # Scalar or INF


def tangent_slope(b: Branch):
    """Slope b_i/a_i of the tangent line, INF when the x-lead vanishes."""
    n = b.n
    a = b.x.terms.get(n, ZERO)
    bb = b.y.terms.get(n, ZERO)
    if a.is_zero():
        return INF
    return bb / a


# -- the group -------------------------------------------------------------------


@dataclass(frozen=True)
class GroupElement:
    """(rho_1, ..., rho_r, sigma) with sigma = (sigma1, sigma2) polynomials."""

    reparams: tuple
    sigma: tuple
    flavor: str = "A"

    def validate(self, r: int):
        if len(self.reparams) != r:
            raise ValidationError("reparam count does not match branch count")
        for rho in self.reparams:
            if rho.is_known_zero() or min(rho.terms) != 1:
                raise ValidationError("reparams must have order exactly 1")
        s1, s2 = self.sigma
        lin = _linear_part(s1, s2)
        det = lin[0] * lin[3] - lin[1] * lin[2]
        if det.is_zero():
            raise ValidationError("sigma has a singular linear part")
        if not s1.coeff(0, 0).is_zero() or not s2.coeff(0, 0).is_zero():
            raise ValidationError("sigma must fix the origin")
        if self.flavor in ("A1", "Atilde1"):
            for rho in self.reparams:
                if rho.coeff(1) != ONE:
                    raise ValidationError(f"{self.flavor}: reparam 1-jets must be t")
            if lin[2] != ZERO or lin[3] != ONE or lin[0] != ONE:
                raise ValidationError(f"{self.flavor}: bad sigma linear part")
            if self.flavor == "A1" and lin[1] != ZERO:
                raise ValidationError("A1: sigma 1-jet must be the identity")
        if self.flavor in ("H", "Hprime"):
            for rho in self.reparams:
                if set(rho.terms) != {1}:
                    raise ValidationError("H: reparams must be u*t")
            if len(s1.terms) != 1 or len(s2.terms) != 1 or \
                    set(s1.terms) != {(1, 0)} or set(s2.terms) != {(0, 1)}:
                raise ValidationError("H: sigma must be (a*X, d*Y)")
            if self.flavor == "Hprime" and s1.coeff(1, 0) != s2.coeff(0, 1):
                raise ValidationError("Hprime: sigma must be (a*X, a*Y)")


def _linear_part(s1: BiPoly, s2: BiPoly):
    return (s1.coeff(1, 0), s1.coeff(0, 1), s2.coeff(1, 0), s2.coeff(0, 1))


def identity_element(r: int, trunc: int, flavor: str = "A1") -> GroupElement:
    t = Series.t(trunc)
    return GroupElement(tuple(t for _ in range(r)), (BiPoly.X(), BiPoly.Y()), flavor)


def apply_group(mg: Multigerm, g: GroupElement, perm=None) -> Multigerm:
    """pi((rho_1,...,rho_r,sigma) . phi): branch i of the result is
    sigma o phi_{perm[i]} o rho_{perm[i]}^{-1}."""
    g.validate(mg.r)
    if perm is None:
        perm = tuple(range(mg.r))
    if sorted(perm) != list(range(mg.r)):
        raise ValidationError("perm is not a permutation")
    s1, s2 = g.sigma
    out = []
    for i in range(mg.r):
        src = perm[i]
        b = mg.branches[src]
        rho_inv = g.reparams[src].reparam_inverse()
        x = b.x.compose(rho_inv)
        y = b.y.compose(rho_inv)
        out.append(Branch(s1.pullback(x, y), s2.pullback(x, y)))
    return Multigerm(tuple(out), None)


def compose_elements(h: GroupElement, g: GroupElement) -> GroupElement:
    """The element acting as first g then h: h.(g.phi) = (h*g).phi."""
    reps = tuple(hr.compose(gr) for hr, gr in zip(h.reparams, g.reparams))
    h1, h2 = h.sigma
    g1, g2 = g.sigma
    return GroupElement(reps, (h1.subst(g1, g2), h2.subst(g1, g2)), "A")


def subgroup_for(s: int) -> str:
    """Working unipotent flavor by block count (the homothety factor is H for
    s<=2 and H' for s>=3)."""
    if s < 1:
        raise ValidationError("block count must be >= 1")
    return "Atilde1" if s == 1 else "A1"


def homothety_flavor(s: int) -> str:
    return "Hprime" if s >= 3 else "H"


# -- block form -------------------------------------------------------------------


def _slope_key(theta):
    if theta is INF:
        return (1, 0, 0)
    return (0, theta.re, theta.im)


def _mobius_matrix(theta_list):
    """Matrix (a, b, c, d) of T(theta) = (c + d*theta)/(a + b*theta) sending
    up to three chosen slopes to 0, infinity, 1."""
    ta = theta_list[0]
    tb = theta_list[1] if len(theta_list) >= 2 else None
    tc = theta_list[2] if len(theta_list) >= 3 else None
    if ta is INF:
        c, d = ONE, ZERO
    else:
        c, d = -ta, ONE
    if tb is None:
        a, b = (ZERO, ONE) if ta is INF else (ONE, ZERO)
    elif tb is INF:
        a, b = ONE, ZERO
    else:
        a, b = -tb, ONE
    if tc is not None:
        num = a + b * tc if tc is not INF else b
        den = c + d * tc if tc is not INF else d
        lam = num / den
        c, d = c * lam, d * lam
    if (a * d - b * c).is_zero():
        raise ValidationError("degenerate Moebius transformation")
    return a, b, c, d


def mobius_apply(matrix, theta):
    a, b, c, d = matrix
    if theta is INF:
        if b.is_zero():
            return INF
        return d / b
    den = a + b * theta
    num = c + d * theta
    if den.is_zero():
        return INF
    return num / den


def to_block_form(mg: Multigerm):
    """Reduce to Definition-style block form.

    Returns (psi, linear GroupElement, perm) with psi carrying the block
    structure.  Ordering of tied blocks and of equal-multiplicity branches is
    stable with respect to the input; the equivalence decision re-introduces
    the remaining permutation freedom explicitly.
    """
    r = mg.r
    slopes = [tangent_slope(b) for b in mg.branches]
    classes: dict = {}
    for i, th in enumerate(slopes):
        classes.setdefault(_slope_key(th), []).append(i)
    cls = []
    for key, idxs in classes.items():
        mults = sorted(mg.branches[i].n for i in idxs)
        cls.append((mults[0], mults, key, idxs))
    cls.sort(key=lambda c: (c[0], c[1], c[2]))
    ordered_slopes = [slopes[c[3][0]] for c in cls]
    matrix = _mobius_matrix(ordered_slopes)
    a, b, c, d = matrix
    sigma = (
        BiPoly({(1, 0): a, (0, 1): b}),
        BiPoly({(1, 0): c, (0, 1): d}),
    )
    trunc = mg.min_trunc()
    g = GroupElement(tuple(Series.t(trunc) for _ in range(r)), sigma, "A")
    perm = []
    starts = []
    new_slopes = []
    pos = 0
    for _, _, _, idxs in cls:
        starts.append(pos)
        members = sorted(idxs, key=lambda i: mg.branches[i].n)
        perm.extend(members)
        new_slopes.append(mobius_apply(matrix, slopes[idxs[0]]))
        pos += len(members)
    psi = apply_group(mg, g, tuple(perm))
    blocks = BlockStructure(tuple(starts), tuple(new_slopes))
    psi = replace(psi, blocks=blocks)
    _check_block_form(psi)
    return psi, g, tuple(perm)


def _check_block_form(mg: Multigerm):
    blocks = mg.blocks
    if blocks is None:
        raise ValidationError("multigerm has no block structure")
    s = blocks.count
    expected = [Scalar(0), INF, Scalar(1)]
    seen = []
    lead_mults = []
    for blk in range(s):
        members = list(blocks.members(blk, mg.r))
        ths = {(_slope_key(tangent_slope(mg.branches[i]))) for i in members}
        if len(ths) != 1:
            raise ValidationError("block contains branches with distinct slopes")
        theta = tangent_slope(mg.branches[members[0]])
        if blk < 3 and _slope_key(theta) != _slope_key(expected[blk]):
            raise ValidationError(
                f"block {blk + 1} slope must be {expected[blk]}, got {theta}"
            )
        if _slope_key(theta) in seen:
            raise ValidationError("duplicate block slopes")
        seen.append(_slope_key(theta))
        mults = [mg.branches[i].n for i in members]
        if mults != sorted(mults):
            raise ValidationError("block multiplicities must be non-decreasing")
        lead_mults.append(mults[0])
    if lead_mults != sorted(lead_mults):
        raise ValidationError("leading block multiplicities must be non-decreasing")


# -- Puiseux block form --------------------------------------------------------------


def monomialize_reparam(comp: Series, n: int) -> Series:
    """The reparametrization rho with comp(rho(t)) = lead * t^n exactly.

    comp must have order n; rho has 1-jet t, so this is a unipotent move.
    """
    lead = comp.terms[n]
    unit = comp.shift_down(n).scale(lead.inverse())  # 1 + u(t)
    T = unit.trunc
    rho = Series({1: ONE}, 2)
    for k in range(2, T + 1):
        rho_k = rho.extend_exact(k + 1)
        root = unit.compose(rho_k).unit_nth_root(n)
        err = (rho_k * root).terms.get(k, ZERO)
        if not err.is_zero():
            rho_k = rho_k + Series({k: -err}, k + 1)
        rho = rho_k
    return rho


def puiseux_block_form(mg: Multigerm, dbounds=None):
    """Reduce a block-form multigerm so the non-designated component of every
    branch is exactly its leading monomial (Proposition-style Puiseux form).

    Returns (psi, log) where log is the list of applied group elements.
    Monomialization runs first so the determinacy bounds (and everything
    downstream) are computed on sparse parametrizations.
    """
    if mg.blocks is None:
        raise ValidationError("puiseux_block_form needs a block-form multigerm")
    mono, log = _monomialize_all(mg)
    if dbounds is None:
        from .invariants import determinacy_bounds

        dbounds = determinacy_bounds(mono)
    work = max(dbounds) + max(b.n for b in mono.branches) + 4
    for i, b in enumerate(mono.branches):
        if b.trunc() < dbounds[i]:
            raise PrecisionError(
                f"branch {i + 1} trunc {b.trunc()} below determinacy order"
                f" {dbounds[i]}",
                required=dbounds[i],
            )
    # the class is determined by the d-jet, so the zero-tail representative
    # is a legitimate exact model to compute with
    branches = [
        Branch(b.x.truncate(dbounds[i]).extend_exact(work),
               b.y.truncate(dbounds[i]).extend_exact(work))
        for i, b in enumerate(mono.branches)
    ]
    psi = Multigerm(tuple(branches), mono.blocks)
    return psi, log


def monomialize_branch(mg: Multigerm, i: int):
    """Reparametrize branch i so its non-designated component is monomial.

    Returns (new multigerm, GroupElement or None if already monomial).
    """
    b = mg.branches[i]
    comp = "x" if mg.designated(i) == "y" else "y"
    series = b.component(comp)
    n = b.n
    if series.is_known_zero() or min(series.terms) != n:
        raise ValidationError(
            f"branch {i + 1}: non-designated component must have order {n}"
        )
    if set(series.terms) == {n}:
        return mg, None
    rho = monomialize_reparam(series, n)
    trunc = b.trunc()
    reps = [Series.t(trunc) for _ in range(mg.r)]
    reps[i] = rho.reparam_inverse().truncate(trunc)
    g = GroupElement(tuple(reps), (BiPoly.X(), BiPoly.Y()), "A1")
    new_x = b.x.compose(rho)
    new_y = b.y.compose(rho)
    out = mg.with_branch(i, Branch(new_x, new_y))
    return out, g


def _monomialize_all(mg: Multigerm):
    """Make every branch's non-designated component exactly monomial."""
    log = []
    out = mg
    for i in range(mg.r):
        out, g = monomialize_branch(out, i)
        if g is not None:
            log.append(g)
    return out, log
