"""The golden corpus: small named curves exercising every determinacy row
and both unipotent flavors, plus seeded random group elements for the
invariance and uniqueness suites."""

from __future__ import annotations

import random
from fractions import Fraction

from .kernel import BiPoly, ONE, Scalar, Series, ZERO
from .curve import GroupElement, Multigerm, make_branch, multigerm


def _series(d: dict, trunc: int) -> Series:
    return Series({e: c if isinstance(c, Scalar) else Scalar(c)
                   for e, c in d.items()}, trunc)


def smooth_line(trunc: int = 8) -> Multigerm:
    return multigerm([make_branch(_series({1: 1}, trunc),
                                  _series({}, trunc))])


def cusp(trunc: int = 8) -> Multigerm:
    return multigerm([make_branch(_series({2: 1}, trunc),
                                  _series({3: 1}, trunc))])


def cusp25(trunc: int = 10) -> Multigerm:
    return multigerm([make_branch(_series({2: 1}, trunc),
                                  _series({5: 1}, trunc))])


def cusp34(trunc: int = 12) -> Multigerm:
    return multigerm([make_branch(_series({3: 1}, trunc),
                                  _series({4: 1}, trunc))])


def node(trunc: int = 6) -> Multigerm:
    return multigerm([
        make_branch(_series({1: 1}, trunc), _series({}, trunc)),
        make_branch(_series({}, trunc), _series({1: 1}, trunc)),
    ])


def tangent_cusp_pair(trunc: int = 12) -> Multigerm:
    """Two cuspidal branches sharing their tangent (contact order 7)."""
    return multigerm([
        make_branch(_series({2: 1}, trunc), _series({3: 1}, trunc)),
        make_branch(_series({2: 1}, trunc),
                    _series({3: -1, 4: 1}, trunc)),
    ])


def ordinary_triple(trunc: int = 6) -> Multigerm:
    return multigerm([
        make_branch(_series({1: 1}, trunc), _series({}, trunc)),
        make_branch(_series({}, trunc), _series({1: 1}, trunc)),
        make_branch(_series({1: 1}, trunc), _series({1: 1}, trunc)),
    ])


def zariski_467(trunc: int = 18) -> Multigerm:
    return multigerm([make_branch(_series({4: 1}, trunc),
                                  _series({6: 1, 7: 1}, trunc))])


DETERMINACY_CORPUS = {
    "smooth": smooth_line,
    "cusp": cusp,
    "cusp34": cusp34,
    "node": node,
    "tangent_cusps": tangent_cusp_pair,
    "ordinary3": ordinary_triple,
}

INVARIANCE_CORPUS = {
    "cusp": cusp,
    "cusp25": cusp25,
    "node": node,
    "tangent_cusps": tangent_cusp_pair,
    "zariski467": zariski_467,
}

ALL_CURVES = dict(DETERMINACY_CORPUS)
ALL_CURVES.update(INVARIANCE_CORPUS)


def _small(rnd: random.Random) -> Scalar:
    return Scalar(Fraction(rnd.randint(-9, 9), rnd.randint(1, 4)))


def _small_nonzero(rnd: random.Random) -> Scalar:
    while True:
        s = _small(rnd)
        if not s.is_zero():
            return s


def random_group_element(r: int, trunc: int, seed: int,
                         flavor: str = "A") -> GroupElement:
    """A seeded random element of the requested subgroup."""
    rnd = random.Random(seed)
    reparams = []
    for _ in range(r):
        terms = {}
        if flavor in ("A1", "Atilde1"):
            terms[1] = ONE
        elif flavor in ("H", "Hprime"):
            terms[1] = _small_nonzero(rnd)
        else:
            terms[1] = _small_nonzero(rnd)
        if flavor not in ("H", "Hprime"):
            for e in (2, 3, 4):
                c = _small(rnd)
                if not c.is_zero():
                    terms[e] = c
        reparams.append(Series(terms, trunc))
    if flavor == "A1":
        lin = {(1, 0): ONE}, {(0, 1): ONE}
    elif flavor == "Atilde1":
        lin = {(1, 0): ONE, (0, 1): _small(rnd)}, {(0, 1): ONE}
    elif flavor == "H":
        return GroupElement(
            tuple(reparams),
            (BiPoly.monomial(1, 0, _small_nonzero(rnd)),
             BiPoly.monomial(0, 1, _small_nonzero(rnd))),
            "H",
        )
    elif flavor == "Hprime":
        a = _small_nonzero(rnd)
        return GroupElement(
            tuple(reparams),
            (BiPoly.monomial(1, 0, a), BiPoly.monomial(0, 1, a)),
            "Hprime",
        )
    else:
        while True:
            a, b = _small(rnd), _small(rnd)
            c, d = _small(rnd), _small(rnd)
            if not (a * d - b * c).is_zero():
                break
        lin = {(1, 0): a, (0, 1): b}, {(1, 0): c, (0, 1): d}
    s1 = dict(lin[0])
    s2 = dict(lin[1])
    for store in (s1, s2):
        for key in ((2, 0), (1, 1), (0, 2)):
            val = _small(rnd)
            if not val.is_zero():
                store[key] = store.get(key, ZERO) + val
    return GroupElement(tuple(reparams), (BiPoly(s1), BiPoly(s2)), flavor)


def random_permutation(r: int, seed: int) -> tuple:
    rnd = random.Random(seed)
    perm = list(range(r))
    rnd.shuffle(perm)
    return tuple(perm)
