"""JSON wire formats.

Multigerms: {"branches": [{"x": [[e, re, im], ...], "y": [...], "trunc": T}]}
with re/im in the exact "p/q" string form.  Branch indices in emitted
reports are 1-based; slopes and block data are derived, never input.
"""

from __future__ import annotations

from .errors import ValidationError
from .kernel import BiPoly, Scalar, Series, parse_scalar
from .curve import Branch, GroupElement, Multigerm, make_branch, multigerm
from .normalform import LogStep, NormalFormResult


def series_to_json(s: Series) -> list:
    return [[e, _fr(c.re), _fr(c.im)] for e, c in sorted(s.terms.items())]


def _fr(q) -> str:
    return f"{q.numerator}/{q.denominator}"


def series_from_json(data, trunc: int) -> Series:
    if not isinstance(data, list):
        raise ValidationError("series must be a list of [exp, re, im]")
    terms = {}
    for item in data:
        if not isinstance(item, list) or len(item) not in (2, 3):
            raise ValidationError(f"bad series term {item!r}")
        e = item[0]
        if not isinstance(e, int) or e < 0:
            raise ValidationError(f"bad exponent {e!r}")
        re = parse_scalar(item[1]).re
        im = parse_scalar(item[2]).re if len(item) == 3 else 0
        terms[e] = Scalar(re, im)
    return Series(terms, trunc)


def branch_to_json(b: Branch) -> dict:
    return {
        "x": series_to_json(b.x),
        "y": series_to_json(b.y),
        "trunc": b.trunc(),
    }


def multigerm_to_json(mg: Multigerm) -> dict:
    return {"branches": [branch_to_json(b) for b in mg.branches]}


def multigerm_from_json(doc, check_primitive: bool = True) -> Multigerm:
    if not isinstance(doc, dict) or "branches" not in doc:
        raise ValidationError("multigerm document needs a 'branches' list")
    branches = []
    for raw in doc["branches"]:
        if not isinstance(raw, dict):
            raise ValidationError("each branch must be an object")
        trunc = raw.get("trunc")
        if not isinstance(trunc, int) or trunc < 2:
            raise ValidationError("branch needs an integer trunc >= 2")
        x = series_from_json(raw.get("x", []), trunc)
        y = series_from_json(raw.get("y", []), trunc)
        branches.append(make_branch(x, y, check_primitive=check_primitive))
    return multigerm(branches)


def bipoly_to_json(p: BiPoly) -> list:
    return [[a, b, _fr(c.re), _fr(c.im)]
            for (a, b), c in sorted(p.terms.items())]


def bipoly_from_json(data) -> BiPoly:
    terms = {}
    for a, b, re, im in data:
        terms[(a, b)] = Scalar(parse_scalar(re).re, parse_scalar(im).re)
    return BiPoly(terms)


def group_element_to_json(g: GroupElement) -> dict:
    return {
        "flavor": g.flavor,
        "reparams": [{"terms": series_to_json(rho), "trunc": rho.trunc}
                     for rho in g.reparams],
        "sigma": [bipoly_to_json(g.sigma[0]), bipoly_to_json(g.sigma[1])],
    }


def group_element_from_json(doc) -> GroupElement:
    reps = tuple(series_from_json(r["terms"], r["trunc"])
                 for r in doc["reparams"])
    sigma = (bipoly_from_json(doc["sigma"][0]),
             bipoly_from_json(doc["sigma"][1]))
    return GroupElement(reps, sigma, doc.get("flavor", "A"))


def log_to_json(log) -> list:
    out = []
    for step in log:
        out.append({
            "note": step.note,
            "element": None if step.element is None
            else group_element_to_json(step.element),
            "perm": None if step.perm is None
            else [p + 1 for p in step.perm],
        })
    return out


def log_from_json(data) -> list:
    out = []
    for raw in data:
        out.append(LogStep(
            raw.get("note", ""),
            None if raw.get("element") is None
            else group_element_from_json(raw["element"]),
            None if raw.get("perm") is None
            else tuple(p - 1 for p in raw["perm"]),
        ))
    return out


def normal_form_to_json(nf: NormalFormResult) -> dict:
    return {
        "psi": multigerm_to_json(nf.psi),
        "Lk_table": {str(k): [i + 1 for i in L]
                     for k, L in nf.Lk_table.items()},
        "parameter_vector": [[i + 1, j, _fr(v.re), _fr(v.im)]
                             for (i, j, v) in nf.parameter_vector],
        "k0": nf.k0,
        "normalized_index": None if nf.normalized_index is None
        else [nf.normalized_index[0] + 1, nf.normalized_index[1]],
        "certificate": nf.certificate,
        "group_log": log_to_json(nf.group_log),
        "reports": nf.reports,
    }
