"""Command-line surface.

Subcommands: invariants, normal-form, equivalent, moduli-dim, corpus.
All documents are UTF-8 JSON; every report echoes its input and the bounds
actually used, and normal-form reports carry a replayable group log.

Exit codes: 0 success, 2 not-equivalent, 3 precision, 4 validation,
5 internal guard.
"""

from __future__ import annotations

import argparse
import json
import sys

from . import corpus as corpus_mod
from . import invariants as inv
from . import moduli as mod
from . import normalform as nform
from .errors import CurvaError, PrecisionError, ValidationError
from .jsonio import (
    multigerm_from_json,
    multigerm_to_json,
    normal_form_to_json,
)


def _load(path: str, check_primitive: bool = True):
    with open(path, "r", encoding="utf-8") as fh:
        doc = json.load(fh)
    return multigerm_from_json(doc, check_primitive=check_primitive), doc


def _emit(doc, path=None):
    text = json.dumps(doc, indent=2, sort_keys=True)
    if path:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    else:
        print(text)


def _cmd_invariants(args) -> int:
    mg, echo = _load(args.curve)
    ctx = inv.context(mg)
    report = {
        "input": echo,
        "kappa": list(ctx.kappa),
        "mu": list(ctx.mus),
        "intersection_matrix": [list(row) for row in ctx.inter],
        "determinacy_bounds": list(ctx.dbounds),
        "truncs": [b.trunc() for b in mg.branches],
        "value_sets": {},
        "stabilization": {},
    }
    kinds = args.kinds.split(",") if args.kinds else ["Gamma", "Lambda"]
    for kind in kinds:
        kind = kind.strip()
        if kind == inv.LAMBDA_G:
            from .curve import to_block_form, puiseux_block_form

            bf, _, _ = to_block_form(mg)
            pf, _ = puiseux_block_form(bf)
            vs = inv.value_set(pf, kind)
            _, rep = inv.stabilized_family(pf, kind)
        else:
            vs = inv.value_set(mg, kind)
            _, rep = inv.stabilized_family(mg, kind)
        report["value_sets"][kind] = vs.to_json()
        report["stabilization"][kind] = rep
    _emit(report, args.out)
    return 0


def _cmd_normal_form(args) -> int:
    mg, echo = _load(args.curve)
    nf = nform.full_normal_form(mg)
    replayed = nform.replay_log(mg, nf.group_log)
    replay_ok = all(
        rb.x.truncate(nb.x.trunc).terms == nb.x.terms
        and rb.y.truncate(nb.y.trunc).terms == nb.y.terms
        for rb, nb in zip(replayed.branches, nf.psi.branches)
    )
    report = {"input": echo, "normal_form": normal_form_to_json(nf),
              "replay_consistent": replay_ok}
    _emit(report, args.out)
    return 0


def _cmd_equivalent(args) -> int:
    a, echo_a = _load(args.curve_a, check_primitive=False)
    b, echo_b = _load(args.curve_b, check_primitive=False)
    res = nform.equivalent(a, b)
    report = {"inputs": [echo_a, echo_b]}
    report.update(res.to_json())
    _emit(report, args.out)
    return 0 if res.equivalent else 2


def _cmd_moduli_dim(args) -> int:
    if args.klass == "ordinary":
        spec = mod.ClassSpec(mod.ORDINARY, r=args.r, seed=args.seed)
    elif args.klass == "nm":
        spec = mod.ClassSpec(mod.NM, r=args.r, n=args.n, m=args.m,
                             seed=args.seed)
    else:
        gens = tuple(int(g) for g in args.gens.split(","))
        spec = mod.ClassSpec(mod.IRREDUCIBLE, r=1, gens=gens, seed=args.seed)
    result = mod.moduli_dimension(spec)
    result["class"] = {"kind": spec.kind, "r": spec.r, "n": spec.n,
                       "m": spec.m, "gens": list(spec.gens),
                       "seed": spec.seed}
    _emit(result, args.out)
    return 0


def _cmd_corpus(args) -> int:
    report = {}
    for name, builder in corpus_mod.ALL_CURVES.items():
        mg = builder()
        ctx = inv.context(mg)
        entry = {
            "input": multigerm_to_json(mg),
            "kappa": list(ctx.kappa),
            "determinacy_bounds": list(ctx.dbounds),
            "Gamma": inv.value_set(mg, inv.GAMMA).to_json(),
        }
        nf = nform.full_normal_form(mg)
        entry["normal_form"] = normal_form_to_json(nf)
        report[name] = entry
    _emit(report, args.out)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="curva",
        description="Exact analytic invariants and normal forms of plane "
        "curve multigerms.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("invariants", help="value sets and conductors")
    p.add_argument("curve")
    p.add_argument("--kinds", default="Gamma,Lambda",
                   help="comma list from Gamma,Lambda,LambdaG,JacobianValues")
    p.add_argument("--out")
    p.set_defaults(func=_cmd_invariants)

    p = sub.add_parser("normal-form", help="reduce to the normal form")
    p.add_argument("curve")
    p.add_argument("--out")
    p.set_defaults(func=_cmd_normal_form)

    p = sub.add_parser("equivalent", help="decide analytic equivalence")
    p.add_argument("curve_a")
    p.add_argument("curve_b")
    p.add_argument("--out")
    p.set_defaults(func=_cmd_equivalent)

    p = sub.add_parser("moduli-dim", help="generic moduli dimension")
    p.add_argument("--class", dest="klass", required=True,
                   choices=["ordinary", "nm", "irreducible"])
    p.add_argument("--r", type=int, default=1)
    p.add_argument("--n", type=int, default=0)
    p.add_argument("--m", type=int, default=0)
    p.add_argument("--gens", default="")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")
    p.set_defaults(func=_cmd_moduli_dim)

    p = sub.add_parser("corpus", help="run the golden corpus")
    p.add_argument("--out")
    p.set_defaults(func=_cmd_corpus)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except PrecisionError as exc:
        _emit({"error": "precision", "message": str(exc),
               "required_order": exc.required})
        return exc.exit_code
    except ValidationError as exc:
        _emit({"error": "validation", "message": str(exc)})
        return exc.exit_code
    except CurvaError as exc:
        _emit({"error": "internal-guard", "message": str(exc)})
        return exc.exit_code
    except FileNotFoundError as exc:
        _emit({"error": "validation", "message": str(exc)})
        return 4
    except json.JSONDecodeError as exc:
        _emit({"error": "validation", "message": f"bad JSON: {exc}"})
        return 4


if __name__ == "__main__":
    sys.exit(main())
