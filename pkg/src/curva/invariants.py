"""Analytic invariants: valuations, value sets, fibers, conductors.

All set and fiber decisions reduce to one linear-algebra primitive over the
infinite field Q(i): a vector gamma is a value of a finite-dimensional
generating space V iff the constraint space W(gamma) = {v in V : ord_i(v) >=
gamma_i for all i} strictly contains W(gamma + e_i) for every i.  In row
form: gamma is achieved iff for every i the coefficient functional at
(branch i, order gamma_i) is independent of the functionals at all lower
orders.  Those functional rows are shared across queries, so nested scans
run on incremental echelon states.

Generating spaces are spanned by pullbacks of monomials (and of multiples of
the branch equations), of monomial differential forms, or of the normalized
forms w = phi*(omega)/(t x') defining the Lambda_G ideal.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache
from typing import Optional

from .errors import (
    DegreeInstabilityError,
    GuardError,
    PrecisionError,
    ValidationError,
)
from .kernel import (
    INF,
    BiPoly,
    Echelon,
    ONE,
    Scalar,
    Series,
    ZERO,
    charpoly_mult_matrix,
)
from .kernel.linalg import scalar_column_to_int, solve
from .curve import Branch, Multigerm, monomialize_reparam, tangent_slope

GAMMA = "Gamma"
LAMBDA = "Lambda"
LAMBDA_G = "LambdaG"
JACOBIAN = "JacobianValues"
BRANCH_SEMIGROUP = "BranchSemigroup"
M2_CONDUCTOR = "M2Conductor"

KINDS = (GAMMA, LAMBDA, LAMBDA_G, JACOBIAN)


# -- per-branch computations ----------------------------------------------------


def _oriented(b: Branch):
    """Orient a branch so the first component has the minimal order.

    Returns (comp, other, swapped) as Series with comp of order n.
    """
    n = b.n
    if not b.x.is_known_zero() and b.x.ord_lb() == n:
        return b.x, b.y, False
    return b.y, b.x, True


def branch_semigroup_orders(b: Branch, window: int):
    """Orders < window achievable by pullbacks of polynomials on one branch."""
    n = b.n
    x = b.x.truncate(window + 1)
    y = b.y.truncate(window + 1)
    if min(x.trunc, y.trunc) < window:
        raise PrecisionError(
            "branch trunc too small for the requested semigroup window",
            required=window,
        )
    oy = y.ord_lb() if not y.is_known_zero() else window
    ox = x.ord_lb() if not x.is_known_zero() else window
    cols = []
    for a in range(window // max(ox, 1) + 2):
        for bb in range(window // max(oy, 1) + 2):
            if a * ox + bb * oy > window:
                continue
            s = BiPoly.monomial(a, bb).pullback(x, y)
            cols.append(scalar_column_to_int(
                [s.terms.get(l, ZERO) for l in range(window)]))
    ech = Echelon(len(cols))
    achieved = []
    for l in range(window):
        row = []
        for col in cols:
            row.append(col[2 * l])
            row.append(col[2 * l + 1])
        if ech.add(row):
            achieved.append(l)
    return achieved


def branch_mu(b: Branch) -> int:
    """Conductor of the branch value semigroup (= the Milnor number).

    Computed on the zero-extended polynomial representative, then validated:
    the input trunc must reach the branch determinacy order, otherwise the
    jet would not pin the semigroup and a PrecisionError is raised.
    """
    n = b.n
    if n == 1:
        return 0
    T = b.trunc()
    window = T + n + 4
    for _ in range(4):
        ext = Branch(b.x.extend_exact(window + 1),
                     b.y.extend_exact(window + 1))
        sset = set(branch_semigroup_orders(ext, window))
        run = 0
        for l in range(window):
            run = run + 1 if l in sset else 0
            if run >= n:
                conductor = l - run + 1
                while conductor > 0 and conductor - 1 in sset:
                    conductor -= 1
                d_branch = conductor + 2 if n <= 2 else conductor
                if T < d_branch:
                    raise PrecisionError(
                        f"branch trunc {T} below its determinacy order "
                        f"{d_branch}",
                        required=d_branch,
                    )
                return conductor
        window *= 2
    raise GuardError("branch semigroup conductor not found")


def implicitize(b: Branch) -> BiPoly:
    """Irreducible equation f with f(x(t), y(t)) = 0, via the multiplication
    matrix on Q(i)[t]/(t^n - X/lead) after a private monomializing reparam."""
    comp, other, swapped = _oriented(b)
    n = b.n
    if other.is_known_zero():
        f = BiPoly.Y()
        return _unswap(f, swapped).primitive()
    if set(comp.terms) != {n}:
        rho = monomialize_reparam(comp, n)
        lead = comp.terms[n]
        other = other.compose(rho)
        comp = Series({n: lead}, comp.trunc)
    f = charpoly_mult_matrix(other, n, comp.terms[n], other.trunc - 1)
    return _unswap(f, swapped).primitive()


def _unswap(f: BiPoly, swapped: bool) -> BiPoly:
    if not swapped:
        return f
    return BiPoly({(b, a): c for (a, b), c in f.terms.items()})


# -- curve context ----------------------------------------------------------------


@dataclass
class CurveContext:
    mg: Multigerm
    work: Multigerm  # zero-extended d-jet representative
    mus: tuple
    equations: tuple
    inter: tuple  # inter[i][j] = nu_i(f_j), 0 on the diagonal
    kappa: tuple
    dbounds: tuple
    full_equation: BiPoly


@lru_cache(maxsize=128)
def context(mg: Multigerm) -> CurveContext:
    r = mg.r
    mus = tuple(branch_mu(b) for b in mg.branches)
    eqs = tuple(implicitize(b) for b in mg.branches)
    inter = [[0] * r for _ in range(r)]
    for i in range(r):
        for j in range(r):
            if i == j:
                continue
            s = eqs[j].pullback(mg.branches[i].x, mg.branches[i].y)
            if s.is_known_zero():
                raise ValidationError(
                    f"branches {i + 1} and {j + 1} have the same equation "
                    "(repeated branch)"
                )
            inter[i][j] = min(s.terms)
    for i in range(r):
        for j in range(i + 1, r):
            if inter[i][j] != inter[j][i]:
                raise GuardError(
                    f"intersection multiplicity asymmetry at ({i + 1},{j + 1})"
                )
    kap = tuple(mus[i] + sum(inter[i][j] for j in range(r) if j != i)
                for i in range(r))
    dbounds = _dbounds_from_kappa(mg, kap)
    for i, b in enumerate(mg.branches):
        if b.trunc() < dbounds[i]:
            raise PrecisionError(
                f"branch {i + 1} trunc {b.trunc()} below determinacy order "
                f"{dbounds[i]}",
                required=dbounds[i],
            )
    work_trunc = max(kap) + max(b.n for b in mg.branches) + 8
    work = Multigerm(
        tuple(
            Branch(b.x.truncate(dbounds[i]).extend_exact(work_trunc),
                   b.y.truncate(dbounds[i]).extend_exact(work_trunc))
            for i, b in enumerate(mg.branches)
        ),
        mg.blocks,
    )
    full = eqs[0]
    for f in eqs[1:]:
        full = full * f
    return CurveContext(mg, work, mus, eqs, tuple(map(tuple, inter)), kap,
                        dbounds, full)


def _dbounds_from_kappa(mg: Multigerm, kap) -> tuple:
    r = mg.r
    mults = mg.multiplicities()
    if r == 1 and mults[0] <= 2:
        return (kap[0] + 2,)
    if r == 2 and mults == (1, 1):
        s1 = tangent_slope(mg.branches[0])
        s2 = tangent_slope(mg.branches[1])
        same = (s1 is INF and s2 is INF) or (
            s1 is not INF and s2 is not INF and s1 == s2)
        if not same:
            return (kap[0] + 1, kap[1] + 1)
    return kap


def valuation(mg: Multigerm, h: BiPoly) -> tuple:
    """nu(h) = (ord of h on each branch); INF only for verified multiples of
    the branch equation."""
    ctx = context(mg)
    out = []
    for i, b in enumerate(mg.branches):
        s = h.pullback(b.x, b.y)
        if not s.is_known_zero():
            out.append(min(s.terms))
        elif h.is_zero() or h.divexact(ctx.equations[i]) is not None:
            out.append(INF)
        else:
            raise PrecisionError(
                f"pullback on branch {i + 1} vanishes to trunc {s.trunc} "
                "without divisibility by the branch equation",
                required=s.trunc + 1,
            )
    return tuple(out)


def form_valuation(mg: Multigerm, a: BiPoly, b: BiPoly) -> tuple:
    """nu of the pullback of the 1-form a dX + b dY."""
    out = []
    for i, br in enumerate(mg.branches):
        t = Series.t(br.trunc() + 1)
        s = t * (a.pullback(br.x, br.y) * br.x.derivative()
                 + b.pullback(br.x, br.y) * br.y.derivative())
        if s.is_known_zero():
            raise PrecisionError(
                f"form pullback vanishes to trunc on branch {i + 1}",
                required=s.trunc + 1,
            )
        out.append(min(s.terms))
    return tuple(out)


def intersection_mult(mg: Multigerm, i: int, j: int) -> int:
    if i == j:
        raise ValidationError("intersection_mult needs distinct branches")
    return context(mg).inter[i][j]


def kappa(mg: Multigerm) -> tuple:
    return context(mg).kappa


def determinacy_bounds(mg: Multigerm) -> tuple:
    """Closed-form determinacy orders d_i (kappa_i plus the exceptional
    corrections for r=1, n<=2 and for a transversal pair of smooth
    branches)."""
    return context(mg).dbounds


# -- generating families -----------------------------------------------------------


@dataclass
class Family:
    """A generating space with its per-(branch, order) functional rows."""

    kind: str
    r: int
    windows: tuple
    degree: int
    labels: list
    crows: dict  # (i, order) -> flat int row over generators
    offsets: tuple
    columns: list  # per-generator Scalar coefficient strings (concatenated)

    def crow(self, i: int, order: int):
        if order >= self.windows[i]:
            raise PrecisionError(
                f"window overflow: branch {i + 1} order {order} >= "
                f"{self.windows[i]}",
                required=order + 1,
            )
        return self.crows[(i, order)]

    def srow(self, i: int, order: int):
        """The same functional as ``crow`` with exact Scalar entries."""
        if order >= self.windows[i]:
            raise PrecisionError(
                f"window overflow: branch {i + 1} order {order} >= "
                f"{self.windows[i]}",
                required=order + 1,
            )
        pos = self.offsets[i] + order
        return [col[pos] for col in self.columns]

    def echelon(self) -> Echelon:
        return Echelon(len(self.labels))

    def add_constraints(self, ech: Echelon, gamma) -> Echelon:
        """Add rows forcing ord_i >= gamma_i for all i."""
        for i, g in enumerate(gamma):
            for l in range(g):
                ech.add(self.crow(i, l))
        return ech

    # -- queries ----------------------------------------------------------------

    def member(self, gamma) -> bool:
        ech = self._floor_echelon(tuple(gamma))
        return all(not ech.reduces_to_zero(self.crow(i, g))
                   for i, g in enumerate(gamma))

    def member_clamped(self, gamma, exact) -> bool:
        """Exactness required only where ``exact`` is True; elsewhere >=."""
        ech = self.add_constraints(self.echelon(), gamma)
        return all(not ech.reduces_to_zero(self.crow(i, gamma[i]))
                   for i in range(self.r) if exact[i])

    def _floor_echelon(self, gamma) -> Echelon:
        """Cached echelon of the rows below gamma (shared across the 2^r
        fiber queries of one vector)."""
        cache = getattr(self, "_floor_cache", None)
        if cache is None:
            cache = {}
            object.__setattr__(self, "_floor_cache", cache)
        key = tuple(gamma)
        if key not in cache:
            ech = self.echelon()
            for i, g in enumerate(gamma):
                for l in range(g):
                    ech.add(self.crow(i, l))
            if len(cache) > 64:
                cache.clear()
            cache[key] = ech
        return cache[key]

    def fiber_nonempty(self, J, gamma) -> bool:
        """F_J(gamma): exact on J, strictly above gamma elsewhere."""
        ech = self._floor_echelon(tuple(gamma)).clone()
        for i, g in enumerate(gamma):
            if i not in J:
                ech.add(self.crow(i, g))
        return all(not ech.reduces_to_zero(self.crow(j, gamma[j])) for j in J)

    def axis_values(self, i: int, floor, window: int):
        """Achievable ord_i values < window subject to ord_j >= floor_j."""
        ech = self.echelon()
        for j, g in enumerate(floor):
            if j != i:
                for l in range(g):
                    ech.add(self.crow(j, l))
        out = []
        for a in range(window):
            if ech.add(self.crow(i, a)):
                out.append(a)
        return out

    def conductor(self, bound) -> tuple:
        """Conductor of the value set, assuming bound_j >= conductor_j.

        Coordinate i is one past the largest a for which no element has
        ord_i = a with ord_j >= bound_j elsewhere; by inf-closure of the set
        this pins the conductor exactly.
        """
        cond = []
        for i in range(self.r):
            floor = list(bound)
            floor[i] = 0
            achieved = set(self.axis_values(i, floor, bound[i] + 1))
            worst = -1
            for a in range(bound[i] + 1):
                if a not in achieved:
                    worst = a
            if worst == bound[i]:
                raise GuardError(
                    f"conductor scan window too small in coordinate {i + 1}"
                )
            cond.append(worst + 1)
        return tuple(cond)

    def box_scan(self, bounds) -> frozenset:
        """All clamped patterns in prod [0, bounds_i] achieved by the family.

        A coordinate equal to bounds_i means ">= bounds_i"; smaller
        coordinates are exact.
        """
        out = []
        gamma = [0] * self.r

        def scan(depth: int, ech: Echelon):
            if depth == self.r:
                for i in range(self.r):
                    if gamma[i] < bounds[i] and \
                            ech.reduces_to_zero(self.crow(i, gamma[i])):
                        return
                out.append(tuple(gamma))
                return
            work = ech.clone()
            for g in range(bounds[depth] + 1):
                gamma[depth] = g
                scan(depth + 1, work)
                if g < bounds[depth]:
                    work = work.clone()
                    work.add(self.crow(depth, g))

        scan(0, self.echelon())
        return frozenset(out)

    # -- witnesses ---------------------------------------------------------------

    def witness_combo(self, constraints, functionals):
        """A generator combination v with the constraint rows annihilated and
        every functional row nonzero on v, or None."""
        rows = [_int_row_to_scalars(c) for c in constraints]
        base = [_int_row_to_scalars(f) for f in functionals]
        candidates = []
        for f in base:
            sol = solve(rows + [f], [ZERO] * len(rows) + [ONE])
            if sol is None:
                return None
            candidates.append(sol)
        # combine candidates avoiding all functional kernels
        for t in itertools.count(1):
            combo = [ZERO] * len(self.labels)
            power = 1
            for cand in candidates:
                for k, c in enumerate(cand):
                    combo[k] = combo[k] + c * Scalar(power)
                power *= t
            if all(_dot_nonzero(f, combo) for f in base):
                return combo
            if t > len(candidates) * len(base) + 2:
                raise GuardError("witness combination search exhausted")

    def constraint_rows(self, gamma, J=None):
        rows = []
        for i, g in enumerate(gamma):
            bound = g if (J is None or i in J) else g + 1
            for l in range(bound):
                rows.append(self.crow(i, l))
        return rows


def _int_row_to_scalars(row):
    return [Scalar(row[2 * i], row[2 * i + 1]) for i in range(len(row) // 2)]


def _dot_nonzero(frow, combo) -> bool:
    acc = ZERO
    for c, v in zip(frow, combo):
        if not v.is_zero():
            acc = acc + c * v
    return not acc.is_zero()


def _prune_columns(columns, labels):
    seen = {}
    keep_cols = []
    keep_labels = []
    for col, lab in zip(columns, labels):
        key = tuple((s.re, s.im) for s in col)
        if all(v == (0, 0) for v in key):
            continue
        if key in seen:
            continue
        seen[key] = lab
        keep_cols.append(col)
        keep_labels.append(lab)
    return keep_cols, keep_labels


@dataclass
class FamilySource:
    """What a family build actually needs; a full CurveContext supplies all
    fields, the reduction engine supplies only the working multigerm."""

    work: Multigerm
    inter: Optional[tuple] = None
    equations: Optional[tuple] = None
    full_equation: Optional[BiPoly] = None


def source_of(mg: Multigerm) -> FamilySource:
    ctx = context(mg)
    return FamilySource(ctx.work, ctx.inter, ctx.equations, ctx.full_equation)


def _string_ord_bound(src: FamilySource, kind: str, label, i: int) -> int:
    """Exact order of the generator string on branch i (monomial pullback
    orders never cancel), used to skip strings that vanish in the window."""
    work = src.work
    br = work.branches[i]
    big = 10**9
    ox = br.x.ord_lb() if not br.x.is_known_zero() else big
    oy = br.y.ord_lb() if not br.y.is_known_zero() else big
    tag = label[0]
    if tag == "mono":
        _, a, b = label
        return min(a * ox + b * oy, big)
    if tag == "fmul":
        _, j, a, b = label
        if i == j:
            return big
        return a * ox + b * oy + src.inter[i][j]
    if tag in ("f", "fx", "fy"):
        return 0  # conservative: jacobian strings are cheap anyway
    _, a, b = label
    base = min(a * ox + b * oy, big)
    if kind == LAMBDA:
        return base + (ox if tag == "dX" else oy)
    # LAMBDA_G
    n = br.n
    in_b2 = work.in_second_block(i)
    if not in_b2:
        return base if tag == "dX" else base + (oy - n)
    return base if tag == "dY" else base + (ox - n)


def family_labels(src: FamilySource, kind: str, degree: int, windows) -> tuple:
    """Labels of the generators whose strings are visible in the window."""
    mg = src.work
    r = mg.r
    out = []

    def visible(label) -> bool:
        return any(_string_ord_bound(src, kind, label, i) < windows[i]
                   for i in range(r))

    if kind in (GAMMA, M2_CONDUCTOR):
        mindeg = 2 if kind == M2_CONDUCTOR else 0
        for a, b in _monomials(degree, mindeg):
            if visible(("mono", a, b)):
                out.append(("mono", a, b))
        if kind == GAMMA:
            for j in range(r):
                for a, b in _monomials(degree, 0):
                    if visible(("fmul", j, a, b)):
                        out.append(("fmul", j, a, b))
    elif kind == LAMBDA:
        for part in ("dX", "dY"):
            for a, b in _monomials(degree, 0):
                if visible((part, a, b)):
                    out.append((part, a, b))
    elif kind == LAMBDA_G:
        if mg.blocks is None:
            raise ValidationError("LambdaG needs a block-form multigerm")
        from .curve import subgroup_for

        flavor = subgroup_for(mg.blocks.count)
        for a, b in _monomials(degree, 2):
            if visible(("dX", a, b)):
                out.append(("dX", a, b))
        for a, b in _monomials(degree, 0):
            if flavor == "A1" and a + b < 2:
                continue
            if flavor == "Atilde1" and not (b >= 1 or a >= 2):
                continue
            if visible(("dY", a, b)):
                out.append(("dY", a, b))
    elif kind == JACOBIAN:
        work = src.work
        big = 10**9
        base_ord = {}
        f = src.full_equation
        for tag, poly in (("f", f), ("fx", f.derivative("x")),
                          ("fy", f.derivative("y"))):
            ords = []
            for i in range(r):
                s = poly.pullback(work.branches[i].x, work.branches[i].y)
                ords.append(min(s.terms) if s.terms else big)
            base_ord[tag] = ords
        for tag in ("f", "fx", "fy"):
            for a, b in _monomials(degree, 0):
                ok = False
                for i in range(r):
                    br = work.branches[i]
                    ox = br.x.ord_lb() if not br.x.is_known_zero() else big
                    oy = br.y.ord_lb() if not br.y.is_known_zero() else big
                    if a * ox + b * oy + base_ord[tag][i] < windows[i]:
                        ok = True
                        break
                if ok:
                    out.append((tag, a, b))
    else:
        raise ValidationError(f"unknown family kind {kind!r}")
    return tuple(out)


def build_family(mg: Multigerm, kind: str, degree: int, windows=None) -> Family:
    """Assemble the generating space for a value-set kind at a degree bound."""
    if windows is None:
        windows = default_windows(mg, kind)
    return build_family_from(source_of(mg), kind, degree, windows)


def build_family_from(src: FamilySource, kind: str, degree: int,
                      windows) -> Family:
    work = src.work
    r = work.r
    columns = []
    labels = []
    slices = [_sliced(work.branches[i], windows[i]) for i in range(r)]
    wanted = family_labels(src, kind, degree, windows)

    def emit(label, per_branch):
        col = []
        for i in range(r):
            s = per_branch[i]
            if s.trunc < windows[i]:
                raise PrecisionError(
                    "family string shorter than window", required=windows[i]
                )
            col.extend(s.terms.get(l, ZERO) for l in range(windows[i]))
        columns.append(col)
        labels.append(label)

    fj_strings = {}
    if kind == GAMMA:
        for j in range(r):
            if any(label[0] == "fmul" and label[1] == j for label in wanted):
                strings = [src.equations[j].pullback(slices[i][0], slices[i][1])
                           for i in range(r)]
                strings[j] = Series({}, windows[j] + 1)
                fj_strings[j] = strings
    jac_base = {}
    if kind == JACOBIAN:
        f = src.full_equation
        for tag, poly in (("f", f), ("fx", f.derivative("x")),
                          ("fy", f.derivative("y"))):
            jac_base[tag] = [poly.pullback(slices[i][0], slices[i][1])
                             for i in range(r)]

    for label in wanted:
        tag = label[0]
        if tag == "mono":
            _, a, b = label
            emit(label, [_mono_pullback(slices[i], a, b) for i in range(r)])
        elif tag == "fmul":
            _, j, a, b = label
            emit(label,
                 [_mono_pullback(slices[i], a, b) * fj_strings[j][i]
                  if i != j else Series({}, windows[i] + 1)
                  for i in range(r)])
        elif kind == LAMBDA:
            _, a, b = label
            emit(label,
                 [_lambda_string(slices[i], tag, a, b) for i in range(r)])
        elif kind == LAMBDA_G:
            _, a, b = label
            emit(label,
                 [_lambdag_string(slices[i], work, i, tag, a, b)
                  for i in range(r)])
        else:
            _, a, b = label
            emit(label,
                 [_mono_pullback(slices[i], a, b) * jac_base[tag][i]
                  for i in range(r)])

    columns, labels = _prune_columns(columns, labels)
    offsets = []
    total = 0
    for i in range(r):
        offsets.append(total)
        total += windows[i]
    int_cols = [scalar_column_to_int(col) for col in columns]
    crows = {}
    for i in range(r):
        for l in range(windows[i]):
            pos = offsets[i] + l
            row = []
            for col in int_cols:
                row.append(col[2 * pos])
                row.append(col[2 * pos + 1])
            crows[(i, l)] = _row_content_normalize(row)
    return Family(kind, r, tuple(windows), degree, labels, crows,
                  tuple(offsets), columns)


def _row_content_normalize(row):
    from math import gcd

    g = 0
    for v in row:
        if v:
            g = gcd(g, abs(v))
            if g == 1:
                return row
    if g > 1:
        return [v // g for v in row]
    return row


def _sliced(b: Branch, window: int):
    pad = b.n + 2
    x = b.x.truncate(window + pad)
    y = b.y.truncate(window + pad)
    return (x, y)


def _monomials(degree: int, mindeg: int):
    for tot in range(mindeg, degree + 1):
        for a in range(tot, -1, -1):
            yield a, tot - a


def _mono_pullback(xy, a: int, b: int) -> Series:
    return BiPoly.monomial(a, b).pullback(xy[0], xy[1])


def _lambda_string(xy, part: str, a: int, b: int) -> Series:
    x, y = xy
    t = Series.t(min(x.trunc, y.trunc) + 1)
    base = _mono_pullback(xy, a, b)
    dcomp = x.derivative() if part == "dX" else y.derivative()
    return t * base * dcomp


def _lambdag_string(xy, work: Multigerm, i: int, part: str, a: int, b: int) -> Series:
    """String of w_i = phi*(omega)/(t * x_i') (or y_i' in the second block)
    for omega = m dX (part dX, eta2 = m) or omega = -m dY (part dY, eta1 = m)."""
    x, y = xy
    in_b2 = work.in_second_block(i)
    base = _mono_pullback(xy, a, b)
    xp = x.derivative()
    yp = y.derivative()
    if not in_b2:
        if part == "dX":
            return base
        ratio = yp.div_unit(xp) if not yp.is_known_zero() else \
            Series({}, yp.trunc + xp.trunc)
        return -(base * ratio)
    if part == "dY":
        return -base
    ratio = xp.div_unit(yp) if not xp.is_known_zero() else \
        Series({}, xp.trunc + yp.trunc)
    return base * ratio


def default_windows(mg: Multigerm, kind: str) -> tuple:
    kap = context(mg).kappa
    mults = mg.multiplicities()
    if kind == GAMMA:
        return tuple(k + 3 for k in kap)
    if kind == LAMBDA:
        return tuple(k + 3 for k in kap)
    if kind == LAMBDA_G:
        return tuple(k + n + 6 for k, n in zip(kap, mults))
    if kind == JACOBIAN:
        return tuple(2 * k + 3 for k in kap)
    if kind == M2_CONDUCTOR:
        return tuple(k + 5 for k in kap)
    raise ValidationError(f"unknown kind {kind!r}")


@lru_cache(maxsize=256)
def _stabilized(mg: Multigerm, kind: str, windows):
    kap = context(mg).kappa
    src = source_of(mg)
    if windows is None:
        windows = default_windows(mg, kind)
    degree = max(kap) + 2
    labels = family_labels(src, kind, degree, windows)
    stable = 0
    trail = [(degree, len(labels))]
    while stable < 2:
        degree += 2
        nxt = family_labels(src, kind, degree, windows)
        trail.append((degree, len(nxt)))
        if set(nxt) == set(labels):
            stable += 1
        else:
            stable = 0
        labels = nxt
        if degree > max(kap) * 4 + 40:
            raise DegreeInstabilityError(
                "generating space did not stabilize", suggested_degree=degree
            )
    fam = build_family_from(src, kind, degree, windows)
    report = {
        "kind": kind,
        "degree": degree,
        "generators": len(fam.labels),
        "stabilization": trail,
    }
    return fam, report


def stabilized_family(mg: Multigerm, kind: str, windows=None):
    """Grow the degree bound until the pruned generating set stops changing
    twice in a row.  Returns (family, report)."""
    return _stabilized(mg, kind, None if windows is None else tuple(windows))


# -- value sets ---------------------------------------------------------------------


@dataclass(frozen=True)
class ValueSet:
    kind: str
    r: int
    conductor: tuple
    box: frozenset
    degree: int

    @property
    def bounds(self) -> tuple:
        return tuple(c + 1 for c in self.conductor)

    def contains(self, gamma) -> bool:
        return tuple(min(g, b) for g, b in zip(gamma, self.bounds)) in self.box

    def validate(self):
        bounds = self.bounds
        if bounds not in self.box:
            raise GuardError("conductor corner missing from the box")
        if self.conductor not in self.box:
            raise GuardError("conductor itself is not a value")
        for i in range(self.r):
            corner = list(bounds)
            corner[i] = self.conductor[i] - 1
            if self.conductor[i] > 0 and tuple(corner) in self.box:
                raise GuardError(
                    f"conductor minimality fails in coordinate {i + 1}"
                )
        if self.kind == GAMMA:
            vecs = list(self.box)
            for u in vecs:
                for v in vecs:
                    s = tuple(min(a + b, bb)
                              for a, b, bb in zip(u, v, bounds))
                    m = tuple(min(a, b) for a, b in zip(u, v))
                    if s not in self.box or m not in self.box:
                        raise GuardError("semiring closure fails in the box")

    def to_json(self):
        return {
            "kind": self.kind,
            "r": self.r,
            "conductor": list(self.conductor),
            "box": sorted(list(v) for v in self.box),
            "degree_bound": self.degree,
        }


@dataclass(frozen=True)
class FiberWitness:
    gamma: tuple
    J: tuple
    witness: Optional[object]  # BiPoly or DiffForm or None


@dataclass(frozen=True)
class DiffForm:
    """omega = a dX + b dY, optionally constrained to Omega_G."""

    a: BiPoly
    b: BiPoly
    flavor: Optional[str] = None

    def validate(self):
        if self.flavor is None:
            return
        eta1 = -self.b
        eta2 = self.a
        if self.flavor == "A1":
            for poly in (eta1, eta2):
                if any(a + b < 2 for (a, b) in poly.terms):
                    raise ValidationError("Omega_A1 needs both parts in M^2")
        elif self.flavor == "Atilde1":
            if any(a + b < 2 for (a, b) in eta2.terms):
                raise ValidationError("Omega_Atilde1 needs eta2 in M^2")
            if any(not (b >= 1 or a >= 2) for (a, b) in eta1.terms):
                raise ValidationError("Omega_Atilde1 needs eta1 in <X^2, Y>")


def _combo_to_witness(family: Family, combo, ctx: CurveContext):
    if combo is None:
        return None
    h = BiPoly.zero()
    wa = BiPoly.zero()
    wb = BiPoly.zero()
    is_form = False
    jac = {"f": ctx.full_equation,
           "fx": ctx.full_equation.derivative("x"),
           "fy": ctx.full_equation.derivative("y")}
    for c, label in zip(combo, family.labels):
        if c.is_zero():
            continue
        tag = label[0]
        if tag == "mono":
            h = h + BiPoly.monomial(label[1], label[2], c)
        elif tag == "fmul":
            j, a, b = label[1], label[2], label[3]
            h = h + BiPoly.monomial(a, b, c) * ctx.equations[j]
        elif tag in jac:
            h = h + BiPoly.monomial(label[1], label[2], c) * jac[tag]
        elif tag in ("dX", "dY"):
            is_form = True
            mono = BiPoly.monomial(label[1], label[2], c)
            if tag == "dX":
                wa = wa + mono
            else:
                wb = wb - mono
        else:
            return None
    if is_form:
        return DiffForm(wa, wb)
    return h


def _family_covering(mg: Multigerm, kind: str, gamma):
    """The stabilized family, widened if the query exceeds its windows."""
    fam, _ = stabilized_family(mg, kind)
    if any(g + 2 > w for g, w in zip(gamma, fam.windows)):
        widened = tuple(max(w, g + 3)
                        for g, w in zip(gamma, fam.windows))
        fam, _ = stabilized_family(mg, kind, widened)
    return fam


def value_membership(mg: Multigerm, kind: str, gamma):
    """Exact membership of a finite vector, with a witness when true."""
    if any(g is INF for g in gamma):
        raise ValidationError("value_membership needs finite coordinates")
    fam = _family_covering(mg, kind, gamma)
    ok = fam.member(tuple(gamma))
    witness = None
    if ok:
        combo = fam.witness_combo(
            fam.constraint_rows(tuple(gamma), J=frozenset(range(mg.r))),
            [fam.crow(i, gamma[i]) for i in range(mg.r)],
        )
        witness = FiberWitness(tuple(gamma), tuple(range(mg.r)),
                               _combo_to_witness(fam, combo, context(mg)))
    return ok, witness


def fiber_nonempty(mg: Multigerm, kind: str, J, gamma, want_witness=True):
    if not J:
        raise ValidationError("fiber_nonempty needs a nonempty J")
    fam = _family_covering(mg, kind, gamma)
    Jset = frozenset(J)
    ok = fam.fiber_nonempty(Jset, tuple(gamma))
    witness = None
    if ok and want_witness:
        combo = fam.witness_combo(
            fam.constraint_rows(tuple(gamma), J=Jset),
            [fam.crow(j, gamma[j]) for j in sorted(Jset)],
        )
        witness = FiberWitness(tuple(gamma), tuple(sorted(Jset)),
                               _combo_to_witness(fam, combo, context(mg)))
    return ok, witness


def classify_maximal(mg: Multigerm, kind: str, gamma) -> str:
    fam = _family_covering(mg, kind, gamma)
    gamma = tuple(gamma)
    r = mg.r
    if not fam.member(gamma):
        return "not-member"
    singles = [fam.fiber_nonempty(frozenset({i}), gamma) for i in range(r)]
    if any(singles):
        return "member-not-maximal"
    if r == 1:
        return "maximal"
    proper = {}
    for size in range(2, r):
        for J in itertools.combinations(range(r), size):
            proper[J] = fam.fiber_nonempty(frozenset(J), gamma)
    if all(proper.values()) and proper:
        return "relative-maximal"
    if not any(proper.values()):
        return "absolute-maximal"
    return "maximal"


def value_set(mg: Multigerm, kind: str) -> ValueSet:
    fam, report = stabilized_family(mg, kind)
    bound = tuple(w - 2 for w in fam.windows)
    cond = fam.conductor(bound)
    size = 1
    for c in cond:
        size *= c + 2
    if size > 500_000:
        raise ValidationError(
            f"value-set box has {size} cells; use membership and fiber "
            "queries instead of full enumeration"
        )
    box = fam.box_scan(tuple(c + 1 for c in cond))
    vs = ValueSet(kind, mg.r, cond, box, fam.degree)
    vs.validate()
    return vs


def jacobian_value_set(mg: Multigerm) -> ValueSet:
    return value_set(mg, JACOBIAN)


def determinacy_bounds_definitional(mg: Multigerm) -> tuple:
    """Conductor of nu_i(M^2 within the conductor-ideal contraction), computed
    by the rank method; cross-checks the closed forms."""
    ctx = context(mg)
    fam, _ = stabilized_family(mg, M2_CONDUCTOR)
    out = []
    for i in range(mg.r):
        floor = list(ctx.kappa)
        window = fam.windows[i] - 1
        achieved = set(fam.axis_values(i, floor, window))
        worst = ctx.kappa[i] - 1
        for a in range(ctx.kappa[i], window):
            if a not in achieved:
                worst = a
        if worst == window - 1:
            raise PrecisionError("definitional d_i window too small",
                                 required=window + 2)
        out.append(worst + 1)
    return tuple(out)
