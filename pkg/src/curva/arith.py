"""Integer-lattice and Gaussian-integer utilities.

Homothety compatibility reduces to monomial equation systems v^A = q over
the torus (C*)^m with q in Q(i)*.  Solvability over C* is a pure lattice
condition (Smith normal form); an explicit Q(i)* solution additionally needs
n-th roots in Q(i), decided by Gaussian-integer factorization.
"""

from __future__ import annotations

from math import gcd, isqrt

from .errors import GuardError
from .kernel import Scalar

TRIAL_BOUND = 1_000_000


# -- Smith normal form ------------------------------------------------------------


def smith_normal_form(A):
    """P * A * Q = D with P, Q unimodular and D diagonal.

    Returns (P, D, Q) as lists of lists; A is T x m.
    """
    T = len(A)
    m = len(A[0]) if T else 0
    D = [row[:] for row in A]
    P = [[int(i == j) for j in range(T)] for i in range(T)]
    Q = [[int(i == j) for j in range(m)] for i in range(m)]

    def row_op(i, j, c):
        D[i] = [a - c * b for a, b in zip(D[i], D[j])]
        P[i] = [a - c * b for a, b in zip(P[i], P[j])]

    def col_op(i, j, c):
        for row in D:
            row[i] -= c * row[j]
        for row in Q:
            row[i] -= c * row[j]

    def row_swap(i, j):
        D[i], D[j] = D[j], D[i]
        P[i], P[j] = P[j], P[i]

    def col_swap(i, j):
        for row in D:
            row[i], row[j] = row[j], row[i]
        for row in Q:
            row[i], row[j] = row[j], row[i]

    k = 0
    while k < min(T, m):
        # find a nonzero pivot
        piv = None
        for i in range(k, T):
            for j in range(k, m):
                if D[i][j]:
                    piv = (i, j)
                    break
            if piv:
                break
        if piv is None:
            break
        row_swap(k, piv[0])
        col_swap(k, piv[1])
        while True:
            done = True
            for i in range(k + 1, T):
                if D[i][k]:
                    c = D[i][k] // D[k][k]
                    row_op(i, k, c)
                    if D[i][k]:
                        row_swap(k, i)
                        done = False
            for j in range(k + 1, m):
                if D[k][j]:
                    c = D[k][j] // D[k][k]
                    col_op(j, k, c)
                    if D[k][j]:
                        col_swap(k, j)
                        done = False
            if done:
                break
        if D[k][k] < 0:
            D[k] = [-a for a in D[k]]
            P[k] = [-a for a in P[k]]
        k += 1
    return P, D, Q


def solve_monomial_system(rows, rhs):
    """Decide the system prod_j v_j^(rows[t][j]) = rhs[t] over (C*)^m.

    Returns (solvable, witness) where witness is a Q(i)* point or None when
    only C*-existence is certified.
    """
    T = len(rows)
    if T == 0:
        return True, []
    m = len(rows[0])
    P, D, Q = smith_normal_form(rows)
    rank = 0
    while rank < min(T, m) and D[rank][rank]:
        rank += 1
    # consistency: rows of P beyond the rank generate the left kernel of A
    transformed = []
    for i in range(T):
        q = scalar_power_product(rhs, P[i])
        transformed.append(q)
        if i >= rank and not q.is_one():
            return False, None
    witness = _try_field_witness(D, Q, transformed, rank, m)
    return True, witness


def _try_field_witness(D, Q, transformed, rank, m):
    ys = []
    for i in range(rank):
        root = gaussian_nth_root(transformed[i], D[i][i])
        if root is None:
            return None
        ys.append(root)
    ys.extend([Scalar(1)] * (m - rank))
    vs = []
    for j in range(m):
        v = Scalar(1)
        for i in range(m):
            v = v * scalar_int_power(ys[i], Q[j][i])
        vs.append(v)
    return vs


def scalar_int_power(s: Scalar, e: int) -> Scalar:
    if e >= 0:
        return s**e
    return s.inverse() ** (-e)


def scalar_power_product(values, exponents) -> Scalar:
    out = Scalar(1)
    for v, e in zip(values, exponents):
        if e:
            out = out * scalar_int_power(v, e)
    return out


# -- Gaussian integer factorization --------------------------------------------------


def _gauss_norm(z):
    return z[0] * z[0] + z[1] * z[1]


def _gauss_mul(a, b):
    return (a[0] * b[0] - a[1] * b[1], a[0] * b[1] + a[1] * b[0])


def _gauss_divmod(a, b):
    nb = _gauss_norm(b)
    num = _gauss_mul(a, (b[0], -b[1]))
    q = (_round_div(num[0], nb), _round_div(num[1], nb))
    r = (a[0] - (q[0] * b[0] - q[1] * b[1]), a[1] - (q[0] * b[1] + q[1] * b[0]))
    return q, r


def _round_div(a, b):
    q, r = divmod(a, b)
    if 2 * r >= b:
        q += 1
    return q


def _gauss_gcd(a, b):
    while b != (0, 0):
        _, r = _gauss_divmod(a, b)
        a, b = b, r
    return a


def _int_factor(n: int) -> dict:
    out = {}
    n = abs(n)
    for p in (2, 3, 5):
        while n % p == 0:
            out[p] = out.get(p, 0) + 1
            n //= p
    f = 7
    wheel = (4, 2, 4, 2, 4, 6, 2, 6)
    idx = 0
    while f * f <= n and f <= TRIAL_BOUND:
        while n % f == 0:
            out[f] = out.get(f, 0) + 1
            n //= f
        f += wheel[idx]
        idx = (idx + 1) % 8
    if n > 1:
        if f * f > n:
            out[n] = out.get(n, 0) + 1
        else:
            raise GuardError(f"integer factorization beyond trial bound: {n}")
    return out


def _sqrt_minus_one_mod(p: int) -> int:
    # p = 2 handled by caller; p = 1 mod 4 here
    for a in range(2, p):
        m = pow(a, (p - 1) // 4, p)
        if (m * m + 1) % p == 0:
            return m
        if a > 10_000:
            raise GuardError(f"sqrt(-1) search too slow mod {p}")
    raise GuardError(f"no sqrt(-1) mod {p}")


def _canonical_prime(z):
    """Pick the canonical associate: re odd and positive, im even (primary),
    falling back to lexicographic max for ramified 1+i."""
    best = None
    cur = z
    for _ in range(4):
        cur = _gauss_mul(cur, (0, 1))
        a, b = cur
        if a > 0 and a % 2 == 1 and b % 2 == 0:
            return cur
        if best is None or (a, b) > best:
            best = (a, b)
    return best


def gaussian_factor(z) -> tuple:
    """Factor a nonzero Gaussian integer into (unit_power, {prime: exp}).

    unit_power s means z = i^s * prod(prime^exp); primes are canonical
    associates.
    """
    if z == (0, 0):
        raise ZeroDivisionError("factor of zero")
    factors = {}
    rational = _int_factor(_gauss_norm(z))
    work = z
    for p, _ in sorted(rational.items()):
        if p == 2:
            pi = (1, 1)
            pi = _canonical_prime(pi)
            while True:
                q, r = _gauss_divmod(work, pi)
                if r != (0, 0):
                    break
                work = q
                factors[pi] = factors.get(pi, 0) + 1
        elif p % 4 == 3:
            pi = (p, 0)
            while True:
                q, r = _gauss_divmod(work, pi)
                if r != (0, 0):
                    break
                work = q
                factors[pi] = factors.get(pi, 0) + 1
        else:
            msqrt = _sqrt_minus_one_mod(p)
            for pi0 in (_gauss_gcd((p, 0), (msqrt, 1)),
                        _gauss_gcd((p, 0), (msqrt, -1))):
                if _gauss_norm(pi0) == 1:
                    continue
                pi = _canonical_prime(pi0)
                while True:
                    q, r = _gauss_divmod(work, pi)
                    if r != (0, 0):
                        break
                    work = q
                    factors[pi] = factors.get(pi, 0) + 1
    if _gauss_norm(work) != 1:
        raise GuardError(f"gaussian factorization left a non-unit {work}")
    unit = {(1, 0): 0, (0, 1): 1, (-1, 0): 2, (0, -1): 3}[work]
    return unit, factors


def gaussian_nth_root(q: Scalar, k: int):
    """The k-th root of q in Q(i) if one exists, else None."""
    if k < 0:
        root = gaussian_nth_root(q, -k)
        return None if root is None else root.inverse()
    if k == 0:
        return Scalar(1) if q.is_one() else None
    if k == 1:
        return q
    if q.is_zero():
        return None
    den = q.re.denominator
    den = den * q.im.denominator // gcd(den, q.im.denominator)
    znum = (int(q.re * den), int(q.im * den))
    zden = (den, 0)
    try:
        unum, fnum = gaussian_factor(znum)
        uden, fden = gaussian_factor(zden)
    except GuardError:
        return None
    merged = dict(fnum)
    for p, e in fden.items():
        merged[p] = merged.get(p, 0) - e
    unit = (unum - uden) % 4
    root = Scalar(1)
    for p, e in merged.items():
        if e % k:
            return None
        root = root * scalar_int_power(Scalar(p[0], p[1]), e // k)
    g = gcd(k, 4)
    if unit % g:
        return None
    # solve k*w = unit (mod 4)
    for w in range(4):
        if (k * w) % 4 == unit % 4:
            root = root * (Scalar(0, 1) ** w)
            break
    return root


def integer_nth_root_exact(n: int, k: int):
    if n < 0:
        return None
    lo, hi = 0, max(2, isqrt(n) + 2)
    while lo < hi:
        mid = (lo + hi) // 2
        if mid**k < n:
            lo = mid + 1
        else:
            hi = mid
    return lo if lo**k == n else None
