"""Exact linear algebra and polynomial arithmetic over the rationals.

Matrices are lists of rows of :class:`fractions.Fraction`; polynomials are
ascending coefficient lists. Dimensions in this package are tiny (the scale
matrix is at most 10x10), so the code favors clarity over asymptotics.
"""

from __future__ import annotations

from fractions import Fraction
from math import factorial, isqrt

ZERO = Fraction(0)
ONE = Fraction(1)


def as_fraction(value) -> Fraction:
    """Coerce ints, Fractions, and 'p/q' strings; floats are taken bit-exactly."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise TypeError("booleans are not valid rational scalars")
    if isinstance(value, (int, str)):
        return Fraction(value)
    if isinstance(value, float):
        return Fraction(value)
    raise TypeError(f"cannot interpret {value!r} as a rational scalar")


# ---------------------------------------------------------------------------
# matrices

def identity(n):
    return [[ONE if i == j else ZERO for j in range(n)] for i in range(n)]


def zeros(rows, cols):
    return [[ZERO] * cols for _ in range(rows)]


def transpose(a):
    return [list(col) for col in zip(*a)] if a else []


def mat_add(a, b):
    return [[x + y for x, y in zip(ra, rb)] for ra, rb in zip(a, b)]


def mat_sub(a, b):
    return [[x - y for x, y in zip(ra, rb)] for ra, rb in zip(a, b)]


def mat_scale(a, s):
    return [[s * x for x in row] for row in a]


def mat_mul(a, b):
    bt = transpose(b)
    return [[sum(x * y for x, y in zip(row, col)) for col in bt] for row in a]


def mat_pow(a, k):
    n = len(a)
    out = identity(n)
    base = [row[:] for row in a]
    e = k
    while e > 0:
        if e & 1:
            out = mat_mul(out, base)
        e >>= 1
        if e:
            base = mat_mul(base, base)
    return out


def vec_mat(v, a):
    """Row vector times matrix."""
    if not a:
        return []
    cols = len(a[0])
    return [sum(v[i] * a[i][j] for i in range(len(a))) for j in range(cols)]


def mat_vec(a, v):
    return [sum(x * y for x, y in zip(row, v)) for row in a]


def trace(a):
    return sum(a[i][i] for i in range(len(a)))


def rref(a):
    """Reduced row echelon form; returns (rows, pivot_columns)."""
    m = [row[:] for row in a]
    if not m:
        return m, []
    rows, cols = len(m), len(m[0])
    pivots = []
    r = 0
    for c in range(cols):
        pivot_row = None
        for i in range(r, rows):
            if m[i][c] != 0:
                pivot_row = i
                break
        if pivot_row is None:
            continue
        m[r], m[pivot_row] = m[pivot_row], m[r]
        inv = ONE / m[r][c]
        m[r] = [x * inv for x in m[r]]
        for i in range(rows):
            if i != r and m[i][c] != 0:
                f = m[i][c]
                m[i] = [x - f * y for x, y in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == rows:
            break
    return m, pivots


def rank(a):
    return len(rref(a)[1])


def nullspace(a):
    """Canonical basis of {x : a x = 0} read off the RREF free columns."""
    if not a:
        return []
    cols = len(a[0])
    red, pivots = rref(a)
    free = [c for c in range(cols) if c not in pivots]
    basis = []
    for fc in free:
        vec = [ZERO] * cols
        vec[fc] = ONE
        for r, pc in enumerate(pivots):
            vec[pc] = -red[r][fc]
        basis.append(vec)
    return basis


def left_nullspace(a):
    """Basis of row vectors v with v a = 0."""
    return nullspace(transpose(a))


def solve(a, b):
    """One exact solution of a x = b (free variables 0), or None if inconsistent."""
    if not a:
        return [] if all(x == 0 for x in b) else None
    cols = len(a[0])
    aug = [row[:] + [bv] for row, bv in zip(a, b)]
    red, pivots = rref(aug)
    if cols in pivots:
        return None
    x = [ZERO] * cols
    for r, pc in enumerate(pivots):
        x[pc] = red[r][cols]
    return x


def det(a):
    """Exact determinant by fraction-free-ish Gaussian elimination."""
    n = len(a)
    if n == 0:
        return ONE
    m = [row[:] for row in a]
    out = ONE
    for c in range(n):
        pivot_row = None
        for i in range(c, n):
            if m[i][c] != 0:
                pivot_row = i
                break
        if pivot_row is None:
            return ZERO
        if pivot_row != c:
            m[c], m[pivot_row] = m[pivot_row], m[c]
            out = -out
        out *= m[c][c]
        inv = ONE / m[c][c]
        for i in range(c + 1, n):
            if m[i][c] != 0:
                f = m[i][c] * inv
                m[i] = [x - f * y for x, y in zip(m[i], m[c])]
    return out


def inverse(a):
    """Exact inverse; raises ValueError when singular."""
    n = len(a)
    aug = [row[:] + ident_row[:] for row, ident_row in zip(a, identity(n))]
    red, pivots = rref(aug)
    if pivots != list(range(n)):
        raise ValueError("matrix is singular")
    return [row[n:] for row in red]


def charpoly(a):
    """Monic characteristic polynomial det(xI - A), ascending coefficients.

    Faddeev-LeVerrier recursion; exact over the rationals.
    """
    n = len(a)
    coeffs = [ZERO] * (n + 1)
    coeffs[n] = ONE
    mk = identity(n)
    for k in range(1, n + 1):
        am = mat_mul(a, mk)
        ck = -trace(am) / k
        coeffs[n - k] = ck
        if k < n:
            mk = [[am[i][j] + (ck if i == j else ZERO) for j in range(n)] for i in range(n)]
    return coeffs


# ---------------------------------------------------------------------------
# polynomials (ascending coefficient lists)

def poly_trim(p):
    q = list(p)
    while q and q[-1] == 0:
        q.pop()
    return q


def poly_degree(p):
    q = poly_trim(p)
    return len(q) - 1


def poly_is_zero(p):
    return not poly_trim(p)


def poly_add(p, q):
    n = max(len(p), len(q))
    return poly_trim([(p[i] if i < len(p) else ZERO) + (q[i] if i < len(q) else ZERO) for i in range(n)])


def poly_sub(p, q):
    n = max(len(p), len(q))
    return poly_trim([(p[i] if i < len(p) else ZERO) - (q[i] if i < len(q) else ZERO) for i in range(n)])


def poly_scale(p, s):
    return poly_trim([s * x for x in p])


def poly_mul(p, q):
    p, q = poly_trim(p), poly_trim(q)
    if not p or not q:
        return []
    out = [ZERO] * (len(p) + len(q) - 1)
    for i, x in enumerate(p):
        if x == 0:
            continue
        for j, y in enumerate(q):
            out[i + j] += x * y
    return poly_trim(out)


def poly_divmod(p, q):
    p, q = poly_trim(p), poly_trim(q)
    if not q:
        raise ZeroDivisionError("polynomial division by zero")
    quot = [ZERO] * max(len(p) - len(q) + 1, 1)
    rem = list(p)
    dq = len(q) - 1
    lead = q[-1]
    while len(rem) - 1 >= dq and rem:
        shift = len(rem) - 1 - dq
        f = rem[-1] / lead
        quot[shift] = f
        for i, y in enumerate(q):
            rem[shift + i] -= f * y
        rem = poly_trim(rem)
        if not rem:
            break
    return poly_trim(quot), poly_trim(rem)


def poly_monic(p):
    p = poly_trim(p)
    if not p:
        return []
    inv = ONE / p[-1]
    return [x * inv for x in p]


def poly_gcd(p, q):
    """Monic gcd by the Euclidean algorithm."""
    p, q = poly_trim(p), poly_trim(q)
    while q:
        _, r = poly_divmod(p, q)
        p, q = q, r
    if not p:
        return []
    return poly_monic(p)


def poly_derivative(p):
    return poly_trim([i * x for i, x in enumerate(p)][1:])


def poly_eval(p, x):
    out = ZERO if isinstance(x, (int, Fraction)) else 0.0
    for c in reversed(list(p)):
        out = out * x + c
    return out


def squarefree_factors(p):
    """Yun's algorithm: list of (factor, multiplicity), factors monic."""
    p = poly_monic(p)
    if poly_degree(p) < 1:
        return []
    dp = poly_derivative(p)
    a = poly_gcd(p, dp)
    b, _ = poly_divmod(p, a)
    c, _ = poly_divmod(dp, a)
    d = poly_sub(c, poly_derivative(b))
    out = []
    i = 1
    while poly_degree(b) >= 1:
        a = poly_gcd(b, d)
        if poly_degree(a) >= 1:
            out.append((poly_monic(a), i))
        b, _ = poly_divmod(b, a)
        c, _ = poly_divmod(d, a)
        d = poly_sub(c, poly_derivative(b))
        i += 1
    return out


def _divisors(n):
    n = abs(n)
    out = set()
    for d in range(1, isqrt(n) + 1):
        if n % d == 0:
            out.add(d)
            out.add(n // d)
    return out


def rational_roots(p):
    """Split a rational polynomial into rational linear factors and leftovers.

    Returns (roots, leftovers): ``roots`` is a list of (Fraction root,
    multiplicity); ``leftovers`` a list of (monic rational polynomial,
    multiplicity) with no rational roots. Uses the rational root theorem per
    squarefree factor, so the split is exact.
    """
    roots = []
    leftovers = []
    for factor, mult in squarefree_factors(p):
        # clear denominators to an integer polynomial
        denom_lcm = 1
        for c in factor:
            denom_lcm = denom_lcm * c.denominator // _gcd_int(denom_lcm, c.denominator)
        ints = [int(c * denom_lcm) for c in factor]
        g = list(factor)
        while g and g[0] == 0:
            g = g[1:]
            roots.append((ZERO, mult))
        if poly_degree(g) < 1:
            continue
        while ints and ints[0] == 0:
            ints = ints[1:]
        candidates = set()
        if ints:
            for a in _divisors(ints[0]):
                for b in _divisors(ints[-1]):
                    candidates.add(Fraction(a, b))
                    candidates.add(Fraction(-a, b))
        for cand in sorted(candidates):
            if poly_degree(g) < 1:
                break
            if poly_eval(g, cand) == 0:
                g, rem = poly_divmod(g, [-cand, ONE])
                assert not rem
                roots.append((cand, mult))
        if poly_degree(g) >= 1:
            leftovers.append((poly_monic(g), mult))
    return roots, leftovers


def _gcd_int(a, b):
    while b:
        a, b = b, a % b
    return a


def superfactorial(m):
    """Product 1! 2! ... m! (empty product for m <= 0)."""
    out = 1
    for t in range(1, m + 1):
        out *= factorial(t)
    return out
