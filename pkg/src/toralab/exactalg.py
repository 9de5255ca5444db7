"""Exact integer / rational linear algebra at small dimension.

Matrices are lists of lists of Python ints or Fractions.  Used wherever
floating point would be a liability: determinants of unimodular
matrices, characteristic polynomials, periodic-point enumeration, and
the lattice searches behind the weak-irreducibility cross-check.
"""

from __future__ import annotations

from fractions import Fraction

from . import intpoly


def mat_mul(a, b):
    n, k, m = len(a), len(b), len(b[0])
    return [[sum(a[i][t] * b[t][j] for t in range(k)) for j in range(m)]
            for i in range(n)]


def mat_vec(a, v):
    return [sum(r[j] * v[j] for j in range(len(v))) for r in a]


def identity(d):
    return [[1 if i == j else 0 for j in range(d)] for i in range(d)]


def mat_pow(a, k):
    d = len(a)
    out = identity(d)
    base = [row[:] for row in a]
    while k:
        if k & 1:
            out = mat_mul(out, base)
        base = mat_mul(base, base)
        k >>= 1
    return out


def det_bareiss(m):
    """Exact determinant of an integer matrix (fraction-free elimination)."""
    a = [[int(x) for x in row] for row in m]
    n = len(a)
    sign = 1
    prev = 1
    for k in range(n - 1):
        if a[k][k] == 0:
            for i in range(k + 1, n):
                if a[i][k] != 0:
                    a[k], a[i] = a[i], a[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
        prev = a[k][k]
    return sign * a[-1][-1]


def solve_fraction(a, b):
    """Solve a x = b exactly over Q; b may be a vector or matrix."""
    n = len(a)
    vec = not isinstance(b[0], (list, tuple))
    rhs = [[Fraction(b[i])] for i in range(n)] if vec else \
          [[Fraction(x) for x in row] for row in b]
    m = [[Fraction(a[i][j]) for j in range(n)] + rhs[i] for i in range(n)]
    cols = len(m[0])
    for k in range(n):
        piv = next((i for i in range(k, n) if m[i][k] != 0), None)
        if piv is None:
            raise ZeroDivisionError("singular matrix in exact solve")
        m[k], m[piv] = m[piv], m[k]
        inv = 1 / m[k][k]
        m[k] = [c * inv for c in m[k]]
        for i in range(n):
            if i != k and m[i][k] != 0:
                f = m[i][k]
                m[i] = [m[i][j] - f * m[k][j] for j in range(cols)]
    sol = [row[n:] for row in m]
    if vec:
        return [row[0] for row in sol]
    return sol


def inverse_fraction(a):
    return solve_fraction(a, identity(len(a)))


def inverse_unimodular(a):
    """Exact integer inverse of an integer matrix with det = +-1."""
    inv = inverse_fraction(a)
    out = []
    for row in inv:
        r = []
        for c in row:
            if c.denominator != 1:
                raise ValueError("matrix is not unimodular")
            r.append(int(c))
        out.append(r)
    return out


def charpoly(m):
    """Characteristic polynomial det(xI - M), exact, low-to-high coefficients.

    Faddeev-LeVerrier: the trace divisions are exact for integer input.
    """
    d = len(m)
    coeffs = [0] * (d + 1)
    coeffs[d] = 1
    a = identity(d)
    for k in range(1, d + 1):
        a = mat_mul(m, a)
        tr = sum(a[i][i] for i in range(d))
        if tr % k != 0:
            raise ArithmeticError("non-exact division in charpoly")
        c = -tr // k
        coeffs[d - k] = c
        for i in range(d):
            a[i][i] += c
    return coeffs


def minimal_poly_of_vector(m, v):
    """Minimal monic rational polynomial q with q(M) v = 0 (exact Krylov)."""
    d = len(m)
    krylov = [[Fraction(x) for x in v]]
    while True:
        nxt = [sum(Fraction(m[i][j]) * krylov[-1][j] for j in range(d))
               for i in range(d)]
        # solve for dependence of nxt on krylov
        k = len(krylov)
        rows = [[krylov[t][i] for t in range(k)] + [nxt[i]] for i in range(d)]
        # Gaussian elimination, consistent system => dependence found
        rank_cols = []
        r = 0
        work = [row[:] for row in rows]
        for c in range(k):
            piv = next((i for i in range(r, d) if work[i][c] != 0), None)
            if piv is None:
                continue
            work[r], work[piv] = work[piv], work[r]
            inv = 1 / work[r][c]
            work[r] = [x * inv for x in work[r]]
            for i in range(d):
                if i != r and work[i][c] != 0:
                    f = work[i][c]
                    work[i] = [work[i][j] - f * work[r][j]
                               for j in range(k + 1)]
            rank_cols.append(c)
            r += 1
        consistent = all(work[i][k] == 0 for i in range(r, d))
        if consistent:
            sol = [Fraction(0)] * k
            for rr, c in enumerate(rank_cols):
                sol[c] = work[rr][k]
            coeffs = [-s for s in sol] + [Fraction(1)]
            den = 1
            for c in coeffs:
                den = den * c.denominator // _gcd(den, c.denominator)
            return intpoly.primitive([int(c * den) for c in coeffs])
        krylov.append(nxt)
        if len(krylov) > d:
            raise ArithmeticError("Krylov sequence failed to close")


def _gcd(a, b):
    while b:
        a, b = b, a % b
    return a


# ---------------------------------------------------------------------------
# Lattice reduction (textbook LLL over the integers)
# ---------------------------------------------------------------------------

def lll_reduce(rows, delta=Fraction(3, 4)):
    """LLL-reduce integer basis rows; returns a new list of rows.

    Dimensions here are tiny (<= 12), so a recompute-everything
    Gram-Schmidt over Fractions is fast enough and simple.
    """
    b = [[int(x) for x in r] for r in rows]
    n = len(b)
    if n <= 1:
        return b

    def gram_schmidt():
        star = []
        mu = [[Fraction(0)] * n for _ in range(n)]
        norms = []
        for i in range(n):
            s = [Fraction(x) for x in b[i]]
            for j in range(i):
                if norms[j] == 0:
                    continue
                mu[i][j] = sum(Fraction(b[i][t]) * star[j][t]
                               for t in range(len(s))) / norms[j]
                s = [s[t] - mu[i][j] * star[j][t] for t in range(len(s))]
            star.append(s)
            norms.append(sum(x * x for x in s))
        return mu, norms

    k = 1
    while k < n:
        mu, norms = gram_schmidt()
        for j in range(k - 1, -1, -1):
            if abs(mu[k][j]) > Fraction(1, 2):
                r = round(mu[k][j])
                b[k] = [b[k][t] - r * b[j][t] for t in range(len(b[k]))]
                mu, norms = gram_schmidt()
        if norms[k] >= (delta - mu[k][k - 1] ** 2) * norms[k - 1]:
            k += 1
        else:
            b[k], b[k - 1] = b[k - 1], b[k]
            k = max(k - 1, 1)
    return b
