"""Exact dense linear algebra on lists of lists.

Entries may be ints, Fractions, GaussianRationals or (for the ring
operations only) MultiPolys.
"""

from __future__ import annotations

from fractions import Fraction

from .poly_core import GaussianRational, conj


def identity(n: int, one=1, zero=0) -> list:
    return [[one if i == j else zero for j in range(n)] for i in range(n)]


def zeros(rows: int, cols: int, zero=0) -> list:
    return [[zero] * cols for _ in range(rows)]


def transpose(a: list) -> list:
    return [list(col) for col in zip(*a)]


def adjoint(a: list) -> list:
    """Conjugate transpose."""
    return [[_conj(x) for x in col] for col in zip(*a)]


def _conj(x):
    if hasattr(x, "conjugate") and not isinstance(x, (int, Fraction)):
        return x.conjugate()
    return conj(x)


def matmul(a: list, b: list) -> list:
    if a and len(a[0]) != len(b):
        raise ValueError(f"shape mismatch: {len(a)}x{len(a[0])} times {len(b)}x?")
    bt = list(zip(*b))
    out = []
    for row in a:
        out_row = []
        for col in bt:
            acc = 0
            for x, y in zip(row, col):
                if x and y:
                    acc = acc + x * y
            out_row.append(acc)
        out.append(out_row)
    return out


def matvec(a: list, v) -> list:
    out = []
    for row in a:
        acc = 0
        for x, y in zip(row, v):
            if x and y:
                acc = acc + x * y
        out.append(acc)
    return out


def matadd(a: list, b: list, sign: int = 1) -> list:
    return [[x + sign * y for x, y in zip(ra, rb)] for ra, rb in zip(a, b)]


def scale(a: list, c) -> list:
    return [[x * c for x in row] for row in a]


def kron(a: list, b: list) -> list:
    return [
        [x * y for x in ra for y in rb]
        for ra in a
        for rb in b
    ]


def is_identity(a: list) -> bool:
    n = len(a)
    return all(a[i][j] == (1 if i == j else 0) for i in range(n) for j in range(n))


def _field(x):
    if isinstance(x, GaussianRational):
        return x
    return Fraction(x)


def rank(rows: list) -> int:
    """Rank over Q or Q(i) by Gaussian elimination."""
    m = [[_field(x) for x in row] for row in rows]
    if not m:
        return 0
    ncols = len(m[0])
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(m)) if m[i][c]), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        pv = m[r][c]
        for i in range(r + 1, len(m)):
            if m[i][c]:
                f = m[i][c] / pv
                m[i] = [x - f * y for x, y in zip(m[i], m[r])]
        r += 1
        if r == len(m):
            break
    return r


def det(a: list):
    """Determinant over Q or Q(i)."""
    n = len(a)
    m = [[_field(x) for x in row] for row in a]
    result = Fraction(1)
    for c in range(n):
        piv = next((i for i in range(c, n) if m[i][c]), None)
        if piv is None:
            return Fraction(0)
        if piv != c:
            m[c], m[piv] = m[piv], m[c]
            result = -result
        pv = m[c][c]
        result = result * pv
        for i in range(c + 1, n):
            if m[i][c]:
                f = m[i][c] / pv
                m[i] = [x - f * y for x, y in zip(m[i], m[c])]
    return result


def inverse(a: list) -> list:
    """Inverse over Q or Q(i); raises ZeroDivisionError when singular."""
    n = len(a)
    m = [[_field(x) for x in row] + [Fraction(int(i == j)) for j in range(n)]
         for i, row in enumerate(a)]
    for c in range(n):
        piv = next((i for i in range(c, n) if m[i][c]), None)
        if piv is None:
            raise ZeroDivisionError("singular matrix")
        m[c], m[piv] = m[piv], m[c]
        pv = m[c][c]
        m[c] = [x / pv for x in m[c]]
        for i in range(n):
            if i != c and m[i][c]:
                f = m[i][c]
                m[i] = [x - f * y for x, y in zip(m[i], m[c])]
    return [row[n:] for row in m]


def cayley(s: list) -> list:
    """(I - S)(I + S)^{-1}; orthogonal/unitary when S is skew(-Hermitian)."""
    n = len(s)
    eye = identity(n)
    return matmul(matadd(eye, s, -1), inverse(matadd(eye, s)))
