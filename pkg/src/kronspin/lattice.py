"""Integer lattice helpers: Smith normal form and exact rational linear algebra."""

from __future__ import annotations

from fractions import Fraction
from math import gcd

__all__ = [
    "CoordinateSolver",
    "identity",
    "mat_mul",
    "rational_inverse",
    "rational_nullspace",
    "rational_rank",
    "smith_normal_form",
    "solve_rational",
]


def identity(n):
    return [[int(i == j) for j in range(n)] for i in range(n)]


def mat_mul(a, b):
    return [[sum(a[i][k] * b[k][j] for k in range(len(b))) for j in range(len(b[0]))] for i in range(len(a))]


def smith_normal_form(a):
    """Return ``(U, D, V)`` with ``U A V = D`` diagonal, ``d_1 | d_2 | ...`` and ``U, V`` unimodular.

    ``a`` is a list of integer rows.  Diagonal entries are non-negative.
    """
    m = len(a)
    n = len(a[0]) if m else 0
    d = [list(map(int, r)) for r in a]
    u = identity(m)
    v = identity(n)

    def swap_rows(i, j):
        d[i], d[j] = d[j], d[i]
        u[i], u[j] = u[j], u[i]

    def swap_cols(i, j):
        for r in d:
            r[i], r[j] = r[j], r[i]
        for r in v:
            r[i], r[j] = r[j], r[i]

    def add_row(src, dst, k):  # row dst += k * row src
        d[dst] = [x + k * y for x, y in zip(d[dst], d[src])]
        u[dst] = [x + k * y for x, y in zip(u[dst], u[src])]

    def add_col(src, dst, k):  # col dst += k * col src
        for r in d:
            r[dst] += k * r[src]
        for r in v:
            r[dst] += k * r[src]

    for t in range(min(m, n)):
        # pivot: smallest nonzero magnitude in the remaining block
        while True:
            piv = None
            for i in range(t, m):
                for j in range(t, n):
                    if d[i][j] and (piv is None or abs(d[i][j]) < abs(d[piv[0]][piv[1]])):
                        piv = (i, j)
            if piv is None:
                return u, d, v
            swap_rows(t, piv[0])
            swap_cols(t, piv[1])
            p = d[t][t]
            done = True
            for i in range(t + 1, m):
                q = d[i][t] // p
                if q:
                    add_row(t, i, -q)
                if d[i][t]:
                    done = False
            for j in range(t + 1, n):
                q = d[t][j] // p
                if q:
                    add_col(t, j, -q)
                if d[t][j]:
                    done = False
            if not done:
                continue
            # divisibility of the remaining block
            bad = next(
                ((i, j) for i in range(t + 1, m) for j in range(t + 1, n) if d[i][j] % p),
                None,
            )
            if bad is None:
                break
            add_row(bad[0], t, 1)
        if d[t][t] < 0:
            d[t] = [-x for x in d[t]]
            u[t] = [-x for x in u[t]]
    return u, d, v


def solve_rational(cols, target):
    """Solve ``sum_i x_i cols[i] = target`` exactly; ``None`` if inconsistent."""
    n = len(cols)
    m = len(target)
    a = [[Fraction(cols[j][i]) for j in range(n)] + [Fraction(target[i])] for i in range(m)]
    row = 0
    where = [-1] * n
    for col in range(n):
        p = next((r for r in range(row, m) if a[r][col] != 0), None)
        if p is None:
            continue
        a[row], a[p] = a[p], a[row]
        pv = a[row][col]
        a[row] = [x / pv for x in a[row]]
        for r in range(m):
            if r != row and a[r][col] != 0:
                f = a[r][col]
                a[r] = [x - f * y for x, y in zip(a[r], a[row])]
        where[col] = row
        row += 1
    for r in range(row, m):
        if a[r][n] != 0:
            return None
    return [a[where[c]][n] if where[c] >= 0 else Fraction(0) for c in range(n)]


def rational_rank(vectors):
    rows = [[Fraction(x) for x in v] for v in vectors]
    if not rows:
        return 0
    rank = 0
    ncol = len(rows[0])
    for col in range(ncol):
        p = next((r for r in range(rank, len(rows)) if rows[r][col] != 0), None)
        if p is None:
            continue
        rows[rank], rows[p] = rows[p], rows[rank]
        for r in range(len(rows)):
            if r != rank and rows[r][col] != 0:
                f = rows[r][col] / rows[rank][col]
                rows[r] = [x - f * y for x, y in zip(rows[r], rows[rank])]
        rank += 1
    return rank


def rational_inverse(a):
    n = len(a)
    if rational_rank(a) < n:
        raise ZeroDivisionError("singular matrix")
    out = []
    cols = [[Fraction(a[i][j]) for i in range(n)] for j in range(n)]
    for k in range(n):
        e = [int(i == k) for i in range(n)]
        x = solve_rational(cols, e)
        if x is None:
            raise ZeroDivisionError("singular matrix")
        out.append(x)
    # out[k] is column k of the inverse
    return [[out[j][i] for j in range(n)] for i in range(n)]


def rational_nullspace(rows, ncols=None):
    """Basis of ``{x : r . x = 0 for every r in rows}`` (reduced row echelon route)."""
    n = ncols if ncols is not None else len(rows[0])
    a = [[Fraction(x) for x in r] for r in rows]
    pivots = []
    row = 0
    for col in range(n):
        p = next((r for r in range(row, len(a)) if a[r][col] != 0), None)
        if p is None:
            continue
        a[row], a[p] = a[p], a[row]
        pv = a[row][col]
        a[row] = [x / pv for x in a[row]]
        for r in range(len(a)):
            if r != row and a[r][col] != 0:
                f = a[r][col]
                a[r] = [x - f * y for x, y in zip(a[r], a[row])]
        pivots.append(col)
        row += 1
    free = [c for c in range(n) if c not in pivots]
    out = []
    for f in free:
        v = [Fraction(0)] * n
        v[f] = Fraction(1)
        for k, pc in enumerate(pivots):
            v[pc] = -a[k][f]
        out.append(v)
    return out


class CoordinateSolver:
    """Coordinates in a fixed basis of Q^n via the integer adjugate ``M = det * B^-1``.

    Sparse inputs (roots have at most two nonzero entries) touch few columns.
    Returns ``None`` when the coordinates are not integral.
    """

    def __init__(self, basis):
        n = len(basis)
        inv = [[Fraction(0)] * n for _ in range(n)]
        for k in range(n):
            e = [int(i == k) for i in range(n)]
            col = solve_rational(basis, e)
            if col is None:
                raise ZeroDivisionError("basis is not invertible")
            for i in range(n):
                inv[i][k] = col[i]
        den = 1
        for row in inv:
            for x in row:
                den = den * x.denominator // gcd(den, x.denominator)
        self.den = den
        self.cols = [[int(inv[i][k] * den) for i in range(n)] for k in range(n)]

    def __call__(self, vec):
        acc = [0] * len(self.cols)
        for k, x in enumerate(vec):
            if x:
                col = self.cols[k]
                acc = [a + x * c for a, c in zip(acc, col)]
        if any(a % self.den for a in acc):
            return None
        return tuple(a // self.den for a in acc)
