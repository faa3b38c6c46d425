"""Pure-Python hot kernels for exact polynomial and sparse matrix arithmetic.

Scalars are 4-tuples ``(a, b, c, d)`` standing for ``a + b*i + c*sqrt2 + d*i*sqrt2``
with ``int`` or ``Fraction`` components.  Polynomials are dicts mapping exponent
tuples to scalars, with no zero entries.  Sparse matrices are lists of row dicts
``{col: poly}``.

The compiled module ``_ckernels`` exposes the same functions with the same
semantics; :mod:`kronspin.kernels` picks one at import time.
"""

from fractions import Fraction

ZERO4 = (0, 0, 0, 0)


def _norm(x):
    if type(x) is Fraction and x.denominator == 1:
        return x.numerator
    return x


def s_mul(x, y):
    a1, b1, c1, d1 = x
    a2, b2, c2, d2 = y
    return (
        _norm(a1 * a2 - b1 * b2 + 2 * (c1 * c2 - d1 * d2)),
        _norm(a1 * b2 + b1 * a2 + 2 * (c1 * d2 + d1 * c2)),
        _norm(a1 * c2 + c1 * a2 - b1 * d2 - d1 * b2),
        _norm(a1 * d2 + d1 * a2 + b1 * c2 + c1 * b2),
    )


def s_add(x, y):
    return (
        _norm(x[0] + y[0]),
        _norm(x[1] + y[1]),
        _norm(x[2] + y[2]),
        _norm(x[3] + y[3]),
    )


def s_neg(x):
    return (-x[0], -x[1], -x[2], -x[3])


def p_add(p, q):
    if len(p) < len(q):
        p, q = q, p
    out = dict(p)
    for e, c in q.items():
        old = out.get(e)
        if old is None:
            out[e] = c
        else:
            s = s_add(old, c)
            if s == ZERO4:
                del out[e]
            else:
                out[e] = s
    return out


def p_neg(p):
    return {e: s_neg(c) for e, c in p.items()}


def p_sub(p, q):
    return p_add(p, p_neg(q))


def p_mul(p, q):
    if not p or not q:
        return {}
    out = {}
    for e1, c1 in p.items():
        for e2, c2 in q.items():
            e = tuple([x + y for x, y in zip(e1, e2)])
            c = s_mul(c1, c2)
            old = out.get(e)
            if old is not None:
                c = s_add(old, c)
            out[e] = c
    return {e: c for e, c in out.items() if c != ZERO4}


def m_mul(a_rows, b_rows):
    """Product of two sparse square matrices given as lists of row dicts."""
    out = []
    for row in a_rows:
        acc = {}
        for k, aik in row.items():
            brow = b_rows[k]
            if not brow:
                continue
            for j, bkj in brow.items():
                prod = p_mul(aik, bkj)
                if not prod:
                    continue
                old = acc.get(j)
                acc[j] = prod if old is None else p_add(old, prod)
        out.append({j: v for j, v in acc.items() if v})
    return out
