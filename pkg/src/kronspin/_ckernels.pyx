# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=False
"""Compiled hot kernels; same functions and semantics as ``_pykernels``.

Components stay Python objects (``int`` or ``Fraction``) so results are exact;
the speedup comes from typed loops and avoiding generator and ``zip`` overhead.
"""

from fractions import Fraction

ZERO4 = (0, 0, 0, 0)


cdef inline object _norm(object x):
    if type(x) is Fraction and x.denominator == 1:
        return x.numerator
    return x


# Components below this bound multiply and sum without overflowing int64.
cdef long long SMALL = 1 << 28


cdef inline bint _small(object v):
    return type(v) is int and -SMALL < v < SMALL


cpdef tuple s_mul(tuple x, tuple y):
    cdef long long A1, B1, C1, D1, A2, B2, C2, D2
    if (_small(x[0]) and _small(x[1]) and _small(x[2]) and _small(x[3])
            and _small(y[0]) and _small(y[1]) and _small(y[2]) and _small(y[3])):
        A1 = x[0]; B1 = x[1]; C1 = x[2]; D1 = x[3]
        A2 = y[0]; B2 = y[1]; C2 = y[2]; D2 = y[3]
        return (
            A1 * A2 - B1 * B2 + 2 * (C1 * C2 - D1 * D2),
            A1 * B2 + B1 * A2 + 2 * (C1 * D2 + D1 * C2),
            A1 * C2 + C1 * A2 - B1 * D2 - D1 * B2,
            A1 * D2 + D1 * A2 + B1 * C2 + C1 * B2,
        )
    cdef object a1 = x[0], b1 = x[1], c1 = x[2], d1 = x[3]
    cdef object a2 = y[0], b2 = y[1], c2 = y[2], d2 = y[3]
    return (
        _norm(a1 * a2 - b1 * b2 + 2 * (c1 * c2 - d1 * d2)),
        _norm(a1 * b2 + b1 * a2 + 2 * (c1 * d2 + d1 * c2)),
        _norm(a1 * c2 + c1 * a2 - b1 * d2 - d1 * b2),
        _norm(a1 * d2 + d1 * a2 + b1 * c2 + c1 * b2),
    )


cpdef tuple s_add(tuple x, tuple y):
    if (type(x[0]) is int and type(x[1]) is int and type(x[2]) is int and type(x[3]) is int
            and type(y[0]) is int and type(y[1]) is int and type(y[2]) is int and type(y[3]) is int):
        return (x[0] + y[0], x[1] + y[1], x[2] + y[2], x[3] + y[3])
    return (
        _norm(x[0] + y[0]),
        _norm(x[1] + y[1]),
        _norm(x[2] + y[2]),
        _norm(x[3] + y[3]),
    )


cpdef tuple s_neg(tuple x):
    return (-x[0], -x[1], -x[2], -x[3])


cdef inline bint _is_zero(tuple c):
    return c[0] == 0 and c[1] == 0 and c[2] == 0 and c[3] == 0


cdef inline tuple _exp_add(tuple e1, tuple e2):
    cdef Py_ssize_t k, n = len(e1)
    cdef list out = [None] * n
    for k in range(n):
        out[k] = e1[k] + e2[k]
    return tuple(out)


cpdef dict p_add(dict p, dict q):
    cdef dict out
    cdef object e, c, old
    cdef tuple s
    if len(p) < len(q):
        p, q = q, p
    out = dict(p)
    for e, c in q.items():
        old = out.get(e)
        if old is None:
            out[e] = c
        else:
            s = s_add(<tuple>old, <tuple>c)
            if _is_zero(s):
                del out[e]
            else:
                out[e] = s
    return out


cpdef dict p_neg(dict p):
    cdef dict out = {}
    cdef object e, c
    for e, c in p.items():
        out[e] = s_neg(<tuple>c)
    return out


cpdef dict p_sub(dict p, dict q):
    return p_add(p, p_neg(q))


cpdef dict p_mul(dict p, dict q):
    cdef dict out
    cdef object e1, c1, e2, c2, old
    cdef tuple e, c
    if not p or not q:
        return {}
    out = {}
    for e1, c1 in p.items():
        for e2, c2 in q.items():
            e = _exp_add(<tuple>e1, <tuple>e2)
            c = s_mul(<tuple>c1, <tuple>c2)
            old = out.get(e)
            if old is not None:
                c = s_add(<tuple>old, c)
            out[e] = c
    return {k: v for k, v in out.items() if not _is_zero(<tuple>v)}


cpdef list m_mul(object a_rows, object b_rows):
    """Product of two sparse square matrices given as lists of row dicts."""
    cdef list out = []
    cdef dict row, acc, brow, prod
    cdef object k, aik, j, bkj, old
    for row in a_rows:
        acc = {}
        for k, aik in row.items():
            brow = <dict>b_rows[k]
            if not brow:
                continue
            for j, bkj in brow.items():
                prod = p_mul(<dict>aik, <dict>bkj)
                if not prod:
                    continue
                old = acc.get(j)
                acc[j] = prod if old is None else p_add(<dict>old, prod)
        out.append({j: v for j, v in acc.items() if v})
    return out
