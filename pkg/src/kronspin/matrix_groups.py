"""Exact matrix models of Sp_2n and SO_d, Kronecker tensor products, and commutator constants.

Matrices carry Laurent-polynomial entries over Q(i, sqrt2) in a shared
:class:`~kronspin.exact_arithmetic.ParamContext`.  Storage is sparse (one dict per
row) but the API is that of a dense square matrix.

Chevalley generators (1-based indices, ``bar(i) = d + 1 - i``)::

    Sp_2n:  x_{e_i-e_j}(t) = I + t(E_{i,j} - E_{2n+1-j,2n+1-i})
            x_{e_i+e_j}(t) = I + t(E_{i,2n+1-j} + E_{j,2n+1-i})
            x_{2e_j}(t)    = I + t E_{j,2n+1-j}
    SO_d:   x_{e_i-e_j}(t) = I + t(E_{i,j} - E_{bar j,bar i})
            x_{e_i+e_j}(t) = I + t(E_{i,bar j} - E_{j,bar i})
            x_{e_j}(t)     = I + sqrt2 t E_{j,n+1} - sqrt2 t E_{n+1,bar j} - t^2 E_{j,bar j}

and ``x_{-a}(t) = x_a(t)^T``.  Commutators are ``(a, b) = a b a^-1 b^-1``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field, replace
from functools import lru_cache

from . import kernels as K
from .errors import DomainError, VerificationFailure
from .exact_arithmetic import CycloScalar, LaurentPoly, ParamContext, UnitMonomial, as_scalar
from .root_systems import (
    RootSystemSpec,
    check_root,
    enumerate_roots,
    root_set,
    root_str,
)

__all__ = [
    "ExactMatrix",
    "MatrixGroup",
    "sp_generator",
    "so_generator",
    "omega",
    "psi",
    "involution",
    "membership",
    "determinant_at",
    "kronecker",
    "conjugator_p",
    "rho_sp",
    "rho_so",
    "commutator_matrix",
    "CommutatorFactor",
    "extract_commutator_constant",
    "Template",
    "TemplateFactor",
    "TEMPLATES",
    "template_instances",
    "check_template_instance",
    "mutate_template",
    "uncovered_pairs",
    "trivial_pairs",
    "galois_twist_matrix",
]


# ---------------------------------------------------------------------------
# exact matrices


def _to_terms(ctx, x):
    if isinstance(x, LaurentPoly):
        if x.ctx != ctx:
            raise DomainError("matrix entry in a different parameter context")
        return x.terms
    if isinstance(x, UnitMonomial):
        return x.to_poly().terms
    s = as_scalar(x)
    return {} if s.is_zero() else {ctx.zero_exp(): s.v}


class ExactMatrix:
    """Square matrix with :class:`LaurentPoly` entries (sparse rows, dense API)."""

    __slots__ = ("ctx", "rows")

    def __init__(self, ctx: ParamContext, rows):
        if not rows:
            raise DomainError("matrix dimension must be positive")
        self.ctx = ctx
        self.rows = rows

    # constructors
    @classmethod
    def identity(cls, ctx, d):
        one = {ctx.zero_exp(): (1, 0, 0, 0)}
        return cls(ctx, [{i: one} for i in range(d)])

    @classmethod
    def zeros(cls, ctx, d):
        return cls(ctx, [{} for _ in range(d)])

    @classmethod
    def from_dense(cls, ctx, entries):
        d = len(entries)
        rows = []
        for r in entries:
            if len(r) != d:
                raise DomainError("matrix must be square")
            row = {}
            for j, x in enumerate(r):
                t = _to_terms(ctx, x)
                if t:
                    row[j] = t
            rows.append(row)
        return cls(ctx, rows)

    @classmethod
    def from_entries(cls, ctx, d, entries):
        """Build from ``{(i, j): value}`` with 0-based indices, summing repeats."""
        rows = [{} for _ in range(d)]
        for (i, j), x in entries.items():
            t = _to_terms(ctx, x)
            old = rows[i].get(j)
            new = t if old is None else K.p_add(old, t)
            if new:
                rows[i][j] = new
            else:
                rows[i].pop(j, None)
        return cls(ctx, rows)

    @classmethod
    def signed_permutation(cls, ctx, perm_signs):
        """Matrix with entry ``sign`` at ``(i, perm[i])`` for ``perm_signs[i] = (perm[i], sign)``."""
        rows = [{j: {ctx.zero_exp(): (s, 0, 0, 0)}} for j, s in perm_signs]
        return cls(ctx, rows)

    # basic queries
    @property
    def dim(self):
        return len(self.rows)

    def entry(self, i, j) -> LaurentPoly:
        return LaurentPoly(self.ctx, self.rows[i].get(j, {}))

    __getitem__ = lambda self, ij: self.entry(*ij)  # noqa: E731

    def to_dense(self):
        return [[self.entry(i, j) for j in range(self.dim)] for i in range(self.dim)]

    def _same(self, other):
        if not isinstance(other, ExactMatrix):
            raise TypeError("ExactMatrix expected")
        if other.dim != self.dim:
            raise DomainError(f"dimension mismatch {self.dim} vs {other.dim}")
        if other.ctx != self.ctx:
            raise DomainError("parameter context mismatch")

    def __eq__(self, other):
        if not isinstance(other, ExactMatrix):
            return NotImplemented
        return self.ctx == other.ctx and self.rows == other.rows

    def __hash__(self):
        return hash(tuple(frozenset((j, frozenset(p.items())) for j, p in r.items()) for r in self.rows))

    # arithmetic
    def __mul__(self, other):
        if isinstance(other, ExactMatrix):
            self._same(other)
            return ExactMatrix(self.ctx, K.m_mul(self.rows, other.rows))
        c = _to_terms(self.ctx, other)
        return ExactMatrix(
            self.ctx,
            [{j: q for j, p in r.items() if (q := K.p_mul(p, c))} for r in self.rows],
        )

    def __rmul__(self, other):
        return self * other

    def __add__(self, other):
        self._same(other)
        out = []
        for r1, r2 in zip(self.rows, other.rows):
            row = dict(r1)
            for j, p in r2.items():
                s = K.p_add(row[j], p) if j in row else p
                if s:
                    row[j] = s
                else:
                    row.pop(j, None)
            out.append(row)
        return ExactMatrix(self.ctx, out)

    def __neg__(self):
        return ExactMatrix(self.ctx, [{j: K.p_neg(p) for j, p in r.items()} for r in self.rows])

    def __sub__(self, other):
        return self + (-other)

    def transpose(self):
        rows = [{} for _ in range(self.dim)]
        for i, r in enumerate(self.rows):
            for j, p in r.items():
                rows[j][i] = p
        return ExactMatrix(self.ctx, rows)

    @property
    def T(self):
        return self.transpose()

    # structure
    def is_identity(self):
        one = {self.ctx.zero_exp(): (1, 0, 0, 0)}
        return all(r == {i: one} for i, r in enumerate(self.rows))

    def is_diagonal(self):
        return all(set(r) <= {i} for i, r in enumerate(self.rows))

    def diagonal(self):
        return [self.entry(i, i) for i in range(self.dim)]

    def scalar_value(self):
        """Return ``c`` if the matrix equals ``c * I``, else ``None``."""
        if not self.is_diagonal():
            return None
        d0 = self.rows[0].get(0, {})
        if any(r.get(i, {}) != d0 for i, r in enumerate(self.rows)):
            return None
        return LaurentPoly(self.ctx, d0)

    def map_entries(self, fn):
        """Apply ``fn: LaurentPoly -> LaurentPoly`` to every nonzero entry."""
        rows = []
        for r in self.rows:
            row = {}
            for j, p in r.items():
                q = fn(LaurentPoly(self.ctx, p))
                if q.terms:
                    row[j] = q.terms
            rows.append(row)
        return ExactMatrix(self.ctx, rows)

    def substitute(self, mapping, ctx=None):
        ctx = ctx or self.ctx
        rows = []
        for r in self.rows:
            row = {}
            for j, p in r.items():
                q = LaurentPoly(self.ctx, p).substitute(mapping, ctx)
                if q.terms:
                    row[j] = q.terms
            rows.append(row)
        return ExactMatrix(ctx, rows)

    def evaluate(self, values):
        """Dense list of :class:`CycloScalar` obtained by fixing every parameter."""
        return [
            [LaurentPoly(self.ctx, r.get(j, {})).evaluate(values) for j in range(self.dim)]
            for r in self.rows
        ]

    def render(self):
        return "\n".join(
            "[" + ", ".join(self.entry(i, j).render() for j in range(self.dim)) + "]"
            for i in range(self.dim)
        )

    def __repr__(self):
        return f"ExactMatrix(dim={self.dim})"


def kronecker(a: ExactMatrix, b: ExactMatrix) -> ExactMatrix:
    """Kronecker product, row index ``(i, k) -> i * dim(b) + k``."""
    if a.ctx != b.ctx:
        raise DomainError("parameter context mismatch")
    m = b.dim
    rows = []
    for ra in a.rows:
        for rb in b.rows:
            row = {}
            for j, p in ra.items():
                for l, q in rb.items():
                    pq = K.p_mul(p, q)
                    if pq:
                        row[j * m + l] = pq
            rows.append(row)
    return ExactMatrix(a.ctx, rows)


def determinant_at(a: ExactMatrix, values) -> CycloScalar:
    """Determinant after substituting scalar values, by exact Gaussian elimination."""
    m = a.evaluate(values)
    d = len(m)
    det = CycloScalar.one()
    for c in range(d):
        p = next((r for r in range(c, d) if not m[r][c].is_zero()), None)
        if p is None:
            return CycloScalar.zero()
        if p != c:
            m[c], m[p] = m[p], m[c]
            det = -det
        piv = m[c][c]
        det = det * piv
        inv = piv.inv()
        for r in range(c + 1, d):
            if not m[r][c].is_zero():
                f = m[r][c] * inv
                m[r] = [x - f * y for x, y in zip(m[r], m[c])]
    return det


# ---------------------------------------------------------------------------
# groups and generators


@dataclass(frozen=True)
class MatrixGroup:
    """``Sp`` of even dimension ``2n`` or ``SO`` of dimension ``d``."""

    kind: str
    dim: int

    def __post_init__(self):
        if self.kind not in ("Sp", "SO"):
            raise DomainError(f"unknown matrix group kind {self.kind!r}")
        if self.dim < 1 or (self.kind == "Sp" and self.dim % 2):
            raise DomainError(f"invalid dimension {self.dim} for {self.kind}")

    @property
    def rank(self):
        return self.dim // 2

    @property
    def root_system(self) -> RootSystemSpec:
        if self.kind == "Sp":
            return RootSystemSpec("C", self.rank)
        return RootSystemSpec("B" if self.dim % 2 else "D", self.rank)

    def generator(self, root, arg, ctx=None) -> ExactMatrix:
        if self.kind == "Sp":
            return sp_generator(self.rank, root, arg, ctx)
        return so_generator(self.dim, root, arg, ctx)

    def __str__(self):
        return f"{self.kind}{self.dim}"


def _ctx_of(arg, ctx):
    if isinstance(arg, (LaurentPoly, UnitMonomial)):
        return arg.ctx
    if ctx is None:
        raise DomainError("a ParamContext is required for scalar arguments")
    return ctx


def _positive_form(root):
    """Split ``root`` into (representative with first nonzero coefficient > 0, negated?)."""
    first = next(c for c in root if c)
    if first > 0:
        return tuple(root), False
    return tuple(-c for c in root), True


def _support(root):
    return [(k, c) for k, c in enumerate(root) if c]


def sp_generator(n, root, arg, ctx=None) -> ExactMatrix:
    ctx = _ctx_of(arg, ctx)
    root = check_root(RootSystemSpec("C", n), root)
    pos, neg = _positive_form(root)
    t = _to_terms(ctx, arg)
    mt = K.p_neg(t)
    d = 2 * n
    sup = _support(pos)
    ent = {}
    if len(sup) == 1:
        (j, _), = sup
        ent[(j, d - 1 - j)] = t
    else:
        (i, _), (j, cj) = sup
        if cj < 0:
            ent[(i, j)] = t
            ent[(d - 1 - j, d - 1 - i)] = mt
        else:
            ent[(i, d - 1 - j)] = t
            ent[(j, d - 1 - i)] = t
    m = _unipotent(ctx, d, ent)
    return m.transpose() if neg else m


def so_generator(d, root, arg, ctx=None) -> ExactMatrix:
    ctx = _ctx_of(arg, ctx)
    n = d // 2
    if n < 1:
        raise DomainError("SO_d generators need d >= 2")
    fam = "B" if d % 2 else "D"
    spec_root = tuple(root)
    if len(spec_root) != n:
        raise DomainError(f"root {spec_root} has wrong length for SO{d}")
    pos, neg = _positive_form(spec_root)
    sup = _support(pos)
    if len(sup) == 1 and fam == "D":
        raise DomainError(f"short root {root_str(spec_root)} requested in even dimension {d}")
    if fam == "D" and n < 2:
        raise DomainError("SO_2 has no roots")
    check_root(RootSystemSpec(fam, n), spec_root)
    t = _to_terms(ctx, arg)
    mt = K.p_neg(t)
    bar = lambda i: d - 1 - i  # noqa: E731  (0-based)
    ent = {}
    if len(sup) == 1:
        (j, _), = sup
        s2t = K.p_mul(t, {ctx.zero_exp(): (0, 0, 1, 0)})
        ent[(j, n)] = s2t
        ent[(n, bar(j))] = K.p_neg(s2t)
        ent[(j, bar(j))] = K.p_neg(K.p_mul(t, t))
    else:
        (i, _), (j, cj) = sup
        if cj < 0:
            ent[(i, j)] = t
            ent[(bar(j), bar(i))] = mt
        else:
            ent[(i, bar(j))] = t
            ent[(j, bar(i))] = mt
    m = _unipotent(ctx, d, ent)
    return m.transpose() if neg else m


def _unipotent(ctx, d, ent):
    m = ExactMatrix.identity(ctx, d)
    rows = [dict(r) for r in m.rows]
    for (i, j), p in ent.items():
        if not p:
            continue
        old = rows[i].get(j)
        new = p if old is None else K.p_add(old, p)
        if new:
            rows[i][j] = new
        else:
            rows[i].pop(j, None)
    return ExactMatrix(ctx, rows)


def omega(ctx, d) -> ExactMatrix:
    """Anti-diagonal matrix of ones."""
    return ExactMatrix.signed_permutation(ctx, [(d - 1 - i, 1) for i in range(d)])


def psi(ctx, two_n) -> ExactMatrix:
    """``[[0, Omega_n], [-Omega_n, 0]]``."""
    if two_n % 2:
        raise DomainError("psi needs even dimension")
    n = two_n // 2
    ps = [(two_n - 1 - i, 1) for i in range(n)] + [(two_n - 1 - i, -1) for i in range(n, two_n)]
    return ExactMatrix.signed_permutation(ctx, ps)


def involution(group: MatrixGroup, a: ExactMatrix) -> ExactMatrix:
    """``tau(A) = Omega A^T Omega`` for SO and ``psi(A) = -Psi A^T Psi`` for Sp."""
    if a.dim != group.dim:
        raise DomainError(f"{group} expects dimension {group.dim}, got {a.dim}")
    if group.kind == "SO":
        o = omega(a.ctx, a.dim)
        return o * a.transpose() * o
    p = psi(a.ctx, a.dim)
    return -(p * a.transpose() * p)


def membership(group: MatrixGroup, a: ExactMatrix) -> bool:
    """True iff ``A * involution(A) = I`` and ``det A = 1`` identically.

    The involution condition forces ``det(A)^2 = 1`` in the Laurent domain, so the
    determinant is a constant and a single evaluation at all parameters ``= 1``
    decides it.
    """
    if a.dim != group.dim:
        raise DomainError(f"{group} expects dimension {group.dim}, got {a.dim}")
    if not (a * involution(group, a)).is_identity():
        return False
    ones = {nm: 1 for nm in a.ctx.names}
    return determinant_at(a, ones) == CycloScalar.one()


def group_inverse(group: MatrixGroup, a: ExactMatrix) -> ExactMatrix:
    """Inverse of a group element through the defining involution."""
    return involution(group, a)


# ---------------------------------------------------------------------------
# Kronecker tensor products


@lru_cache(maxsize=None)
def _p_layout(n, m):
    """Signed permutation ``(col, sign)`` per row of the conjugator P."""
    out = []
    bm = 2 * m
    for blk in range(2 * n):
        base = blk * bm
        for r in range(bm):
            if blk < n:  # J = [[I_m, 0], [0, -Omega_m]]
                out.append((base + r, 1) if r < m else (base + m + (bm - 1 - r), -1))
            else:  # K = [[Omega_m, 0], [0, I_m]]
                out.append((base + (m - 1 - r), 1) if r < m else (base + r, 1))
    return tuple(out)


def conjugator_p(ctx, n, m) -> ExactMatrix:
    """Block matrix ``diag(J, ..., J, K, ..., K)`` with ``n`` copies of each block."""
    return ExactMatrix.signed_permutation(ctx, _p_layout(n, m))


def _signed_perm_inverse(ctx, layout):
    inv = [None] * len(layout)
    for i, (j, s) in enumerate(layout):
        inv[j] = (i, s)
    return ExactMatrix.signed_permutation(ctx, inv)


def rho_so(n_dim, m_dim, a: ExactMatrix, b: ExactMatrix) -> ExactMatrix:
    """``(A, B) -> A (x) B`` from SO_n x SO_m to SO_nm."""
    if a.dim != n_dim or b.dim != m_dim:
        raise DomainError("rho_so: dimension mismatch")
    return kronecker(a, b)


def rho_sp(n, m, a: ExactMatrix, b: ExactMatrix) -> ExactMatrix:
    """``(A, B) -> P^-1 (A (x) B) P`` from Sp_2n x Sp_2m to SO_4nm."""
    if a.dim != 2 * n or b.dim != 2 * m:
        raise DomainError("rho_sp: dimension mismatch")
    lay = _p_layout(n, m)
    p = ExactMatrix.signed_permutation(a.ctx, lay)
    return _signed_perm_inverse(a.ctx, lay) * kronecker(a, b) * p


# ---------------------------------------------------------------------------
# commutator oracle


_ORACLE_CTX = ParamContext(("t", "u"))


def commutator_matrix(group: MatrixGroup, alpha, beta, ctx: ParamContext = _ORACLE_CTX):
    """``(x_alpha(t), x_beta(u))`` with formal ``t, u``."""
    t, u = ctx.var("t"), ctx.var("u")
    xa, xb = group.generator(alpha, t), group.generator(beta, u)
    return xa * xb * group.generator(alpha, -t) * group.generator(beta, -u)


@dataclass(frozen=True)
class CommutatorFactor:
    """One factor ``x_root(coeff * t^t_exp * u^u_exp)`` of a commutator."""

    root: tuple
    coeff: int
    t_exp: int
    u_exp: int

    def arg(self, ctx, t="t", u="u"):
        return ctx.unit(self.coeff, **{t: self.t_exp, u: self.u_exp}).to_poly()

    def render(self):
        mono = "".join(
            f"{v}" + (f"^{e}" if e != 1 else "") for v, e in (("t", self.t_exp), ("u", self.u_exp)) if e
        )
        c = {1: "", -1: "-"}.get(self.coeff, str(self.coeff)) if mono else str(self.coeff)
        return f"x[{root_str(self.root)}]({c}{mono})"


def product_of_factors(group, factors, ctx=_ORACLE_CTX):
    out = ExactMatrix.identity(ctx, group.dim)
    for f in factors:
        out = out * group.generator(f.root, f.arg(ctx))
    return out


def _candidate_roots(spec, alpha, beta):
    rs = root_set(spec)
    out = []
    for i in range(1, 4):
        for j in range(1, 4):
            r = tuple(i * a + j * b for a, b in zip(alpha, beta))
            if r in rs:
                out.append((i + j, i, j, r))
    out.sort()
    return out


def extract_constants(generator, dim, roots, alpha, beta, ctx=_ORACLE_CTX, consts=(1, -1, 2, -2, 0)):
    """Brute-force commutator constants for any matrix realization.

    ``generator(root, arg)`` returns an :class:`ExactMatrix`; ``roots`` is the
    root set.  Candidate factors ``x_{i alpha + j beta}(c t^i u^j)`` are ordered by
    ``i + j`` and every constant in ``consts`` is tried against the full matrix.
    """
    t, u = ctx.var("t"), ctx.var("u")
    target = (
        generator(alpha, t) * generator(beta, u) * generator(alpha, -t) * generator(beta, -u)
    )
    cands = []
    for i in range(1, 4):
        for j in range(1, 4):
            r = tuple(i * a + j * b for a, b in zip(alpha, beta))
            if r in roots:
                cands.append((i + j, i, j, r))
    cands.sort()
    for cs in itertools.product(consts, repeat=len(cands)):
        factors = tuple(CommutatorFactor(r, c, i, j) for (_, i, j, r), c in zip(cands, cs) if c)
        prod = ExactMatrix.identity(ctx, dim)
        for f in factors:
            prod = prod * generator(f.root, f.arg(ctx))
        if prod == target:
            return factors
    return None


@lru_cache(maxsize=None)
def extract_commutator_constant(group: MatrixGroup, alpha, beta) -> tuple:
    """Constants of ``(x_alpha(t), x_beta(u)) = prod x_{i alpha + j beta}(c_ij t^i u^j)``.

    Returns the factor tuple (empty for a trivial commutator) ordered by
    ``i + j``.  Every candidate constant in ``{0, +-1, +-2}`` is tried and the full
    product matrix is compared with the commutator.
    """
    spec = group.root_system
    alpha, beta = check_root(spec, alpha), check_root(spec, beta)
    if all(a + b == 0 for a, b in zip(alpha, beta)):
        raise DomainError("commutator of opposite root subgroups is not unipotent")
    found = extract_constants(group.generator, group.dim, root_set(spec), alpha, beta)
    if found is None:
        raise VerificationFailure(
            f"commutator of {root_str(alpha)}, {root_str(beta)} in {group} matches no template",
            record={"group": str(group), "alpha": alpha, "beta": beta},
        )
    return found


# ---------------------------------------------------------------------------
# commutator templates (data)


@dataclass(frozen=True)
class TemplateFactor:
    """``x_root(coeff * t^t_exp * u^u_exp)``.

    ``root`` is a tuple of ``(scale, sign_symbols, index_symbol)`` terms meaning
    ``sum scale * prod(a_s) * e_index``.  ``coeff`` is ``(scale, sign_symbols)`` or
    the string ``"sp_min"`` for ``a2 * min(a1 a2, -a2 a3)``; ``sign`` multiplies the
    evaluated coefficient.
    """

    root: tuple
    coeff: object
    t_exp: int = 1
    u_exp: int = 1
    sign: int = 1


@dataclass(frozen=True)
class Template:
    ident: str
    groups: str  # "Sp", "SO" (all d) or "SO_odd"
    indices: str  # index pattern, see _INDEX_PATTERNS
    alpha: tuple
    beta: tuple
    factors: tuple = field(default_factory=tuple)


def _t(*terms):
    return tuple(terms)


# index patterns: ordered index symbols with strict increase
_INDEX_PATTERNS = {
    "i<j=k<l": (("i", "j", "l"), {"k": "j"}),
    "i<k<l=j": (("i", "k", "j"), {"l": "j"}),
    "i=k<j<l": (("i", "j", "l"), {"k": "i"}),
    "i=k<l<j": (("i", "l", "j"), {"k": "i"}),
    "i<j": (("i", "j"), {}),
}

A1, A2, A3 = ("a1",), ("a2",), ("a3",)

TEMPLATES = (
    # symplectic: c = a2 * min(a1 a2, -a2 a3)
    Template("sp.j=k", "Sp", "i<j=k<l",
             _t((1, A1, "i"), (1, A2, "j")), _t((-1, A2, "j"), (1, A3, "l")),
             (TemplateFactor(_t((1, A1, "i"), (1, A3, "l")), "sp_min"),)),
    Template("sp.j=l", "Sp", "i<k<l=j",
             _t((1, A1, "i"), (1, A2, "j")), _t((1, A3, "k"), (-1, A2, "j")),
             (TemplateFactor(_t((1, A1, "i"), (1, A3, "k")), "sp_min"),)),
    Template("sp.i=k.j<l", "Sp", "i=k<j<l",
             _t((1, A2, "i"), (1, A1, "j")), _t((-1, A2, "i"), (1, A3, "l")),
             (TemplateFactor(_t((1, A1, "j"), (1, A3, "l")), "sp_min"),)),
    Template("sp.i=k.l<j", "Sp", "i=k<l<j",
             _t((1, A2, "i"), (1, A1, "j")), _t((-1, A2, "i"), (1, A3, "l")),
             (TemplateFactor(_t((1, A3, "l"), (1, A1, "j")), "sp_min"),)),
    Template("sp.long.i", "Sp", "i<j",
             _t((1, A1, "i"), (1, A2, "j")), _t((1, A1, "i"), (-1, A2, "j")),
             (TemplateFactor(_t((2, A1, "i"),), (-2, A2)),)),
    Template("sp.long.j", "Sp", "i<j",
             _t((1, A1, "i"), (1, A2, "j")), _t((-1, A1, "i"), (1, A2, "j")),
             (TemplateFactor(_t((2, A2, "j"),), (-2, A1)),)),
    Template("sp.two.i", "Sp", "i<j",
             _t((1, A1, "i"), (1, A2, "j")), _t((-2, A1, "i"),),
             (TemplateFactor(_t((-1, A1, "i"), (1, A2, "j")), (1, A2)),
              TemplateFactor(_t((2, A2, "j"),), (-1, A1 + A2), 2, 1))),
    Template("sp.two.j", "Sp", "i<j",
             _t((1, A1, "i"), (1, A2, "j")), _t((-2, A2, "j"),),
             (TemplateFactor(_t((1, A1, "i"), (-1, A2, "j")), (1, A1)),
              TemplateFactor(_t((2, A1, "i"),), (-1, A1 + A2), 2, 1))),
    # orthogonal, every dimension
    Template("so.j=k", "SO", "i<j=k<l",
             _t((1, A1, "i"), (1, A2, "j")), _t((-1, A2, "j"), (1, A3, "l")),
             (TemplateFactor(_t((1, A1, "i"), (1, A3, "l")), (-1, A2)),)),
    Template("so.j=l", "SO", "i<k<l=j",
             _t((1, A1, "i"), (1, A2, "j")), _t((1, A3, "k"), (-1, A2, "j")),
             (TemplateFactor(_t((1, A1, "i"), (1, A3, "k")), (-1, A3)),)),
    Template("so.i=k.j<l", "SO", "i=k<j<l",
             _t((1, A1, "i"), (1, A2, "j")), _t((-1, A1, "i"), (1, A3, "l")),
             (TemplateFactor(_t((1, A2, "j"), (1, A3, "l")), (1, A2)),)),
    Template("so.i=k.l<j", "SO", "i=k<l<j",
             _t((1, A1, "i"), (1, A2, "j")), _t((-1, A1, "i"), (1, A3, "l")),
             (TemplateFactor(_t((1, A3, "l"), (1, A2, "j")), (-1, A3)),)),
    # orthogonal, odd dimension
    Template("so.short.i", "SO_odd", "i<j",
             _t((1, A1, "i"), (1, A2, "j")), _t((-1, A1, "i"),),
             (TemplateFactor(_t((-1, A1, "i"), (1, A2, "j")), (-1, ()), 1, 2),
              TemplateFactor(_t((1, A2, "j"),), (1, A2)))),
    Template("so.short.j", "SO_odd", "i<j",
             _t((1, A1, "i"), (1, A2, "j")), _t((-1, A2, "j"),),
             (TemplateFactor(_t((1, A1, "i"), (-1, A2, "j")), (1, ()), 1, 2),
              TemplateFactor(_t((1, A1, "i"),), (-1, A2)))),
    Template("so.short.short", "SO_odd", "i<j",
             _t((1, A1, "i"),), _t((1, A2, "j"),),
             (TemplateFactor(_t((1, A1, "i"), (1, A2, "j")), (-2, A2)),)),
)


def _signs(syms, a):
    out = 1
    for s in syms:
        out *= a[s]
    return out


def _eval_root(terms, idx, a, rank):
    v = [0] * rank
    for scale, syms, sym in terms:
        v[idx[sym] - 1] += scale * _signs(syms, a)
    return tuple(v)


def _eval_coeff(coeff, a):
    if coeff == "sp_min":
        return a["a2"] * min(a["a1"] * a["a2"], -a["a2"] * a["a3"])
    scale, syms = coeff
    return scale * _signs(syms, a)


def _applies(template, group):
    if template.groups == "Sp":
        return group.kind == "Sp"
    if template.groups == "SO":
        return group.kind == "SO"
    return group.kind == "SO" and group.dim % 2 == 1


def _used_signs(template):
    used = set()
    for terms in (template.alpha, template.beta) + tuple(f.root for f in template.factors):
        for _, syms, _ in terms:
            used.update(syms)
    for f in template.factors:
        if f.coeff == "sp_min":
            used.update(("a1", "a2", "a3"))
        else:
            used.update(f.coeff[1])
    return sorted(used)


@dataclass(frozen=True)
class TemplateInstance:
    template: Template
    indices: tuple  # sorted ((symbol, value), ...)
    signs: tuple  # sorted ((symbol, value), ...)
    alpha: tuple
    beta: tuple
    factors: tuple  # CommutatorFactor

    @property
    def ident(self):
        ind = ",".join(f"{k}={v}" for k, v in self.indices)
        sg = ",".join(f"{k}={'+' if v > 0 else '-'}" for k, v in self.signs)
        return f"{self.template.ident}[{ind};{sg}]"


def template_instances(group: MatrixGroup, templates=TEMPLATES):
    """Every index and sign specialization of the templates that applies to ``group``."""
    rank = group.rank
    out = []
    for tpl in templates:
        if not _applies(tpl, group):
            continue
        order, aliases = _INDEX_PATTERNS[tpl.indices]
        used = _used_signs(tpl)
        for combo in itertools.combinations(range(1, rank + 1), len(order)):
            idx = dict(zip(order, combo))
            for k, v in aliases.items():
                idx[k] = idx[v]
            for svals in itertools.product((1, -1), repeat=len(used)):
                a = dict(zip(used, svals))
                alpha = _eval_root(tpl.alpha, idx, a, rank)
                beta = _eval_root(tpl.beta, idx, a, rank)
                factors = tuple(
                    CommutatorFactor(
                        _eval_root(f.root, idx, a, rank),
                        f.sign * _eval_coeff(f.coeff, a),
                        f.t_exp,
                        f.u_exp,
                    )
                    for f in tpl.factors
                )
                out.append(
                    TemplateInstance(
                        tpl,
                        tuple(sorted(idx.items())),
                        tuple(sorted(a.items())),
                        alpha,
                        beta,
                        factors,
                    )
                )
    return out


def check_template_instance(group: MatrixGroup, inst: TemplateInstance) -> dict:
    """Compare the commutator matrix with the template product (full matrices)."""
    spec = group.root_system
    rs = root_set(spec)
    record = {
        "id": f"{group}:{inst.ident}",
        "alpha": root_str(inst.alpha),
        "beta": root_str(inst.beta),
        "expected": " · ".join(f.render() for f in inst.factors) or "1",
    }
    bad = [r for r in (inst.alpha, inst.beta) + tuple(f.root for f in inst.factors) if r not in rs]
    if bad:
        record.update(status="fail", actual=f"template produced non-root {root_str(bad[0])}")
        return record
    lhs = commutator_matrix(group, inst.alpha, inst.beta)
    rhs = product_of_factors(group, inst.factors)
    ok = lhs == rhs
    if ok:
        record.update(status="pass", actual=record["expected"])
    else:
        try:
            found = extract_commutator_constant(group, inst.alpha, inst.beta)
            record.update(status="fail", actual=" · ".join(f.render() for f in found) or "1")
        except VerificationFailure as exc:
            record.update(status="fail", actual=str(exc))
    return record


def mutate_template(templates, index, factor_index=0):
    """Copy of ``templates`` with one coefficient sign flipped (for sensitivity tests)."""
    tpl = templates[index]
    fs = list(tpl.factors)
    fs[factor_index] = replace(fs[factor_index], sign=-fs[factor_index].sign)
    out = list(templates)
    out[index] = replace(tpl, factors=tuple(fs))
    return tuple(out)


def uncovered_pairs(group: MatrixGroup, templates=TEMPLATES):
    """Root pairs with ``alpha + beta`` a root that no template instance covers."""
    covered = {(i.alpha, i.beta) for i in template_instances(group, templates)}
    spec = group.root_system
    rs = root_set(spec)
    out = []
    for a in enumerate_roots(spec):
        for b in enumerate_roots(spec):
            s = tuple(x + y for x, y in zip(a, b))
            if s in rs and (a, b) not in covered:
                out.append((a, b))
    return out


def trivial_pairs(group: MatrixGroup):
    """Pairs with ``0 != alpha + beta`` not a root and no multiple ``i alpha + j beta`` a root."""
    spec = group.root_system
    rs = root_set(spec)
    out = []
    for a in enumerate_roots(spec):
        for b in enumerate_roots(spec):
            s = tuple(x + y for x, y in zip(a, b))
            if any(s) and s not in rs and not _candidate_roots(spec, a, b):
                out.append((a, b))
    return out


# ---------------------------------------------------------------------------
# Galois action


def galois_twist_matrix(a: ExactMatrix, which: str) -> ExactMatrix:
    """Entrywise ``i -> -i`` (``which="i"``) or ``sqrt2 -> -sqrt2`` (``which="sqrt2"``)."""
    if which == "i":
        return a.map_entries(lambda p: p.conj_i())
    if which == "sqrt2":
        return a.map_entries(lambda p: p.conj_sqrt2())
    raise DomainError(f"unknown twist {which!r}")


def identity_like(a: ExactMatrix) -> ExactMatrix:
    return ExactMatrix.identity(a.ctx, a.dim)


def scalar_matrix(ctx, d, value) -> ExactMatrix:
    return ExactMatrix.identity(ctx, d) * value



