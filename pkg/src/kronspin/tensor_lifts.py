"""Lifted Kronecker tensor product maps between simply connected groups.

``phi_SP: Sp_2n x Sp_2m -> Spin_4nm`` and ``phi_{d1,d2}: Spin_d1 x Spin_d2 -> Spin_{d1 d2}``
send each Chevalley generator to the product of target generators that the
matrix map ``rho`` produces.  The generator images are stored as data rows in a
small index language:

* ``B(y)`` is the block offset ``[y]`` (``2m*y`` or ``(2m+1)*y``),
* ``bar(y)`` is ``y-bar`` (``2m+1-y`` or ``2m+2-y``),
* a factor reads ``"+e(B(i-1)+k) -e(B(j-1)+k) : a"`` where the argument is one of
  ``a``, ``-a``, ``s2*a``, ``-s2*a`` or ``a^2`` (``s2`` is the square root of two).

Torus images are computed by two routes (reducing the image of ``h_alpha(t)`` in
the word engine, and reading the cocharacter off the diagonal of ``rho``) which
must agree.
"""

from __future__ import annotations

import ast
import re
from dataclasses import dataclass, field, replace
from functools import lru_cache
from itertools import product as iproduct

from .errors import ConfigurationError, DomainError, VerificationFailure
from .exact_arithmetic import CycloScalar, LaurentPoly, ParamContext, UnitMonomial
from .lattice import solve_rational
from .matrix_groups import (
    ExactMatrix,
    MatrixGroup,
    extract_commutator_constant,
    kronecker,
    rho_so,
    rho_sp,
)
from .root_systems import (
    RootSystemSpec,
    coroot,
    enumerate_roots,
    root_set,
    root_str,
    simple_roots,
)
from .steinberg_engine import (
    ENGINE_CTX,
    GenWord,
    TorusElement,
    center,
    galois_twist_word,
    reduce_word,
    words_equal,
)

__all__ = [
    "ImageFactor",
    "ImageRow",
    "IMAGE_TABLES",
    "LiftMap",
    "sp_lift",
    "spin_lift",
    "lift_image",
    "verify_well_defined",
    "matrix_consistency",
    "cocharacter",
    "torus_image",
    "CenterImageTable",
    "center_image_table",
    "KernelDescription",
    "kernel_of_composition",
    "garibaldi_tables",
    "garibaldi_matrix_route",
    "mutate_image_table",
    "torus_routes_agree",
    "DEFAULT_SP_SWEEP",
    "DEFAULT_SPIN_SWEEP",
    "default_sweep",
]


# ---------------------------------------------------------------------------
# index language


_ALLOWED_NAMES = {"i", "j", "k", "m", "n"}


def _eval_index(expr, env, block, barc):
    """Evaluate an index expression with ``B()`` and ``bar()`` safely."""

    def ev(node):
        if isinstance(node, ast.Expression):
            return ev(node.body)
        if isinstance(node, ast.Constant) and isinstance(node.value, int):
            return node.value
        if isinstance(node, ast.Name) and node.id in _ALLOWED_NAMES:
            return env[node.id]
        if isinstance(node, ast.BinOp) and isinstance(node.op, (ast.Add, ast.Sub, ast.Mult)):
            a, b = ev(node.left), ev(node.right)
            if isinstance(node.op, ast.Add):
                return a + b
            if isinstance(node.op, ast.Sub):
                return a - b
            return a * b
        if isinstance(node, ast.UnaryOp) and isinstance(node.op, ast.USub):
            return -ev(node.operand)
        if (
            isinstance(node, ast.Call)
            and isinstance(node.func, ast.Name)
            and node.func.id in ("B", "bar")
            and len(node.args) == 1
            and not node.keywords
        ):
            y = ev(node.args[0])
            return block * y if node.func.id == "B" else barc - y
        raise ConfigurationError(f"unsupported index expression {expr!r}")

    return ev(ast.parse(expr, mode="eval"))


_TERM_RE = re.compile(r"([+-])e\(([^()]*(?:\([^()]*\)[^()]*)*)\)")
_ARG_RE = re.compile(r"^(-)?(s2\*)?a(\^2)?$")


@dataclass(frozen=True)
class ImageFactor:
    """One target factor ``x_root(arg)``; ``root`` is a list of signed index expressions."""

    terms: tuple  # ((sign, expr), ...)
    sign: int
    sqrt2: bool
    power: int

    @classmethod
    def parse(cls, text):
        root_part, arg_part = (s.strip() for s in text.split(":"))
        terms = []
        pos = 0
        rp = root_part.replace(" ", "")
        while pos < len(rp):
            mt = _TERM_RE.match(rp, pos)
            if not mt:
                raise ConfigurationError(f"cannot parse image root {root_part!r}")
            terms.append((1 if mt.group(1) == "+" else -1, mt.group(2)))
            pos = mt.end()
        ma = _ARG_RE.match(arg_part.replace(" ", ""))
        if not ma:
            raise ConfigurationError(f"cannot parse image argument {arg_part!r}")
        return cls(
            tuple(terms),
            -1 if ma.group(1) else 1,
            bool(ma.group(2)),
            2 if ma.group(3) else 1,
        )

    def text(self):
        root = " ".join(f"{'+' if s > 0 else '-'}e({e})" for s, e in self.terms)
        arg = ("-" if self.sign < 0 else "") + ("s2*" if self.sqrt2 else "") + "a" + ("^2" if self.power == 2 else "")
        return f"{root} : {arg}"


@dataclass(frozen=True)
class ImageRow:
    """Image of the generators ``x_alpha`` of one shape on one side.

    ``shape`` is ``+i-j``, ``-i+j``, ``+i+j``, ``-i-j`` (``i < j``), ``+2i``, ``-2i``,
    ``+i`` or ``-i``.  ``loop`` is ``(var, lo, hi)`` with bounds as index expressions.
    """

    side: str
    shape: str
    loop: tuple
    factors: tuple
    tail: tuple = ()


def _row(side, shape, loop, factors, tail=()):
    return ImageRow(
        side,
        shape,
        loop,
        tuple(ImageFactor.parse(f) for f in factors),
        tuple(ImageFactor.parse(f) for f in tail),
    )


def _neg_text(f):
    """Negate every root coefficient of a factor text (keeps the argument)."""
    root, arg = f.split(":")
    root = root.replace("+e(", "\0").replace("-e(", "+e(").replace("\0", "-e(")
    return f"{root}: {arg.strip()}"


_L_LONG_SO = [
    ("+i-j", ["+e(B(i-1)+k) -e(B(j-1)+k) : a"]),
    ("+i+j", ["+e(B(i-1)+k) +e(B(j-1)+bar(k)) : a"]),
]
_R_LONG_SO = [
    ("+i-j", ["+e(B(k)+i) -e(B(k)+j) : a", "+e(B(k)+bar(j)) -e(B(k)+bar(i)) : -a"]),
    ("+i+j", ["+e(B(k)+i) -e(B(k)+bar(j)) : a", "+e(B(k)+j) -e(B(k)+bar(i)) : -a"]),
]


def _with_negatives(rows):
    out = []
    for shape, facs in rows:
        out.append((shape, facs))
        neg = "".join("-" if c == "+" else "+" if c == "-" else c for c in shape)
        out.append((neg, [_neg_text(f) for f in facs]))
    return out


def _build_tables():
    tabs = {}
    sp = []
    for shape, facs in [
        ("+i-j", ["+e(B(i-1)+k) -e(B(j-1)+k) : a"]),
        ("-i+j", ["-e(B(i-1)+k) +e(B(j-1)+k) : a"]),
    ]:
        sp.append(_row("L", shape, ("k", "1", "2*m"), facs))
    for shape, facs in [
        ("+i+j", ["+e(B(i-1)+k) +e(B(j-1)+m+k) : a", "+e(B(i-1)+m+k) +e(B(j-1)+k) : -a"]),
        ("-i-j", ["-e(B(i-1)+k) -e(B(j-1)+m+k) : a", "-e(B(i-1)+m+k) -e(B(j-1)+k) : -a"]),
        ("+2i", ["+e(B(i-1)+k) +e(B(i-1)+m+k) : a"]),
        ("-2i", ["-e(B(i-1)+k) -e(B(i-1)+m+k) : a"]),
    ]:
        sp.append(_row("L", shape, ("k", "1", "m"), facs))
    for shape, facs in [
        ("+i-j", ["+e(B(k)+i) -e(B(k)+j) : a", "-e(B(k)+m+i) +e(B(k)+m+j) : -a"]),
        ("-i+j", ["-e(B(k)+i) +e(B(k)+j) : a", "+e(B(k)+m+i) -e(B(k)+m+j) : -a"]),
        ("+i+j", ["+e(B(k)+i) -e(B(k)+m+j) : -a", "+e(B(k)+j) -e(B(k)+m+i) : -a"]),
        ("-i-j", ["-e(B(k)+i) +e(B(k)+m+j) : -a", "-e(B(k)+j) +e(B(k)+m+i) : -a"]),
        ("+2i", ["+e(B(k)+i) -e(B(k)+m+i) : -a"]),
        ("-2i", ["-e(B(k)+i) +e(B(k)+m+i) : -a"]),
    ]:
        sp.append(_row("R", shape, ("k", "0", "n-1"), facs))
    tabs["sp"] = tuple(sp)

    ee = [_row("L", s, ("k", "1", "2*m"), f) for s, f in _with_negatives(_L_LONG_SO)]
    ee += [_row("R", s, ("k", "0", "n-1"), f) for s, f in _with_negatives(_R_LONG_SO)]
    tabs["so_ee"] = tuple(ee)

    short_r = [
        ("+i", [
            "+e(B(k)+i) -e(B(k)+m+1) : s2*a",
            "+e(B(k)+m+1) -e(B(k)+bar(i)) : -s2*a",
            "+e(B(k)+i) -e(B(k)+bar(i)) : a^2",
        ]),
        ("-i", [
            "-e(B(k)+m+1) +e(B(k)+bar(i)) : -s2*a",
            "-e(B(k)+i) +e(B(k)+m+1) : s2*a",
            "-e(B(k)+i) +e(B(k)+bar(i)) : a^2",
        ]),
    ]
    eo = [_row("L", s, ("k", "1", "2*m+1"), f) for s, f in _with_negatives(_L_LONG_SO)]
    eo += [_row("R", s, ("k", "0", "n-1"), f) for s, f in _with_negatives(_R_LONG_SO)]
    eo += [_row("R", s, ("k", "0", "n-1"), f) for s, f in short_r]
    tabs["so_eo"] = tuple(eo)

    oo = [_row("L", s, ("k", "1", "2*m+1"), f) for s, f in _with_negatives(_L_LONG_SO)]
    oo.append(_row("L", "+i", ("k", "1", "m"), [
        "+e(B(i-1)+k) -e(B(n)+k) : s2*a",
        "+e(B(i-1)+bar(k)) +e(B(n)+k) : s2*a",
        "+e(B(i-1)+k) +e(B(i-1)+bar(k)) : a^2",
    ], ["+e(B(i-1)+m+1) : a"]))
    oo.append(_row("L", "-i", ("k", "1", "m"), [
        "-e(B(i-1)+bar(k)) -e(B(n)+k) : s2*a",
        "-e(B(i-1)+k) +e(B(n)+k) : s2*a",
        "-e(B(i-1)+k) -e(B(i-1)+bar(k)) : a^2",
    ], ["-e(B(i-1)+m+1) : a"]))
    tails = {
        "+i-j": "+e(B(n)+i) -e(B(n)+j) : a",
        "-i+j": "-e(B(n)+i) +e(B(n)+j) : a",
        "+i+j": "+e(B(n)+i) +e(B(n)+j) : a",
        "-i-j": "-e(B(n)+i) -e(B(n)+j) : a",
        "+i": "+e(B(n)+i) : a",
        "-i": "-e(B(n)+i) : a",
    }
    for s, f in _with_negatives(_R_LONG_SO) + short_r:
        oo.append(_row("R", s, ("k", "0", "n-1"), f, [tails[s]]))
    tabs["so_oo"] = tuple(oo)
    return tabs


IMAGE_TABLES = _build_tables()


def mutate_image_table(table, row_index, factor_index=0, what="arg"):
    """Copy of ``table`` with one sign flipped (argument sign or first root sign)."""
    rows = list(table)
    row = rows[row_index]
    facs = list(row.factors + row.tail)
    f = facs[factor_index]
    if what == "arg":
        f2 = replace(f, sign=-f.sign)
    else:
        (s, e), *rest = f.terms
        f2 = replace(f, terms=((-s, e), *rest))
    facs[factor_index] = f2
    nf = len(row.factors)
    rows[row_index] = replace(row, factors=tuple(facs[:nf]), tail=tuple(facs[nf:]))
    return tuple(rows)


# ---------------------------------------------------------------------------
# maps


def _shape_of(root):
    sup = [(k, c) for k, c in enumerate(root) if c]
    if len(sup) == 1:
        (i, c), = sup
        sg = "+" if c > 0 else "-"
        return (f"{sg}2i" if abs(c) == 2 else f"{sg}i"), {"i": i + 1}
    (i, a), (j, b) = sup
    return f"{'+' if a > 0 else '-'}i{'+' if b > 0 else '-'}j", {"i": i + 1, "j": j + 1}


@dataclass(frozen=True)
class LiftMap:
    """A lifted tensor product map with its image table."""

    kind: str  # "sp" | "spin"
    dims: tuple  # (2n, 2m) for sp, (d1, d2) for spin
    # The table takes part in equality so caches keyed on a LiftMap never mix a
    # mutated table with the standard one.
    table: tuple = field(default=None, repr=False)

    def __post_init__(self):
        d1, d2 = self.dims
        if self.kind == "sp":
            if d1 % 2 or d2 % 2 or d1 < 2 or d2 < 2:
                raise ConfigurationError("symplectic factors need even dimensions >= 2")
            key = "sp"
        elif self.kind == "spin":
            if d1 < 3 or d2 < 3:
                raise ConfigurationError("spin factors need dimension >= 3")
            if d1 == 2 or d2 == 2:
                raise ConfigurationError("Spin_2 is a torus")
            if d1 % 2 == 0 and d2 % 2 == 0:
                key = "so_ee"
            elif d1 % 2 == 0:
                key = "so_eo"
            elif d2 % 2 == 1:
                key = "so_oo"
            else:
                raise ConfigurationError(
                    "odd x even Kronecker products are not tabulated; swap the factors"
                )
        else:
            raise ConfigurationError(f"unknown lift kind {self.kind!r}")
        object.__setattr__(self, "key", key)
        if self.table is None:
            object.__setattr__(self, "table", IMAGE_TABLES[key])
        object.__setattr__(self, "_hash", hash((self.kind, self.dims, self.table)))

    def __hash__(self):
        return self._hash

    def __reduce__(self):
        # string hashes differ between processes, so rebuild rather than copy _hash
        return (LiftMap, (self.kind, self.dims, self.table))

    # parameters
    @property
    def n(self):
        return self.dims[0] // 2

    @property
    def m(self):
        return self.dims[1] // 2

    @property
    def block(self):
        return 2 * self.m if self.key in ("sp", "so_ee") else 2 * self.m + 1

    @property
    def bar_const(self):
        return self.block + 1

    @property
    def source(self):
        if self.kind == "sp":
            return RootSystemSpec("C", self.n), RootSystemSpec("C", self.m)
        fam = lambda d: "B" if d % 2 else "D"  # noqa: E731
        return RootSystemSpec(fam(self.dims[0]), self.n), RootSystemSpec(fam(self.dims[1]), self.m)

    @property
    def target_dim(self):
        return self.dims[0] * self.dims[1]

    @property
    def target(self):
        d = self.target_dim
        return RootSystemSpec("B" if d % 2 else "D", d // 2)

    def name(self):
        if self.kind == "sp":
            return f"phi_SP(Sp{self.dims[0]} x Sp{self.dims[1]} -> Spin{self.target_dim})"
        return f"phi_{self.dims[0]},{self.dims[1]}(Spin{self.dims[0]} x Spin{self.dims[1]} -> Spin{self.target_dim})"

    def source_group(self, side):
        d = self.dims[0 if side == "L" else 1]
        return MatrixGroup("Sp" if self.kind == "sp" else "SO", d)

    def rho(self, a: ExactMatrix, b: ExactMatrix) -> ExactMatrix:
        if self.kind == "sp":
            return rho_sp(self.n, self.m, a, b)
        return rho_so(self.dims[0], self.dims[1], a, b)

    def rho_side(self, side, mat: ExactMatrix) -> ExactMatrix:
        other = ExactMatrix.identity(mat.ctx, self.dims[1 if side == "L" else 0])
        return self.rho(mat, other) if side == "L" else self.rho(other, mat)

    def with_table(self, table):
        return LiftMap(self.kind, self.dims, table)


def sp_lift(n, m, table=None) -> LiftMap:
    """``phi_SP: Sp_2n x Sp_2m -> Spin_4nm``."""
    return LiftMap("sp", (2 * n, 2 * m), table)


def spin_lift(d1, d2, table=None) -> LiftMap:
    """``phi_{d1,d2}: Spin_d1 x Spin_d2 -> Spin_{d1 d2}``."""
    return LiftMap("spin", (d1, d2), table)


# (n, m) for phi_SP and (d1, d2) for phi_{d1,d2}: every parity branch at small size
DEFAULT_SP_SWEEP = ((1, 1), (1, 2), (2, 1), (2, 2), (1, 4), (2, 3), (3, 2))
DEFAULT_SPIN_SWEEP = (
    (4, 4),  # even-even, n even
    (6, 4),  # even-even, n odd
    (4, 6),
    (4, 3),  # even-odd
    (4, 5),
    (6, 3),
    (3, 3),  # odd-odd
    (5, 3),
    (3, 5),
)


def default_sweep(max_dim=24):
    """Lift maps of the default verification sweep with target dimension ``<= max_dim``."""
    out = [sp_lift(n, m) for n, m in DEFAULT_SP_SWEEP]
    out += [spin_lift(d1, d2) for d1, d2 in DEFAULT_SPIN_SWEEP]
    return [lm for lm in out if lm.target_dim <= max_dim]


def _find_row(lm: LiftMap, side, shape):
    for r in lm.table:
        if r.side == side and r.shape == shape:
            return r
    raise DomainError(f"no image row for side {side} shape {shape}")


def _factor_word(lm, f: ImageFactor, env, arg):
    tgt = lm.target
    rank = tgt.rank
    v = [0] * rank
    for s, e in f.terms:
        idx = _eval_index(e, env, lm.block, lm.bar_const)
        if not 1 <= idx <= rank:
            raise VerificationFailure(f"image index {idx} out of range 1..{rank} (template bug)")
        v[idx - 1] += s
    root = tuple(v)
    if root not in root_set(tgt):
        raise VerificationFailure(f"image factor {root_str(root)} is not a root of {tgt} (template bug)")
    p = arg ** f.power
    coeff = CycloScalar(0, 0, f.sign) if f.sqrt2 else CycloScalar(f.sign)
    return root, p * coeff


def lift_image(lm: LiftMap, side: str, root, arg) -> GenWord:
    """Word in the target group for ``(x_root(arg), 1)`` or ``(1, x_root(arg))``."""
    if side not in ("L", "R"):
        raise DomainError("side must be 'L' or 'R'")
    src = lm.source[0 if side == "L" else 1]
    root = tuple(root)
    if root not in root_set(src):
        raise DomainError(f"{root_str(root)} is not a root of {src}")
    if not isinstance(arg, LaurentPoly):
        raise DomainError("lift arguments must be LaurentPoly")
    ctx = arg.ctx
    shape, env = _shape_of(root)
    env.update(n=lm.n, m=lm.m)
    row = _find_row(lm, side, shape)
    var, lo, hi = row.loop
    lo_v = _eval_index(lo, env, lm.block, lm.bar_const)
    hi_v = _eval_index(hi, env, lm.block, lm.bar_const)
    factors = []
    if arg:
        for kv in range(lo_v, hi_v + 1):
            e2 = dict(env, **{var: kv})
            for f in row.factors:
                factors.append(_factor_word(lm, f, e2, arg))
        for f in row.tail:
            factors.append(_factor_word(lm, f, env, arg))
    return GenWord(lm.target, ctx, tuple(factors))


def _lift_h(lm, side, root, t: UnitMonomial) -> GenWord:
    ctx = t.ctx
    tp = t.to_poly()
    neg = tuple(-x for x in root)
    one = ctx.one()

    def w(s, sinv):
        return lift_image(lm, side, root, s) * lift_image(lm, side, neg, -sinv) * lift_image(lm, side, root, s)

    return w(tp, t.inverse().to_poly()) * w(-one, -one)


# ---------------------------------------------------------------------------
# checks


def _rec(ident, ok, expected, actual, **extra):
    out = {"id": ident, "status": "pass" if ok else "fail", "expected": expected, "actual": actual}
    out.update(extra)
    return out


def matrix_consistency(lm: LiftMap, ctx=ENGINE_CTX):
    """Projection of every generator image equals ``rho`` of the matrix generator."""
    t = ctx.var("t")
    recs = []
    for side, src in zip("LR", lm.source):
        g = lm.source_group(side)
        for r in enumerate_roots(src):
            lhs = lift_image(lm, side, r, t).project()
            rhs = lm.rho_side(side, g.generator(r, t))
            ok = lhs == rhs
            recs.append(_rec(f"matrix:{lm.dims}:{side}:{root_str(r)}", ok, "rho(x)", "match" if ok else "differs"))
    return recs


def _const_word(lm, side, factors, t_arg, u_arg):
    out = GenWord.identity(lm.target, t_arg.ctx)
    for f in factors:
        arg = t_arg ** f.t_exp * u_arg ** f.u_exp * f.coeff
        out = out * lift_image(lm, side, f.root, arg)
    return out


def verify_well_defined(lm: LiftMap, ctx=ENGINE_CTX, checks="abcd"):
    """Additivity, torus multiplicativity, commutator preservation and Galois equivariance."""
    t, u = ctx.var("t"), ctx.var("u")
    tu_, uu_ = t.as_unit(), u.as_unit()
    recs = []
    label = f"{lm.kind}{lm.dims}"
    for side, src in zip("LR", lm.source):
        roots = enumerate_roots(src)
        g = lm.source_group(side)
        for r in roots:
            rs = root_str(r)
            if "a" in checks:
                ok = words_equal(
                    lift_image(lm, side, r, t) * lift_image(lm, side, r, u), lift_image(lm, side, r, t + u)
                )
                recs.append(_rec(f"additive:{label}:{side}:{rs}", ok, "x(t)x(u)=x(t+u)", "holds" if ok else "fails"))
            if "b" in checks:
                lhs = reduce_word(_lift_h(lm, side, r, tu_) * _lift_h(lm, side, r, uu_))
                rhs = reduce_word(_lift_h(lm, side, r, tu_ * uu_))
                ok = lhs == rhs and not lhs.unipotent
                recs.append(_rec(f"multiplicative:{label}:{side}:{rs}", ok, rhs.render(), lhs.render()))
            if "d" in checks:
                c = CycloScalar(1, 1, 1, 0)
                for which in ("i", "sqrt2"):
                    src_arg = t * (c.conj_i() if which == "i" else c.conj_sqrt2())
                    short = lm.kind == "spin" and src.family == "B" and sum(abs(x) for x in r) == 1
                    if which == "sqrt2" and short:
                        src_arg = -src_arg
                    lhs = galois_twist_word(lift_image(lm, side, r, t * c), which)
                    rhs = lift_image(lm, side, r, src_arg)
                    ok = words_equal(lhs, rhs)
                    recs.append(_rec(f"galois-{which}:{label}:{side}:{rs}", ok, rhs.render(), lhs.render()))
        if "c" in checks:
            for a in roots:
                for b in roots:
                    if all(x + y == 0 for x, y in zip(a, b)):
                        continue
                    facs = extract_commutator_constant(g, a, b)
                    xa, xb = lift_image(lm, side, a, t), lift_image(lm, side, b, u)
                    lhs = xa * xb * lift_image(lm, side, a, -t) * lift_image(lm, side, b, -u)
                    rhs = _const_word(lm, side, facs, t, u)
                    ok = words_equal(lhs, rhs)
                    recs.append(_rec(
                        f"commutator:{label}:{side}:{root_str(a)}:{root_str(b)}", ok,
                        " · ".join(f.render() for f in facs) or "1", "holds" if ok else "fails",
                    ))
    if "c" in checks:
        # the two factors commute in the source
        sl, sr = lm.source
        for a in enumerate_roots(sl):
            for b in enumerate_roots(sr):
                xa, xb = lift_image(lm, "L", a, t), lift_image(lm, "R", b, u)
                ok = words_equal(xa * xb, xb * xa)
                recs.append(_rec(f"commutator:{label}:LR:{root_str(a)}:{root_str(b)}", ok, "1", "holds" if ok else "fails"))
    return recs


# ---------------------------------------------------------------------------
# torus images


@lru_cache(maxsize=None)
def _cocharacter_engine(lm: LiftMap, side, root):
    ctx = ParamContext(("t",))
    t = ctx.unit(1, t=1)
    cf = reduce_word(_lift_h(lm, side, root, t))
    if cf.unipotent:
        raise VerificationFailure(f"image of h_{root_str(root)}(t) is not a torus element")
    out = []
    for c in cf.torus.coords:
        if c.coeff != 1:
            raise VerificationFailure("torus image carries a constant factor")
        out.append(c.exps[0])
    return tuple(out)


def _diag_cocharacter(spec: RootSystemSpec, mat: ExactMatrix):
    """Coroot coordinates of the cocharacter whose value at ``t`` is the diagonal ``mat``."""
    if not mat.is_diagonal():
        raise VerificationFailure("matrix image of a torus element is not diagonal")
    r = spec.rank
    ev = []
    for p in range(r):
        d = mat.entry(p, p)
        if not d.is_unit() or d.as_unit().coeff != 1:
            raise VerificationFailure("diagonal entry is not a pure power of t")
        ev.append(d.as_unit().exps[0])
    # e_p(lambda) = ev[p]  ->  lambda = sum ev[p] e_p in coweight coordinates
    cols = [coroot(a) for a in simple_roots(spec)]
    sol = solve_rational(cols, ev)
    if sol is None or any(x.denominator != 1 for x in sol):
        raise VerificationFailure("diagonal cocharacter is not in the coroot lattice")
    return tuple(int(x) for x in sol)


@lru_cache(maxsize=None)
def _cocharacter_matrix(lm: LiftMap, side, root):
    ctx = ParamContext(("t",))
    t = ctx.var("t")
    g = lm.source_group(side)
    neg = tuple(-x for x in root)
    one = ctx.one()

    def w(s, si):
        return g.generator(root, s) * g.generator(neg, -si) * g.generator(root, s)

    h = w(t, t.as_unit().inverse().to_poly()) * w(-one, -one)
    return _diag_cocharacter(lm.target, lm.rho_side(side, h))


def cocharacter(lm: LiftMap, side, root, route="engine"):
    """Coroot coordinates ``c`` with ``phi(h_root(t)) = prod h_{alpha_i}(t^{c_i})``."""
    root = tuple(root)
    if route == "engine":
        return _cocharacter_engine(lm, side, root)
    if route == "matrix":
        return _cocharacter_matrix(lm, side, root)
    raise DomainError(f"unknown route {route!r}")


def torus_image(lm: LiftMap, side, s: TorusElement, route="engine") -> TorusElement:
    """Image of a source torus element given in simple coroot coordinates."""
    src = lm.source[0 if side == "L" else 1]
    if s.spec != src:
        raise DomainError("torus element of the wrong source group")
    ctx = s.ctx
    coords = [UnitMonomial.one(ctx)] * lm.target.rank
    for a, c in zip(simple_roots(src), s.coords):
        lam = cocharacter(lm, side, a, route)
        coords = [x * c ** k for x, k in zip(coords, lam)]
    return TorusElement(lm.target, tuple(coords))


def torus_image_pair(lm, s_left, s_right, route="engine"):
    return torus_image(lm, "L", s_left, route) * torus_image(lm, "R", s_right, route)


def torus_routes_agree(lm: LiftMap):
    recs = []
    for side, src in zip("LR", lm.source):
        for r in enumerate_roots(src):
            a, b = cocharacter(lm, side, r, "engine"), cocharacter(lm, side, r, "matrix")
            recs.append(_rec(f"torus-routes:{lm.kind}{lm.dims}:{side}:{root_str(r)}", a == b, list(b), list(a)))
    return recs


# ---------------------------------------------------------------------------
# centers


@dataclass(frozen=True)
class CenterImageTable:
    map_name: str
    rows: tuple  # ((left name, right name), target name)

    def as_dict(self):
        return {f"({a},{b})": v for (a, b), v in self.rows}


def _source_center_generators(spec):
    c = center(spec)
    if spec.family == "C":
        return [c.by_name("-I")]
    if spec.family == "B":
        return [c.by_name("h_{a_n}(-1)")]
    if spec.rank % 2:
        return [c.by_name("zeta")]
    return [c.by_name("xi1"), c.by_name("xi2")]


def _identity_name(spec):
    return "I" if spec.family == "C" else "1"


def center_image_table(lm: LiftMap, elements="generators") -> CenterImageTable:
    """Name the image of each central generator (or every central pair) in the target center."""
    sl, sr = lm.source
    tc = center(lm.target)
    one_l, one_r = TorusElement.one(sl), TorusElement.one(sr)
    if elements == "generators":
        pairs = [(g, None) for g in _source_center_generators(sl)] + [
            (None, g) for g in _source_center_generators(sr)
        ]
    else:
        pairs = list(iproduct(center(sl).elements, center(sr).elements))
    rows = []
    for a, b in pairs:
        ta = a.torus if a else one_l
        tb = b.torus if b else one_r
        img = torus_image_pair(lm, ta, tb)
        nm = tc.name_of(img)
        if nm is None:
            raise VerificationFailure(f"image {img.render()} is not central in {lm.target}")
        rows.append(((a.name if a else _identity_name(sl), b.name if b else _identity_name(sr)), nm))
    return CenterImageTable(lm.name(), tuple(rows))


@dataclass(frozen=True)
class KernelDescription:
    map_name: str
    quotient: str
    elements: tuple  # ((left name, right name), ...)
    name: str
    claim: str | None
    applies: bool
    matches_claim: bool | None


def _quotient_kernel(lm, quotient):
    tgt = lm.target
    tc = center(tgt)
    if quotient == "HSpin":
        if tgt.family != "D" or tgt.rank % 2:
            return None
        return {tc.by_name("1").torus, tc.by_name("xi1").torus}
    if quotient == "SO":
        if tgt.family == "B":
            return {tc.by_name("1").torus}
        return {tc.by_name("1").torus, tc.by_name("h_{a_{n-1}}(-1)h_{a_n}(-1)").torus}
    if quotient == "Spin":
        return {tc.by_name("1").torus}
    raise ConfigurationError(f"unknown quotient {quotient!r}")


def _claim(lm):
    sl, sr = lm.source
    if lm.kind == "sp":
        return (lm.n % 2 == 0 or lm.m % 2 == 0), "full center"
    if lm.key == "so_ee":
        return (lm.n % 2 == 0 or lm.m % 2 == 0), "full center"
    if lm.key == "so_eo":
        return lm.n % 2 == 0, "{1,xi1} x Z(right)"
    return False, None


def kernel_of_composition(lm: LiftMap, quotient="HSpin") -> KernelDescription:
    """Central elements of the source mapping into the kernel of ``Spin -> quotient``."""
    sl, sr = lm.source
    qk = _quotient_kernel(lm, quotient)
    applies, claim = _claim(lm)
    if qk is None:
        return KernelDescription(lm.name(), quotient, (), "undefined", claim, False, None)
    cl, cr = center(sl), center(sr)
    ker = []
    for a, b in iproduct(cl.elements, cr.elements):
        if torus_image_pair(lm, a.torus, b.torus) in qk:
            ker.append((a.name, b.name))
    full = [(a.name, b.name) for a, b in iproduct(cl.elements, cr.elements)]
    if ker == full:
        name = "full center"
    elif lm.key == "so_eo" and sorted(ker) == sorted(
        (a, b.name) for a in ("1", "xi1") for b in cr.elements
    ):
        name = "{1,xi1} x Z(right)"
    elif ker == [(_identity_name(sl), _identity_name(sr))]:
        name = "trivial"
    else:
        name = "{" + ", ".join(f"({a},{b})" for a, b in ker) + "}"
    matches = (name == claim) if (applies and quotient == "HSpin") else None
    return KernelDescription(lm.name(), quotient, tuple(ker), name, claim, applies, matches)


# ---------------------------------------------------------------------------
# the Sp2 x Sp8 -> Spin16 tables


# Weyl element relating the coordinates of the general P to the block layout used
# for the Sp2 x Sp8 example: e5 <-> -e8 and e6 <-> -e7.
_GARIBALDI_W = {4: (7, -1), 7: (4, -1), 5: (6, -1), 6: (5, -1)}


def _apply_w(vec):
    out = list(vec)
    for src, (dst, s) in _GARIBALDI_W.items():
        out[dst] = s * vec[src]
    return tuple(out)


def _coroot_vector(spec, coords):
    """e-coordinates of ``sum c_i alpha_i^vee``."""
    v = [0] * spec.rank
    for c, a in zip(coords, simple_roots(spec)):
        v = [x + c * y for x, y in zip(v, coroot(a))]
    return v


def _coroot_coords(spec, vec):
    sol = solve_rational([coroot(a) for a in simple_roots(spec)], vec)
    if sol is None or any(x.denominator != 1 for x in sol):
        raise VerificationFailure("vector is not in the coroot lattice")
    return tuple(int(x) for x in sol)


def garibaldi_tables(ctx=None):
    """Torus and center tables of ``Sp2 x Sp8 -> Spin16`` in the example's coordinates.

    Returns ``(torus_rows, center_rows)``; torus rows map a label to a
    ``TorusElement`` in parameters ``t, u``, center rows map a label to a
    central-element name.
    """
    ctx = ctx or ENGINE_CTX
    lm = sp_lift(1, 4)
    tgt = lm.target
    t, u = ctx.unit(1, t=1), ctx.unit(1, u=1)
    rows = []
    labels = [("L", 1, t, "(h1(t),I)")] + [("R", i, u, f"(I,h{i}(u))") for i in range(1, 5)]
    for side, i, par, label in labels:
        src = lm.source[0 if side == "L" else 1]
        lam = cocharacter(lm, side, simple_roots(src)[i - 1])
        lam_w = _coroot_coords(tgt, _apply_w(_coroot_vector(tgt, lam)))
        rows.append((label, TorusElement(tgt, tuple(par ** k for k in lam_w))))
    m1 = CycloScalar(-1)
    cl = TorusElement(RootSystemSpec("C", 1), (ctx.unit(m1),))
    one1 = TorusElement.one(RootSystemSpec("C", 1), ctx)
    c8 = RootSystemSpec("C", 4)
    cr = TorusElement(c8, tuple(ctx.unit(m1) if k in (0, 2) else ctx.unit(1) for k in range(4)))
    one8 = TorusElement.one(c8, ctx)
    tc = center(tgt, ctx)
    crow = []
    for label, a, b in [
        ("(I,I)", one1, one8),
        ("(h1(-1),I)", cl, one8),
        ("(I,h1(-1)h3(-1))", one1, cr),
        ("(h1(-1),h1(-1)h3(-1))", cl, cr),
    ]:
        img = torus_image_pair(lm, a, b)
        img_w = _weyl_torus(tgt, img)
        crow.append((label, tc.name_of(img_w), img_w))
    return tuple(rows), tuple(crow)


def _weyl_torus(spec, s: TorusElement) -> TorusElement:
    """Image of a torus element under the Weyl element ``_GARIBALDI_W``."""
    out = TorusElement.one(spec, s.ctx)
    for a, c in zip(simple_roots(spec), s.coords):
        vec = _apply_w(coroot(a))
        coords = _coroot_coords(spec, vec)
        out = out * TorusElement(spec, tuple(c ** k for k in coords))
    return out


def garibaldi_p(ctx) -> ExactMatrix:
    """``[[I4,0,0,0],[0,0,Omega4,0],[0,-Omega4,0,0],[0,0,0,I4]]``."""
    ent = {}
    for i in range(4):
        ent[(i, i)] = 1
        ent[(12 + i, 12 + i)] = 1
        ent[(4 + i, 8 + 3 - i)] = 1
        ent[(8 + i, 4 + 3 - i)] = -1
    return ExactMatrix.from_entries(ctx, 16, ent)


def garibaldi_matrix_route():
    """Cocharacters of ``(A, B) -> P^-1 (A (x) B) P`` read directly off the diagonal."""
    ctx = ParamContext(("t",))
    t = ctx.var("t")
    p = garibaldi_p(ctx)
    pinv = p.transpose()
    if not (pinv * p).is_identity():
        raise VerificationFailure("P is not a signed permutation")
    tgt = RootSystemSpec("D", 8)
    out = []
    for side, d, idx, label in [("L", 2, 1, "(h1(t),I)")] + [("R", 8, i, f"(I,h{i}(u))") for i in range(1, 5)]:
        g = MatrixGroup("Sp", d)
        a = simple_roots(g.root_system)[idx - 1]
        neg = tuple(-x for x in a)
        one = ctx.one()

        def w(s, si):
            return g.generator(a, s) * g.generator(neg, -si) * g.generator(a, s)

        h = w(t, t.as_unit().inverse().to_poly()) * w(-one, -one)
        other = ExactMatrix.identity(ctx, 10 - d)
        k = kronecker(h, other) if side == "L" else kronecker(other, h)
        out.append((label, _diag_cocharacter(tgt, pinv * k * p)))
    return tuple(out)

