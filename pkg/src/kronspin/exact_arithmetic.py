"""Exact arithmetic in Q(i, sqrt2) and Laurent polynomials over it.

The field is stored as the 4-dimensional Q-algebra with basis
``1, i, sqrt2, i*sqrt2``.  Laurent polynomials live in an explicit
:class:`ParamContext` naming their formal parameters; objects from different
contexts never mix silently.
"""

from __future__ import annotations

from fractions import Fraction
from numbers import Rational

from . import kernels as K
from .errors import DomainError, ExactArithmeticError

__all__ = [
    "CycloScalar",
    "ParamContext",
    "LaurentPoly",
    "UnitMonomial",
    "as_scalar",
    "root_of_unity",
]


def _q(x):
    """Normalize a rational to int when integral."""
    if isinstance(x, bool):
        raise TypeError("bool is not a rational")
    if isinstance(x, int):
        return x
    if isinstance(x, Rational):
        f = Fraction(x)
        return f.numerator if f.denominator == 1 else f
    raise TypeError(f"expected a rational, got {type(x).__name__}")


def _fmt_q(x):
    return str(Fraction(x)) if not isinstance(x, int) else str(x)


class CycloScalar:
    """Element ``a + b*i + c*sqrt2 + d*i*sqrt2`` of Q(i, sqrt2)."""

    __slots__ = ("v",)

    def __init__(self, a=0, b=0, c=0, d=0):
        self.v = (_q(a), _q(b), _q(c), _q(d))

    @classmethod
    def _raw(cls, v):
        obj = cls.__new__(cls)
        obj.v = v
        return obj

    @classmethod
    def one(cls):
        return cls(1)

    @classmethod
    def zero(cls):
        return cls(0)

    @classmethod
    def i(cls):
        return cls(0, 1)

    @classmethod
    def sqrt2(cls):
        return cls(0, 0, 1)

    @property
    def a(self):
        return self.v[0]

    @property
    def b(self):
        return self.v[1]

    @property
    def c(self):
        return self.v[2]

    @property
    def d(self):
        return self.v[3]

    def is_zero(self):
        return self.v == K.ZERO4

    def is_rational(self):
        return self.v[1] == 0 and self.v[2] == 0 and self.v[3] == 0

    def __bool__(self):
        return not self.is_zero()

    def __eq__(self, other):
        if isinstance(other, CycloScalar):
            return self.v == other.v
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            return self.v == (_q(other), 0, 0, 0)
        return NotImplemented

    def __hash__(self):
        return hash(("CycloScalar", self.v))

    def __add__(self, other):
        if isinstance(other, (LaurentPoly, UnitMonomial)):
            return NotImplemented
        other = as_scalar(other)
        return CycloScalar._raw(K.s_add(self.v, other.v))

    __radd__ = __add__

    def __neg__(self):
        return CycloScalar._raw(K.s_neg(self.v))

    def __sub__(self, other):
        return self + (-as_scalar(other))

    def __rsub__(self, other):
        return as_scalar(other) - self

    def __mul__(self, other):
        if isinstance(other, (LaurentPoly, UnitMonomial)):
            return NotImplemented
        other = as_scalar(other)
        return CycloScalar._raw(K.s_mul(self.v, other.v))

    __rmul__ = __mul__

    def conj_i(self):
        """Galois twist fixing sqrt2 and sending i to -i."""
        a, b, c, d = self.v
        return CycloScalar._raw((a, -b, c, -d))

    def conj_sqrt2(self):
        """Galois twist fixing i and sending sqrt2 to -sqrt2."""
        a, b, c, d = self.v
        return CycloScalar._raw((a, b, -c, -d))

    def inv(self):
        if self.is_zero():
            raise ExactArithmeticError("inversion of zero in Q(i, sqrt2)")
        # x * conj_i(x) lies in Q(sqrt2); multiply again by its sqrt2-conjugate.
        y = self * self.conj_i()
        z = y * y.conj_sqrt2()
        n = z.v[0]
        num = self.conj_i() * y.conj_sqrt2()
        return CycloScalar._raw(tuple(_q(Fraction(x) / n) for x in num.v))

    def __truediv__(self, other):
        return self * as_scalar(other).inv()

    def __rtruediv__(self, other):
        return as_scalar(other) * self.inv()

    def __pow__(self, k):
        if not isinstance(k, int):
            raise TypeError("integer exponent required")
        base = self if k >= 0 else self.inv()
        out = CycloScalar.one()
        for _ in range(abs(k)):
            out = out * base
        return out

    def render(self):
        names = ("", "i", "sqrt2", "i*sqrt2")
        present = [(val, name) for val, name in zip(self.v, names) if val != 0]
        if not present:
            return "0"
        if len(present) == 1 and present[0][1] and present[0][0] in (1, -1):
            val, name = present[0]
            return ("-" if val == -1 else "") + name
        # inside a sum every irrational part carries its coefficient: (1/2 + 1*i)
        parts = [f"{_fmt_q(val)}*{name}" if name else _fmt_q(val) for val, name in present]
        text = " + ".join(parts).replace("+ -", "- ")
        return text if len(parts) == 1 else f"({text})"

    def __repr__(self):
        return f"CycloScalar{self.v!r}"

    def __str__(self):
        return self.render()


def as_scalar(x) -> CycloScalar:
    if isinstance(x, CycloScalar):
        return x
    if isinstance(x, (int, Fraction)) and not isinstance(x, bool):
        return CycloScalar(x)
    raise TypeError(f"cannot interpret {x!r} as a scalar")


def root_of_unity(k: int, order: int) -> CycloScalar:
    """Return exp(2*pi*i*k/order) for order dividing 4."""
    if 4 % order:
        raise DomainError("only roots of unity of order dividing 4 are representable")
    k = (k * (4 // order)) % 4
    return (CycloScalar(1), CycloScalar(0, 1), CycloScalar(-1), CycloScalar(0, -1))[k]


class ParamContext:
    """An ordered list of formal parameter names."""

    __slots__ = ("names", "_index")

    def __init__(self, names=("t", "u")):
        names = tuple(names)
        if len(set(names)) != len(names):
            raise DomainError("duplicate parameter names")
        self.names = names
        self._index = {n: k for k, n in enumerate(names)}

    @property
    def nvars(self):
        return len(self.names)

    def index(self, name):
        try:
            return self._index[name]
        except KeyError:
            raise DomainError(f"unknown parameter {name!r} in context {self.names}") from None

    def zero_exp(self):
        return (0,) * len(self.names)

    def var(self, name) -> "LaurentPoly":
        e = [0] * len(self.names)
        e[self.index(name)] = 1
        return LaurentPoly(self, {tuple(e): (1, 0, 0, 0)})

    def const(self, x) -> "LaurentPoly":
        s = as_scalar(x)
        if s.is_zero():
            return LaurentPoly(self, {})
        return LaurentPoly(self, {self.zero_exp(): s.v})

    def zero(self):
        return LaurentPoly(self, {})

    def one(self):
        return self.const(1)

    def unit(self, coeff=1, **exps) -> "UnitMonomial":
        e = [0] * len(self.names)
        for k, v in exps.items():
            e[self.index(k)] = v
        return UnitMonomial(self, as_scalar(coeff), tuple(e))

    def __eq__(self, other):
        return isinstance(other, ParamContext) and self.names == other.names

    def __hash__(self):
        return hash(("ParamContext", self.names))

    def __repr__(self):
        return f"ParamContext({self.names!r})"


def _render_monomial(ctx, exps):
    parts = []
    for name, e in zip(ctx.names, exps):
        if e == 0:
            continue
        parts.append(name if e == 1 else f"{name}^{e}")
    return "·".join(parts)


def _render_term(ctx, exps, coeff: CycloScalar):
    mono = _render_monomial(ctx, exps)
    if not mono:
        return coeff.render()
    if coeff == 1:
        return mono
    if coeff == -1:
        return "-" + mono
    return f"{coeff.render()}·{mono}"


class LaurentPoly:
    """Laurent polynomial with Q(i, sqrt2) coefficients in a fixed context."""

    __slots__ = ("ctx", "terms", "_hash")

    def __init__(self, ctx: ParamContext, terms=None):
        self.ctx = ctx
        self.terms = terms if terms is not None else {}
        self._hash = None

    # construction helpers
    @classmethod
    def from_terms(cls, ctx, items):
        """Build from ``(exponents, scalar)`` pairs, summing duplicates."""
        out = {}
        for e, c in items:
            e = tuple(e)
            if len(e) != ctx.nvars:
                raise DomainError("exponent vector length does not match context")
            out = K.p_add(out, {e: as_scalar(c).v}) if not as_scalar(c).is_zero() else out
        return cls(ctx, out)

    def _coerce(self, other):
        if isinstance(other, LaurentPoly):
            if other.ctx != self.ctx:
                raise DomainError(f"incompatible contexts {self.ctx.names} vs {other.ctx.names}")
            return other
        if isinstance(other, UnitMonomial):
            if other.ctx != self.ctx:
                raise DomainError("incompatible contexts")
            return other.to_poly()
        return self.ctx.const(other)

    def is_zero(self):
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def __eq__(self, other):
        if isinstance(other, LaurentPoly):
            return self.ctx == other.ctx and self.terms == other.terms
        if isinstance(other, (int, Fraction, CycloScalar)) and not isinstance(other, bool):
            return self.terms == self.ctx.const(other).terms
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.ctx, frozenset(self.terms.items())))
        return self._hash

    def __add__(self, other):
        other = self._coerce(other)
        return LaurentPoly(self.ctx, K.p_add(self.terms, other.terms))

    __radd__ = __add__

    def __neg__(self):
        return LaurentPoly(self.ctx, K.p_neg(self.terms))

    def __sub__(self, other):
        other = self._coerce(other)
        return LaurentPoly(self.ctx, K.p_sub(self.terms, other.terms))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        other = self._coerce(other)
        return LaurentPoly(self.ctx, K.p_mul(self.terms, other.terms))

    __rmul__ = __mul__

    def __pow__(self, k):
        if not isinstance(k, int):
            raise TypeError("integer exponent required")
        if k < 0:
            return self.as_unit().inverse().to_poly() ** (-k)
        out = self.ctx.one()
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def __truediv__(self, other):
        other = self._coerce(other)
        return self * other.as_unit().inverse().to_poly()

    def __rtruediv__(self, other):
        return self._coerce(other) / self

    # queries
    def is_unit(self):
        return len(self.terms) == 1

    def as_unit(self) -> "UnitMonomial":
        if not self.is_unit():
            raise ExactArithmeticError(f"{self.render()} is not a unit")
        (e, c), = self.terms.items()
        return UnitMonomial(self.ctx, CycloScalar._raw(c), e)

    def is_constant(self):
        return all(e == self.ctx.zero_exp() for e in self.terms)

    def constant_value(self) -> CycloScalar:
        if not self.is_constant():
            raise DomainError(f"{self.render()} is not constant")
        return CycloScalar._raw(self.terms.get(self.ctx.zero_exp(), K.ZERO4))

    def coeff(self, exps) -> CycloScalar:
        return CycloScalar._raw(self.terms.get(tuple(exps), K.ZERO4))

    def degree_in(self, name):
        k = self.ctx.index(name)
        return max((e[k] for e in self.terms), default=None)

    # transformations
    def map_coeffs(self, fn):
        out = {}
        for e, c in self.terms.items():
            v = fn(CycloScalar._raw(c)).v
            if v != K.ZERO4:
                out[e] = v
        return LaurentPoly(self.ctx, out)

    def conj_i(self):
        return self.map_coeffs(CycloScalar.conj_i)

    def conj_sqrt2(self):
        return self.map_coeffs(CycloScalar.conj_sqrt2)

    def substitute(self, mapping, ctx: ParamContext | None = None):
        """Replace parameters by polynomials or unit monomials.

        ``mapping`` sends parameter names of ``self.ctx`` to values in ``ctx``
        (default: the same context).  Parameters absent from ``mapping`` must
        also exist in ``ctx``.  A negative exponent requires a unit value.
        """
        ctx = ctx or self.ctx
        images = []
        for name in self.ctx.names:
            if name in mapping:
                v = mapping[name]
                if isinstance(v, UnitMonomial):
                    v = v.to_poly()
                elif not isinstance(v, LaurentPoly):
                    v = ctx.const(v)
                if v.ctx != ctx:
                    raise DomainError("substitution value in wrong context")
                images.append(v)
            else:
                images.append(ctx.var(name))
        cache = {}

        def power(k, e):
            key = (k, e)
            if key not in cache:
                base = images[k]
                if e < 0 and not base.is_unit():
                    raise ExactArithmeticError(
                        f"cannot substitute non-unit {base.render()} for inverted parameter "
                        f"{self.ctx.names[k]}"
                    )
                cache[key] = base ** e
            return cache[key]

        out = {}
        for e, c in self.terms.items():
            term = {ctx.zero_exp(): c}
            for k, ek in enumerate(e):
                if ek:
                    term = K.p_mul(term, power(k, ek).terms)
            out = K.p_add(out, term)
        return LaurentPoly(ctx, out)

    def evaluate(self, values) -> CycloScalar:
        """Evaluate at scalar values for every parameter."""
        res = self.substitute({n: values[n] for n in self.ctx.names}, self.ctx)
        return res.constant_value()

    def render(self):
        if not self.terms:
            return "0"
        keys = sorted(self.terms, reverse=True)
        parts = [_render_term(self.ctx, e, CycloScalar._raw(self.terms[e])) for e in keys]
        return " + ".join(parts).replace("+ -", "- ")

    def __repr__(self):
        return f"LaurentPoly({self.render()})"

    __str__ = render


class UnitMonomial:
    """An invertible element ``c * t^e1 * u^e2 ...`` with nonzero scalar ``c``."""

    __slots__ = ("ctx", "coeff", "exps")

    def __init__(self, ctx: ParamContext, coeff: CycloScalar, exps):
        coeff = as_scalar(coeff)
        if coeff.is_zero():
            raise ExactArithmeticError("unit monomial with zero coefficient")
        exps = tuple(exps)
        if len(exps) != ctx.nvars:
            raise DomainError("exponent vector length does not match context")
        self.ctx = ctx
        self.coeff = coeff
        self.exps = exps

    @classmethod
    def one(cls, ctx):
        return cls(ctx, CycloScalar.one(), ctx.zero_exp())

    def _check(self, other):
        if not isinstance(other, UnitMonomial) or other.ctx != self.ctx:
            raise DomainError("incompatible unit monomials")

    def __mul__(self, other):
        if isinstance(other, (int, Fraction, CycloScalar)) and not isinstance(other, bool):
            return UnitMonomial(self.ctx, self.coeff * as_scalar(other), self.exps)
        self._check(other)
        return UnitMonomial(
            self.ctx, self.coeff * other.coeff, tuple(a + b for a, b in zip(self.exps, other.exps))
        )

    __rmul__ = __mul__

    def inverse(self):
        return UnitMonomial(self.ctx, self.coeff.inv(), tuple(-a for a in self.exps))

    def __truediv__(self, other):
        return self * other.inverse()

    def __neg__(self):
        return UnitMonomial(self.ctx, -self.coeff, self.exps)

    def __pow__(self, k):
        if not isinstance(k, int):
            raise TypeError("integer exponent required")
        return UnitMonomial(self.ctx, self.coeff ** k, tuple(a * k for a in self.exps))

    def is_one(self):
        return self.coeff == 1 and not any(self.exps)

    def to_poly(self) -> LaurentPoly:
        return LaurentPoly(self.ctx, {self.exps: self.coeff.v})

    def conj_i(self):
        return UnitMonomial(self.ctx, self.coeff.conj_i(), self.exps)

    def conj_sqrt2(self):
        return UnitMonomial(self.ctx, self.coeff.conj_sqrt2(), self.exps)

    def __eq__(self, other):
        if isinstance(other, UnitMonomial):
            return self.ctx == other.ctx and self.coeff == other.coeff and self.exps == other.exps
        return NotImplemented

    def __hash__(self):
        return hash((self.ctx, self.coeff, self.exps))

    def render(self):
        return _render_term(self.ctx, self.exps, self.coeff)

    def __repr__(self):
        return f"UnitMonomial({self.render()})"

    __str__ = render
