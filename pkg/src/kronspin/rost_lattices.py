"""Character lattices, normalized Killing forms and Rost multipliers.

Quadratic forms are symmetric rational matrices ``F`` in the ``e_i`` coordinates
of the cocharacter space, ``q(x) = x^T F x``.  A form lies in ``Sym^2(T*)`` iff
in the coordinates ``y = B x`` of a lattice basis ``B`` (rows are characters)
its Gram matrix ``G = B^-T F B^-1`` has integral diagonal and half-integral
off-diagonal entries.  The normalized Killing form is the least positive
multiple of ``sum_alpha alpha^2`` with that property.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property, lru_cache
from math import gcd

from .errors import ConfigurationError, DomainError, VerificationFailure
from .lattice import CoordinateSolver, rational_inverse, smith_normal_form, solve_rational
from .root_systems import (
    RootSystemSpec,
    coroot,
    enumerate_roots,
    simple_reflection_matrix,
    simple_roots,
)

__all__ = [
    "ISOGENIES",
    "GroupType",
    "group_type",
    "CharacterLattice",
    "QuadraticForm",
    "RostResult",
    "character_lattice",
    "killing_form",
    "cocharacter_map",
    "dual_map",
    "pullback",
    "rost_multiplier",
    "restriction_multiplier",
    "projection_multiplier",
    "adjointness_records",
    "theorem_cell",
    "theorem_grid",
    "odd_factor_multiplier",
    "THEOREM_REPRESENTATIVES",
    "smith_normal_form",
]

ISOGENIES = ("Spin", "SO", "HSpin", "PSO", "Sp", "PSp")


@dataclass(frozen=True)
class GroupType:
    """A split group given by isogeny type and root system."""

    isogeny: str
    spec: RootSystemSpec

    def __post_init__(self):
        fam = self.spec.family
        ok = {
            "Spin": ("B", "D"),
            "SO": ("B", "D"),
            "PSO": ("B", "D"),
            "HSpin": ("D",),
            "Sp": ("C",),
            "PSp": ("C",),
        }.get(self.isogeny)
        if ok is None:
            raise ConfigurationError(f"unknown isogeny type {self.isogeny!r}")
        if fam not in ok:
            raise ConfigurationError(f"{self.isogeny} is not of type {fam}")
        if self.isogeny == "HSpin" and self.spec.rank % 2:
            raise DomainError("HSpin_2n needs n even (xi1 must have order 2)")

    @property
    def dim(self):
        n = self.spec.rank
        return 2 * n + 1 if self.spec.family == "B" else 2 * n

    def __str__(self):
        return f"{self.isogeny}{self.dim}"


def group_type(isogeny: str, dim: int) -> GroupType:
    """``group_type("HSpin", 16)`` and friends."""
    if isogeny in ("Sp", "PSp"):
        if dim % 2:
            raise ConfigurationError("symplectic groups need even dimension")
        return GroupType(isogeny, RootSystemSpec("C", dim // 2))
    fam = "B" if dim % 2 else "D"
    return GroupType(isogeny, RootSystemSpec(fam, dim // 2))


# ---------------------------------------------------------------------------
# lattices


def _frac_rows(rows):
    return tuple(tuple(Fraction(x) for x in r) for r in rows)


@dataclass(frozen=True)
class CharacterLattice:
    group: GroupType
    basis: tuple  # rows, rational vectors in e-coordinates

    @cached_property
    def _solver(self):
        # basis rows are the columns of the coordinate system
        return CoordinateSolver(list(self.basis))

    def contains(self, vec) -> bool:
        return self._solver(vec) is not None

    def index_in(self, other: "CharacterLattice") -> int:
        """``[other : self]`` for ``self`` a sublattice of ``other``."""
        rows = []
        for b in self.basis:
            sol = solve_rational(list(other.basis), b)
            if sol is None or any(x.denominator != 1 for x in sol):
                raise VerificationFailure("not a sublattice")
            rows.append([int(x) for x in sol])
        _, d, _ = smith_normal_form(rows)
        out = 1
        for i in range(len(rows)):
            out *= d[i][i]
        return abs(out)


@lru_cache(maxsize=None)
def character_lattice(g: GroupType) -> CharacterLattice:
    """Basis of ``T*`` for the given isogeny type."""
    n = g.spec.rank
    e = [[int(i == j) for j in range(n)] for i in range(n)]
    half = [Fraction(1, 2)] * n

    def even_sum(first):
        rows = [[2 * x for x in first[0]]]
        rows += [[a - b for a, b in zip(first[k], first[0])] for k in range(1, len(first))]
        return rows

    iso = g.isogeny
    if iso in ("SO", "Sp") or (iso == "PSO" and g.spec.family == "B"):
        rows = e
    elif iso == "Spin":
        rows = e[: n - 1] + [half]
    elif iso in ("PSO", "PSp"):
        rows = even_sum(e)
    else:  # HSpin
        rows = (even_sum(e[: n - 1]) if n > 1 else []) + [half]
    lat = CharacterLattice(g, _frac_rows(rows))
    for r in simple_roots(g.spec):
        if not lat.contains(r):
            raise VerificationFailure(f"{g} lattice misses the root {r}")
    return lat


# ---------------------------------------------------------------------------
# forms


@dataclass(frozen=True)
class QuadraticForm:
    matrix: tuple  # symmetric rational rows

    @classmethod
    def from_rows(cls, rows):
        m = _frac_rows(rows)
        if any(m[i][j] != m[j][i] for i in range(len(m)) for j in range(len(m))):
            raise DomainError("quadratic form matrix must be symmetric")
        return cls(m)

    @property
    def rank(self):
        return len(self.matrix)

    def scalar(self):
        """``c`` with ``F = c * I`` (i.e. ``q = c * sum e_i^2``), else ``None``."""
        c = self.matrix[0][0]
        n = self.rank
        if all(self.matrix[i][j] == (c if i == j else 0) for i in range(n) for j in range(n)):
            return c
        return None

    def gram(self, lattice: CharacterLattice):
        binv = rational_inverse([list(r) for r in lattice.basis])
        bit = [[binv[j][i] for j in range(len(binv))] for i in range(len(binv))]
        return _mm(_mm(bit, [list(r) for r in self.matrix]), binv)

    def in_sym2(self, lattice: CharacterLattice) -> bool:
        g = self.gram(lattice)
        n = len(g)
        return all(g[i][i].denominator == 1 for i in range(n)) and all(
            (2 * g[i][j]).denominator == 1 for i in range(n) for j in range(i + 1, n)
        )

    def is_w_invariant(self, spec: RootSystemSpec) -> bool:
        f = [list(r) for r in self.matrix]
        for k in range(1, spec.rank + 1):
            r = [list(x) for x in simple_reflection_matrix(spec, k)]
            rt = [[r[j][i] for j in range(len(r))] for i in range(len(r))]
            if _mm(_mm(rt, f), r) != f:
                return False
        return True

    def __mul__(self, c):
        return QuadraticForm(tuple(tuple(Fraction(c) * x for x in r) for r in self.matrix))

    __rmul__ = __mul__

    def render(self):
        c = self.scalar()
        if c is not None:
            return ("" if c == 1 else f"{c}*") + f"sum_{{i=1}}^{{{self.rank}}} e_i^2"
        return repr(self.matrix)


def _mm(a, b):
    return [[sum(a[i][k] * b[k][j] for k in range(len(b))) for j in range(len(b[0]))] for i in range(len(a))]


def root_sum_form(spec: RootSystemSpec) -> QuadraticForm:
    """``sum_{alpha in Phi} alpha^2`` as a symmetric matrix."""
    n = spec.rank
    m = [[Fraction(0)] * n for _ in range(n)]
    for r in enumerate_roots(spec):
        for i in range(n):
            if r[i]:
                for j in range(n):
                    m[i][j] += r[i] * r[j]
    return QuadraticForm.from_rows(m)


def _qgcd(values):
    num, den = 0, 1
    for v in values:
        v = Fraction(v)
        if v:
            num = gcd(num, v.numerator)
            den = den * v.denominator // gcd(den, v.denominator)
    return Fraction(num, den)


@lru_cache(maxsize=None)
def killing_form(g: GroupType) -> QuadraticForm:
    """Least positive multiple of ``sum alpha^2`` lying in ``Sym^2(T*)``."""
    lat = character_lattice(g)
    q = root_sum_form(g.spec)
    gm = q.gram(lat)
    n = len(gm)
    vals = [gm[i][i] for i in range(n)] + [2 * gm[i][j] for i in range(n) for j in range(i + 1, n)]
    lam = 1 / _qgcd(vals)
    out = q * lam
    if not out.in_sym2(lat):
        raise VerificationFailure("normalized form is not integral")
    return out


# ---------------------------------------------------------------------------
# maps


def _coroot_vector(spec, coords):
    v = [Fraction(0)] * spec.rank
    for c, a in zip(coords, simple_roots(spec)):
        v = [x + c * y for x, y in zip(v, coroot(a))]
    return v


def cocharacter_map(lm, side, route="engine"):
    """Matrix ``Phi`` (target e-coords x source e-coords) of the induced map on cocharacters."""
    from .tensor_lifts import cocharacter

    src = lm.source[0 if side == "L" else 1]
    tgt = lm.target
    lam = [_coroot_vector(tgt, cocharacter(lm, side, a, route)) for a in simple_roots(src)]
    a_cols = [[Fraction(x) for x in coroot(a)] for a in simple_roots(src)]
    # Phi A = Lambda with A, Lambda given by columns
    amat = [[a_cols[j][i] for j in range(len(a_cols))] for i in range(src.rank)]
    ainv = rational_inverse(amat)
    lmat = [[lam[j][i] for j in range(len(lam))] for i in range(tgt.rank)]
    return _mm(lmat, ainv)


def dual_map(phi):
    """Dual on characters: ``chi -> Phi^T chi``."""
    return [[phi[j][i] for j in range(len(phi))] for i in range(len(phi[0]))]


def check_lattice_map(phi, target: CharacterLattice, source: CharacterLattice):
    d = dual_map(phi)
    for b in target.basis:
        img = [sum(r[k] * b[k] for k in range(len(b))) for r in d]
        if not source.contains(img):
            raise VerificationFailure(
                f"dual map sends a character of {target.group} outside the lattice of {source.group}"
            )
    return True


def pullback(form: QuadraticForm, phi) -> QuadraticForm:
    f = [list(r) for r in form.matrix]
    pt = dual_map(phi)
    return QuadraticForm.from_rows(_mm(_mm(pt, f), phi))


@dataclass(frozen=True)
class RostResult:
    map_name: str
    target: str
    sources: tuple
    multipliers: tuple  # Fractions

    def as_tuple(self):
        return tuple(int(x) if x.denominator == 1 else x for x in self.multipliers)


def _ratio(form: QuadraticForm, base: QuadraticForm):
    a = None
    for r1, r2 in zip(form.matrix, base.matrix):
        for x, y in zip(r1, r2):
            if y == 0:
                if x != 0:
                    raise VerificationFailure("pulled-back form is not proportional to the Killing form")
                continue
            if a is None:
                a = x / y
            elif x / y != a:
                raise VerificationFailure("pulled-back form is not proportional to the Killing form")
    return a


def _sources_for(lm, isogenies):
    sl, sr = lm.source
    return GroupType(isogenies[0], sl), GroupType(isogenies[1], sr)


def rost_multiplier(lm, target_isogeny="Spin", source_isogenies=None, route="engine") -> RostResult:
    """``(a, b)`` with ``phi^dagger(q_target) = (a q_1, b q_2)``.

    The dual map must send ``T*`` of the target isogeny type into the sum of the
    source lattices; this is how central kernels enter.
    """
    if source_isogenies is None:
        source_isogenies = ("Sp", "Sp") if lm.kind == "sp" else ("Spin", "Spin")
    tg = GroupType(target_isogeny, lm.target)
    g1, g2 = _sources_for(lm, source_isogenies)
    phi_l = cocharacter_map(lm, "L", route)
    phi_r = cocharacter_map(lm, "R", route)
    n1 = len(phi_l[0])
    phi = [rl + rr for rl, rr in zip(phi_l, phi_r)]
    # lattice containment for the sum of sources
    tl = character_lattice(tg)
    l1, l2 = character_lattice(g1), character_lattice(g2)
    d = dual_map(phi)
    for b in tl.basis:
        img = [sum(r[k] * b[k] for k in range(len(b))) for r in d]
        if not (l1.contains(img[:n1]) and l2.contains(img[n1:])):
            raise VerificationFailure(f"dual map does not send T*({tg}) into T*({g1}) + T*({g2})")
    pb = pullback(killing_form(tg), phi)
    m = pb.matrix
    n = len(m)
    if any(m[i][j] for i in range(n1) for j in range(n1, n)):
        raise VerificationFailure("pulled-back form has cross terms between the two factors")
    b1 = QuadraticForm(tuple(tuple(r[:n1]) for r in m[:n1]))
    b2 = QuadraticForm(tuple(tuple(r[n1:]) for r in m[n1:]))
    a = _ratio(b1, killing_form(g1))
    b = _ratio(b2, killing_form(g2))
    return RostResult(lm.name(), str(tg), (str(g1), str(g2)), (a, b))


def restriction_multiplier(lm, side, target_isogeny="Spin", source_isogeny=None, route="engine") -> Fraction:
    """Rost multiplier of the restriction of ``lm`` to one factor."""
    src = lm.source[0 if side == "L" else 1]
    if source_isogeny is None:
        source_isogeny = "Sp" if lm.kind == "sp" else "Spin"
    g = GroupType(source_isogeny, src)
    tg = GroupType(target_isogeny, lm.target)
    phi = cocharacter_map(lm, side, route)
    check_lattice_map(phi, character_lattice(tg), character_lattice(g))
    return _ratio(pullback(killing_form(tg), phi), killing_form(g))


def projection_multiplier(source: GroupType, target: GroupType) -> Fraction:
    """Rost multiplier of a central isogeny ``source -> target`` on the same root system."""
    if source.spec != target.spec:
        raise ConfigurationError("a central projection keeps the root system")
    n = source.spec.rank
    ident = [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]
    check_lattice_map(ident, character_lattice(target), character_lattice(source))
    return _ratio(pullback(killing_form(target), ident), killing_form(source))


def adjointness_records(lm, side, target_isogeny="Spin"):
    """Check ``chi(phi(h_a(t))) = t^<Phi^T chi, a^vee>`` on simple coroots and basis characters."""
    from .steinberg_engine import ENGINE_CTX, TorusElement, char_eval
    from .tensor_lifts import torus_image

    src = lm.source[0 if side == "L" else 1]
    phi = cocharacter_map(lm, side)
    d = dual_map(phi)
    lat = character_lattice(GroupType(target_isogeny, lm.target))
    t = ENGINE_CTX.unit(t=1)
    recs = []
    for a in simple_roots(src):
        img = torus_image(lm, side, TorusElement.from_h(src, a, t))
        for j, chi in enumerate(lat.basis):
            lhs = char_eval(lm.target, chi, img)
            pulled = [sum(r[k] * chi[k] for k in range(len(chi))) for r in d]
            k = sum(x * y for x, y in zip(pulled, coroot(a)))
            ok = k.denominator == 1 and lhs == t ** int(k)
            recs.append({
                "id": f"adjoint:{lm.kind}{lm.dims}:{side}:{a}:{j}",
                "status": "pass" if ok else "fail",
                "expected": str(k),
                "actual": lhs.render(),
            })
    return recs


# residue class -> representative used for both routes; Spin_2 has no root
# system, so residue 1 is represented by 5 rather than 1
THEOREM_REPRESENTATIVES = {0: 4, 1: 5, 2: 2, 3: 3}


def theorem_cell(n, m, route="psp") -> RostResult:
    """Multipliers of the quotient-induced map ``PSp_2n x PSp_2m -> HSpin_4nm`` (or the PSO version)."""
    from .tensor_lifts import sp_lift, spin_lift

    if n % 2 and m % 2:
        raise ConfigurationError("the induced map needs n or m even")
    if route == "psp":
        return rost_multiplier(sp_lift(n, m), "HSpin", ("PSp", "PSp"))
    if route == "pso":
        return rost_multiplier(spin_lift(2 * n, 2 * m), "HSpin", ("PSO", "PSO"))
    raise ConfigurationError(f"unknown route {route!r}")


def theorem_grid(route="psp", representatives=None) -> dict:
    """``{(n mod 4, m mod 4): RostResult}`` over the defined cells."""
    reps = representatives or THEOREM_REPRESENTATIVES
    out = {}
    for rn in range(4):
        for rm in range(4):
            if rn % 2 and rm % 2:
                continue
            out[(rn, rm)] = theorem_cell(reps[rn], reps[rm], route)
    return out


def odd_factor_multiplier(n, m) -> RostResult:
    """Multipliers of ``HSpin_2n x SO_{2m+1} -> HSpin_{2n(2m+1)}`` (``n`` even)."""
    from .tensor_lifts import spin_lift

    if n % 2:
        raise DomainError("HSpin_2n needs n even")
    return rost_multiplier(spin_lift(2 * n, 2 * m + 1), "HSpin", ("HSpin", "SO"))
