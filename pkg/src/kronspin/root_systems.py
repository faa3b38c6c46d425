"""Root systems of types B, C and D in the standard e_i coordinates.

Roots are plain integer tuples.  Simple systems follow Bourbaki:

* ``B_n``: e1-e2, ..., e_{n-1}-e_n, e_n
* ``C_n``: e1-e2, ..., e_{n-1}-e_n, 2e_n
* ``D_n``: e1-e2, ..., e_{n-1}-e_n, e_{n-1}+e_n

Cartan matrix convention (the single place it is fixed):
``cartan_matrix(spec)[i][j] = pairing(alpha_j, alpha_i) = <alpha_j, alpha_i^vee>``.
Hence for a torus element ``prod_i h_{alpha_i}(t_i)`` the simple root
``alpha_j`` evaluates to ``prod_i t_i ** C[i][j]``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from .errors import ConfigurationError, DomainError, VerificationFailure
from .lattice import CoordinateSolver

__all__ = [
    "RootSystemSpec",
    "Root",
    "parse_root",
    "root_str",
    "enumerate_roots",
    "positive_roots",
    "simple_roots",
    "cartan_matrix",
    "pairing",
    "reflect",
    "coroot",
    "coroot_coordinates",
    "root_coordinates",
    "height",
    "is_long",
    "simple_reflection_matrix",
    "dot",
]

Root = tuple


@dataclass(frozen=True)
class RootSystemSpec:
    family: str
    rank: int

    def __post_init__(self):
        if self.family not in ("B", "C", "D"):
            raise ConfigurationError(f"unsupported family {self.family!r}")
        if not isinstance(self.rank, int) or self.rank < 1:
            raise ConfigurationError("rank must be a positive integer")
        if self.family == "D" and self.rank < 2:
            raise ConfigurationError("type D requires rank >= 2")

    def __str__(self):
        return f"{self.family}{self.rank}"


def dot(x, y):
    return sum(a * b for a, b in zip(x, y))


def pairing(beta, alpha) -> int:
    """Cartan integer ``<beta, alpha> = 2(beta, alpha)/(alpha, alpha)``."""
    aa = dot(alpha, alpha)
    if aa == 0:
        raise DomainError("pairing against the zero vector")
    val = Fraction(2 * dot(beta, alpha), aa)
    if val.denominator != 1:
        raise VerificationFailure(f"non-integral pairing <{beta},{alpha}> = {val}")
    return val.numerator


@lru_cache(maxsize=None)
def enumerate_roots(spec: RootSystemSpec) -> tuple:
    n = spec.rank
    out = []
    for i in range(n):
        for j in range(i + 1, n):
            for si in (1, -1):
                for sj in (1, -1):
                    v = [0] * n
                    v[i] = si
                    v[j] = sj
                    out.append(tuple(v))
    for k in range(n):
        for s in (1, -1):
            v = [0] * n
            if spec.family == "B":
                v[k] = s
                out.append(tuple(v))
            elif spec.family == "C":
                v[k] = 2 * s
                out.append(tuple(v))
    return tuple(out)


@lru_cache(maxsize=None)
def root_set(spec: RootSystemSpec) -> frozenset:
    return frozenset(enumerate_roots(spec))


def check_root(spec: RootSystemSpec, root) -> tuple:
    root = tuple(root)
    if root not in root_set(spec):
        raise DomainError(f"{root_str(root)} is not a root of {spec}")
    return root


@lru_cache(maxsize=None)
def simple_roots(spec: RootSystemSpec) -> tuple:
    n = spec.rank
    out = []
    for i in range(n - 1):
        v = [0] * n
        v[i] = 1
        v[i + 1] = -1
        out.append(tuple(v))
    v = [0] * n
    if spec.family == "B":
        v[n - 1] = 1
    elif spec.family == "C":
        v[n - 1] = 2
    else:
        v[n - 2] = 1
        v[n - 1] = 1
    out.append(tuple(v))
    return tuple(out)


@lru_cache(maxsize=None)
def cartan_matrix(spec: RootSystemSpec) -> tuple:
    s = simple_roots(spec)
    n = len(s)
    return tuple(tuple(pairing(s[j], s[i]) for j in range(n)) for i in range(n))


def reflect(alpha, beta, spec: RootSystemSpec | None = None) -> tuple:
    """Return ``r_alpha(beta) = beta - <beta, alpha> alpha``."""
    k = pairing(beta, alpha)
    out = tuple(b - k * a for a, b in zip(alpha, beta))
    if spec is not None and out not in root_set(spec):
        raise VerificationFailure(f"reflection {root_str(out)} is not a root of {spec}")
    return out


def coroot(alpha) -> tuple:
    aa = dot(alpha, alpha)
    out = []
    for a in alpha:
        v = Fraction(2 * a, aa)
        if v.denominator != 1:
            raise VerificationFailure("coroot with non-integral coordinates")
        out.append(v.numerator)
    return tuple(out)


def _solve_rational(cols, target):
    """Solve ``sum_i x_i cols[i] = target`` exactly (cols linearly independent)."""
    n = len(cols)
    m = len(target)
    a = [[Fraction(cols[j][i]) for j in range(n)] + [Fraction(target[i])] for i in range(m)]
    row = 0
    piv = []
    for col in range(n):
        p = next((r for r in range(row, m) if a[r][col] != 0), None)
        if p is None:
            raise VerificationFailure("singular basis in exact solve")
        a[row], a[p] = a[p], a[row]
        pv = a[row][col]
        a[row] = [x / pv for x in a[row]]
        for r in range(m):
            if r != row and a[r][col] != 0:
                f = a[r][col]
                a[r] = [x - f * y for x, y in zip(a[r], a[row])]
        piv.append(col)
        row += 1
    for r in range(row, m):
        if a[r][n] != 0:
            raise DomainError("vector not in the span of the basis")
    return [a[k][n] for k in range(n)]


@lru_cache(maxsize=None)
def _coroot_table(spec: RootSystemSpec) -> dict:
    solve = CoordinateSolver([coroot(a) for a in simple_roots(spec)])
    table = {}
    for r in enumerate_roots(spec):
        sol = solve(coroot(r))
        if sol is None:
            raise VerificationFailure(f"non-integral coroot coordinates for {root_str(r)}")
        table[r] = sol
    return table


def coroot_coordinates(spec: RootSystemSpec, beta) -> tuple:
    """Integers ``c`` with ``beta^vee = sum_i c_i alpha_i^vee``."""
    return _coroot_table(spec)[check_root(spec, beta)]


@lru_cache(maxsize=None)
def _root_coord_table(spec: RootSystemSpec) -> dict:
    solve = CoordinateSolver(simple_roots(spec))
    table = {}
    for r in enumerate_roots(spec):
        sol = solve(r)
        if sol is None:
            raise VerificationFailure(f"non-integral root coordinates for {root_str(r)}")
        table[r] = sol
    return table


def root_coordinates(spec: RootSystemSpec, beta) -> tuple:
    """Integers ``c`` with ``beta = sum_i c_i alpha_i``."""
    return _root_coord_table(spec)[check_root(spec, beta)]


def height(spec: RootSystemSpec, beta) -> int:
    return sum(root_coordinates(spec, beta))


@lru_cache(maxsize=None)
def positive_roots(spec: RootSystemSpec) -> tuple:
    pos = [r for r in enumerate_roots(spec) if height(spec, r) > 0]
    return tuple(sorted(pos, key=lambda r: (height(spec, r), r)))


def is_long(spec: RootSystemSpec, root) -> bool:
    """True for roots of maximal length (every root in type D)."""
    ll = max(dot(r, r) for r in enumerate_roots(spec))
    return dot(root, root) == ll


def simple_reflection_matrix(spec: RootSystemSpec, index: int) -> tuple:
    """Matrix of ``r_{alpha_index}`` (1-based) acting on column vectors of Q^n."""
    if not 1 <= index <= spec.rank:
        raise DomainError("simple root index out of range")
    a = simple_roots(spec)[index - 1]
    aa = dot(a, a)
    n = spec.rank
    return tuple(
        tuple(Fraction(int(i == j)) - Fraction(2 * a[i] * a[j], aa) for j in range(n))
        for i in range(n)
    )


_TERM = re.compile(r"([+-]?)(\d*)e(\d+)")


def parse_root(text: str, rank: int | None = None) -> tuple:
    """Parse strings like ``e1-e2``, ``-2e3`` or ``e1+e4`` into a coordinate tuple."""
    s = text.replace(" ", "")
    pos = 0
    coeffs = {}
    while pos < len(s):
        m = _TERM.match(s, pos)
        if not m or m.end() == pos:
            raise DomainError(f"cannot parse root {text!r}")
        sign = -1 if m.group(1) == "-" else 1
        mult = int(m.group(2)) if m.group(2) else 1
        idx = int(m.group(3))
        if idx < 1:
            raise DomainError("root indices start at 1")
        coeffs[idx] = coeffs.get(idx, 0) + sign * mult
        pos = m.end()
    if not coeffs:
        raise DomainError(f"empty root {text!r}")
    n = rank if rank is not None else max(coeffs)
    if max(coeffs) > n:
        raise DomainError(f"root {text!r} exceeds rank {n}")
    return tuple(coeffs.get(i + 1, 0) for i in range(n))


def root_str(root) -> str:
    parts = []
    for i, c in enumerate(root):
        if c == 0:
            continue
        mag = "" if abs(c) == 1 else str(abs(c))
        parts.append(("-" if c < 0 else "+") + f"{mag}e{i + 1}")
    if not parts:
        return "0"
    s = "".join(parts)
    return s[1:] if s.startswith("+") else s
