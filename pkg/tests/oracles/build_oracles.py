"""Regenerate ``frozen.json`` from sympy computations that share no code with kronspin.

Run ``python tests/oracles/build_oracles.py`` to rewrite the file, or with
``--check`` to compare against the stored copy.

* ``snf``: Smith invariants of Cartan matrices (``sympy`` normal forms).
* ``killing``: the coefficient ``c`` of the minimal invariant form ``c * sum e_i^2``,
  found by brute force over small rationals on the cocharacter lattice built from
  coroots and coweights (the library works on the character side instead).
* ``dynkin``: Rost multipliers of the tensor product maps as Dynkin indices,
  from the weights of the tensor representation.
"""

from __future__ import annotations

import argparse
import json
import sys
from itertools import product
from pathlib import Path

import sympy as sp
from sympy.matrices.normalforms import smith_normal_form

HERE = Path(__file__).resolve().parent
FROZEN = HERE / "frozen.json"


def simple_roots(fam, n):
    e = lambda i: [1 if k == i else 0 for k in range(n)]  # noqa: E731
    out = [[a - b for a, b in zip(e(i), e(i + 1))] for i in range(n - 1)]
    if fam == "B":
        out.append(e(n - 1))
    elif fam == "C":
        out.append([2 * x for x in e(n - 1)])
    else:
        out.append([a + b for a, b in zip(e(n - 2), e(n - 1))])
    return [sp.Matrix(r) for r in out]


def coroot(a):
    return 2 * a / a.dot(a)


def cartan(fam, n):
    al = simple_roots(fam, n)
    return sp.Matrix(n, n, lambda i, j: al[j].dot(coroot(al[i])))


def snf_invariants(fam, n):
    d = smith_normal_form(cartan(fam, n), domain=sp.ZZ)
    return sorted(abs(int(d[i, i])) for i in range(n))


def cocharacter_basis(iso, fam, n):
    """Columns spanning the cocharacter lattice, as a rational matrix."""
    al = simple_roots(fam, n)
    coroots = sp.Matrix.hstack(*[coroot(a) for a in al])
    if iso in ("Spin", "Sp"):
        return coroots
    if iso == "SO":
        return sp.eye(n)
    if iso in ("PSO", "PSp"):
        # coweights: x with (x, alpha_i) integral for all simple roots
        return sp.Matrix.hstack(*al).T.inv()
    if iso == "HSpin":
        half = sp.Matrix([sp.Rational(1, 2)] * n)
        gens = sp.Matrix.hstack(coroots, half)
        return lattice_basis(gens)
    raise ValueError(iso)


def lattice_basis(gens):
    """Basis of the lattice spanned by the columns of ``gens`` (full rank)."""
    den = sp.ilcm(*[x.q for x in gens])
    ints = (gens * den).applyfunc(int)
    # row-style HNF through sympy on the transpose
    from sympy.matrices.normalforms import hermite_normal_form

    h = hermite_normal_form(ints)
    return h / den


def killing_coefficient(iso, fam, n):
    b = cocharacter_basis(iso, fam, n)
    g = b.T * b
    cands = sorted({sp.Rational(p, q) for p in range(1, 17) for q in range(1, 17)})
    for c in cands:
        ok = all((c * g[i, i]).is_integer for i in range(n)) and all(
            (2 * c * g[i, j]).is_integer for i in range(n) for j in range(i + 1, n)
        )
        if ok:
            return c
    raise RuntimeError("no coefficient found")


def dynkin_index(fam, n, weights):
    """Half the sum of squared pairings of ``weights`` with the highest coroot."""
    if fam == "C":
        theta = [2] + [0] * (n - 1)
    elif fam == "B" and n == 1:
        theta = [1]
    else:
        theta = [1, 1] + [0] * (n - 2)
    th = sp.Matrix(theta)
    thv = coroot(th)
    return sum(sp.Matrix(w).dot(thv) ** 2 for w in weights) / 2


def std_weights(kind, d):
    n = d // 2
    out = []
    for i in range(n):
        for s in (1, -1):
            out.append([s if k == i else 0 for k in range(n)])
    if kind == "spin" and d % 2:
        out.append([0] * n)
    return out


def family(kind, d):
    if kind == "sp":
        return "C", d // 2
    return ("B" if d % 2 else "D"), d // 2


def rost_by_dynkin(kind, d1, d2):
    target = dynkin_index("D", 3, std_weights("spin", 6))  # vector representation of Spin_N, N >= 5
    out = []
    for mine, other in ((d1, d2), (d2, d1)):
        fam, n = family(kind, mine)
        dv = other * dynkin_index(fam, n, std_weights(kind, mine))
        out.append(dv / target)
    return out


SP_SWEEP = [(1, 1), (1, 2), (2, 1), (2, 2), (1, 4), (2, 3), (3, 2), (1, 3), (3, 1), (3, 3)]
SPIN_SWEEP = [(4, 4), (6, 4), (4, 6), (4, 3), (4, 5), (6, 3), (3, 3), (5, 3), (3, 5), (8, 3), (5, 5), (6, 6)]


def build():
    snf = {f"{f}{n}": snf_invariants(f, n) for f in "BCD" for n in range(2, 9) if not (f == "D" and n < 3)}
    killing = {}
    for iso, fams in (("Spin", "BD"), ("SO", "BD"), ("PSO", "BD"), ("HSpin", "D"), ("Sp", "C"), ("PSp", "C")):
        for f in fams:
            for n in range(1 if f == "B" else 2, 9):
                if f == "D" and n < 3:
                    continue
                if iso == "HSpin" and n % 2:
                    continue
                killing[f"{iso}:{f}{n}"] = str(killing_coefficient(iso, f, n))
    dynkin = {}
    for n, m in SP_SWEEP:
        dynkin[f"sp:{2 * n},{2 * m}"] = [str(x) for x in rost_by_dynkin("sp", 2 * n, 2 * m)]
    for d1, d2 in SPIN_SWEEP:
        dynkin[f"spin:{d1},{d2}"] = [str(x) for x in rost_by_dynkin("spin", d1, d2)]
    return {"snf": snf, "killing": killing, "dynkin": dynkin}


def main(argv=None):
    ap = argparse.ArgumentParser()
    ap.add_argument("--check", action="store_true")
    args = ap.parse_args(argv)
    data = build()
    text = json.dumps(data, indent=1, sort_keys=True) + "\n"
    if args.check:
        same = FROZEN.read_text() == text
        print("frozen oracle up to date" if same else "frozen oracle differs")
        return 0 if same else 1
    FROZEN.write_text(text)
    return 0


if __name__ == "__main__":
    sys.exit(main())
