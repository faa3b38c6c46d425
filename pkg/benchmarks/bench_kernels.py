"""Time the compiled kernels against the pure-Python fallback.

Run ``python benchmarks/bench_kernels.py [--repeat N]``.  Each workload is
checked for identical output on both backends before timing.
"""

from __future__ import annotations

import argparse
import random
import timeit
from fractions import Fraction

from kronspin import _pykernels

try:
    from kronspin import _ckernels
except ImportError:  # pragma: no cover
    _ckernels = None


_INT_VALUES = (0, 0, 1, -1, 2)
_MIXED_VALUES = _INT_VALUES + (Fraction(1, 2),)


def _scalar(rng, values=_INT_VALUES):
    return tuple(rng.choice(values) for _ in range(4))


def _poly(rng, nvars=3, terms=6, values=_INT_VALUES):
    out = {}
    for _ in range(terms):
        e = tuple(rng.randint(-2, 2) for _ in range(nvars))
        c = _scalar(rng, values)
        if any(c):
            out[e] = c
    return out


def _matrix(rng, n=16, density=0.25, values=_INT_VALUES):
    rows = []
    for _ in range(n):
        row = {}
        for j in range(n):
            if rng.random() < density:
                p = _poly(rng, terms=2, values=values)
                if p:
                    row[j] = p
        rows.append(row)
    return rows


def workloads(seed=0):
    """Integer-only inputs (the common case) and inputs with halves mixed in."""
    out = {}
    for tag, values in (("int", _INT_VALUES), ("mixed", _MIXED_VALUES)):
        rng = random.Random(seed)
        xs = [_scalar(rng, values) for _ in range(200)]
        ps = [_poly(rng, values=values) for _ in range(40)]
        a, b = _matrix(rng, values=values), _matrix(rng, values=values)
        out[f"s_mul/{tag}"] = lambda k, xs=xs: [k.s_mul(x, y) for x, y in zip(xs, reversed(xs))]
        out[f"p_mul/{tag}"] = lambda k, ps=ps: [k.p_mul(p, q) for p, q in zip(ps, reversed(ps))]
        out[f"p_add/{tag}"] = lambda k, ps=ps: [k.p_add(p, q) for p, q in zip(ps, reversed(ps))]
        out[f"m_mul/{tag}"] = lambda k, a=a, b=b: k.m_mul(a, b)
    return out


def run(repeat=5, number=20, seed=0):
    results = []
    for name, fn in workloads(seed).items():
        py_out = fn(_pykernels)
        row = {"workload": name}
        row["python_s"] = min(timeit.repeat(lambda: fn(_pykernels), repeat=repeat, number=number)) / number
        if _ckernels is not None:
            if fn(_ckernels) != py_out:
                raise AssertionError(f"backends disagree on {name}")
            row["cython_s"] = min(timeit.repeat(lambda: fn(_ckernels), repeat=repeat, number=number)) / number
            row["speedup"] = row["python_s"] / row["cython_s"]
        results.append(row)
    return results


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--number", type=int, default=20)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)
    if _ckernels is None:
        print("compiled kernels not built; timing the Python fallback only")
    print(f"{'workload':<14}{'python (ms)':>13}{'cython (ms)':>13}{'speedup':>9}")
    for r in run(args.repeat, args.number, args.seed):
        cy = f"{r['cython_s'] * 1e3:13.3f}" if "cython_s" in r else f"{'-':>13}"
        sp = f"{r['speedup']:8.2f}x" if "speedup" in r else f"{'-':>9}"
        print(f"{r['workload']:<14}{r['python_s'] * 1e3:13.3f}{cy}{sp}")


if __name__ == "__main__":
    main()
