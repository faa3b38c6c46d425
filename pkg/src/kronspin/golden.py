"""Reference tables shipped as JSON package data, with small parsers.

Torus elements are stored as lists of ``[k, value]`` pairs meaning
``prod h_{alpha_k}(value)``; repeated indices multiply.  Values are units such as
``-1``, ``i``, ``t^2`` or ``u^-1``.  Multiplier entries are arithmetic
expressions in named integers (``"m/4"``, ``"2*m+1"``).
"""

from __future__ import annotations

import ast
import json
import re
from fractions import Fraction
from functools import lru_cache
from importlib import resources

from .errors import ConfigurationError
from .exact_arithmetic import CycloScalar, ParamContext, UnitMonomial
from .root_systems import RootSystemSpec
from .steinberg_engine import ENGINE_CTX, TorusElement

__all__ = ["load", "eval_expr", "parse_unit", "torus_from_pairs", "GOLDEN_FILES"]

GOLDEN_FILES = ("centers", "garibaldi", "center_images", "killing_forms", "rost")


@lru_cache(maxsize=None)
def _load_text(name):
    if name not in GOLDEN_FILES:
        raise ConfigurationError(f"unknown reference table {name!r}")
    return resources.files("kronspin").joinpath("data").joinpath(f"{name}.json").read_text(encoding="utf-8")


def load(name: str) -> dict:
    """Parsed copy of a reference table."""
    return json.loads(_load_text(name))


_OPS = {
    ast.Add: lambda a, b: a + b,
    ast.Sub: lambda a, b: a - b,
    ast.Mult: lambda a, b: a * b,
    ast.Div: lambda a, b: a / b,
}


def eval_expr(expr: str, **env) -> Fraction:
    """Exact value of ``expr`` (``+ - * /``, integers, names from ``env``)."""

    def ev(node):
        if isinstance(node, ast.Expression):
            return ev(node.body)
        if isinstance(node, ast.Constant) and isinstance(node.value, int):
            return Fraction(node.value)
        if isinstance(node, ast.Name):
            if node.id not in env:
                raise ConfigurationError(f"unbound name {node.id!r} in {expr!r}")
            return Fraction(env[node.id])
        if isinstance(node, ast.BinOp) and type(node.op) in _OPS:
            return _OPS[type(node.op)](ev(node.left), ev(node.right))
        if isinstance(node, ast.UnaryOp) and isinstance(node.op, ast.USub):
            return -ev(node.operand)
        raise ConfigurationError(f"unsupported expression {expr!r}")

    return ev(ast.parse(expr, mode="eval"))


_UNIT_RE = re.compile(r"^(-)?(i)?(?:([a-z])(?:\^(-?\d+))?)?$")


def parse_unit(text: str, ctx: ParamContext = ENGINE_CTX) -> UnitMonomial:
    """``"-1"``, ``"i"``, ``"-i"``, ``"t"``, ``"u^-1"``, ``"-t^2"`` ..."""
    text = text.replace(" ", "")
    if text in ("1", "-1"):
        return UnitMonomial(ctx, CycloScalar(int(text)), ctx.zero_exp())
    mt = _UNIT_RE.match(text)
    if not mt or not (mt.group(2) or mt.group(3)):
        raise ConfigurationError(f"cannot parse unit {text!r}")
    sign, imag, var, exp = mt.groups()
    coeff = CycloScalar(0, 1) if imag else CycloScalar(1)
    if sign:
        coeff = -coeff
    exps = list(ctx.zero_exp())
    if var:
        exps[ctx.index(var)] = int(exp) if exp else 1
    return UnitMonomial(ctx, coeff, tuple(exps))


def torus_from_pairs(spec: RootSystemSpec, pairs, ctx: ParamContext = ENGINE_CTX) -> TorusElement:
    out = TorusElement.one(spec, ctx)
    for k, val in pairs:
        vals = [UnitMonomial.one(ctx)] * spec.rank
        vals[k - 1] = parse_unit(val, ctx)
        out = out * TorusElement(spec, tuple(vals))
    return out
