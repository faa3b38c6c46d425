"""Command line front end.

Every subcommand runs a set of checks and emits a report.  Each record has an
``id``, a ``status`` (``pass``, ``fail`` or ``info``), and ``expected`` and
``actual`` strings.  Records are sorted by id before emission, so the order in
which checks ran does not matter.  The exit status is 0 when no record failed,
1 when some record failed and 2 on usage or configuration errors.

JSON reports carry ``schema_version``, the argument vector, records, summary
counts and wall time.  ``--replay report.json`` re-runs the argument vector
stored in a report and checks that the same set of check ids was produced.
Markdown output leaves out the wall time, so it is byte-stable across runs.
"""

from __future__ import annotations

import argparse
import json
import os
import random
import re
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction

from . import golden
from .errors import ConfigurationError, DomainError, KronspinError, VerificationFailure
from .matrix_groups import (
    MatrixGroup,
    check_template_instance,
    extract_commutator_constant,
    template_instances,
    uncovered_pairs,
)
from .root_systems import RootSystemSpec, enumerate_roots, root_str
from .steinberg_engine import center, jobs_from_env, verify_lemma_identities

__all__ = ["SCHEMA_VERSION", "RunConfig", "Report", "main", "build_parser", "run"]

SCHEMA_VERSION = 1

LEMMA_GROUPS = ("C2", "C3", "C4", "B2", "B3", "B4", "D4", "D5", "D6")
CENTER_GROUPS = tuple(
    [f"Spin{d}" for d in range(4, 13, 2)]
    + [f"Spin{d}" for d in range(5, 14, 2)]
    + [f"Sp{d}" for d in range(2, 13, 2)]
)


# ---------------------------------------------------------------------------
# reports


@dataclass
class RunConfig:
    """Parsed command line."""

    command: str
    argv: list
    emit: str = "markdown"
    max_dim: int = 24
    seed: int = 0
    sample: int | None = None
    verbose: bool = False
    options: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.emit not in ("json", "markdown"):
            raise ConfigurationError("--emit must be json or markdown")
        if self.max_dim < 1:
            raise ConfigurationError("--max-dim must be positive")
        if self.sample is not None and self.sample < 1:
            raise ConfigurationError("--sample must be positive")


def _s(x):
    if x is None:
        return ""
    if isinstance(x, (list, tuple)):
        return "(" + ",".join(_s(v) for v in x) + ")"
    return str(x)


def record(ident, ok, expected, actual, **extra):
    status = ok if isinstance(ok, str) else ("pass" if ok else "fail")
    rec = {"id": ident, "status": status, "expected": _s(expected), "actual": _s(actual)}
    rec.update(extra)
    return rec


@dataclass
class Table:
    title: str
    headers: tuple
    rows: list

    def to_json(self):
        return {"title": self.title, "headers": list(self.headers), "rows": [list(r) for r in self.rows]}


@dataclass
class Report:
    config: RunConfig
    records: list
    tables: list
    wall_time: float

    def __post_init__(self):
        self.records = sorted(self.records, key=lambda r: r["id"])

    @property
    def summary(self):
        out = {"total": len(self.records), "pass": 0, "fail": 0, "info": 0}
        for r in self.records:
            out[r["status"]] += 1
        return out

    @property
    def exit_code(self):
        return 1 if self.summary["fail"] else 0

    def to_json(self):
        return {
            "schema_version": SCHEMA_VERSION,
            "command": {"subcommand": self.config.command, "argv": list(self.config.argv)},
            "records": self.records,
            "tables": [t.to_json() for t in self.tables],
            "summary": self.summary,
            "wall_time_s": round(self.wall_time, 3),
        }

    def to_markdown(self):
        out = [f"# kronspin {self.config.command}", ""]
        out.append("`" + " ".join(["kronspin"] + list(self.config.argv)) + "`")
        out.append("")
        for t in self.tables:
            out += [f"## {t.title}", "", _md_table(t.headers, t.rows), ""]
        s = self.summary
        out.append("## Checks")
        out.append("")
        out.append(f"{s['total']} checks: {s['pass']} pass, {s['fail']} fail, {s['info']} info")
        out.append("")
        shown = self.records
        if not self.config.verbose and len(shown) > 200:
            shown = [r for r in shown if r["status"] == "fail"]
            out.append(f"(only failures listed; use --verbose to list all {s['total']})")
            out.append("")
        if shown:
            out.append(
                _md_table(
                    ("id", "status", "expected", "actual"),
                    [(r["id"], r["status"], r["expected"], r["actual"]) for r in shown],
                )
            )
            out.append("")
        return "\n".join(out)


def _md_cell(x):
    return str(x).replace("|", "\\|").replace("\n", " ")


def _md_table(headers, rows):
    lines = ["| " + " | ".join(_md_cell(h) for h in headers) + " |"]
    lines.append("|" + "|".join("---" for _ in headers) + "|")
    for r in rows:
        lines.append("| " + " | ".join(_md_cell(c) for c in r) + " |")
    return "\n".join(lines)


def _parallel_map(fn, items):
    """``[fn(x) for x in items]``, across processes when ``KRONSPIN_JOBS`` allows."""
    items = list(items)
    jobs = min(jobs_from_env(default=os.cpu_count() or 1), len(items) or 1)
    if jobs <= 1:
        return [fn(x) for x in items]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(fn, items))


# ---------------------------------------------------------------------------
# group names


_GROUP_RE = re.compile(r"^(Spin|SO|Sp|[BCD])(\d+)$")


def parse_group(text: str) -> RootSystemSpec:
    """``Spin8``, ``SO7``, ``Sp6`` or a Cartan type such as ``D4``."""
    m = _GROUP_RE.match(text.strip())
    if not m:
        raise ConfigurationError(f"cannot parse group {text!r}")
    kind, k = m.group(1), int(m.group(2))
    if kind in "BCD":
        return RootSystemSpec(kind, k)
    if kind == "Sp":
        if k % 2:
            raise ConfigurationError("Sp needs an even dimension")
        return RootSystemSpec("C", k // 2)
    return RootSystemSpec("B" if k % 2 else "D", k // 2)


def _group_label(spec):
    if spec.family == "C":
        return f"Sp{2 * spec.rank}"
    return f"Spin{2 * spec.rank + (spec.family == 'B')}"


# ---------------------------------------------------------------------------
# verify-constants


def cmd_verify_constants(cfg: RunConfig):
    o = cfg.options
    groups = [MatrixGroup("Sp", d) for d in range(2, 2 * o["sp_max_rank"] + 1, 2)]
    groups += [MatrixGroup("SO", d) for d in range(3, o["so_max_dim"] + 1)]
    rng = random.Random(cfg.seed)
    recs = []
    summary_rows = []
    for g in groups:
        inst = template_instances(g)
        if cfg.sample is not None and len(inst) > cfg.sample:
            inst = sorted(rng.sample(inst, cfg.sample), key=lambda i: i.ident)
        rs = [check_template_instance(g, i) for i in inst]
        recs += [record(r["id"], r["status"], r["expected"], r["actual"]) for r in rs]
        extra = 0
        if o["oracle_uncovered"] and cfg.sample is None:
            for a, b in uncovered_pairs(g):
                ident = f"{g}:oracle[{root_str(a)},{root_str(b)}]"
                try:
                    found = extract_commutator_constant(g, a, b)
                    txt = " · ".join(f.render() for f in found) or "1"
                    recs.append(record(ident, "info", "", txt))
                except VerificationFailure as exc:
                    recs.append(record(ident, False, "a product of root elements", str(exc)))
                extra += 1
        nfail = sum(r["status"] == "fail" for r in rs)
        summary_rows.append((str(g), len(rs), nfail, extra))
    tables = [Table("Commutator tables", ("group", "template instances", "mismatches", "oracle-only pairs"), summary_rows)]
    return recs, tables


# ---------------------------------------------------------------------------
# verify-lemma


def _lemma_unit(args):
    name, identities, sample, seed = args
    spec = parse_group(name)
    alphas = None
    if sample is not None:
        roots = list(enumerate_roots(spec))
        alphas = sorted(random.Random(f"{seed}:{name}").sample(roots, min(sample, len(roots))))
    return verify_lemma_identities(spec, identities=identities, alphas=alphas)


def cmd_verify_lemma(cfg: RunConfig):
    o = cfg.options
    names = o["groups"] or list(LEMMA_GROUPS)
    specs = [parse_group(n) for n in names]
    ids = o["identities"]
    results = _parallel_map(_lemma_unit, [(str(s), ids, cfg.sample, cfg.seed) for s in specs])
    recs, rows = [], []
    for spec, rs in zip(specs, results):
        for r in rs:
            recs.append(record(r["id"], r["status"], r["expected"], r["actual"]))
        by_id = {}
        for r in rs:
            k = r["identity"]
            c = by_id.setdefault(k, [0, 0])
            c[0] += 1
            c[1] += r["status"] == "fail"
        for k in sorted(by_id):
            rows.append((str(spec), f"({k})", by_id[k][0], by_id[k][1]))
    return recs, [Table("Lemma identities", ("group", "identity", "checks", "failures"), rows)]


# ---------------------------------------------------------------------------
# centers


def _golden_center(entry, spec):
    out = {}
    for name, val in entry["elements"].items():
        if isinstance(val, dict):
            base, k = val["power"]
            out[name] = out[base] ** k
        else:
            out[name] = golden.torus_from_pairs(spec, val)
    return out


def cmd_centers(cfg: RunConfig):
    names = cfg.options["groups"] or list(CENTER_GROUPS)
    ref = {g["group"]: g for g in golden.load("centers")["groups"]}
    recs, rows = [], []
    for name in names:
        spec = parse_group(name)
        label = _group_label(spec)
        res = center(spec)
        for e in res.elements:
            rows.append((label, res.structure, e.name, e.torus.render()))
        entry = ref.get(label)
        if entry is None:
            recs.append(record(f"center:{label}:structure", "info", "", res.structure))
            continue
        recs.append(record(f"center:{label}:structure", res.structure == entry["structure"],
                           entry["structure"], res.structure))
        exp = _golden_center(entry, spec)
        got = {e.name: e.torus for e in res.elements}
        recs.append(record(f"center:{label}:names", sorted(exp) == sorted(got), sorted(exp), sorted(got)))
        for nm, tor in exp.items():
            act = got.get(nm)
            recs.append(record(f"center:{label}:{nm}", act == tor, tor.render(),
                               act.render() if act is not None else "missing"))
    return recs, [Table("Centers", ("group", "structure", "element", "h-product"), rows)]


# ---------------------------------------------------------------------------
# lift


def _center_golden_rows(lm):
    ref = golden.load("center_images")
    if lm.kind == "sp":
        if lm.n % 2 and lm.m % 2:
            return None
        return ref["phi_SP"]["rows"]
    if lm.key == "so_ee":
        n, m = lm.n, lm.m
        if n % 2 == 0 and m % 2 == 0:
            return ref["phi_2n_2m"]["even_even"]
        if n % 2 and m % 2 == 0:
            return ref["phi_2n_2m"]["odd_even"]
        if n % 2 == 0:
            return ref["phi_2n_2m"]["even_odd"]
        return None
    if lm.key == "so_eo" and lm.n % 2 == 0:
        return ref["phi_2n_2m1"]["rows"]
    return None


def _lift_sections(lm, sections, checks):
    from .tensor_lifts import (
        center_image_table,
        kernel_of_composition,
        matrix_consistency,
        torus_routes_agree,
        verify_well_defined,
    )

    tag = f"{lm.kind}({lm.dims[0]},{lm.dims[1]})"
    recs, tables = [], []
    if "well-defined" in sections:
        for r in verify_well_defined(lm, checks=checks):
            recs.append(record(f"lift:{tag}:{r['id']}", r["status"], r["expected"], r["actual"]))
        for r in matrix_consistency(lm):
            recs.append(record(f"lift:{tag}:{r['id']}", r["status"], r["expected"], r["actual"]))
        for r in torus_routes_agree(lm):
            recs.append(record(f"lift:{tag}:{r['id']}", r["status"], r["expected"], r["actual"]))
    if "centers" in sections:
        full = center_image_table(lm, elements="all")
        gens = center_image_table(lm)
        tables.append(Table(f"Center images under {lm.name()}", ("source", "image"),
                            [(f"({a},{b})", v) for (a, b), v in gens.rows]))
        got = {tuple(k): v for k, v in full.rows}
        gold = _center_golden_rows(lm)
        if gold is None:
            for (a, b), v in gens.rows:
                recs.append(record(f"lift:{tag}:center:({a},{b})", "info", "", v))
        else:
            for (a, b), v in gold:
                act = got.get((a, b), "missing")
                recs.append(record(f"lift:{tag}:center:({a},{b})", act == v, v, act))
    if "kernel" in sections:
        kd = kernel_of_composition(lm, "HSpin")
        tables.append(Table(f"Kernel of {lm.name()} composed with Spin -> HSpin", ("kernel element",),
                            [(f"({a},{b})",) for a, b in kd.elements]))
        if kd.applies and kd.claim is not None and kd.name != "undefined":
            recs.append(record(f"lift:{tag}:kernel", kd.matches_claim, kd.claim, kd.name))
        else:
            recs.append(record(f"lift:{tag}:kernel", "info", "", kd.name))
    return recs, tables


def _garibaldi_section():
    from .exact_arithmetic import UnitMonomial
    from .steinberg_engine import TorusElement
    from .tensor_lifts import garibaldi_matrix_route, garibaldi_tables, sp_lift

    lm = sp_lift(1, 4)
    ref = golden.load("garibaldi")
    torus_rows, center_rows = garibaldi_tables()
    recs, tables = [], []
    got = dict(torus_rows)
    for row in ref["torus"]:
        exp = golden.torus_from_pairs(lm.target, row["image"])
        act = got.get(row["source"])
        recs.append(record(f"garibaldi:torus:{row['source']}", act == exp, exp.render(),
                           act.render() if act is not None else "missing"))
    gotc = {lab: (nm, tor) for lab, nm, tor in center_rows}
    for row in ref["center"]:
        exp = golden.torus_from_pairs(lm.target, row["image"])
        nm, tor = gotc.get(row["source"], (None, None))
        ok = nm == row["name"] and tor == exp
        recs.append(record(f"garibaldi:center:{row['source']}", ok, f"{row['name']} = {exp.render()}",
                           f"{nm} = {tor.render() if tor is not None else 'missing'}"))
    # the same torus table read off the diagonal of P^-1 (A (x) B) P
    mat = dict(garibaldi_matrix_route())
    for label, tor in torus_rows:
        lam = mat.get(label)
        if lam is None:
            recs.append(record(f"garibaldi:matrix:{label}", False, tor.render(), "missing"))
            continue
        var = "t" if "(t)" in label else "u"
        unit = tor.ctx.unit(**{var: 1})
        alt = TorusElement(lm.target, tuple(unit ** k if k else UnitMonomial.one(tor.ctx) for k in lam))
        recs.append(record(f"garibaldi:matrix:{label}", alt == tor, tor.render(), alt.render()))
    tables.append(Table("Torus of Sp2 x Sp8 in Spin16", ("h", "phi(h)"),
                        [(lab, tor.render()) for lab, tor in torus_rows]))
    tables.append(Table("Center of Sp2 x Sp8 in Spin16", ("h", "phi(h)"),
                        [(lab, f"{tor.render()} = {nm}" if nm != "1" else "1")
                         for lab, nm, tor in center_rows]))
    return recs, tables


def _lift_unit(args):
    kind, d1, d2, sections, checks = args
    from .tensor_lifts import LiftMap

    return _lift_sections(LiftMap(kind, (d1, d2)), sections, checks)


def cmd_lift(cfg: RunConfig):
    from .tensor_lifts import default_sweep, sp_lift, spin_lift

    o = cfg.options
    chosen = [s for s in ("well-defined", "centers", "kernel") if o.get(s.replace("-", "_"))]
    if not chosen and not o["garibaldi"]:
        chosen = ["well-defined", "centers", "kernel"]
    if (o["n"] is None) != (o["m"] is None):
        raise ConfigurationError("--n and --m go together")
    if o["n"] is not None:
        kind = o["kind"] or "sp"
        lm = sp_lift(o["n"], o["m"]) if kind == "sp" else spin_lift(o["n"], o["m"])
        if lm.target_dim > cfg.max_dim and chosen == ["well-defined", "centers", "kernel"] and not o["force"]:
            raise ConfigurationError(
                f"target dimension {lm.target_dim} exceeds --max-dim {cfg.max_dim}"
            )
        maps = [lm]
    elif o["garibaldi"] and not any(o.get(s.replace("-", "_")) for s in ("well-defined", "centers", "kernel")):
        maps = []
    else:
        maps = [lm for lm in default_sweep(cfg.max_dim) if o["kind"] in (None, lm.kind)]
    recs, tables = [], []
    if o["garibaldi"]:
        if maps and not (maps[0].kind == "sp" and maps[0].dims == (2, 8)) and o["n"] is not None:
            raise ConfigurationError("--garibaldi refers to --kind sp --n 1 --m 4")
        r, t = _garibaldi_section()
        recs += r
        tables += t
        if o["n"] is not None and not any(o.get(s.replace("-", "_")) for s in ("well-defined", "centers", "kernel")):
            maps = []
    units = [(lm.kind, lm.dims[0], lm.dims[1], tuple(chosen), o["checks"]) for lm in maps]
    for r, t in _parallel_map(_lift_unit, units):
        recs += r
        tables += t
    return recs, tables


# ---------------------------------------------------------------------------
# rost


def _frac(x):
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def _pair(p):
    return "(" + ",".join(_frac(x) for x in p) + ")"


def _killing_expected(iso, spec):
    ref = golden.load("killing_forms")[iso]
    if spec.family not in ref["families"]:
        return None
    if "coefficient" in ref:
        return Fraction(ref["coefficient"])
    if "by_rank_mod_4" in ref:
        return Fraction(ref["by_rank_mod_4"][str(spec.rank % 4)])
    return Fraction(ref["by_half_rank_mod_4"][str((spec.rank // 2) % 4)])


def _killing_records(iso, spec):
    from .rost_lattices import GroupType, killing_form

    g = GroupType(iso, spec)
    q = killing_form(g)
    c = q.scalar()
    exp = _killing_expected(iso, spec)
    ident = f"killing:{g}:{spec}"
    if exp is None:
        return [record(ident, "info", "", q.render())], (str(g), str(spec), q.render())
    return [record(ident, c == exp, _frac(exp), _frac(c) if c is not None else q.render())], (
        str(g), str(spec), q.render())


def _killing_sweep(lo=2, hi=8):
    recs, rows = [], []
    for rank in range(lo, hi + 1):
        for iso, fams in (("Spin", "BD"), ("SO", "BD"), ("PSO", "D"), ("HSpin", "D"), ("Sp", "C"), ("PSp", "C")):
            if iso == "HSpin" and rank % 2:
                continue
            for fam in fams:
                r, row = _killing_records(iso, RootSystemSpec(fam, rank))
                recs += r
                rows.append(row)
    return recs, rows


def _expect(pair, **env):
    return tuple(golden.eval_expr(e, **env) for e in pair)


def _prop_record(lm):
    from .rost_lattices import rost_multiplier

    ref = golden.load("rost")
    res = rost_multiplier(lm)
    if lm.kind == "sp":
        exp = _expect(ref["phi_SP"], n=lm.n, m=lm.m)
        ident = f"rost:prop:sp({lm.n},{lm.m})"
    else:
        exp = _expect(ref["phi_spin"], d1=lm.dims[0], d2=lm.dims[1])
        ident = f"rost:prop:spin({lm.dims[0]},{lm.dims[1]})"
    return record(ident, tuple(res.multipliers) == exp, _pair(exp), _pair(res.multipliers)), res


def _grid_expected(n, m):
    cell = golden.load("rost")["theorem_grid"].get(f"{n % 4},{m % 4}")
    return None if cell is None else _expect(cell, n=n, m=m)


def _grid_unit(args):
    from .rost_lattices import theorem_cell

    n, m, route = args
    return theorem_cell(n, m, route).multipliers


def _grid_records(routes, reps=None):
    from .rost_lattices import THEOREM_REPRESENTATIVES

    reps = reps or THEOREM_REPRESENTATIVES
    cells = [(rn, rm) for rn in range(4) for rm in range(4) if not (rn % 2 and rm % 2)]
    units = [(reps[rn], reps[rm], route) for rn, rm in cells for route in routes]
    vals = dict(zip(units, _parallel_map(_grid_unit, units)))
    recs = []
    grid = {}
    for rn, rm in cells:
        n, m = reps[rn], reps[rm]
        exp = _grid_expected(n, m)
        got = {route: vals[(n, m, route)] for route in routes}
        for route in routes:
            recs.append(record(f"rost:grid:{route}:{rn},{rm}", tuple(got[route]) == exp, _pair(exp),
                               _pair(got[route]), n=n, m=m))
        if len(routes) == 2:
            a, b = (got[r] for r in routes)
            recs.append(record(f"rost:grid:routes-equal:{rn},{rm}", tuple(a) == tuple(b), _pair(a), _pair(b)))
        grid[(rn, rm)] = got[routes[0]]
    rows = []
    for rn in range(4):
        row = [str(rn)]
        for rm in range(4):
            row.append(_pair(grid[(rn, rm)]) if (rn, rm) in grid else "")
        rows.append(tuple(row))
    table = Table("Rost multipliers (a,b) of the induced maps into HSpin (rows n mod 4, columns m mod 4)",
                  ("n \\ m", "0", "1", "2", "3"), rows)
    return recs, table


def _odd_factor_record(n, m):
    from .rost_lattices import odd_factor_multiplier

    ref = golden.load("rost")["odd_factor"]
    exp = _expect(ref[str((n // 2) % 4)], n=n, m=m)
    res = odd_factor_multiplier(n, m)
    return record(f"rost:odd-factor:HSpin{2 * n}xSO{2 * m + 1}", tuple(res.multipliers) == exp,
                  _pair(exp), _pair(res.multipliers))


def _sp8_record():
    from .rost_lattices import restriction_multiplier
    from .tensor_lifts import sp_lift

    exp = Fraction(golden.load("rost")["sp8_restriction"])
    got = restriction_multiplier(sp_lift(1, 4), "R")
    return record("rost:restriction:Sp8", got == exp, _frac(exp), _frac(got))


def _projection_record(h):
    from .rost_lattices import group_type, projection_multiplier

    got = projection_multiplier(group_type("HSpin", 4 * h), group_type("PSO", 4 * h))
    ref = golden.load("rost")["projection_hspin_pso"]
    key = str(h % 4)
    ident = f"rost:projection:HSpin{4 * h}->PSO{4 * h}"
    if key not in ref:
        return record(ident, "info", "", _frac(got))
    exp = Fraction(ref[key])
    return record(ident, got == exp, _frac(exp), _frac(got))


def cmd_rost(cfg: RunConfig):
    from .rost_lattices import restriction_multiplier, theorem_cell
    from .tensor_lifts import default_sweep, sp_lift, spin_lift

    o = cfg.options
    recs, tables = [], []
    specific = o["map"] or o["killing"] or o["grid"]
    if o["killing"]:
        iso = {"spin": "Spin", "so": "SO", "pso": "PSO", "hspin": "HSpin", "sp": "Sp", "psp": "PSp"}[o["killing"]]
        if o["rank"] is None:
            r, rows = _killing_sweep()
        else:
            fam = o["family"] or ("C" if iso in ("Sp", "PSp") else "D")
            r, row = _killing_records(iso, RootSystemSpec(fam, o["rank"]))
            rows = [row]
        recs += r
        tables.append(Table("Normalized Killing forms", ("group", "type", "q"), rows))
    if o["map"] == "proj-hspin-pso":
        if o["half_rank"] is None:
            raise ConfigurationError("--map proj-hspin-pso needs --half-rank")
        recs.append(_projection_record(o["half_rank"]))
    elif o["map"] in ("sp", "spin"):
        if o["n"] is None or o["m"] is None:
            raise ConfigurationError("--map sp|spin needs --n and --m")
        n, m = o["n"], o["m"]
        lm = sp_lift(n, m) if o["map"] == "sp" else spin_lift(n, m)
        if o["quotient"] is None and o["restrict"] is None:
            r, res = _prop_record(lm)
            recs.append(r)
            tables.append(Table(f"Rost multipliers of {lm.name()}", ("a", "b"),
                                [tuple(_frac(x) for x in res.multipliers)]))
        elif o["restrict"] is not None:
            got = restriction_multiplier(lm, o["restrict"])
            ident = f"rost:restriction:{lm.kind}({n},{m}):{o['restrict']}"
            if lm.kind == "sp" and (n, m) == (1, 4) and o["restrict"] == "R":
                recs.append(_sp8_record())
            else:
                recs.append(record(ident, "info", "", _frac(got)))
        else:
            if o["map"] == "sp":
                res = theorem_cell(n, m, "psp")
                exp = _grid_expected(n, m)
                ident = f"rost:quotient:psp({n},{m})"
            elif m % 2 == 0:
                if n % 2:
                    raise ConfigurationError("the PSO quotient map needs even dimensions")
                res = theorem_cell(n // 2, m // 2, "pso")
                exp = _grid_expected(n // 2, m // 2)
                ident = f"rost:quotient:pso({n},{m})"
            else:
                recs.append(_odd_factor_record(n // 2, (m - 1) // 2))
                res = exp = None
            if res is not None:
                recs.append(record(ident, tuple(res.multipliers) == exp, _pair(exp), _pair(res.multipliers)))
    elif o["map"] is not None:
        raise ConfigurationError(f"unknown map {o['map']!r}")
    if o["grid"]:
        routes = ("psp", "pso") if o["route"] == "both" else (o["route"],)
        r, t = _grid_records(routes)
        recs += r
        tables.append(t)
    if not specific:
        r, rows = _killing_sweep()
        recs += r
        tables.append(Table("Normalized Killing forms", ("group", "type", "q"), rows))
        prop_rows = []
        for lm in default_sweep(cfg.max_dim):
            r, res = _prop_record(lm)
            recs.append(r)
            prop_rows.append((lm.name(), _pair(res.multipliers)))
        tables.append(Table("Rost multipliers of the lifts", ("map", "(a,b)"), prop_rows))
        r, t = _grid_records(("psp", "pso"))
        recs += r
        tables.append(t)
        for n in (8, 4, 2, 6):
            recs.append(_odd_factor_record(n, 1))
        recs.append(_sp8_record())
        for h in (2, 4):
            recs.append(_projection_record(h))
    return recs, tables


# ---------------------------------------------------------------------------
# parser


COMMANDS = {
    "verify-constants": cmd_verify_constants,
    "verify-lemma": cmd_verify_lemma,
    "centers": cmd_centers,
    "lift": cmd_lift,
    "rost": cmd_rost,
}


def _common(p):
    p.add_argument("--emit", choices=("json", "markdown"), default="markdown")
    p.add_argument("--max-dim", type=int, default=24, help="largest target dimension in sweeps")
    p.add_argument("--seed", type=int, default=0, help="seed for sampled runs")
    p.add_argument("--sample", type=int, default=None, help="run a random sample of this many checks per group")
    p.add_argument("--output", "-o", default=None, help="write the report here instead of stdout")
    p.add_argument("--verbose", action="store_true", help="list passing records in markdown")


def build_parser():
    p = argparse.ArgumentParser(prog="kronspin", description=__doc__.split("\n\n")[0])
    p.add_argument("--replay", metavar="REPORT", help="re-run the check set recorded in a JSON report")
    p.add_argument("--emit", dest="replay_emit", choices=("json", "markdown"), default=None,
                   help=argparse.SUPPRESS)
    sub = p.add_subparsers(dest="command")

    c = sub.add_parser("verify-constants", help="commutator constants against the matrix oracle")
    _common(c)
    c.add_argument("--sp-max-rank", type=int, default=4)
    c.add_argument("--so-max-dim", type=int, default=9)
    c.add_argument("--no-oracle-uncovered", dest="oracle_uncovered", action="store_false",
                   help="skip pairs no template covers")

    c = sub.add_parser("verify-lemma", help="Steinberg identities (1)-(10) via canonical forms")
    _common(c)
    c.add_argument("--group", dest="groups", action="append", default=[],
                   help="e.g. D4, C3, Spin8 (repeatable; default C2-C4, B2-B4, D4-D6)")
    c.add_argument("--identity", dest="identities", action="append", type=int, default=None)

    c = sub.add_parser("centers", help="centers of Spin and Sp")
    _common(c)
    c.add_argument("--group", dest="groups", action="append", default=[])

    c = sub.add_parser("lift", help="lifted tensor product maps")
    _common(c)
    c.add_argument("--kind", choices=("sp", "spin"), default=None)
    c.add_argument("--n", type=int, default=None, help="n of Sp_2n, or the first spin dimension")
    c.add_argument("--m", type=int, default=None, help="m of Sp_2m, or the second spin dimension")
    c.add_argument("--garibaldi", action="store_true", help="the Sp2 x Sp8 -> Spin16 tables")
    c.add_argument("--kernel", action="store_true")
    c.add_argument("--centers", action="store_true")
    c.add_argument("--well-defined", action="store_true")
    c.add_argument("--checks", default="abcd", help="subset of a (additive) b (multiplicative) c (Galois) d (commutators)")
    c.add_argument("--force", action="store_true", help="ignore --max-dim for a single map")

    c = sub.add_parser("rost", help="Killing forms and Rost multipliers")
    _common(c)
    c.add_argument("--map", choices=("sp", "spin", "proj-hspin-pso"), default=None)
    c.add_argument("--n", type=int, default=None)
    c.add_argument("--m", type=int, default=None)
    c.add_argument("--quotient", choices=("hspin",), default=None)
    c.add_argument("--restrict", choices=("L", "R"), default=None)
    c.add_argument("--half-rank", type=int, default=None)
    c.add_argument("--killing", choices=("spin", "so", "pso", "hspin", "sp", "psp"), default=None)
    c.add_argument("--rank", type=int, default=None)
    c.add_argument("--family", choices=("B", "C", "D"), default=None)
    c.add_argument("--grid", action="store_true", help="the 4x4 table of the induced maps")
    c.add_argument("--route", choices=("psp", "pso", "both"), default="both")
    return p


_GLOBAL = {"emit", "max_dim", "seed", "sample", "output", "verbose", "command", "replay", "replay_emit"}


def config_from_args(ns, argv) -> RunConfig:
    opts = {k: v for k, v in vars(ns).items() if k not in _GLOBAL}
    return RunConfig(ns.command, list(argv), ns.emit, ns.max_dim, ns.seed, ns.sample, ns.verbose, opts)


def run(cfg: RunConfig) -> Report:
    t0 = time.perf_counter()
    recs, tables = COMMANDS[cfg.command](cfg)
    return Report(cfg, recs, tables, time.perf_counter() - t0)


def _emit(report: Report, path=None):
    text = (json.dumps(report.to_json(), indent=1, ensure_ascii=False) + "\n"
            if report.config.emit == "json" else report.to_markdown())
    if path:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _replay(path, emit):
    with open(path, encoding="utf-8") as fh:
        old = json.load(fh)
    if old.get("schema_version") != SCHEMA_VERSION:
        raise ConfigurationError(f"report schema {old.get('schema_version')} is not {SCHEMA_VERSION}")
    argv = list(old["command"]["argv"])
    parser = build_parser()
    ns = parser.parse_args(argv)
    if ns.command is None:
        raise ConfigurationError("report has no subcommand")
    cfg = config_from_args(ns, argv)
    if emit:
        cfg.emit = emit
    rep = run(cfg)
    old_ids = sorted(r["id"] for r in old["records"])
    new_ids = sorted(r["id"] for r in rep.records)
    missing = sorted(set(old_ids) - set(new_ids))
    added = sorted(set(new_ids) - set(old_ids))
    rep.records.append(record("replay:check-set", old_ids == new_ids, f"{len(old_ids)} ids",
                              f"{len(new_ids)} ids, {len(missing)} missing, {len(added)} new"))
    old_status = {r["id"]: r["status"] for r in old["records"]}
    changed = sorted(r["id"] for r in rep.records if r["id"] in old_status and old_status[r["id"]] != r["status"])
    rep.records.append(record("replay:statuses", not changed, "unchanged", ", ".join(changed[:5]) or "unchanged"))
    rep.records.sort(key=lambda r: r["id"])
    return rep


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as exc:  # argparse reports usage errors with status 2
        return int(exc.code or 0)
    try:
        if ns.replay:
            rep = _replay(ns.replay, ns.replay_emit)
            _emit(rep)
            return rep.exit_code
        if ns.command is None:
            parser.print_usage(sys.stderr)
            return 2
        cfg = config_from_args(ns, argv)
        rep = run(cfg)
    except (ConfigurationError, DomainError, OSError, json.JSONDecodeError, KeyError) as exc:
        print(f"kronspin: error: {exc}", file=sys.stderr)
        return 2
    except KronspinError as exc:
        print(f"kronspin: verification aborted: {exc}", file=sys.stderr)
        return 1
    _emit(rep, ns.output)
    return rep.exit_code


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
