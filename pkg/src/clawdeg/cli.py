"""Command-line front end.

Every subcommand prints line-delimited JSON: a ``run`` record with the exact
parameters and library version, then one record per result or assertion.
Rationals are written as ``"p/q"``.  Exit codes: 0 ok, 1 a checked assertion
failed, 2 usage or parse error, 3 budget exceeded.

A ``--config`` JSON object supplies defaults for any flag (keys are the flag
names with dashes turned into underscores); flags given on the command line
win.  Unknown keys are rejected.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from typing import Any, Callable, Dict, List, Optional

from . import __version__
from . import approxdeg, multisym, properties, querypoly, reductions
from .polyring import Poly, format_rational, from_text, parse_rational
from .properties import BudgetExceeded, ParseError, PropertySpec

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_BUDGET = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


# -- value parsing ------------------------------------------------------------

def _int_list(text) -> List[int]:
    if isinstance(text, list):
        return [int(v) for v in text]
    try:
        return [int(v) for v in str(text).split(",") if v.strip()]
    except ValueError:
        raise UsageError(f"expected comma-separated integers, got {text!r}")


def _rational(text) -> Fraction:
    try:
        return parse_rational(str(text))
    except ValueError as e:
        raise UsageError(str(e))


def _matrix(text: str) -> List[List[int]]:
    """``"1,0;0,2"`` is a two-row matrix."""
    return [_int_list(row) for row in str(text).split(";")]


def _blocks(text: str) -> List[tuple]:
    out = []
    for row in str(text).split(";"):
        vals = []
        for v in row.split(","):
            v = v.strip()
            vals.append(None if v == "*" else int(v))
        out.append(tuple(vals))
    return out


def _json_value(v: Any) -> Any:
    if isinstance(v, Fraction):
        return format_rational(v)
    if isinstance(v, Poly):
        return str(v)
    if isinstance(v, (list, tuple)):
        return [_json_value(x) for x in v]
    if isinstance(v, dict):
        return {str(k): _json_value(x) for k, x in v.items()}
    if isinstance(v, float) and v == float("-inf"):
        return "-inf"
    return v


class Report:
    def __init__(self, stream):
        self.stream = stream
        self.failed = False

    def emit(self, record: str, **fields):
        fields = {"record": record, **{k: _json_value(v) for k, v in fields.items()}}
        self.stream.write(json.dumps(fields, sort_keys=True, separators=(",", ":")) + "\n")

    def check(self, name: str, ok: bool, **fields):
        self.failed |= not ok
        self.emit("check", name=name, passed=bool(ok), **fields)


# -- property construction -----------------------------------------------------

PROPERTIES = ("claw", "kclaw", "collision", "or")


def _spec(a, M: Optional[int] = None) -> PropertySpec:
    M = a.M if M is None else M
    if M is None:
        raise UsageError("--M is required")
    if a.property == "claw":
        _need(a, "F", "G")
        return properties.claw(a.F, a.G, M)
    if a.property == "kclaw":
        if a.domains is None:
            raise UsageError("kclaw needs --domains")
        return properties.kclaw(_int_list(a.domains), M)
    if a.property == "collision":
        return properties.collision(M, a.F)
    if a.property == "or":
        doms = _int_list(a.domains) if a.domains is not None else [a.F, a.G]
        if None in doms:
            raise UsageError("or needs --domains or --F/--G")
        return properties.or_on_second(doms, M, target=a.target)
    raise UsageError(f"unknown property {a.property!r}")


def _need(a, *names):
    missing = [n for n in names if getattr(a, n) is None]
    if missing:
        raise UsageError("missing " + ", ".join("--" + n for n in missing))


def _base_witness(F: int, G: int, M: int, eps: Fraction, max_degree: int) -> Poly:
    res = approxdeg.min_approx_degree(approxdeg.DegreeQuery(properties.claw(F, G, M), eps,
                                                            max_degree=max_degree))
    if res.witness is None:
        raise UsageError(f"no claw witness up to degree {max_degree}")
    return multisym.expand_freq_to_raw(res.witness, (F, G))


# -- subcommands ---------------------------------------------------------------

def cmd_degree(a, rep: Report):
    q = approxdeg.DegreeQuery(_spec(a), a.eps, a.space, a.basis, a.max_degree, a.budget)
    res = approxdeg.min_approx_degree(q)
    for d, feasible in res.per_degree:
        rep.emit("degree-step", d=d, feasible=feasible, basis_size=res.basis_sizes.get(d),
                 orbit_count=res.orbit_count, space=res.space, basis=res.basis_kind)
    rep.emit("degree", property=q.spec.label(), eps=q.epsilon, space=res.space,
             d_min=res.d_min, witness=res.witness)


def cmd_range_equality(a, rep: Report):
    _need(a, "Mprime")
    if a.M_list is None:
        raise UsageError("--M is required (comma-separated larger ranges)")
    spec = _spec(a, a.Mprime)
    r = approxdeg.range_equality_report(spec, a.Mprime, a.M_list, a.eps, a.max_degree,
                                        a.budget, a.raw_budget)
    for e in [r.base] + r.entries:
        rep.emit("range", M=e.M, d_min=e.d_min, d_min_raw=e.d_min_raw, orbit_count=e.orbit_count,
                 raw_notice=e.raw_notice, lifted_degree=e.lifted_degree,
                 lifted_verified=e.lifted_verified)
    rep.check("d_min equal across ranges", r.equal, base=r.base.d_min)
    rep.check("lifted witness verified", r.lifted_ok)
    rep.check("raw and frequency spaces agree", r.raw_consistent)


def cmd_decompose_mon(a, rep: Report):
    _need(a, "omega")
    omega = [tuple(r) for r in _matrix(a.omega)]
    if len({len(r) for r in omega}) != 1:
        raise UsageError("all rows of omega need the same length")
    expr = multisym.decompose_mon(omega)
    rep.emit("decomposition", omega=omega, expression=expr.to_text(), terms=len(expr.terms))
    lay = multisym.matrix_layout(1)
    rep.check("re-expands to the orbit monomial",
              expr.expand(len(omega), lay) == multisym.orbit_monomial(omega, lay))
    rep.check("weights bounded", expr.max_weight() <= multisym.weight(omega))


def cmd_symmetrize(a, rep: Report):
    _need(a, "poly")
    sizes = _int_list(a.domains) if a.domains is not None else [a.F] + ([a.G] if a.G else [])
    if None in sizes:
        raise UsageError("symmetrize needs --domains or --F")
    try:
        p = from_text(a.poly)
    except (ValueError, KeyError) as e:
        raise UsageError(f"bad polynomial: {e}")
    q = multisym.symmetrize_poly(p, sizes)
    rep.emit("symmetrized", input=p, sizes=sizes, output=q, degree=q.degree())


def cmd_claw_to_collision(a, rep: Report):
    _need(a, "F", "G", "M")
    base = _base_witness(a.F, a.G, a.M, a.eps, a.max_degree)
    ca = reductions.claw_to_collision_average(base, a.M, a.F, a.G, a.eps)
    rep.emit("average", M=a.M, F=a.F, G=a.G, eps=a.eps, base_degree=base.degree(),
             degree=ca.poly.degree(), one_to_one=[ca.one_to_one_min, ca.one_to_one_max],
             two_to_one=[ca.two_to_one_min, ca.two_to_one_max], pcl_min=ca.pcl_min, gap=ca.gap,
             scale=ca.scale, shift=ca.shift, normalized_error=ca.normalized_error,
             reference_map="(25P+18)/43")
    rep.check("0 <= P <= eps on one-to-one inputs", ca.small_side_ok)
    rep.check("P >= pcl (1 - eps) on two-to-one inputs", ca.large_side_ok)
    rep.check("degree not raised", ca.poly.degree() <= base.degree())


def cmd_pcl(a, rep: Report):
    _need(a, "h", "F", "G")
    h = _int_list(a.h)
    r = reductions.pcl_exact(h, a.F, a.G, limit=a.limit, samples=a.samples, seed=a.seed)
    rep.emit("pcl", h=h, F=a.F, G=a.G, value=r.value, exact=r.exact, pairs=r.pairs,
             samples=r.samples, seed=r.seed)


def cmd_or_embed(a, rep: Report):
    _need(a, "F", "G", "M")
    base = _base_witness(a.F, a.G, a.M, a.eps, a.max_degree)
    p = reductions.or_embedding(base)
    err = reductions.or_error(p, a.G)
    rep.emit("or-embedding", F=a.F, G=a.G, M=a.M, eps=a.eps, polynomial=p, degree=p.degree(),
             base_degree=base.degree(), error=err)
    rep.check("approximates OR", err is not None and err <= a.eps)


def _claw_bit(t) -> int:
    return properties.eval_property(properties.claw(len(t.values[0]), len(t.values[1]), t.M), t)


def cmd_psearch_compose(a, rep: Report):
    _need(a, "M")
    if a.f_blocks is not None or a.g_blocks is not None:
        _need(a, "f_blocks", "g_blocks")
        fb, gb = _blocks(a.f_blocks), _blocks(a.g_blocks)
        flat = reductions.psearch_compose_instance(fb, gb, a.M)
        dec = reductions.psearch_decode(fb, gb, a.M)
        rep.emit("instance", flat=flat.to_text(), decoded=dec.to_text(),
                 claw_flat=_claw_bit(flat), claw_decoded=_claw_bit(dec))
        rep.check("composition identity", _claw_bit(flat) == _claw_bit(dec))
        return
    _need(a, "k", "F", "G")
    count = bad = 0
    for fb, gb in reductions.psearch_inputs(a.k, a.F, a.G, a.M):
        count += 1
        flat = reductions.psearch_compose_instance(fb, gb, a.M)
        bad += _claw_bit(flat) != _claw_bit(reductions.psearch_decode(fb, gb, a.M))
    rep.check("composition identity on every promise input", bad == 0, inputs=count, mismatches=bad)


def cmd_mk_schedule(a, rep: Report):
    _need(a, "F", "G")
    rows = reductions.mk_schedule(a.F, a.G)
    for r in rows:
        rep.emit("schedule", k=r.k, F_k=r.F_k, G_k=r.G_k, M_k=r.M_k)
    bad = reductions.schedule_violations(a.F, a.G, rows)
    rep.check("schedule properties", not bad, violations=bad)


def cmd_lb_formula(a, rep: Report):
    _need(a, "F", "G", "M")
    b = reductions.lb_formula(a.F, a.G, a.M)
    rep.emit("bound", F=b.F, G=b.G, M=b.M, regime=b.regime, value_pow6=b.value_pow6,
             block_reduction_pow6=b.block_reduction_pow6, transcript=list(b.transcript))


def cmd_querypoly_audit(a, rep: Report):
    _need(a, "F", "G", "M")
    spec = querypoly.OracleSpec(a.F, a.G, a.M, a.mode, a.work)
    for q in range(a.q + 1):
        r = querypoly.degree_audit(spec, q, a.seed + q, a.rotations)
        rep.emit("audit", q=q, seed=r.seed, amplitude_degree=r.amplitude_degree,
                 acceptance_degree=r.acceptance_degree, functions=r.functions_checked)
        rep.check(f"degree and norm bounds at q={q}", r.passed)


COMMANDS: Dict[str, Callable] = {
    "degree": cmd_degree,
    "range-equality": cmd_range_equality,
    "decompose-mon": cmd_decompose_mon,
    "symmetrize": cmd_symmetrize,
    "claw-to-collision": cmd_claw_to_collision,
    "pcl": cmd_pcl,
    "or-embed": cmd_or_embed,
    "psearch-compose": cmd_psearch_compose,
    "mk-schedule": cmd_mk_schedule,
    "lb-formula": cmd_lb_formula,
    "querypoly-audit": cmd_querypoly_audit,
}

# flag name -> (type, default); every subcommand accepts every flag it needs
FLAGS: Dict[str, tuple] = {
    "property": (str, "claw"),
    "F": (int, None),
    "G": (int, None),
    "M": (str, None),
    "Mprime": (int, None),
    "k": (int, None),
    "domains": (str, None),
    "target": (int, 1),
    "eps": (str, "1/3"),
    "space": (str, "freq"),
    "basis": (str, "orbit"),
    "max_degree": (int, 8),
    "budget": (int, properties.DEFAULT_BUDGET),
    "raw_budget": (int, 0),
    "omega": (str, None),
    "poly": (str, None),
    "h": (str, None),
    "limit": (int, reductions.EXACT_PAIR_LIMIT),
    "samples": (int, 200_000),
    "seed": (int, reductions.DEFAULT_SEED),
    "f_blocks": (str, None),
    "g_blocks": (str, None),
    "q": (int, 3),
    "mode": (str, "add"),
    "work": (int, 1),
    "rotations": (int, 4),
    "output": (str, None),
}


_PROP = ("property", "F", "G", "M", "domains", "target")
_LP = ("eps", "max_degree", "budget")
COMMAND_FLAGS: Dict[str, tuple] = {
    "degree": _PROP + _LP + ("space", "basis"),
    "range-equality": _PROP + _LP + ("Mprime", "raw_budget"),
    "decompose-mon": ("omega",),
    "symmetrize": ("poly", "F", "G", "domains"),
    "claw-to-collision": ("F", "G", "M", "eps", "max_degree"),
    "pcl": ("h", "F", "G", "limit", "samples", "seed"),
    "or-embed": ("F", "G", "M", "eps", "max_degree"),
    "psearch-compose": ("M", "k", "F", "G", "f_blocks", "g_blocks"),
    "mk-schedule": ("F", "G"),
    "lb-formula": ("F", "G", "M"),
    "querypoly-audit": ("F", "G", "M", "q", "seed", "mode", "work", "rotations"),
}


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="clawdeg", description="Exact approximate-degree tools for claw-type properties.")
    p.add_argument("--version", action="version", version=f"clawdeg {__version__}")
    sub = p.add_subparsers(dest="command")
    for name in COMMANDS:
        sp = sub.add_parser(name)
        sp.add_argument("--config")
        sp.add_argument("--output")
        for flag in COMMAND_FLAGS[name]:
            sp.add_argument("--" + flag.replace("_", "-"), dest=flag, default=None)
    return p


def _load_config(path: str, allowed) -> Dict[str, Any]:
    try:
        with open(path) as fh:
            text = fh.read()
    except OSError as e:
        raise UsageError(f"cannot read config: {e}")
    try:
        cfg = json.loads(text)
    except json.JSONDecodeError as e:
        raise UsageError(f"{path}:{e.lineno}:{e.colno}: {e.msg}")
    if not isinstance(cfg, dict):
        raise UsageError(f"{path}: config must be a JSON object")
    unknown = sorted(set(cfg) - set(allowed) - {"output"})
    if unknown:
        raise UsageError(f"{path}: unknown config keys {unknown}")
    return cfg


def resolve(ns: argparse.Namespace) -> argparse.Namespace:
    """Defaults, then config file, then explicit flags; values get their types here."""
    allowed = COMMAND_FLAGS[ns.command]
    cfg = _load_config(ns.config, allowed) if ns.config else {}
    out = argparse.Namespace(command=ns.command)
    for flag, (typ, default) in FLAGS.items():
        v = getattr(ns, flag, None) if flag in allowed or flag == "output" else None
        if v is None:
            v = cfg.get(flag, default)
        if v is not None and not isinstance(v, list):
            try:
                v = typ(v)
            except ValueError:
                raise UsageError(f"--{flag.replace('_', '-')}: cannot read {v!r}")
        setattr(out, flag, v)
    out.eps = _rational(out.eps)
    # --M is a single range for most commands and a list for range-equality
    out.M_list = _int_list(out.M) if out.M is not None else None
    if ns.command != "range-equality" and out.M is not None:
        if len(out.M_list) != 1:
            raise UsageError("--M takes a single integer here")
        out.M = out.M_list[0]
    return out


def params_of(a: argparse.Namespace) -> Dict[str, Any]:
    shown = {k: getattr(a, k) for k in COMMAND_FLAGS[a.command]}
    if a.command == "range-equality":
        shown["M"] = a.M_list
    return {k: _json_value(v) for k, v in sorted(shown.items()) if v is not None}


def run(argv: Optional[List[str]] = None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    try:
        ns = build_parser().parse_args(argv)
        if ns.command is None:
            raise UsageError("a subcommand is required: " + ", ".join(COMMANDS))
        a = resolve(ns)
    except UsageError as e:
        stderr.write(f"clawdeg: error: {e}\n")
        return EXIT_USAGE

    fh = open(a.output, "w") if a.output else None
    rep = Report(fh or stdout)
    try:
        rep.emit("run", command=a.command, version=__version__, params=params_of(a))
        COMMANDS[a.command](a, rep)
    except BudgetExceeded as e:
        rep.emit("error", kind="budget", message=str(e), count=e.count, budget=e.budget)
        stderr.write(f"clawdeg: budget exceeded: {e}\n")
        return EXIT_BUDGET
    except ParseError as e:
        stderr.write(f"clawdeg: parse error at column {e.pos + 1}: {e}\n")
        return EXIT_USAGE
    except (UsageError, ValueError) as e:
        stderr.write(f"clawdeg: error: {e}\n")
        return EXIT_USAGE
    finally:
        if fh:
            fh.close()
    return EXIT_FAIL if rep.failed else EXIT_OK


def main() -> None:
    sys.exit(run())
