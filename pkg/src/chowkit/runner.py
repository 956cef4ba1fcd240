"""Evaluate a parsed defs file and produce a verification report."""

from __future__ import annotations

import json
import math
import re
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Optional

from chowkit import surfaces
from chowkit.builders import projective_bundle, projective_space, PairingTable, surface_from_pairing
from chowkit.chern import KClass, dual, lambda2, line, make_kclass, segre, sym2, trivial, twist_line
from chowkit.defs import (BundleDecl, BundleRingDecl, CheckDecl, Defs, LetDecl, PresentationDecl,
                          SpaceDecl, SurfaceDecl, parse_defs)
from chowkit.degeneracy import porteous_sym
from chowkit.expr import Attr, BinOp, Call, Name, Neg, Node, Num, Tuple, eval_arithmetic
from chowkit.quotient import Presentation, check_confluence
from chowkit.ring import Polynomial

REPORT_VERSION = "1"
PASS, FAIL, DISCREPANCY = "PASS", "FAIL", "DISCREPANCY_CONFIRMED"


class EvaluationError(Exception):
    pass


@dataclass
class _Broken:
    error: str


class Environment:
    """Rings, bundles and let-bound values built from the declarations, in order.

    A declaration that fails to build is remembered as broken; only checks
    that use it fail.
    """

    def __init__(self, defs: Defs):
        self.rings: dict = {}
        self.symbols: dict = {}
        self.errors: dict = {}
        for d in defs.declarations:
            if isinstance(d, CheckDecl):
                continue
            try:
                self._build(d)
            except Exception as exc:  # recorded, surfaced by dependent checks
                msg = f"line {d.line}: {d.name}: {_describe(exc)}"
                self.errors[d.name] = msg
                target = self.rings if isinstance(d, (SpaceDecl, BundleRingDecl, SurfaceDecl,
                                                      PresentationDecl)) else self.symbols
                target[d.name] = _Broken(msg)

    def ring(self, name: str) -> Presentation:
        r = self.rings[name]
        if isinstance(r, _Broken):
            raise EvaluationError(r.error)
        return r

    def _build(self, d):
        ev = Evaluator(self)
        if isinstance(d, SpaceDecl):
            self.rings[d.name] = projective_space(d.dimension, d.generator, name=d.name)
        elif isinstance(d, BundleRingDecl):
            base = self.ring(d.base)
            E = ev.eval(d.bundle, base)
            if not isinstance(E, KClass):
                raise EvaluationError("projective_bundle needs a bundle")
            self.rings[d.name] = projective_bundle(base, E, d.generator, name=d.name)
        elif isinstance(d, SurfaceDecl):
            products = {(a, b): _as_fraction(ev.eval(v, None)) for a, b, v in d.pairings}
            self.rings[d.name] = surface_from_pairing(PairingTable(d.generators, products),
                                                       name=d.name)
        elif isinstance(d, PresentationDecl):
            from chowkit.ring import Ring
            ring = Ring(list(d.generators))
            rules = [(eval_arithmetic(l, ring), eval_arithmetic(r, ring)) for l, r in d.relations]
            table = {eval_arithmetic(m, ring): _as_fraction(ev.eval(v, None))
                     for m, v in d.integrals}
            self.rings[d.name] = Presentation(ring, rules, d.top, table, order=d.order,
                                              name=d.name)
        elif isinstance(d, BundleDecl):
            value = ev.eval(d.expr, self.ring(d.ring))
            if not isinstance(value, KClass):
                raise EvaluationError(f"bundle {d.name} does not evaluate to a bundle")
            self.symbols[d.name] = value
        elif isinstance(d, LetDecl):
            pres = self.ring(d.ring) if d.ring else None
            self.symbols[d.name] = ev.eval(d.expr, pres)


def _describe(exc: Exception) -> str:
    return f"{type(exc).__name__}: {exc}"


def _as_fraction(v) -> Fraction:
    if isinstance(v, Fraction):
        return v
    if isinstance(v, Polynomial) and v.is_constant():
        return v.constant_term
    if isinstance(v, int):
        return Fraction(v)
    raise EvaluationError(f"expected a number, got {format_value(v)}")


def _as_int(v, what: str) -> int:
    f = _as_fraction(v)
    if f.denominator != 1:
        raise EvaluationError(f"{what} must be an integer, got {f}")
    return int(f)


class Evaluator:
    def __init__(self, env: Environment):
        self.env = env

    def eval(self, node: Node, pres: Optional[Presentation]):
        if isinstance(node, Num):
            return Fraction(node.value)
        if isinstance(node, Name):
            return self._name(node, pres)
        if isinstance(node, Neg):
            v = self.eval(node.operand, pres)
            if isinstance(v, KClass):
                return -v
            return -v if isinstance(v, (Fraction, Polynomial)) else self._bad("-", v, node)
        if isinstance(node, BinOp):
            return self._binop(node, pres)
        if isinstance(node, Tuple):
            return tuple(self.eval(a, pres) for a in node.items)
        if isinstance(node, Attr):
            v = self.eval(node.value, pres)
            if not hasattr(v, "__dataclass_fields__") or node.name not in v.__dataclass_fields__:
                raise EvaluationError(f"{format_value(v)} has no attribute {node.name!r}")
            return Fraction(getattr(v, node.name))
        if isinstance(node, Call):
            return self._call(node, pres)
        raise EvaluationError(f"cannot evaluate {node!r}")

    # -- names ----------------------------------------------------------------

    def _name(self, node: Name, pres):
        if pres is not None and node.id in pres.ring:
            return pres.gen(node.id)
        env = self.env
        if node.id in env.symbols:
            v = env.symbols[node.id]
            if isinstance(v, _Broken):
                raise EvaluationError(v.error)
            return self._lift(v, pres)
        if node.id == "O":
            if pres is None:
                raise EvaluationError(f"line {node.line}: 'O' needs a ring context")
            return trivial(pres)
        if node.id in env.rings:
            return env.ring(node.id)
        raise EvaluationError(f"unknown identifier {node.id!r}")

    @staticmethod
    def _lift(v, pres):
        if pres is None:
            return v
        if isinstance(v, KClass) and v.pres.ring != pres.ring:
            if set(v.pres.ring.names) <= set(pres.ring.names):
                return v.pullback(pres)
        if isinstance(v, Polynomial) and v.ring != pres.ring:
            if set(v.ring.names) <= set(pres.ring.names):
                return v.to_ring(pres.ring)
        return v

    # -- operators --------------------------------------------------------------

    def _bad(self, op, v, node, w=None):
        kinds = type(v).__name__ + (f" and {type(w).__name__}" if w is not None else "")
        raise EvaluationError(f"line {node.line}, column {node.column}: "
                              f"operator {op!r} is not defined for {kinds}")

    def _binop(self, node: BinOp, pres):
        a = self.eval(node.left, pres)
        b = self.eval(node.right, pres)
        op = node.op
        scalar = (Fraction,)
        if isinstance(a, KClass) or isinstance(b, KClass):
            if op in "+-" and isinstance(a, KClass) and isinstance(b, KClass):
                return a + b if op == "+" else a - b
            if op == "*" and isinstance(a, Fraction) and isinstance(b, KClass):
                return _as_int(a, "bundle multiplicity") * b
            if op == "*" and isinstance(b, Fraction) and isinstance(a, KClass):
                return _as_int(b, "bundle multiplicity") * a
            self._bad(op, a, node, b)
        if isinstance(a, tuple) or isinstance(b, tuple) or \
                isinstance(a, surfaces.HodgeDiamond) or isinstance(b, surfaces.HodgeDiamond):
            ta, tb = _as_tuple(a), _as_tuple(b)
            if op in "+-" and ta is not None and tb is not None and len(ta) == len(tb):
                sign = 1 if op == "+" else -1
                return tuple(x + sign * y for x, y in zip(ta, tb))
            self._bad(op, a, node, b)
        if not isinstance(a, scalar + (Polynomial,)) or not isinstance(b, scalar + (Polynomial,)):
            self._bad(op, a, node, b)
        if op == "^":
            e = _as_int(b, "exponent")
            if e < 0:
                raise EvaluationError("negative exponents are not supported")
            if isinstance(a, Polynomial) and pres is not None and a.ring == pres.ring:
                out = pres.ring.one()
                for _ in range(e):
                    out = pres.multiply(out, a)
                return out
            return a ** e
        if op == "/":
            d = _as_fraction(b)
            if d == 0:
                raise EvaluationError("division by zero")
            return a / d
        if op == "*":
            if isinstance(a, Polynomial) and isinstance(b, Polynomial) and pres is not None \
                    and a.ring == pres.ring and b.ring == pres.ring:
                return pres.multiply(a, b)
            return a * b
        if op == "+":
            return a + b
        return a - b

    # -- builtins -----------------------------------------------------------------

    def _call(self, node: Call, pres):
        f = node.func
        args = node.args
        if f in ("integrate", "normal_form"):
            ring = self.env.ring(args[1].id)
            v = self.eval(args[0], ring)
            p = self._poly(v, ring)
            return ring.integrate(p) if f == "integrate" else ring.normal_form(p)
        if f == "relation":
            ring = self.env.ring(args[0].id)
            return ring.normal_form(self._poly(self.eval(args[1], ring), ring))
        vals = [self.eval(a, pres) for a in args]
        if f == "O":
            if pres is None:
                raise EvaluationError("O(...) needs a ring context")
            return line(self._poly(vals[0], pres), pres)
        if f == "kclass":
            if pres is None:
                raise EvaluationError("kclass(...) needs a ring context")
            return make_kclass(_as_int(vals[0], "rank"), self._poly(vals[1], pres), pres)
        if f in ("c", "chern", "rank", "dual", "twist", "sym2", "lambda2", "segre",
                 "chern_top", "porteous_sym"):
            E = vals[0]
            if not isinstance(E, KClass):
                raise EvaluationError(f"{f} needs a bundle, got {format_value(E)}")
            if f == "c":
                return E.pres.normal_form(E.c(_as_int(vals[1], "Chern class index")))
            if f == "chern":
                return E.total
            if f == "rank":
                return Fraction(E.rank)
            if f == "dual":
                return dual(E)
            if f == "twist":
                return twist_line(E, self._poly(vals[1], E.pres))
            if f == "sym2":
                return sym2(E)
            if f == "lambda2":
                return lambda2(E)
            if f == "segre":
                return segre(E)
            if f == "chern_top":
                if E.rank < 1:
                    raise EvaluationError("chern_top needs rank >= 1")
                return E.pres.normal_form(E.top())
            twist = self._poly(vals[2], E.pres)
            return porteous_sym(E, _as_int(vals[1], "corank"), twist)
        if f == "grade":
            return self._poly(vals[0], pres).grade_component(_as_int(vals[1], "degree"))
        if f == "binomial":
            return Fraction(math.comb(_as_int(vals[0], "n"), _as_int(vals[1], "k")))
        ints = lambda: [_as_int(v, f"argument of {f}") for v in vals]  # noqa: E731
        if f == "invariants":
            return surfaces.SurfaceInvariants(*ints())
        if f in ("noether_chi", "hodge", "etale_quotient", "blow_down"):
            inv = vals[0]
            if not isinstance(inv, surfaces.SurfaceInvariants):
                raise EvaluationError(f"{f} needs surface invariants")
            if f == "noether_chi":
                return Fraction(surfaces.noether_chi(inv))
            if f == "hodge":
                return surfaces.hodge_diamond(inv)
            k = _as_int(vals[1], f"argument of {f}")
            if f == "etale_quotient":
                return surfaces.etale_double_cover_quotient(inv, k)
            return surfaces.blow_down_points(inv, k)
        if f == "plane_genus":
            return Fraction(surfaces.plane_curve_genus(*ints()))
        if f == "prym_dim":
            return Fraction(surfaces.prym_dim(*ints()))
        if f == "etale_genus":
            return Fraction(surfaces.etale_double_genus(*ints()))
        raise EvaluationError(f"unknown function {f!r}")

    @staticmethod
    def _poly(v, pres) -> Polynomial:
        if isinstance(v, Polynomial):
            if pres is not None and v.ring != pres.ring:
                return v.to_ring(pres.ring)
            return v
        if isinstance(v, Fraction) and pres is not None:
            return pres.ring.constant(v)
        raise EvaluationError(f"expected a class, got {format_value(v)}")


# -- values -------------------------------------------------------------------------

def _as_tuple(v):
    if isinstance(v, tuple):
        return v
    if isinstance(v, surfaces.HodgeDiamond):
        return tuple(Fraction(x) for x in v.as_tuple())
    if isinstance(v, surfaces.SurfaceInvariants):
        return tuple(Fraction(x) for x in (v.c1sq, v.c2, v.q))
    return None


def _canonical(v, pres):
    """A comparable normal form for a value."""
    if isinstance(v, int):
        v = Fraction(v)
    if isinstance(v, Polynomial):
        if pres is not None and set(v.ring.names) <= set(pres.ring.names):
            v = pres.normal_form(v.to_ring(pres.ring))
        if v.is_constant():
            return ("num", v.constant_term)
        return ("poly", tuple(sorted(zip(v.ring.names, v.ring.degrees))),
                frozenset((tuple(zip(v.ring.names, m)), c) for m, c in v.items()))
    if isinstance(v, Fraction):
        return ("num", v)
    if isinstance(v, KClass):
        return ("kclass", v.rank, _canonical(v.total, v.pres))
    t = _as_tuple(v)
    if t is not None:
        return ("tuple", tuple(_canonical(x, pres) for x in t))
    raise EvaluationError(f"cannot compare {format_value(v)}")


def values_equal(a, b, pres=None) -> bool:
    if isinstance(a, Polynomial) and isinstance(b, Polynomial) and a.ring != b.ring:
        if set(b.ring.names) <= set(a.ring.names):
            b = b.to_ring(a.ring)
        elif set(a.ring.names) <= set(b.ring.names):
            a = a.to_ring(b.ring)
    return _canonical(a, pres) == _canonical(b, pres)


def format_value(v) -> str:
    if isinstance(v, int):
        return str(v)
    if isinstance(v, Fraction):
        return str(v.numerator) if v.denominator == 1 else f"{v.numerator}/{v.denominator}"
    if isinstance(v, Polynomial):
        return str(v)
    if isinstance(v, KClass):
        return f"rank {v.rank}, c = {v.total}"
    if isinstance(v, surfaces.SurfaceInvariants):
        return f"invariants({v.c1sq}, {v.c2}, {v.q})"
    if isinstance(v, surfaces.HodgeDiamond):
        return "hodge(" + ", ".join(str(x) for x in v.as_tuple()) + ")"
    if isinstance(v, tuple):
        return "(" + ", ".join(format_value(x) for x in v) + ")"
    if isinstance(v, Presentation):
        return f"ring {v.name}"
    return repr(v)


# -- checks and reports ------------------------------------------------------------

@dataclass
class CheckResult:
    id: str
    description: str
    status: str
    provenance: str
    computed: str
    expected: str
    ms: float = 0.0
    printed: Optional[str] = None
    note: Optional[str] = None
    error: Optional[str] = None

    def to_json(self) -> dict:
        out = {"id": self.id, "description": self.description, "computed": self.computed,
               "expected": self.expected, "status": self.status,
               "provenance": self.provenance, "ms": self.ms}
        for key in ("printed", "note", "error"):
            v = getattr(self, key)
            if v is not None:
                out[key] = v
        return out


def natural_key(check_id: str):
    return [(0, int(part), "") if part.isdigit() else (1, 0, part)
            for part in re.findall(r"\d+|\D+", check_id)]


@dataclass
class Report:
    checks: list = field(default_factory=list)
    confluence: list = field(default_factory=list)

    @property
    def summary(self) -> dict:
        count = lambda s: sum(1 for c in self.checks if c.status == s)  # noqa: E731
        return {"pass": count(PASS), "fail": count(FAIL), "discrepancy": count(DISCREPANCY)}

    @property
    def ok(self) -> bool:
        return self.summary["fail"] == 0 and all(r.confluent for r in self.confluence)

    def result(self, check_id: str) -> CheckResult:
        for c in self.checks:
            if c.id == check_id:
                return c
        raise KeyError(check_id)

    def to_json(self) -> dict:
        out = {"version": REPORT_VERSION, "checks": [c.to_json() for c in self.checks],
               "summary": self.summary}
        if self.confluence:
            out["confluence"] = [{"ring": r.presentation, "up_to_degree": r.up_to_degree,
                                  "checked": r.checked, "confluent": r.confluent,
                                  "witnesses": [m for m, _ in r.failures]}
                                 for r in self.confluence]
        return out

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2, ensure_ascii=False) + "\n"

    def to_text(self) -> str:
        lines = []
        width = max((len(c.id) for c in self.checks), default=0)
        for c in self.checks:
            lines.append(f"{c.status:<21} {c.id:<{width}}  {c.description}")
            lines.append(f"{'':21} {'':{width}}  computed: {c.computed}")
            if c.status != PASS or c.printed is not None:
                lines.append(f"{'':21} {'':{width}}  expected: {c.expected}")
            if c.printed is not None:
                lines.append(f"{'':21} {'':{width}}  printed:  {c.printed}")
            if c.note:
                lines.append(f"{'':21} {'':{width}}  note:     {c.note}")
            if c.error:
                lines.append(f"{'':21} {'':{width}}  error:    {c.error}")
        for r in self.confluence:
            lines.append(str(r))
            for mono, forms in r.failures:
                lines.append(f"  {mono} -> " + " | ".join(forms))
        s = self.summary
        lines.append(f"{s['pass']} passed, {s['fail']} failed, "
                     f"{s['discrepancy']} discrepancies confirmed")
        return "\n".join(lines) + "\n"


def run_check(check: CheckDecl, env: Environment, timings: bool = True) -> CheckResult:
    start = time.perf_counter()
    expected = check.expect
    res = CheckResult(check.id, check.description, FAIL, check.provenance, "", "",
                      note=check.note)
    ev = Evaluator(env)
    try:
        pres = env.ring(check.ring) if check.ring else None
        value = ev.eval(check.value, pres)
        res.computed = format_value(_display(value, pres))
        exp_value = ev.eval(expected, pres) if expected is not None else None
        if check.mode == "EXACT":
            res.expected = format_value(_display(exp_value, pres))
            res.status = PASS if values_equal(value, exp_value, pres) else FAIL
        else:
            printed = ev.eval(check.printed, pres)
            res.printed = format_value(_display(printed, pres))
            res.expected = (format_value(_display(exp_value, pres)) if exp_value is not None
                            else f"not {res.printed}")
            differs = not values_equal(value, printed, pres)
            pinned = exp_value is None or values_equal(value, exp_value, pres)
            res.status = DISCREPANCY if differs and pinned else FAIL
            if not differs:
                res.error = "computed value agrees with the printed value"
    except Exception as exc:  # a broken check never aborts the run
        res.status = FAIL
        res.error = _describe(exc)
    res.ms = round((time.perf_counter() - start) * 1000, 3) if timings else 0
    return res


def _display(v, pres):
    if isinstance(v, Polynomial) and pres is not None and set(v.ring.names) <= set(pres.ring.names):
        v = pres.normal_form(v.to_ring(pres.ring))
    if isinstance(v, Polynomial) and v.is_constant():
        return v.constant_term
    return v


def run_checks(defs: Defs, ids: Optional[Iterable[str]] = None, jobs: int = 1,
               timings: bool = True, confluence_degree: Optional[int] = None,
               env: Optional[Environment] = None) -> Report:
    """Run the checks in ``defs`` (or only ``ids``) and collect a report.

    Unknown ids raise ``KeyError``; an empty ``ids`` gives an empty report.
    """
    checks = defs.checks
    if ids is not None:
        wanted = list(ids)
        known = {c.id for c in checks}
        unknown = [i for i in wanted if i not in known]
        if unknown:
            raise KeyError(f"unknown check id(s): {', '.join(unknown)}")
        checks = [c for c in checks if c.id in set(wanted)]
    env = env or Environment(defs)
    if jobs > 1 and len(checks) > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(lambda c: run_check(c, env, timings), checks))
    else:
        results = [run_check(c, env, timings) for c in checks]
    results.sort(key=lambda r: natural_key(r.id))
    report = Report(results)
    if confluence_degree is not None:
        for name, pres in env.rings.items():
            if isinstance(pres, Presentation):
                report.confluence.append(check_confluence(pres, confluence_degree))
    return report


def run_text(text: str, **kwargs) -> Report:
    return run_checks(parse_defs(text), **kwargs)
