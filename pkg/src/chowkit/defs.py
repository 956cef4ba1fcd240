"""The check-definition file format.

A defs file is a sequence of line-oriented declarations; ``#`` starts a
comment.  Names must be declared before use.

::

    ring P4 = projective_space(4, H)
    ring Z = projective_bundle(P4, O + O(H), E)
    ring F0 = surface(H, E)
      H*H = 39
      H*E = 1
      E*E = -1
    end
    ring B = presentation(D:1, Ht:1)
      relation D^3 = 0
      relation Ht^3 = D*Ht^2
      top 4
      integral D^2*Ht^2 = 1
    end
    bundle M on P4 = 8*O - 5*O(H) + O(2*H)
    let K on F0 = 3*H + 4*E
    check C04 "degree of the corank-2 locus"
      provenance PAPER
      in P4
      value integrate(porteous_sym(M, 2, 0) * H, P4)
      expect 40
    end

Checks in ``DOCUMENTED_DISCREPANCY`` mode carry ``printed`` (the value as
printed in the source) and ``note``; ``expect`` then pins the value the
engine is known to produce instead.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from chowkit.expr import (Attr, BinOp, Call, Name, Node, ParseError, Parser, Token,
                          Tuple, to_source, tokenize, walk)

PROVENANCES = ("PAPER", "DERIVED", "TRIVIAL")
MODES = ("EXACT", "DOCUMENTED_DISCREPANCY")

# builtin function -> accepted argument counts
BUILTINS = {
    "O": (1,), "kclass": (2,), "c": (2,), "chern": (1,), "rank": (1,), "dual": (1,),
    "twist": (2,), "sym2": (1,), "lambda2": (1,), "segre": (1,), "chern_top": (1,),
    "porteous_sym": (3,), "integrate": (2,), "normal_form": (2,), "relation": (2,),
    "grade": (2,), "invariants": (3,), "noether_chi": (1,), "hodge": (1,),
    "etale_quotient": (2,), "blow_down": (2,), "plane_genus": (2,), "prym_dim": (1,),
    "etale_genus": (1,), "binomial": (2,),
}
BUILTIN_NAMES = {"O"}
# builtins whose second argument names the ring the first is evaluated in
RING_ARG = {"integrate": 1, "normal_form": 1, "relation": 0}
ATTRIBUTES = {"c1sq", "c2", "q", "h00", "h10", "h20", "h11"}


class DefsError(ValueError):
    def __init__(self, message: str, line: int = 0, column: int = 0):
        where = f"line {line}, column {column}: " if line else ""
        super().__init__(where + message)
        self.message = message
        self.line = line
        self.column = column


# -- declarations -----------------------------------------------------------------

@dataclass(frozen=True)
class SpaceDecl:
    name: str
    dimension: int
    generator: str
    line: int = field(default=0, compare=False)


@dataclass(frozen=True)
class BundleRingDecl:
    name: str
    base: str
    bundle: Node
    generator: str
    line: int = field(default=0, compare=False)


@dataclass(frozen=True)
class SurfaceDecl:
    name: str
    generators: tuple
    pairings: tuple  # (a, b, Node)
    line: int = field(default=0, compare=False)


@dataclass(frozen=True)
class PresentationDecl:
    name: str
    generators: tuple  # (name, degree)
    relations: tuple  # (lhs Node, rhs Node)
    top: int
    integrals: tuple  # (monomial Node, value Node)
    order: Optional[tuple] = None
    line: int = field(default=0, compare=False)


@dataclass(frozen=True)
class BundleDecl:
    name: str
    ring: str
    expr: Node
    line: int = field(default=0, compare=False)


@dataclass(frozen=True)
class LetDecl:
    name: str
    ring: Optional[str]
    expr: Node
    line: int = field(default=0, compare=False)


@dataclass(frozen=True)
class CheckDecl:
    id: str
    description: str
    provenance: str
    value: Node
    ring: Optional[str] = None
    mode: str = "EXACT"
    expect: Optional[Node] = None
    printed: Optional[Node] = None
    note: Optional[str] = None
    line: int = field(default=0, compare=False)


RING_DECLS = (SpaceDecl, BundleRingDecl, SurfaceDecl, PresentationDecl)


@dataclass(frozen=True)
class Defs:
    declarations: tuple

    @property
    def rings(self) -> list:
        return [d for d in self.declarations if isinstance(d, RING_DECLS)]

    @property
    def bundles(self) -> list:
        return [d for d in self.declarations if isinstance(d, BundleDecl)]

    @property
    def lets(self) -> list:
        return [d for d in self.declarations if isinstance(d, LetDecl)]

    @property
    def checks(self) -> list:
        return [d for d in self.declarations if isinstance(d, CheckDecl)]

    def check(self, check_id: str) -> CheckDecl:
        for c in self.checks:
            if c.id == check_id:
                return c
        raise KeyError(check_id)


# -- line parser ----------------------------------------------------------------------

class _Line(Parser):
    def __init__(self, text: str, lineno: int):
        super().__init__(tokenize(text, lineno))
        self.lineno = lineno

    def error(self, message: str, tok: Token | None = None):
        tok = tok or self.tok
        raise DefsError(message, tok.line, tok.column)

    def name(self, what: str = "a name") -> str:
        t = self.tok
        if t.kind != "NAME":
            self.error(f"expected {what}, found {t.text or 'end of line'!r}")
        self.advance()
        return t.text

    def keyword(self, word: str):
        t = self.tok
        if t.kind != "NAME" or t.text != word:
            self.error(f"expected {word!r}, found {t.text or 'end of line'!r}")
        self.advance()

    def integer(self) -> int:
        sign = 1
        if self.at("-"):
            self.advance()
            sign = -1
        t = self.tok
        if t.kind != "INT":
            self.error(f"expected an integer, found {t.text or 'end of line'!r}")
        self.advance()
        return sign * int(t.text)

    def string(self) -> str:
        t = self.tok
        if t.kind != "STRING":
            self.error("expected a quoted string")
        self.advance()
        return t.text

    def op(self, text: str):
        if not self.at(text):
            self.error(f"expected {text!r}, found {self.tok.text or 'end of line'!r}")
        self.advance()

    def end(self):
        if self.tok.kind != "END":
            self.error(f"unexpected {self.tok.text!r}")

    def expr(self) -> Node:
        try:
            return self.parse_expr()
        except ParseError as exc:
            raise DefsError(exc.message, exc.line, exc.column) from None


def _block_lines(lines, i):
    """Collect body lines of a block up to its ``end``; returns (body, next index)."""
    body = []
    start = lines[i - 1][0]
    while i < len(lines):
        lineno, text = lines[i]
        if text.strip() == "end":
            return body, i + 1
        body.append((lineno, text))
        i += 1
    raise DefsError("block is missing its 'end'", start, 1)


def _strip(text: str) -> str:
    out = []
    in_str = False
    for ch in text:
        if ch == '"':
            in_str = not in_str
        if ch == "#" and not in_str:
            break
        out.append(ch)
    return "".join(out).rstrip()


def parse_defs(text: str) -> Defs:
    lines = [(n, _strip(t)) for n, t in enumerate(text.splitlines(), 1)]
    lines = [(n, t) for n, t in lines if t.strip()]
    decls = []
    scope = _Scope()
    i = 0
    while i < len(lines):
        lineno, raw = lines[i]
        i += 1
        p = _Line(raw, lineno)
        head = p.tok
        if head.kind != "NAME":
            p.error("expected a declaration (ring, bundle, let or check)")
        kind = head.text
        p.advance()
        if kind == "ring":
            decl, i = _parse_ring(p, lines, i)
        elif kind == "bundle":
            name = p.name("a bundle name")
            p.keyword("on")
            ring = p.name("a ring name")
            p.op("=")
            decl = BundleDecl(name, ring, p.expr(), line=lineno)
            p.end()
        elif kind == "let":
            name = p.name()
            ring = None
            if p.tok.kind == "NAME" and p.tok.text == "on":
                p.advance()
                ring = p.name("a ring name")
            p.op("=")
            decl = LetDecl(name, ring, p.expr(), line=lineno)
            p.end()
        elif kind == "check":
            decl, i = _parse_check(p, lines, i, lineno)
        elif kind == "end":
            p.error("'end' without an open block", head)
        else:
            p.error(f"unknown declaration {kind!r}", head)
        scope.declare(decl)
        decls.append(decl)
    return Defs(tuple(decls))


def _parse_ring(p: _Line, lines, i):
    lineno = p.lineno
    name = p.name("a ring name")
    p.op("=")
    ctor_tok = p.tok
    ctor = p.name("a ring constructor")
    p.op("(")
    if ctor == "projective_space":
        n = p.integer()
        p.op(",")
        g = p.name("a generator name")
        p.op(")")
        p.end()
        return SpaceDecl(name, n, g, line=lineno), i
    if ctor == "projective_bundle":
        base = p.name("a base ring")
        p.op(",")
        bundle = p.expr()
        p.op(",")
        g = p.name("a generator name")
        p.op(")")
        p.end()
        return BundleRingDecl(name, base, bundle, g, line=lineno), i
    if ctor == "surface":
        gens = [p.name("a generator name")]
        while p.at(","):
            p.advance()
            gens.append(p.name("a generator name"))
        p.op(")")
        p.end()
        body, i = _block_lines(lines, i)
        pairs = []
        for bl, btext in body:
            q = _Line(btext, bl)
            a = q.name("a generator name")
            q.op("*")
            b = q.name("a generator name")
            q.op("=")
            pairs.append((a, b, q.expr()))
            q.end()
        return SurfaceDecl(name, tuple(gens), tuple(pairs), line=lineno), i
    if ctor == "presentation":
        gens = []
        while True:
            g = p.name("a generator name")
            deg = 1
            if p.at(":"):
                p.advance()
                deg = p.integer()
            gens.append((g, deg))
            if not p.at(","):
                break
            p.advance()
        p.op(")")
        p.end()
        body, i = _block_lines(lines, i)
        relations, integrals, top, order = [], [], None, None
        for bl, btext in body:
            q = _Line(btext, bl)
            word = q.name("relation, top, order or integral")
            if word == "relation":
                lhs = q.expr()
                q.op("=")
                relations.append((lhs, q.expr()))
            elif word == "integral":
                mono = q.expr()
                q.op("=")
                integrals.append((mono, q.expr()))
            elif word == "top":
                top = q.integer()
            elif word == "order":
                order = [q.name()]
                while q.at(","):
                    q.advance()
                    order.append(q.name())
                order = tuple(order)
            else:
                q.error(f"unknown presentation entry {word!r}")
            q.end()
        if top is None:
            raise DefsError(f"presentation {name} needs a 'top' line", lineno, 1)
        return PresentationDecl(name, tuple(gens), tuple(relations), top, tuple(integrals),
                                order, line=lineno), i
    raise DefsError(f"unknown ring constructor {ctor!r}", ctor_tok.line, ctor_tok.column)


def _parse_check(p: _Line, lines, i, lineno):
    cid = p.name("a check id")
    description = p.string() if p.tok.kind == "STRING" else ""
    p.end()
    body, i = _block_lines(lines, i)
    fields: dict = {}
    for bl, btext in body:
        q = _Line(btext, bl)
        word_tok = q.tok
        word = q.name("a check field")
        if word in fields:
            q.error(f"duplicate field {word!r} in check {cid}", word_tok)
        if word in ("value", "expect", "printed"):
            fields[word] = q.expr()
        elif word == "provenance":
            v = q.name("a provenance")
            if v not in PROVENANCES:
                q.error(f"provenance must be one of {', '.join(PROVENANCES)}")
            fields[word] = v
        elif word == "mode":
            v = q.name("a mode")
            if v not in MODES:
                q.error(f"mode must be one of {', '.join(MODES)}")
            fields[word] = v
        elif word == "in":
            fields["ring"] = q.name("a ring name")
        elif word == "note":
            fields[word] = q.string()
        else:
            q.error(f"unknown check field {word!r}", word_tok)
        q.end()
    if "value" not in fields:
        raise DefsError(f"check {cid} has no 'value'", lineno, 1)
    mode = fields.get("mode", "EXACT")
    if mode == "EXACT" and "expect" not in fields:
        raise DefsError(f"check {cid} needs 'expect'", lineno, 1)
    if mode == "DOCUMENTED_DISCREPANCY" and ("printed" not in fields or "note" not in fields):
        raise DefsError(f"discrepancy check {cid} needs 'printed' and 'note'", lineno, 1)
    decl = CheckDecl(cid, description, fields.get("provenance", "DERIVED"), fields["value"],
                     ring=fields.get("ring"), mode=mode, expect=fields.get("expect"),
                     printed=fields.get("printed"), note=fields.get("note"), line=lineno)
    return decl, i


# -- name resolution ----------------------------------------------------------------

class _Scope:
    """Tracks declared names so that forward references are rejected."""

    def __init__(self):
        self.ring_gens: dict = {}
        self.symbols: set = set()
        self.checks: set = set()

    def _fail(self, message, node=None, line=0):
        raise DefsError(message, getattr(node, "line", line), getattr(node, "column", 1))

    def ring(self, name, line):
        if name not in self.ring_gens:
            self._fail(f"unknown ring {name!r}", line=line)
        return self.ring_gens[name]

    def resolve(self, node: Node, gens: tuple, line: int):
        for n in walk(node):
            if isinstance(n, Call):
                if n.func not in BUILTINS:
                    self._fail(f"unknown function {n.func!r}", n)
                if len(n.args) not in BUILTINS[n.func]:
                    want = " or ".join(str(k) for k in BUILTINS[n.func])
                    self._fail(f"{n.func} takes {want} arguments, got {len(n.args)}", n)
                if n.func in RING_ARG:
                    idx = RING_ARG[n.func]
                    ring_node = n.args[idx]
                    if not isinstance(ring_node, Name) or ring_node.id not in self.ring_gens:
                        self._fail(f"{n.func} needs a declared ring name", ring_node)
                    inner = self.ring_gens[ring_node.id]
                    for k, a in enumerate(n.args):
                        if k != idx:
                            self.resolve(a, inner, line)
            elif isinstance(n, Attr):
                if n.name not in ATTRIBUTES:
                    self._fail(f"unknown attribute {n.name!r}", n)
        # names outside ring-argument calls
        self._names(node, gens)

    def _names(self, node: Node, gens: tuple):
        if isinstance(node, Name):
            if node.id in gens or node.id in self.symbols or node.id in BUILTIN_NAMES \
                    or node.id in self.ring_gens:
                return
            self._fail(f"unknown identifier {node.id!r}", node)
        elif isinstance(node, Call):
            if node.func in RING_ARG:
                return  # resolved above against the named ring
            for a in node.args:
                self._names(a, gens)
        elif isinstance(node, BinOp):
            self._names(node.left, gens)
            self._names(node.right, gens)
        elif isinstance(node, Tuple):
            for a in node.items:
                self._names(a, gens)
        elif hasattr(node, "operand"):
            self._names(node.operand, gens)
        elif isinstance(node, Attr):
            self._names(node.value, gens)

    def _new_symbol(self, name, line):
        if name in self.symbols or name in self.ring_gens or name in BUILTINS:
            self._fail(f"{name!r} is already declared", line=line)

    def declare(self, decl):
        line = decl.line
        if isinstance(decl, SpaceDecl):
            self._new_symbol(decl.name, line)
            self.ring_gens[decl.name] = (decl.generator,)
        elif isinstance(decl, BundleRingDecl):
            self._new_symbol(decl.name, line)
            base = self.ring(decl.base, line)
            self.resolve(decl.bundle, base, line)
            if decl.generator in base:
                self._fail(f"generator {decl.generator!r} already exists in {decl.base}", line=line)
            self.ring_gens[decl.name] = base + (decl.generator,)
        elif isinstance(decl, SurfaceDecl):
            self._new_symbol(decl.name, line)
            for a, b, v in decl.pairings:
                for g in (a, b):
                    if g not in decl.generators:
                        self._fail(f"{g!r} is not a generator of {decl.name}", line=line)
                self.resolve(v, (), line)
            self.ring_gens[decl.name] = tuple(decl.generators)
        elif isinstance(decl, PresentationDecl):
            self._new_symbol(decl.name, line)
            gens = tuple(g for g, _ in decl.generators)
            for lhs, rhs in decl.relations:
                self.resolve(lhs, gens, line)
                self.resolve(rhs, gens, line)
            for mono, v in decl.integrals:
                self.resolve(mono, gens, line)
                self.resolve(v, (), line)
            self.ring_gens[decl.name] = gens
        elif isinstance(decl, (BundleDecl, LetDecl)):
            self._new_symbol(decl.name, line)
            gens = self.ring(decl.ring, line) if decl.ring else ()
            if decl.name in gens:
                self._fail(f"{decl.name!r} shadows a generator of {decl.ring}", line=line)
            self.resolve(decl.expr, gens, line)
            self.symbols.add(decl.name)
        elif isinstance(decl, CheckDecl):
            if decl.id in self.checks:
                self._fail(f"duplicate check id {decl.id!r}", line=line)
            gens = self.ring(decl.ring, line) if decl.ring else ()
            for node in (decl.value, decl.expect, decl.printed):
                if node is not None:
                    self.resolve(node, gens, line)
            self.checks.add(decl.id)


# -- printing ------------------------------------------------------------------------

def _quote(s: str) -> str:
    if '"' in s:
        raise ValueError("strings cannot contain double quotes")
    return f'"{s}"'


def format_decl(d) -> str:
    if isinstance(d, SpaceDecl):
        return f"ring {d.name} = projective_space({d.dimension}, {d.generator})"
    if isinstance(d, BundleRingDecl):
        return f"ring {d.name} = projective_bundle({d.base}, {to_source(d.bundle)}, {d.generator})"
    if isinstance(d, SurfaceDecl):
        lines = [f"ring {d.name} = surface({', '.join(d.generators)})"]
        lines += [f"  {a}*{b} = {to_source(v)}" for a, b, v in d.pairings]
        return "\n".join(lines + ["end"])
    if isinstance(d, PresentationDecl):
        gens = ", ".join(f"{g}:{deg}" for g, deg in d.generators)
        lines = [f"ring {d.name} = presentation({gens})"]
        lines += [f"  relation {to_source(l)} = {to_source(r)}" for l, r in d.relations]
        lines.append(f"  top {d.top}")
        if d.order:
            lines.append(f"  order {', '.join(d.order)}")
        lines += [f"  integral {to_source(m)} = {to_source(v)}" for m, v in d.integrals]
        return "\n".join(lines + ["end"])
    if isinstance(d, BundleDecl):
        return f"bundle {d.name} on {d.ring} = {to_source(d.expr)}"
    if isinstance(d, LetDecl):
        on = f" on {d.ring}" if d.ring else ""
        return f"let {d.name}{on} = {to_source(d.expr)}"
    if isinstance(d, CheckDecl):
        lines = [f"check {d.id} {_quote(d.description)}", f"  provenance {d.provenance}"]
        if d.mode != "EXACT":
            lines.append(f"  mode {d.mode}")
        if d.ring:
            lines.append(f"  in {d.ring}")
        lines.append(f"  value {to_source(d.value)}")
        if d.expect is not None:
            lines.append(f"  expect {to_source(d.expect)}")
        if d.printed is not None:
            lines.append(f"  printed {to_source(d.printed)}")
        if d.note is not None:
            lines.append(f"  note {_quote(d.note)}")
        return "\n".join(lines + ["end"])
    raise TypeError(d)


def format_defs(defs: Defs) -> str:
    return "\n".join(format_decl(d) for d in defs.declarations) + "\n"


def presentation_to_defs(name: str, pres) -> str:
    """Serialise a Presentation as an explicit ``presentation`` ring block."""
    ring = pres.ring
    gens = ", ".join(f"{g}:{d}" for g, d in zip(ring.names, ring.degrees))
    lines = [f"ring {name} = presentation({gens})"]
    for rule in pres.rules:
        lines.append(f"  relation {ring.monomial(rule.lhs)} = {rule.rhs}")
    lines.append(f"  top {pres.top_degree}")
    lines.append(f"  order {', '.join(pres.order)}")
    for m, v in sorted(pres.integrals.items()):
        lines.append(f"  integral {ring.monomial(m)} = {_frac_source(v)}")
    return "\n".join(lines + ["end"]) + "\n"


def _frac_source(v) -> str:
    if v.denominator == 1:
        return str(v.numerator)
    return f"{v.numerator}/{v.denominator}"
