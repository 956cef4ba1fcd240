"""Tokenizer and Pratt parser for the arithmetic expression language.

The grammar is total (no loops, no definitions)::

    expr    := sum
    sum     := product (("+" | "-") product)*
    product := unary (("*" | "/") unary)*
    unary   := "-" unary | power
    power   := postfix ("^" unary)?
    postfix := atom ("(" args ")" | "." NAME)*
    atom    := INT | NAME | "(" expr ("," expr)* ")"

``-H^2`` parses as ``-(H^2)``; ``^`` is right associative.
"""

from __future__ import annotations

from dataclasses import dataclass, field

_SINGLE = set("+-*/^(),.=:")
_ALIASES = {"·": "*", "−": "-", "×": "*"}


class ParseError(ValueError):
    def __init__(self, message: str, line: int = 1, column: int = 1):
        super().__init__(f"line {line}, column {column}: {message}")
        self.message = message
        self.line = line
        self.column = column


@dataclass(frozen=True)
class Token:
    kind: str  # INT, NAME, STRING, OP, END
    text: str
    line: int
    column: int


def tokenize(text: str, line: int = 1, column: int = 1) -> list[Token]:
    tokens = []
    i = 0
    col = column
    n = len(text)
    while i < n:
        ch = _ALIASES.get(text[i], text[i])
        if ch in " \t":
            i += 1
            col += 1
        elif ch == "#":
            break
        elif ch.isdigit():
            j = i
            while j < n and text[j].isdigit():
                j += 1
            tokens.append(Token("INT", text[i:j], line, col))
            col += j - i
            i = j
        elif ch.isalpha() or ch == "_":
            j = i
            while j < n and (text[j].isalnum() or text[j] == "_"):
                j += 1
            tokens.append(Token("NAME", text[i:j], line, col))
            col += j - i
            i = j
        elif ch == '"':
            j = i + 1
            while j < n and text[j] != '"':
                j += 1
            if j >= n:
                raise ParseError("unterminated string", line, col)
            tokens.append(Token("STRING", text[i + 1:j], line, col))
            col += j + 1 - i
            i = j + 1
        elif ch in _SINGLE:
            tokens.append(Token("OP", ch, line, col))
            i += 1
            col += 1
        else:
            raise ParseError(f"unexpected character {text[i]!r}", line, col)
    tokens.append(Token("END", "", line, col))
    return tokens


# -- AST ---------------------------------------------------------------------

@dataclass(frozen=True)
class Node:
    pass


@dataclass(frozen=True)
class Num(Node):
    value: int
    line: int = field(default=0, compare=False)
    column: int = field(default=0, compare=False)


@dataclass(frozen=True)
class Name(Node):
    id: str
    line: int = field(default=0, compare=False)
    column: int = field(default=0, compare=False)


@dataclass(frozen=True)
class BinOp(Node):
    op: str
    left: Node
    right: Node
    line: int = field(default=0, compare=False)
    column: int = field(default=0, compare=False)


@dataclass(frozen=True)
class Neg(Node):
    operand: Node
    line: int = field(default=0, compare=False)
    column: int = field(default=0, compare=False)


@dataclass(frozen=True)
class Call(Node):
    func: str
    args: tuple
    line: int = field(default=0, compare=False)
    column: int = field(default=0, compare=False)


@dataclass(frozen=True)
class Tuple(Node):
    items: tuple
    line: int = field(default=0, compare=False)
    column: int = field(default=0, compare=False)


@dataclass(frozen=True)
class Attr(Node):
    value: Node
    name: str
    line: int = field(default=0, compare=False)
    column: int = field(default=0, compare=False)


def walk(node: Node):
    yield node
    if isinstance(node, BinOp):
        yield from walk(node.left)
        yield from walk(node.right)
    elif isinstance(node, Neg):
        yield from walk(node.operand)
    elif isinstance(node, Call):
        for a in node.args:
            yield from walk(a)
    elif isinstance(node, Tuple):
        for a in node.items:
            yield from walk(a)
    elif isinstance(node, Attr):
        yield from walk(node.value)


# -- parser --------------------------------------------------------------------

class Parser:
    def __init__(self, tokens: list[Token]):
        self.tokens = tokens
        self.pos = 0

    @property
    def tok(self) -> Token:
        return self.tokens[self.pos]

    def advance(self) -> Token:
        t = self.tokens[self.pos]
        self.pos += 1
        return t

    def at(self, text: str) -> bool:
        return self.tok.kind == "OP" and self.tok.text == text

    def expect(self, text: str) -> Token:
        if not self.at(text):
            t = self.tok
            found = t.text or "end of input"
            raise ParseError(f"expected {text!r}, found {found!r}", t.line, t.column)
        return self.advance()

    def expect_end(self):
        if self.tok.kind != "END":
            t = self.tok
            raise ParseError(f"unexpected {t.text!r}", t.line, t.column)

    def parse_expr(self) -> Node:
        node = self.parse_product()
        while self.at("+") or self.at("-"):
            op = self.advance()
            node = BinOp(op.text, node, self.parse_product(), op.line, op.column)
        return node

    def parse_product(self) -> Node:
        node = self.parse_unary()
        while self.at("*") or self.at("/"):
            op = self.advance()
            node = BinOp(op.text, node, self.parse_unary(), op.line, op.column)
        return node

    def parse_unary(self) -> Node:
        if self.at("-"):
            op = self.advance()
            return Neg(self.parse_unary(), op.line, op.column)
        return self.parse_power()

    def parse_power(self) -> Node:
        base = self.parse_postfix()
        if self.at("^"):
            op = self.advance()
            return BinOp("^", base, self.parse_unary(), op.line, op.column)
        return base

    def parse_postfix(self) -> Node:
        node = self.parse_atom()
        while True:
            if self.at("(") and isinstance(node, Name):
                self.advance()
                args = []
                if not self.at(")"):
                    args.append(self.parse_expr())
                    while self.at(","):
                        self.advance()
                        args.append(self.parse_expr())
                self.expect(")")
                node = Call(node.id, tuple(args), node.line, node.column)
            elif self.at("."):
                dot = self.advance()
                t = self.tok
                if t.kind != "NAME":
                    raise ParseError("expected attribute name", t.line, t.column)
                self.advance()
                node = Attr(node, t.text, dot.line, dot.column)
            else:
                return node

    def parse_atom(self) -> Node:
        t = self.tok
        if t.kind == "INT":
            self.advance()
            return Num(int(t.text), t.line, t.column)
        if t.kind == "NAME":
            self.advance()
            return Name(t.text, t.line, t.column)
        if self.at("("):
            self.advance()
            items = [self.parse_expr()]
            while self.at(","):
                self.advance()
                items.append(self.parse_expr())
            self.expect(")")
            if len(items) == 1:
                return items[0]
            return Tuple(tuple(items), t.line, t.column)
        found = t.text or "end of input"
        raise ParseError(f"unexpected {found!r}", t.line, t.column)


def parse_expression(text: str, line: int = 1, column: int = 1) -> Node:
    p = Parser(tokenize(text, line, column))
    node = p.parse_expr()
    p.expect_end()
    return node


# -- printing ------------------------------------------------------------------

_PREC = {"+": 10, "-": 10, "*": 20, "/": 20, "^": 40}


def to_source(node: Node, parent: int = 0) -> str:
    if isinstance(node, Num):
        return str(node.value)
    if isinstance(node, Name):
        return node.id
    if isinstance(node, Neg):
        s = "-" + to_source(node.operand, 30)
        return f"({s})" if parent > 30 else s
    if isinstance(node, BinOp):
        prec = _PREC[node.op]
        if node.op == "^":
            s = f"{to_source(node.left, 41)}^{to_source(node.right, 30)}"
        else:
            s = f"{to_source(node.left, prec)} {node.op} {to_source(node.right, prec + 1)}"
        return f"({s})" if parent > prec else s
    if isinstance(node, Call):
        return f"{node.func}({', '.join(to_source(a) for a in node.args)})"
    if isinstance(node, Tuple):
        return "(" + ", ".join(to_source(a) for a in node.items) + ")"
    if isinstance(node, Attr):
        return f"{to_source(node.value, 50)}.{node.name}"
    raise TypeError(node)


# -- plain arithmetic evaluation ---------------------------------------------------

def eval_arithmetic(node: Node, ring):
    """Evaluate a call-free expression to a Polynomial over ``ring``."""
    from chowkit.ring import UnknownGeneratorError

    if isinstance(node, Num):
        return ring.constant(node.value)
    if isinstance(node, Name):
        if node.id not in ring:
            raise UnknownGeneratorError(
                f"unknown generator {node.id!r} at line {node.line}, column {node.column}")
        return ring.gen(node.id)
    if isinstance(node, Neg):
        return -eval_arithmetic(node.operand, ring)
    if isinstance(node, BinOp):
        left = eval_arithmetic(node.left, ring)
        if node.op == "^":
            exp = eval_arithmetic(node.right, ring)
            if not exp.is_constant() or exp.constant_term.denominator != 1:
                raise ParseError("exponent must be an integer constant", node.line, node.column)
            return left ** int(exp.constant_term)
        right = eval_arithmetic(node.right, ring)
        if node.op == "+":
            return left + right
        if node.op == "-":
            return left - right
        if node.op == "*":
            return left * right
        if node.op == "/":
            return left / right
    raise ParseError(f"unsupported construct {to_source(node)!r}",
                     getattr(node, "line", 1), getattr(node, "column", 1))
