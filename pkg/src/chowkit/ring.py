"""Exact multivariate polynomials over graded generators.

A :class:`Ring` is an ordered list of generators, each with a positive
cohomological degree.  A :class:`Polynomial` maps exponent vectors (plain
tuples, one entry per generator) to :class:`fractions.Fraction`
coefficients.  Polynomials are immutable and hashable.

Terms are printed in graded lexicographic order: higher total degree
first, ties broken lexicographically by generator declaration order.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational
from typing import Iterable, Iterator, Mapping, Sequence

Monomial = tuple  # exponent vector, one int per generator

DEFAULT_MAX_EXPONENT = 64


class ExponentBoundError(OverflowError):
    """An exponent grew past the ring's configured per-generator bound."""


class UnknownGeneratorError(KeyError):
    pass


@dataclass(frozen=True)
class GeneratorSpec:
    name: str
    degree: int

    def __post_init__(self):
        if not self.name.isidentifier():
            raise ValueError(f"generator name {self.name!r} is not an identifier")
        if self.degree < 1:
            raise ValueError(f"generator {self.name} must have degree >= 1")


class Ring:
    """Free commutative Q-algebra on graded generators."""

    __slots__ = ("generators", "names", "degrees", "max_exponent", "_index", "_key")

    def __init__(self, generators: Iterable, max_exponent: int = DEFAULT_MAX_EXPONENT):
        gens = []
        for g in generators:
            if isinstance(g, GeneratorSpec):
                gens.append(g)
            elif isinstance(g, str):
                gens.append(GeneratorSpec(g, 1))
            else:
                name, degree = g
                gens.append(GeneratorSpec(name, int(degree)))
        self.generators = tuple(gens)
        self.names = tuple(g.name for g in gens)
        self.degrees = tuple(g.degree for g in gens)
        if len(set(self.names)) != len(self.names):
            raise ValueError(f"duplicate generator names in {self.names}")
        self.max_exponent = max_exponent
        self._index = {n: i for i, n in enumerate(self.names)}
        self._key = (self.names, self.degrees)

    def __eq__(self, other):
        return isinstance(other, Ring) and self._key == other._key

    def __hash__(self):
        return hash(self._key)

    def __repr__(self):
        inner = ", ".join(f"{n}:{d}" if d != 1 else n for n, d in zip(self.names, self.degrees))
        return f"Ring({inner})"

    @property
    def ngens(self) -> int:
        return len(self.names)

    def index(self, name: str) -> int:
        try:
            return self._index[name]
        except KeyError:
            raise UnknownGeneratorError(name) from None

    def __contains__(self, name) -> bool:
        return name in self._index

    def gen(self, name: str) -> "Polynomial":
        i = self.index(name)
        exps = [0] * self.ngens
        exps[i] = 1
        return Polynomial(self, {tuple(exps): Fraction(1)})

    def gens(self) -> tuple:
        return tuple(self.gen(n) for n in self.names)

    def zero(self) -> "Polynomial":
        return Polynomial(self, {})

    def one(self) -> "Polynomial":
        return self.constant(1)

    def constant(self, value) -> "Polynomial":
        value = Fraction(value)
        if value == 0:
            return self.zero()
        return Polynomial(self, {(0,) * self.ngens: value})

    def monomial(self, exps: Sequence[int], coeff=1) -> "Polynomial":
        return Polynomial(self, {tuple(exps): Fraction(coeff)})

    def degree_of(self, mono: Monomial) -> int:
        return sum(e * d for e, d in zip(mono, self.degrees))

    def extend(self, name: str, degree: int = 1) -> "Ring":
        return Ring(self.generators + (GeneratorSpec(name, degree),), self.max_exponent)

    def monomials_of_degree(self, d: int) -> list:
        """All exponent vectors of total degree exactly ``d``."""
        out = []

        def rec(i, remaining, acc):
            if i == self.ngens:
                if remaining == 0:
                    out.append(tuple(acc))
                return
            deg = self.degrees[i]
            for e in range(remaining // deg, -1, -1):
                acc.append(e)
                rec(i + 1, remaining - e * deg, acc)
                acc.pop()

        rec(0, d, [])
        return out


def _coerce_coeff(c) -> Fraction:
    if isinstance(c, Fraction):
        return c
    if isinstance(c, (int, Rational)):
        return Fraction(c)
    raise TypeError(f"coefficients must be exact rationals, got {type(c).__name__}")


def grlex_key(ring: Ring, mono: Monomial):
    return (ring.degree_of(mono), mono)


class Polynomial:
    """An immutable polynomial with exact rational coefficients."""

    __slots__ = ("ring", "_terms", "_hash")

    def __init__(self, ring: Ring, terms: Mapping = ()):
        clean = {}
        n = ring.ngens
        for mono, c in dict(terms).items():
            mono = tuple(mono)
            if len(mono) != n:
                raise ValueError(f"monomial {mono} does not match {ring}")
            c = _coerce_coeff(c)
            if c:
                if max(mono, default=0) > ring.max_exponent:
                    raise ExponentBoundError(
                        f"exponent {max(mono)} exceeds bound {ring.max_exponent}")
                clean[mono] = c
        self.ring = ring
        self._terms = clean
        self._hash = None

    @classmethod
    def _raw(cls, ring: Ring, terms: dict) -> "Polynomial":
        # terms must already be clean (no zeros, Fraction coefficients)
        p = object.__new__(cls)
        p.ring = ring
        p._terms = terms
        p._hash = None
        return p

    # -- inspection -------------------------------------------------------

    def terms(self) -> list:
        """(monomial, coefficient) pairs in canonical graded-lex order."""
        ring = self.ring
        return sorted(self._terms.items(), key=lambda t: grlex_key(ring, t[0]), reverse=True)

    def monomials(self) -> Iterator:
        return iter(self._terms)

    def items(self):
        return self._terms.items()

    def coefficient(self, mono: Monomial) -> Fraction:
        return self._terms.get(tuple(mono), Fraction(0))

    def __len__(self):
        return len(self._terms)

    def __bool__(self):
        return bool(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    @property
    def constant_term(self) -> Fraction:
        return self._terms.get((0,) * self.ring.ngens, Fraction(0))

    def is_constant(self) -> bool:
        return all(not any(m) for m in self._terms)

    def degrees(self) -> set:
        return {self.ring.degree_of(m) for m in self._terms}

    @property
    def max_degree(self) -> int:
        return max(self.degrees(), default=-1)

    def is_homogeneous(self, d: int | None = None) -> bool:
        ds = self.degrees()
        if not ds:
            return True
        if len(ds) != 1:
            return False
        return d is None or ds == {d}

    def is_integral(self) -> bool:
        return all(c.denominator == 1 for c in self._terms.values())

    # -- arithmetic -------------------------------------------------------

    def _coerce(self, other) -> "Polynomial":
        if isinstance(other, Polynomial):
            if other.ring == self.ring:
                return other
            # lift along generator names when one ring's names are a subset
            if set(other.ring.names) <= set(self.ring.names):
                return other.to_ring(self.ring)
            raise ValueError(f"cannot combine polynomials over {self.ring} and {other.ring}")
        return self.ring.constant(_coerce_coeff(other))

    def _binary_ring(self, other):
        if isinstance(other, Polynomial) and other.ring != self.ring:
            if set(self.ring.names) < set(other.ring.names):
                return self.to_ring(other.ring), other
        return self, self._coerce(other)

    def __add__(self, other):
        if not isinstance(other, (Polynomial, int, Rational)):
            return NotImplemented
        a, b = self._binary_ring(other)
        out = dict(a._terms)
        for m, c in b._terms.items():
            v = out.get(m, 0) + c
            if v:
                out[m] = v
            else:
                out.pop(m, None)
        return Polynomial._raw(a.ring, out)

    __radd__ = __add__

    def __neg__(self):
        return Polynomial._raw(self.ring, {m: -c for m, c in self._terms.items()})

    def __sub__(self, other):
        if not isinstance(other, (Polynomial, int, Rational)):
            return NotImplemented
        a, b = self._binary_ring(other)
        return a + (-b)

    def __rsub__(self, other):
        if not isinstance(other, (int, Rational)):
            return NotImplemented
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Rational)):
            c = _coerce_coeff(other)
            if not c:
                return self.ring.zero()
            return Polynomial._raw(self.ring, {m: v * c for m, v in self._terms.items()})
        if not isinstance(other, Polynomial):
            return NotImplemented
        a, b = self._binary_ring(other)
        return a._mul_poly(b)

    __rmul__ = __mul__

    def _mul_poly(self, other: "Polynomial", max_degree: int | None = None) -> "Polynomial":
        ring = self.ring
        bound = ring.max_exponent
        out: dict = {}
        items_b = list(other._terms.items())
        if max_degree is not None:
            items_b = [(m, c, ring.degree_of(m)) for m, c in items_b]
        for ma, ca in self._terms.items():
            if max_degree is not None:
                da = ring.degree_of(ma)
                for mb, cb, db in items_b:
                    if da + db > max_degree:
                        continue
                    m = tuple(x + y for x, y in zip(ma, mb))
                    v = out.get(m, 0) + ca * cb
                    if v:
                        out[m] = v
                    else:
                        del out[m]
            else:
                for mb, cb in items_b:
                    m = tuple(x + y for x, y in zip(ma, mb))
                    v = out.get(m, 0) + ca * cb
                    if v:
                        out[m] = v
                    else:
                        del out[m]
        for m in out:
            if max(m, default=0) > bound:
                raise ExponentBoundError(f"exponent {max(m)} exceeds bound {bound}")
        return Polynomial._raw(ring, out)

    def mul_truncated(self, other: "Polynomial", max_degree: int) -> "Polynomial":
        """Product with all terms of total degree above ``max_degree`` dropped."""
        a, b = self._binary_ring(other)
        return a._mul_poly(b, max_degree)

    def __truediv__(self, other):
        if isinstance(other, Polynomial):
            if not other.is_constant() or other.is_zero():
                raise ZeroDivisionError("can only divide by a nonzero constant")
            other = other.constant_term
        c = _coerce_coeff(other)
        if c == 0:
            raise ZeroDivisionError("division by zero")
        return self * (1 / c)

    def __pow__(self, n):
        if not isinstance(n, int) or n < 0:
            raise ValueError("exponent must be a non-negative integer")
        if n > self.ring.max_exponent and any(any(m) for m in self._terms):
            raise ExponentBoundError(f"exponent {n} exceeds bound {self.ring.max_exponent}")
        result = self.ring.one()
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def __eq__(self, other):
        if isinstance(other, Polynomial):
            if other.ring != self.ring:
                try:
                    a, b = self._binary_ring(other)
                except ValueError:
                    return False
                return a._terms == b._terms
            return self._terms == other._terms
        if isinstance(other, (int, Rational)):
            return self._terms == self.ring.constant(other)._terms
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.ring, frozenset(self._terms.items())))
        return self._hash

    # -- graded structure --------------------------------------------------

    def grade_component(self, d: int) -> "Polynomial":
        ring = self.ring
        return Polynomial._raw(ring, {m: c for m, c in self._terms.items()
                                      if ring.degree_of(m) == d})

    def truncate(self, max_degree: int) -> "Polynomial":
        ring = self.ring
        return Polynomial._raw(ring, {m: c for m, c in self._terms.items()
                                      if ring.degree_of(m) <= max_degree})

    def components(self) -> dict:
        out: dict = {}
        for m, c in self._terms.items():
            out.setdefault(self.ring.degree_of(m), {})[m] = c
        return {d: Polynomial._raw(self.ring, t) for d, t in sorted(out.items())}

    # -- change of ring ----------------------------------------------------

    def to_ring(self, target: Ring) -> "Polynomial":
        """Reinterpret over ``target`` by matching generator names."""
        if target == self.ring:
            return self
        src = self.ring
        positions = []
        for i, name in enumerate(src.names):
            if name in target:
                j = target.index(name)
                if target.degrees[j] != src.degrees[i]:
                    raise ValueError(f"generator {name} has different degrees")
                positions.append(j)
            else:
                positions.append(None)
        out = {}
        for m, c in self._terms.items():
            new = [0] * target.ngens
            for i, e in enumerate(m):
                if e:
                    j = positions[i]
                    if j is None:
                        raise UnknownGeneratorError(
                            f"generator {src.names[i]} is not in {target}")
                    new[j] = e
            new = tuple(new)
            out[new] = out.get(new, 0) + c
        return Polynomial(target, out)

    def substitute(self, values: Mapping, target: Ring | None = None,
                   max_degree: int | None = None) -> "Polynomial":
        """Replace each generator by a polynomial (or number) over ``target``.

        Generators missing from ``values`` map to themselves, which requires
        ``target`` to contain them.
        """
        src = self.ring
        if target is None:
            target = src
        images = []
        for name in src.names:
            if name in values:
                v = values[name]
                images.append(v.to_ring(target) if isinstance(v, Polynomial) else target.constant(v))
            else:
                images.append(target.gen(name))
        powers: list[dict] = [dict() for _ in images]

        def power(i, e):
            cache = powers[i]
            if e not in cache:
                if e == 0:
                    cache[e] = target.one()
                elif e == 1:
                    cache[e] = images[i]
                else:
                    half = power(i, e // 2)
                    sq = half.mul_truncated(half, max_degree) if max_degree is not None else half * half
                    if e % 2:
                        sq = sq.mul_truncated(images[i], max_degree) if max_degree is not None else sq * images[i]
                    cache[e] = sq
            return cache[e]

        acc = target.zero()
        for m, c in self._terms.items():
            term = target.constant(c)
            for i, e in enumerate(m):
                if e:
                    p = power(i, e)
                    term = term.mul_truncated(p, max_degree) if max_degree is not None else term * p
            acc = acc + term
        return acc

    def evaluate_at(self, values: Mapping) -> Fraction:
        """Numeric value with every generator replaced by a rational."""
        total = Fraction(0)
        vals = [Fraction(values[n]) for n in self.ring.names]
        for m, c in self._terms.items():
            t = c
            for v, e in zip(vals, m):
                if e:
                    t *= v ** e
            total += t
        return total

    # -- printing ------------------------------------------------------------

    def __str__(self):
        if not self._terms:
            return "0"
        parts = []
        for m, c in self.terms():
            factors = []
            for name, e in zip(self.ring.names, m):
                if e == 1:
                    factors.append(name)
                elif e > 1:
                    factors.append(f"{name}^{e}")
            mono = "*".join(factors)
            sign = "-" if c < 0 else "+"
            a = abs(c)
            if not mono:
                body = str(a)
            elif a == 1:
                body = mono
            elif a.denominator == 1:
                body = f"{a}*{mono}"
            else:
                body = f"({a})*{mono}"
            parts.append((sign, body))
        first_sign, first = parts[0]
        out = ("-" if first_sign == "-" else "") + first
        for sign, body in parts[1:]:
            out += f" {sign} {body}"
        return out

    def __repr__(self):
        return f"Polynomial({self})"


def grade_component(p: Polynomial, d: int) -> Polynomial:
    return p.grade_component(d)


def series_inverse(p: Polynomial, max_degree: int) -> Polynomial:
    """Inverse of ``p`` as a power series, truncated above ``max_degree``.

    ``p`` must have constant term 1.  Writing ``p = 1 + u`` with ``u`` of
    positive degree, the inverse is computed degree by degree:
    ``q_d = -sum_{k=1..d} u_k q_{d-k}``.
    """
    if p.constant_term != 1:
        raise ValueError("series_inverse needs constant term exactly 1")
    ring = p.ring
    u = (p - 1).components()
    q = {0: ring.one()}
    for d in range(1, max_degree + 1):
        acc = ring.zero()
        for k, uk in u.items():
            if 0 < k <= d and (d - k) in q:
                acc = acc + uk * q[d - k]
        q[d] = -acc
    out = ring.zero()
    for qd in q.values():
        out = out + qd
    return out


def evaluate(expr: str, ring: Ring, max_degree: int | None = None) -> Polynomial:
    """Parse and fully expand an arithmetic expression over ``ring``.

    Supports integers, rationals ``a/b``, generator names, ``+ - * ^``
    and parentheses.
    """
    from chowkit import expr as _expr

    tree = _expr.parse_expression(expr)
    value = _expr.eval_arithmetic(tree, ring)
    if max_degree is not None:
        value = value.truncate(max_degree)
    return value
