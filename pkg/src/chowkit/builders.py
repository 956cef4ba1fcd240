"""Presentations of projective spaces, projective bundles and surfaces."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations_with_replacement
from typing import Mapping, Sequence

from chowkit.chern import KClass, segre
from chowkit.quotient import Presentation
from chowkit.ring import Polynomial, Ring


def projective_space(n: int, g: str = "H", name: str | None = None) -> Presentation:
    if n < 0:
        raise ValueError("projective space dimension must be >= 0")
    ring = Ring([(g, 1)])
    return Presentation(ring, [((n + 1,), ring.zero())], n, {(n,): 1},
                        name=name or f"P{n}")


def projective_bundle(base: Presentation, E: KClass, g: str,
                      name: str | None = None) -> Presentation:
    """P(E) over ``base`` with hyperplane class ``g``.

    The new relation is the Grothendieck relation
    ``g^r + c_1(E) g^(r-1) + ... + c_r(E) = 0``, and pushforward sends
    ``g^(r-1+k)`` to the Segre class ``s_k(E)``.  Normal top-degree
    monomials are ``g^(r-1) * beta`` with ``beta`` normal of top degree on
    the base, so the integral table is just the base table shifted.
    """
    r = E.rank
    if r < 1:
        raise ValueError("projective_bundle needs rank >= 1")
    if E.pres.ring != base.ring:
        E = E.pullback(base)
    for i in range(r + 1, base.top_degree + 1):
        if not E.c(i).is_zero():
            raise ValueError(f"c_{i} of a rank {r} bundle must vanish, got {E.c(i)}")
    if g in base.ring:
        raise ValueError(f"generator {g} already exists in the base")
    ring = base.ring.extend(g, 1)
    gp = ring.gen(g)
    rhs = ring.zero()
    for i in range(1, r + 1):
        rhs = rhs - E.c(i).to_ring(ring) * gp ** (r - i)
    lhs = (0,) * base.ring.ngens + (r,)
    rules = [(rule.lhs + (0,), rule.rhs.to_ring(ring)) for rule in base.rules]
    rules.append((lhs, rhs))
    integrals = {m + (r - 1,): v for m, v in base.integrals.items()}
    return Presentation(ring, rules, base.top_degree + r - 1, integrals,
                        order=(g,) + base.order, name=name)


def pushforward(p: Polynomial, bundle: Presentation, base: Presentation, E: KClass,
                g: str) -> Polynomial:
    """Push a class on P(E) down to the base with g^(r-1+k) -> s_k(E).

    Works on any representative (no reduction on P(E) needed), so it is an
    independent route to integrals on a projective bundle.
    """
    if E.pres.ring != base.ring:
        E = E.pullback(base)
    r = E.rank
    s = segre(E).components()
    gi = bundle.ring.index(g)
    out = base.ring.zero()
    for m, c in p.items():
        k = m[gi] - (r - 1)
        if k < 0 or k not in s:
            continue
        rest = m[:gi] + (0,) + m[gi + 1:]
        beta = Polynomial(bundle.ring, {rest: c}).to_ring(base.ring)
        out = out + beta * s[k]
    return base.normal_form(out)


@dataclass(frozen=True)
class PairingTable:
    generators: tuple
    products: Mapping

    def __post_init__(self):
        object.__setattr__(self, "generators", tuple(self.generators))
        table = {}
        for (a, b), v in dict(self.products).items():
            if a not in self.generators or b not in self.generators:
                raise ValueError(f"pairing entry {a}*{b} uses an undeclared generator")
            key = tuple(sorted((a, b), key=self.generators.index))
            v = Fraction(v)
            if key in table and table[key] != v:
                raise ValueError(f"pairing is not symmetric at {a}*{b}")
            table[key] = v
        object.__setattr__(self, "products", table)

    def missing(self) -> list:
        return [k for k in combinations_with_replacement(self.generators, 2)
                if k not in self.products]

    def value(self, a: str, b: str) -> Fraction:
        return self.products[tuple(sorted((a, b), key=self.generators.index))]


def surface_from_pairing(t: PairingTable, name: str | None = None) -> Presentation:
    """A numerical surface: degree-1 generators and their intersection numbers."""
    missing = t.missing()
    if missing:
        raise ValueError("incomplete pairing table, missing " +
                         ", ".join(f"{a}*{b}" for a, b in missing))
    ring = Ring([(g, 1) for g in t.generators])
    integrals = {}
    for a, b in combinations_with_replacement(t.generators, 2):
        m = [0] * ring.ngens
        m[ring.index(a)] += 1
        m[ring.index(b)] += 1
        integrals[tuple(m)] = t.value(a, b)
    return Presentation(ring, [], 2, integrals, name=name)


def presentation(generators: Sequence, relations: Sequence, top_degree: int,
                 integrals: Mapping, name: str | None = None,
                 order: Sequence[str] | None = None) -> Presentation:
    """Presentation from explicit data, with relations given as ``(lhs, rhs)`` polynomials."""
    ring = Ring(generators)
    rules = [(lhs.to_ring(ring), rhs.to_ring(ring) if isinstance(rhs, Polynomial) else rhs)
             for lhs, rhs in relations]
    table = {}
    for mono, v in integrals.items():
        mono = mono.to_ring(ring)
        (m, c), = mono.items()
        table[m] = Fraction(v) / c
    return Presentation(ring, rules, top_degree, table, order=order, name=name)
