"""Graded quotient rings presented by rewrite rules.

A :class:`Presentation` models a Chow ring ``A(X)``: a polynomial ring,
a list of rules ``monomial -> polynomial`` that repeatedly rewrite
divisible terms, the dimension of ``X`` (terms above it vanish), and an
integration table giving the degree of each normal top-degree monomial.

Termination comes from a reduction order: monomials are compared
lexicographically on their exponents, read in ``order`` (most significant
generator first).  Every rule's right-hand side must be strictly smaller
than its left-hand side.  By default the most recently declared generator
is the most significant one, which is what projective-bundle towers need.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence

from chowkit.ring import Monomial, Polynomial, Ring

DEFAULT_STEP_BUDGET = 200_000


class RewriteBudgetExceeded(RuntimeError):
    pass


class MissingIntegralError(KeyError):
    pass


def _divides(a: Monomial, b: Monomial) -> bool:
    return all(x <= y for x, y in zip(a, b))


@dataclass(frozen=True)
class RewriteRule:
    lhs: Monomial
    rhs: Polynomial

    def __str__(self):
        lhs = self.rhs.ring.monomial(self.lhs)
        return f"{lhs} = {self.rhs}"


class Presentation:
    """A graded ring ``Q[gens]/(rules)`` with a degree functional."""

    def __init__(self, ring: Ring, rules: Sequence, top_degree: int,
                 integrals: Mapping | None = None, order: Sequence[str] | None = None,
                 name: str | None = None, step_budget: int = DEFAULT_STEP_BUDGET,
                 check_order: bool = True):
        self.ring = ring
        self.name = name
        self.top_degree = int(top_degree)
        self.step_budget = step_budget
        if order is None:
            order = tuple(reversed(ring.names))
        self.order = tuple(order)
        if sorted(self.order) != sorted(ring.names):
            raise ValueError("reduction order must list every generator exactly once")
        self._order_idx = tuple(ring.index(n) for n in self.order)

        parsed = []
        for r in rules:
            if not isinstance(r, RewriteRule):
                lhs, rhs = r
                if isinstance(lhs, Polynomial):
                    if len(lhs) != 1:
                        raise ValueError("rule left-hand side must be a monomial")
                    (lhs_m, c), = lhs.items()
                    if c != 1:
                        raise ValueError("rule left-hand side must have coefficient 1")
                    lhs = lhs_m
                if not isinstance(rhs, Polynomial):
                    rhs = ring.constant(rhs)
                r = RewriteRule(tuple(lhs), rhs.to_ring(ring))
            parsed.append(r)
        for r in parsed:
            self._validate_rule(r, check_order)
        self.rules = tuple(parsed)

        table = {}
        for m, v in (integrals or {}).items():
            if isinstance(m, Polynomial):
                (m, c), = m.items()
                v = Fraction(v) / c
            m = tuple(m)
            if ring.degree_of(m) != self.top_degree:
                raise ValueError(f"integral table entry {ring.monomial(m)} is not of top degree")
            table[m] = Fraction(v)
        self.integrals = table
        self._nf_cache: dict = {}

    # -- validation ---------------------------------------------------------

    def order_key(self, mono: Monomial) -> tuple:
        return tuple(mono[i] for i in self._order_idx)

    def _validate_rule(self, rule: RewriteRule, check_order: bool):
        ring = self.ring
        d = ring.degree_of(rule.lhs)
        if not any(rule.lhs):
            raise ValueError("rule left-hand side must be a non-constant monomial")
        if not rule.rhs.is_homogeneous(d):
            raise ValueError(f"rule {rule} is not homogeneous of degree {d}")
        if check_order:
            key = self.order_key(rule.lhs)
            for m in rule.rhs.monomials():
                if not self.order_key(m) < key:
                    raise ValueError(f"rule {rule} does not decrease the reduction order")

    def __repr__(self):
        label = self.name or "Presentation"
        return f"<{label}: {self.ring}, {len(self.rules)} rules, dim {self.top_degree}>"

    def __eq__(self, other):
        return (isinstance(other, Presentation) and self.ring == other.ring
                and self.top_degree == other.top_degree
                and {r.lhs: r.rhs for r in self.rules} == {r.lhs: r.rhs for r in other.rules}
                and self.integrals == other.integrals)

    def __hash__(self):
        return hash((self.ring, self.top_degree, len(self.rules)))

    def gen(self, name: str) -> Polynomial:
        return self.ring.gen(name)

    def rule_for(self, lhs: Monomial) -> RewriteRule:
        for r in self.rules:
            if r.lhs == tuple(lhs):
                return r
        raise KeyError(f"no rule with left-hand side {self.ring.monomial(lhs)}")

    # -- normal forms ---------------------------------------------------------

    def _applicable(self, mono: Monomial):
        return [r for r in self.rules if _divides(r.lhs, mono)]

    def _nf_monomial(self, mono: Monomial, budget: list) -> dict:
        cached = self._nf_cache.get(mono)
        if cached is not None:
            return cached
        ring = self.ring
        if ring.degree_of(mono) > self.top_degree:
            result: dict = {}
        else:
            rule = next((r for r in self.rules if _divides(r.lhs, mono)), None)
            if rule is None:
                result = {mono: Fraction(1)}
            else:
                budget[0] -= 1
                if budget[0] < 0:
                    raise RewriteBudgetExceeded(
                        f"rewrite budget of {self.step_budget} steps exhausted")
                quot = tuple(a - b for a, b in zip(mono, rule.lhs))
                result = {}
                for m, c in rule.rhs.items():
                    sub = self._nf_monomial(tuple(a + b for a, b in zip(quot, m)), budget)
                    for mm, cc in sub.items():
                        v = result.get(mm, 0) + c * cc
                        if v:
                            result[mm] = v
                        else:
                            del result[mm]
        # write-once; concurrent writers store identical values
        self._nf_cache[mono] = result
        return result

    def normal_form(self, p: Polynomial) -> Polynomial:
        if p.ring != self.ring:
            p = p.to_ring(self.ring)
        budget = [self.step_budget]
        out: dict = {}
        for mono, c in p.items():
            try:
                reduced = self._nf_monomial(mono, budget)
            except RecursionError:
                raise RewriteBudgetExceeded("rewriting did not terminate") from None
            for m, cc in reduced.items():
                v = out.get(m, 0) + c * cc
                if v:
                    out[m] = v
                else:
                    del out[m]
        return Polynomial(self.ring, out)

    def is_normal(self, p: Polynomial) -> bool:
        return all(not self._applicable(m) and self.ring.degree_of(m) <= self.top_degree
                   for m in p.monomials())

    def normal_monomials(self, degree: int) -> list:
        return [m for m in self.ring.monomials_of_degree(degree) if not self._applicable(m)]

    def multiply(self, a: Polynomial, b: Polynomial) -> Polynomial:
        return self.normal_form(a.mul_truncated(b, self.top_degree))

    # -- integration -------------------------------------------------------------

    def integrate(self, p: Polynomial) -> Fraction:
        nf = self.normal_form(p)
        total = Fraction(0)
        ring = self.ring
        for m, c in nf.items():
            if ring.degree_of(m) != self.top_degree:
                continue
            try:
                total += c * self.integrals[m]
            except KeyError:
                raise MissingIntegralError(
                    f"no integral for top-degree monomial {ring.monomial(m)}") from None
        return total

    # -- confluence ----------------------------------------------------------------

    def random_reduction(self, p: Polynomial, rng: random.Random) -> Polynomial:
        """Reduce ``p`` choosing the term and the rule at random at each step."""
        ring = self.ring
        terms = {m: c for m, c in p.items() if ring.degree_of(m) <= self.top_degree}
        steps = 0
        while True:
            candidates = [(m, rs) for m in terms for rs in [self._applicable(m)] if rs]
            if not candidates:
                return Polynomial(ring, terms)
            steps += 1
            if steps > self.step_budget:
                raise RewriteBudgetExceeded(
                    f"rewrite budget of {self.step_budget} steps exhausted")
            candidates.sort()
            mono, rules = rng.choice(candidates)
            rule = rng.choice(rules)
            c = terms.pop(mono)
            quot = tuple(a - b for a, b in zip(mono, rule.lhs))
            for m, cc in rule.rhs.items():
                new = tuple(a + b for a, b in zip(quot, m))
                if ring.degree_of(new) > self.top_degree:
                    continue
                v = terms.get(new, 0) + c * cc
                if v:
                    terms[new] = v
                else:
                    terms.pop(new, None)


@dataclass
class ConfluenceReport:
    presentation: str
    up_to_degree: int
    trials: int
    checked: int = 0
    failures: list = field(default_factory=list)  # (monomial str, [normal form strs])

    @property
    def confluent(self) -> bool:
        return not self.failures

    def __str__(self):
        status = "confluent" if self.confluent else f"NOT confluent ({len(self.failures)} witnesses)"
        return (f"{self.presentation}: {status}; {self.checked} monomials up to degree "
                f"{self.up_to_degree}, {self.trials} random orders each")


def normal_form(p: Polynomial, pres: Presentation) -> Polynomial:
    return pres.normal_form(p)


def integrate(p: Polynomial, pres: Presentation) -> Fraction:
    return pres.integrate(p)


def check_confluence(pres: Presentation, up_to_degree: int | None = None,
                     trials: int = 8, seed: int = 0) -> ConfluenceReport:
    """Reduce every monomial of degree <= ``up_to_degree`` under random orders.

    Any monomial that reaches more than one normal form is reported as a
    witness.  This is an empirical check, not Knuth-Bendix completion.
    """
    if up_to_degree is None:
        up_to_degree = pres.top_degree
    rng = random.Random(seed)
    report = ConfluenceReport(pres.name or repr(pres.ring), up_to_degree, trials)
    ring = pres.ring
    for d in range(up_to_degree + 1):
        for m in ring.monomials_of_degree(d):
            report.checked += 1
            p = ring.monomial(m)
            results = {pres.random_reduction(p, rng) for _ in range(trials)}
            if len(results) > 1:
                report.failures.append((str(p), sorted(str(r) for r in results)))
    return report
