"""Chern-class calculus on virtual bundles.

A :class:`KClass` is a K-theory class seen through its rank and total
Chern class, a polynomial in the ambient Chow ring with constant term 1.
Whitney sums multiply total Chern classes; differences divide by them.

Symmetric and exterior squares go through the splitting principle: the
total Chern class of the derived bundle is expanded as a product over
formal roots, rewritten as a polynomial in the elementary symmetric
functions by leading-term elimination, and then evaluated at the Chern
classes of the input.  The rewritten formulas are cached per rank.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations, combinations_with_replacement

from chowkit.quotient import Presentation
from chowkit.ring import Polynomial, Ring, series_inverse

MAX_SPLITTING_RANK = 4


@dataclass(frozen=True, eq=False)
class KClass:
    rank: int
    total: Polynomial
    pres: Presentation

    def __post_init__(self):
        if self.total.ring != self.pres.ring:
            raise ValueError("total Chern class must live in the ambient ring")
        if self.total.grade_component(0) != self.pres.ring.one():
            raise ValueError("total Chern class must have constant term 1")

    def c(self, i: int) -> Polynomial:
        if i < 0:
            return self.pres.ring.zero()
        return self.total.grade_component(i)

    def chern_classes(self) -> list:
        return [self.c(i) for i in range(self.pres.top_degree + 1)]

    def top(self) -> Polynomial:
        return self.c(self.rank)

    def __eq__(self, other):
        return (isinstance(other, KClass) and self.rank == other.rank
                and self.pres.ring == other.pres.ring and self.total == other.total)

    def __hash__(self):
        return hash((self.rank, self.total))

    def __add__(self, other):
        return combine(self, other, +1)

    def __sub__(self, other):
        return combine(self, other, -1)

    def __neg__(self):
        return KClass(-self.rank, _inverse(self.total, self.pres), self.pres)

    def __rmul__(self, n):
        if not isinstance(n, int):
            return NotImplemented
        if n < 0:
            return (-n) * (-self)
        return KClass(self.rank * n, _power(self.total, n, self.pres), self.pres)

    def pullback(self, pres: Presentation) -> "KClass":
        """The same class over ``pres``, matching generators by name."""
        if pres is self.pres or pres.ring == self.pres.ring and pres == self.pres:
            return self
        return make_kclass(self.rank, self.total.to_ring(pres.ring), pres)

    def __str__(self):
        return f"KClass(rank={self.rank}, c={self.total})"

    __repr__ = __str__


def make_kclass(rank: int, total: Polynomial, pres: Presentation) -> KClass:
    """Build a class, reducing its Chern polynomial into normal form."""
    return KClass(int(rank), pres.normal_form(total.to_ring(pres.ring)), pres)


def _inverse(p: Polynomial, pres: Presentation) -> Polynomial:
    return pres.normal_form(series_inverse(p, pres.top_degree))


def _power(p: Polynomial, n: int, pres: Presentation) -> Polynomial:
    result = pres.ring.one()
    for _ in range(n):
        result = pres.multiply(result, p)
    return result


def trivial(pres: Presentation, rank: int = 1) -> KClass:
    return KClass(rank, pres.ring.one(), pres)


def line(c1, pres: Presentation) -> KClass:
    """The line bundle with first Chern class ``c1``."""
    if not isinstance(c1, Polynomial):
        c1 = pres.ring.constant(c1)
    c1 = c1.to_ring(pres.ring)
    if not c1.is_homogeneous(1):
        raise ValueError(f"first Chern class {c1} is not homogeneous of degree 1")
    return make_kclass(1, 1 + c1, pres)


def combine(a: KClass, b: KClass, sign: int = +1) -> KClass:
    if a.pres.ring != b.pres.ring:
        b = b.pullback(a.pres)
    pres = a.pres
    if sign > 0:
        return KClass(a.rank + b.rank, pres.multiply(a.total, b.total), pres)
    return KClass(a.rank - b.rank, pres.multiply(a.total, _inverse(b.total, pres)), pres)


def dual(E: KClass) -> KClass:
    ring = E.pres.ring
    flipped = {m: (-c if ring.degree_of(m) % 2 else c) for m, c in E.total.items()}
    return KClass(E.rank, Polynomial(ring, flipped), E.pres)


def _binomial_series(L: Polynomial, k: int, pres: Presentation, max_degree: int) -> Polynomial:
    """(1 + L)^k truncated, for any integer k."""
    ring = pres.ring
    base = 1 + L
    if k >= 0:
        out = ring.one()
        for _ in range(k):
            out = out.mul_truncated(base, max_degree)
        return out
    inv = series_inverse(base, max_degree)
    out = ring.one()
    for _ in range(-k):
        out = out.mul_truncated(inv, max_degree)
    return out


def twist_line(E: KClass, L) -> KClass:
    """E tensor the line bundle with first Chern class ``L``.

    Uses c(E (x) L) = sum_j c_j(E) (1 + L)^(rank - j); terms with j above
    the rank (possible for virtual classes) take the binomial series.
    """
    if E.rank < 0:
        raise ValueError("twist_line needs a class of non-negative rank")
    pres = E.pres
    if not isinstance(L, Polynomial):
        L = pres.ring.constant(L)
    L = L.to_ring(pres.ring)
    if not L.is_homogeneous(1):
        raise ValueError(f"twisting class {L} is not homogeneous of degree 1")
    if L.is_zero():
        return E
    top = pres.top_degree
    total = pres.ring.zero()
    for j, cj in E.total.components().items():
        total = total + cj.mul_truncated(_binomial_series(L, E.rank - j, pres, top - j), top)
    return make_kclass(E.rank, total, pres)


def segre(E: KClass) -> Polynomial:
    return _inverse(E.total, E.pres)


# -- splitting principle -------------------------------------------------------

def root_ring(r: int) -> Ring:
    return Ring([(f"x{i}", 1) for i in range(1, r + 1)])


def elementary_ring(r: int) -> Ring:
    return Ring([(f"e{i}", i) for i in range(1, r + 1)])


@lru_cache(maxsize=None)
def _elementary_in_roots(r: int) -> tuple:
    X = root_ring(r)
    xs = X.gens()
    out = []
    for k in range(1, r + 1):
        e = X.zero()
        for idx in combinations(range(r), k):
            term = X.one()
            for i in idx:
                term = term * xs[i]
            e = e + term
        out.append(e)
    return tuple(out)


def to_elementary(f: Polynomial) -> Polynomial:
    """Rewrite a symmetric polynomial in roots x1..xr via e1..er.

    Classical leading-term elimination: the lex-leading monomial
    x^a (a non-increasing) is cancelled by e1^(a1-a2) ... er^ar.
    """
    r = f.ring.ngens
    X = root_ring(r)
    if f.ring != X:
        raise ValueError(f"expected a polynomial in {X}")
    Er = elementary_ring(r)
    es = _elementary_in_roots(r)
    pow_cache: dict = {}

    def e_power(i, k):
        key = (i, k)
        if key not in pow_cache:
            pow_cache[key] = es[i] ** k
        return pow_cache[key]

    out: dict = {}
    rest = f
    while rest:
        lead = max(rest.monomials())
        c = rest.coefficient(lead)
        if any(lead[i] < lead[i + 1] for i in range(r - 1)):
            raise ValueError(f"{f} is not symmetric")
        b = tuple(lead[i] - (lead[i + 1] if i + 1 < r else 0) for i in range(r))
        g = X.one()
        for i, k in enumerate(b):
            if k:
                g = g * e_power(i, k)
        rest = rest - c * g
        out[b] = out.get(b, 0) + c
    return Polynomial(Er, out)


def _check_rank(r: int, low: int, op: str):
    if not low <= r <= MAX_SPLITTING_RANK:
        raise ValueError(f"{op} supports ranks {low}..{MAX_SPLITTING_RANK}, got {r}")


@lru_cache(maxsize=None)
def sym2_formula(r: int) -> Polynomial:
    """Total Chern class of S^2 of a rank-r bundle, in e1..er."""
    X = root_ring(r)
    xs = X.gens()
    prod = X.one()
    for i, j in combinations_with_replacement(range(r), 2):
        prod = prod * (1 + xs[i] + xs[j])
    return to_elementary(prod)


@lru_cache(maxsize=None)
def lambda2_formula(r: int) -> Polynomial:
    """Total Chern class of the exterior square of a rank-r bundle, in e1..er."""
    X = root_ring(r)
    xs = X.gens()
    prod = X.one()
    for i, j in combinations(range(r), 2):
        prod = prod * (1 + xs[i] + xs[j])
    return to_elementary(prod)


def apply_formula(formula: Polynomial, E: KClass) -> Polynomial:
    """Evaluate an e-polynomial at the Chern classes of ``E``."""
    pres = E.pres
    values = {f"e{i}": E.c(i) for i in range(1, formula.ring.ngens + 1)}
    return pres.normal_form(formula.substitute(values, pres.ring, max_degree=pres.top_degree))


def sym2(E: KClass) -> KClass:
    _check_rank(E.rank, 1, "sym2")
    r = E.rank
    return KClass(r * (r + 1) // 2, apply_formula(sym2_formula(r), E), E.pres)


def lambda2(E: KClass) -> KClass:
    _check_rank(E.rank, 2, "lambda2")
    r = E.rank
    return KClass(r * (r - 1) // 2, apply_formula(lambda2_formula(r), E), E.pres)
