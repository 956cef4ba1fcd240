"""Classes of degeneracy loci.

``zero_locus_class`` is the top Chern class of a bundle (the class of the
zero scheme of a regular section).  ``symmetric_porteous`` gives the class
of the locus where a symmetric map ``E -> E^* (x) L`` has corank at least
``c``::

    2^c * det[ c_{c+1+j-2i}(E^* (x) L^(1/2)) ]_{i,j=1..c}

The square root of ``L`` is realised by shifting every Chern root by half
of ``c_1(L)``, i.e. twisting with rational coefficients; the determinant
must come out integral.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import permutations

from chowkit.chern import KClass, dual, twist_line
from chowkit.ring import Polynomial


class NonIntegralClassError(ArithmeticError):
    pass


@dataclass(frozen=True)
class SymmetricMapSpec:
    bundle: KClass
    corank: int
    twist: Polynomial | None = None

    def __post_init__(self):
        n = self.bundle.rank
        if n < 1:
            raise ValueError("symmetric degeneracy needs an actual bundle of rank >= 1")
        if not 1 <= self.corank <= n:
            raise ValueError(f"corank must lie in 1..{n}, got {self.corank}")
        if self.twist is not None and not self.twist.is_zero():
            if not self.twist.is_homogeneous(1):
                raise ValueError("twist must be homogeneous of degree 1")


def zero_locus_class(E: KClass) -> Polynomial:
    if E.rank < 1:
        raise ValueError(f"zero locus needs an actual bundle of rank >= 1, got rank {E.rank}")
    return E.pres.normal_form(E.c(E.rank))


def determinant(matrix: list, ring) -> Polynomial:
    n = len(matrix)
    total = ring.zero()
    for perm in permutations(range(n)):
        inversions = sum(1 for a in range(n) for b in range(a + 1, n) if perm[a] > perm[b])
        term = ring.one()
        for i, j in enumerate(perm):
            term = term * matrix[i][j]
            if term.is_zero():
                break
        if inversions % 2:
            total = total - term
        else:
            total = total + term
    return total


def symmetric_porteous(spec: SymmetricMapSpec) -> Polynomial:
    E = spec.bundle
    pres = E.pres
    n, c = E.rank, spec.corank
    F = dual(E)
    if spec.twist is not None and not spec.twist.is_zero():
        F = twist_line(F, spec.twist.to_ring(pres.ring) / 2)

    def ck(k):
        if k < 0 or k > n:
            return pres.ring.zero()
        return F.c(k)

    matrix = [[ck(c + 1 + j - 2 * i) for j in range(1, c + 1)] for i in range(1, c + 1)]
    det = pres.normal_form(determinant(matrix, pres.ring).truncate(pres.top_degree))
    result = det * (2 ** c)
    if not result.is_integral():
        raise NonIntegralClassError(f"degeneracy class {result} has non-integral coefficients")
    return result


def porteous_sym(E: KClass, corank: int, twist=None) -> Polynomial:
    if twist is not None and not isinstance(twist, Polynomial):
        twist = E.pres.ring.constant(twist)
    return symmetric_porteous(SymmetricMapSpec(E, corank, twist))
