"""Numerical invariants of smooth surfaces and curves."""

from __future__ import annotations

from dataclasses import dataclass, astuple


class InconsistentInvariants(ValueError):
    pass


@dataclass(frozen=True)
class SurfaceInvariants:
    """K^2 (``c1sq``), topological Euler number (``c2``) and irregularity ``q``."""

    c1sq: int
    c2: int
    q: int = 0

    def __post_init__(self):
        if (self.c1sq + self.c2) % 12:
            raise InconsistentInvariants(
                f"c1^2 + c2 = {self.c1sq + self.c2} is not divisible by 12")
        if self.q < 0:
            raise InconsistentInvariants("irregularity must be non-negative")


@dataclass(frozen=True)
class HodgeDiamond:
    h00: int
    h10: int
    h20: int
    h11: int

    def __post_init__(self):
        if self.h00 != 1:
            raise InconsistentInvariants("h^{0,0} of a connected surface is 1")
        if min(self.h10, self.h20, self.h11) < 0:
            raise InconsistentInvariants(f"negative Hodge number in {astuple(self)}")

    def as_tuple(self) -> tuple:
        return astuple(self)

    def euler(self) -> int:
        return 2 - 4 * self.h10 + 2 * self.h20 + self.h11

    def matrix(self) -> list:
        return [[self.h00, self.h10, self.h20],
                [self.h10, self.h11, self.h10],
                [self.h20, self.h10, self.h00]]

    def __sub__(self, other):
        if not isinstance(other, HodgeDiamond):
            return NotImplemented
        return tuple(a - b for a, b in zip(self.as_tuple(), other.as_tuple()))

    def __str__(self):
        rows = self.matrix()
        width = max(len(str(v)) for row in rows for v in row)
        return "\n".join("  ".join(str(v).rjust(width) for v in row) for row in rows)


def noether_chi(inv: SurfaceInvariants) -> int:
    """Holomorphic Euler characteristic (K^2 + e) / 12."""
    total = inv.c1sq + inv.c2
    if total % 12:
        raise InconsistentInvariants(f"c1^2 + c2 = {total} is not divisible by 12")
    return total // 12


def hodge_diamond(inv: SurfaceInvariants) -> HodgeDiamond:
    chi = noether_chi(inv)
    h10 = inv.q
    h20 = chi - 1 + inv.q
    h11 = inv.c2 - 2 + 4 * inv.q - 2 * h20
    return HodgeDiamond(1, h10, h20, h11)


def etale_double_cover_quotient(inv: SurfaceInvariants, q_quotient: int) -> SurfaceInvariants:
    """Invariants of Y when ``inv`` belongs to an unramified double cover of Y."""
    if inv.c1sq % 2 or inv.c2 % 2:
        raise InconsistentInvariants(
            f"an étale double cover has even K^2 and e, got ({inv.c1sq}, {inv.c2})")
    return SurfaceInvariants(inv.c1sq // 2, inv.c2 // 2, q_quotient)


def blow_down_points(inv: SurfaceInvariants, k: int) -> SurfaceInvariants:
    """Contract ``k`` disjoint (-1)-curves."""
    if k < 0:
        raise ValueError("number of contracted curves must be >= 0")
    return SurfaceInvariants(inv.c1sq + k, inv.c2 - k, inv.q)


def plane_curve_genus(d: int, nodes: int = 0) -> int:
    if d < 1 or nodes < 0:
        raise ValueError("need degree >= 1 and a non-negative number of nodes")
    g = (d - 1) * (d - 2) // 2 - nodes
    if g < 0:
        raise InconsistentInvariants(f"a degree {d} curve cannot have {nodes} nodes")
    return g


def prym_dim(g: int) -> int:
    """Dimension of the Prym variety of an étale double cover of a genus-g curve."""
    if g < 1:
        raise ValueError("genus must be >= 1")
    return g - 1


def etale_double_genus(g: int) -> int:
    if g < 1:
        raise ValueError("genus must be >= 1")
    return 2 * g - 1
