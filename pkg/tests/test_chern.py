import random
from fractions import Fraction
from itertools import combinations, combinations_with_replacement

import pytest

from chowkit.builders import projective_space
from chowkit.chern import (combine, dual, lambda2, line, segre, sym2, to_elementary, trivial,
                           twist_line, root_ring)
from chowkit.quotient import Presentation
from chowkit.ring import Ring, evaluate

# free ring on the Chern classes of a rank <= 4 bundle plus a twisting class t
UNIVERSAL = Presentation(Ring([("e1", 1), ("e2", 2), ("e3", 3), ("e4", 4), ("t", 1)]), [], 12)


def universal_bundle(r):
    from chowkit.chern import KClass
    total = UNIVERSAL.ring.one()
    for i in range(1, r + 1):
        total = total + UNIVERSAL.ring.gen(f"e{i}")
    return KClass(r, total, UNIVERSAL)


def elementary(values):
    out = [Fraction(1)]
    for k in range(1, len(values) + 1):
        s = Fraction(0)
        for idx in combinations(values, k):
            p = Fraction(1)
            for v in idx:
                p *= v
            s += p
        out.append(s)
    return out


def at_roots(E, roots, t=0):
    """Evaluate each Chern class of E at the elementary values of ``roots``."""
    e = elementary(roots)
    values = {f"e{i}": (e[i] if i <= len(roots) else 0) for i in range(1, 5)}
    values["t"] = t
    return [E.c(k).evaluate_at(values) for k in range(E.rank + 1)]


def random_roots(rng, r):
    return [Fraction(rng.randint(-9, 9)) for _ in range(r)]


@pytest.mark.parametrize("r", [1, 2, 3, 4])
def test_sym2_numeric_roots(r):
    rng = random.Random(100 + r)
    S = sym2(universal_bundle(r))
    assert S.rank == r * (r + 1) // 2
    for _ in range(100):
        x = random_roots(rng, r)
        shifted = [x[i] + x[j] for i, j in combinations_with_replacement(range(r), 2)]
        assert at_roots(S, x) == elementary(shifted)


@pytest.mark.parametrize("r", [2, 3, 4])
def test_lambda2_numeric_roots(r):
    rng = random.Random(200 + r)
    L = lambda2(universal_bundle(r))
    assert L.rank == r * (r - 1) // 2
    for _ in range(100):
        x = random_roots(rng, r)
        shifted = [x[i] + x[j] for i, j in combinations(range(r), 2)]
        assert at_roots(L, x) == elementary(shifted)


@pytest.mark.parametrize("r", [1, 2, 3, 4])
def test_twist_numeric_roots(r):
    rng = random.Random(300 + r)
    T = twist_line(universal_bundle(r), UNIVERSAL.ring.gen("t"))
    for _ in range(100):
        x = random_roots(rng, r)
        t = Fraction(rng.randint(-9, 9))
        assert at_roots(T, x, t) == elementary([v + t for v in x])


def test_splitting_rank_limits():
    with pytest.raises(ValueError):
        lambda2(universal_bundle(1))
    P8 = projective_space(8, "H")
    with pytest.raises(ValueError):
        sym2(trivial(P8, 5))


def test_to_elementary_rejects_non_symmetric():
    X = root_ring(2)
    with pytest.raises(ValueError):
        to_elementary(X.gen("x1"))
    assert str(to_elementary(X.gen("x1") ** 2 + X.gen("x2") ** 2)) == "e1^2 - 2*e2"


def test_small_rank_closed_forms():
    E2, E3 = universal_bundle(2), universal_bundle(3)
    R = UNIVERSAL.ring
    assert sym2(E2).c(1) == 3 * R.gen("e1")
    assert sym2(E3).c(1) == 4 * R.gen("e1")
    assert lambda2(E2).total.truncate(2) == (1 + R.gen("e1")).truncate(2)
    assert lambda2(E3).c(1) == 2 * R.gen("e1")
    assert twist_line(E2, R.gen("t")).c(1) == R.gen("e1") + 2 * R.gen("t")
    L = line(R.gen("t"), UNIVERSAL)
    assert sym2(L).total == 1 + 2 * R.gen("t")


def test_rank_two_square():
    # S^2 E + L^2 E = E (x) E for rank 2
    rng = random.Random(5)
    E = universal_bundle(2)
    both = sym2(E) + lambda2(E)
    for _ in range(50):
        x = random_roots(rng, 2)
        assert at_roots(both, x) == elementary([a + b for a in x for b in x])


@pytest.fixture
def p4():
    return projective_space(4, "H")


def test_dual_of_m(p4):
    H = p4.gen("H")
    O = trivial(p4)
    M = 8 * O - 5 * line(H, p4) + line(2 * H, p4)
    assert M.rank == 4
    assert M.total == evaluate("1 - 3*H + 5*H^2 - 5*H^3", p4.ring)
    assert dual(M).total == evaluate("1 + 3*H + 5*H^2 + 5*H^3", p4.ring)
    assert dual(M).c(4).is_zero()
    assert segre(dual(M)) == evaluate("1 - 3*H + 4*H^2 - 2*H^3 + H^4", p4.ring)


def test_line_examples(p4):
    H = p4.gen("H")
    assert line(H, p4).total == 1 + H
    assert line(0, p4) == trivial(p4)
    with pytest.raises(ValueError):
        line(H * H, p4)


def random_bundle(pres, rng, n=3):
    H = pres.gen("H")
    E = trivial(pres, 0)
    for _ in range(n):
        L = line(rng.randint(-3, 3) * H, pres)
        E = E + L if rng.random() < 0.7 else E - L
    return E


def test_whitney_and_inverses(p4):
    rng = random.Random(9)
    for _ in range(40):
        a, b = random_bundle(p4, rng), random_bundle(p4, rng)
        s = combine(a, b, +1)
        assert s.rank == a.rank + b.rank
        assert s.total == p4.multiply(a.total, b.total)
        assert combine(s, b, -1) == a
        assert p4.multiply(segre(a), a.total) == p4.ring.one()
        assert dual(dual(a)) == a
        both = a + dual(a)
        assert all(both.c(k).is_zero() for k in (1, 3))


def test_self_difference_and_trivial(p4):
    H = p4.gen("H")
    E = line(H, p4) + line(2 * H, p4)
    diff = E - E
    assert diff.rank == 0 and diff.total == p4.ring.one()
    assert dual(trivial(p4, 2)) == trivial(p4, 2)
    assert segre(trivial(p4)) == p4.ring.one()
    P2 = projective_space(2, "H")
    assert segre(line(P2.gen("H"), P2)) == evaluate("1 - H + H^2", P2.ring)


def test_twist_by_zero_is_identity(p4):
    rng = random.Random(4)
    for _ in range(10):
        E = random_bundle(p4, rng)
        if E.rank >= 0:
            assert twist_line(E, 0) == E
            assert twist_line(E, p4.ring.zero()) == E


def test_twist_of_line_adds_classes(p4):
    H = p4.gen("H")
    assert twist_line(line(2 * H, p4), 3 * H) == line(5 * H, p4)


def test_twist_rejects_negative_rank(p4):
    with pytest.raises(ValueError):
        twist_line(-trivial(p4), p4.gen("H"))


def test_twist_of_virtual_class_matches_sum(p4):
    # twisting is additive, so twisting M term by term must agree
    H = p4.gen("H")
    O = trivial(p4)
    M = 8 * O - 5 * line(H, p4) + line(2 * H, p4)
    t = -H
    termwise = 8 * line(t, p4) - 5 * line(H + t, p4) + line(2 * H + t, p4)
    assert twist_line(M, t) == termwise


def test_twisted_sym2_on_bundle_ring(spaces):
    PZ, M = spaces["PZ"], spaces["M"]
    E, P = PZ.gen("E"), PZ.gen("P")
    tau3 = M.pullback(PZ) - line(P, PZ)
    S = sym2(dual(tau3))
    assert twist_line(S, E).c(1) == PZ.normal_form(S.c(1) + 6 * E)
    assert line(E - P, PZ).total == 1 + E - P
