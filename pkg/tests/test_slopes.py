import random
from fractions import Fraction

import pytest

from frobkit import linalg as la
from frobkit.errors import BudgetExceeded, InseparableSlopes, PrecisionZero
from frobkit.isocrystal import (CharPoly, Isocrystal, char_poly, direct_sum, is_morphism, standard_object,
                                tate_twist)
from frobkit.padic.local import make_field
from frobkit.ring import build_ring
from frobkit.slopes import (NoStandardForm, dm_witness, isoclinic_decompose, newton_slopes, poly_mul,
                            reassembly_matrix, slope_bounds_check, slope_factor)

from conftest import conjugated, standard_sum

HALF, THIRD = Fraction(1, 2), Fraction(1, 3)


def poly(F, ints, d=1):
    return CharPoly([F(c) for c in ints], d)


def pure_factor(F, s, r, rng):
    """t^r - p^s u: every root has valuation s/r."""
    u = rng.choice([x for x in range(1, 50) if x % F.p])
    return [F(-(F.p ** s) * u)] + [F(0)] * (r - 1) + [F(1)]


def test_newton_examples():
    Q = make_field(3)
    assert newton_slopes(poly(Q, [-3, 0, 1])).as_list() == [HALF, HALF]
    assert newton_slopes(poly(Q, [-1, 1])).as_list() == [0]
    for d in (1, 2, 3):
        q = 3 ** d
        P = poly(Q, [q, -5, 1], d)
        assert newton_slopes(P).as_list() == [0, 1]
        assert newton_slopes(poly(Q, [q, 0, 1], d)).as_list() == [HALF, HALF]


@pytest.mark.parametrize("seed", range(6))
def test_factor_products(seed):
    """Multiply slope-pure factors, factor, compare with the inputs."""
    rng = random.Random(seed)
    p = rng.choice([2, 3, 5])
    Q = make_field(p)
    chosen = rng.sample([(0, 1), (1, 2), (1, 1), (2, 1), (5, 3), (3, 1)], 3)
    factors = [pure_factor(Q, s, r, rng) for s, r in chosen]
    P = factors[0]
    for f in factors[1:]:
        P = poly_mul(P, f)
    out = slope_factor(CharPoly(P))
    expected = sorted((Fraction(s, r), f) for (s, r), f in zip(chosen, factors))
    assert [s for s, _ in out] == [s for s, _ in expected]
    for (_, got), (_, want) in zip(out, expected):
        assert got.coeffs == want
    assert sorted(newton_slopes(CharPoly(P)).as_list()) == sorted(
        Fraction(s, r) for s, r in chosen for _ in range(r))


def test_factor_split_and_single():
    Q = make_field(5)
    out = slope_factor(poly(Q, [5, -6, 1]))
    assert [(s, f.coeffs) for s, f in out] == [(0, [Q(-1), Q(1)]), (1, [Q(-5), Q(1)])]
    out = slope_factor(poly(Q, [-5, 0, 1]))
    assert len(out) == 1 and out[0][0] == HALF


def test_inseparable_slopes():
    Q = make_field(3)
    P = poly_mul([Q(-1), Q(1)], [Q(-3)] + [Q(0)] * 4 + [Q(1)])
    with pytest.raises(InseparableSlopes):
        slope_factor(CharPoly(P))
    with pytest.raises(PrecisionZero):
        slope_factor(CharPoly([Q(0), Q(-1), Q(1)]))


@pytest.mark.parametrize("lam", [0, 1, HALF, THIRD, Fraction(2, 3), Fraction(3, 2)])
def test_standard_slopes(lam, p=3):
    for d in (1, 2):
        R = build_ring(p, d, make_field(p))
        E = standard_object(lam, R)
        assert newton_slopes(char_poly(E)).as_list() == [Fraction(lam)] * Fraction(lam).denominator


def test_decompose_block():
    R = build_ring(3, 1, make_field(3))
    parts = isoclinic_decompose(standard_sum(R, [0, 1]))
    assert [(s.slope, s.obj.rank) for s in parts] == [(0, 1), (1, 1)]
    E = standard_object(HALF, R)
    parts = isoclinic_decompose(E)
    assert len(parts) == 1 and parts[0].obj is E


@pytest.mark.parametrize("seed", range(6))
def test_decompose_round_trip(seed):
    rng = random.Random(seed)
    p = rng.choice([2, 3, 5])
    d = rng.choice([1, 2])
    R = build_ring(p, d, make_field(p, rng.choice([1, 2])))
    blocks = rng.sample([0, HALF, 1, Fraction(3, 2), -1, 2], 3)
    M = conjugated(standard_sum(R, blocks), rng)
    parts = isoclinic_decompose(M)
    assert [s.slope for s in parts] == sorted(Fraction(b) for b in blocks)
    A = reassembly_matrix(parts)
    D = direct_sum(*[s.obj for s in parts])
    assert is_morphism(A, D, M)
    assert all(not la.det(a).is_zero() for a in A)


@pytest.mark.parametrize("lam", [0, 1, HALF, THIRD, Fraction(2, 3)])
def test_dm_conjugated_standard(lam):
    rng = random.Random(7)
    R = build_ring(3, 1, make_field(3))
    M = conjugated(standard_sum(R, [lam, lam] if lam in (0, 1) else [lam]), rng)
    w = dm_witness(M)
    assert all(la.matrices_equal(a, b) for a, b in zip(w.standard.S, w.base_changed.S))
    assert set(w.blocks) == {Fraction(lam)}


def test_dm_ordinary_and_unit():
    rng = random.Random(8)
    p = 5
    R = build_ring(p, 1, make_field(p))
    M = conjugated(direct_sum(standard_object(0, R), standard_object(1, R)), rng)
    # a unit eigenvalue -1 is trivialized once R is even; a generic unit never is
    M.S[0] = [[-x for x in row] for row in M.S[0]]
    w = dm_witness(M)
    assert sorted(w.blocks) == [0, 1] and w.R == 2
    assert all(la.matrices_equal(a, b) for a, b in zip(w.standard.S, w.base_changed.S))


def test_dm_limits():
    R = build_ring(3, 1, make_field(3))
    # a generic unit eigenvalue is never trivialized over a finite field
    with pytest.raises(BudgetExceeded):
        dm_witness(Isocrystal(R, [[[R.K(7)]]]))
    T, _ = tate_twist(standard_object(0, build_ring(3, 2, make_field(3))), -HALF)
    with pytest.raises(NoStandardForm):
        dm_witness(T)


def test_slope_bounds():
    Q = make_field(3)
    ok = slope_bounds_check(poly(Q, [3, -1, 1]), weight=1)
    assert ok["pass"] and ok["centered_slopes"] == ["-1/2", "1/2"]
    ss = slope_bounds_check(poly(Q, [3, 0, 1]), weight=1)
    assert ss["pass"] and ss["centered_slopes"] == ["0", "0"]
    bad = slope_bounds_check(poly(Q, [3, -1 / Fraction(3), 1]))
    assert not bad["pass"]
    assert not bad["checks"]["rank_bound"]["pass"]
