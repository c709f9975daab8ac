import random

import pytest

from frobkit.cocycle import (GaloisAction, choose_isomorphisms, coboundary, cocycle_from_maps,
                             compute_cocycle, cyclic_class, cyclic_invariant, datum_from_witness,
                             descend_with_datum, dual_datum, galois_twist, induced_matches,
                             scale_morphism, verify_cocycle, Cocycle)
from frobkit.errors import NotADatum, NotIsomorphicToTwist
from frobkit.isocrystal import Isocrystal, char_poly, dual, induce, tensor
from frobkit.padic.local import make_field
from frobkit.padic.embed import embed
from frobkit.ring import build_ring

from conftest import random_element, random_isocrystal

CASES = [(3, 1, 2), (3, 2, 2), (5, 2, 2), (2, 3, 2), (3, 3, 3), (2, 1, 3)]


def induced_case(p, d, n, seed):
    """A random rank-1 object over Q_q (x) Q_p and its induction to Q_{p^n}."""
    rng = random.Random(seed)
    M0 = random_isocrystal(rng, p=p, d=d, n=1, kind="Qp")
    L = make_field(p, n)
    return M0, induce(M0, L), GaloisAction(L, M0.L)


def half_twist(p):
    """Rank 1 over Q_{p^2} (x) Q_{p^2} with components (p, 1): F^2 acts by p."""
    L = make_field(p, 2)
    R = build_ring(p, 2, L)
    return Isocrystal(R, [[[R.K(p)]], [[R.K(1)]]]), GaloisAction(L, make_field(p))


@pytest.mark.parametrize("p,d,n", CASES)
def test_induced_is_trivial(p, d, n):
    M0, M, act = induced_case(p, d, n, p * d * n)
    xi = compute_cocycle(M, act)
    assert verify_cocycle(xi)
    assert all(v == 1 for v in xi.values.values())
    cls = cyclic_class(xi)
    assert cls.trivial and cls.a == 1
    assert all(v == 1 for v in cls.witness.values())


def test_twist_char_poly():
    rng = random.Random(1)
    M = random_isocrystal(rng, p=3, d=2, n=2, kind="Qp2")
    act = GaloisAction(M.L, make_field(3))
    P, Q = char_poly(M), char_poly(galois_twist(M, act))
    assert Q.coeffs == [c.frobenius() for c in P.coeffs]
    assert galois_twist(M, act, 0).S == M.S


@pytest.mark.parametrize("p", [3, 5])
def test_half_twist_class(p):
    M, act = half_twist(p)
    xi = compute_cocycle(M, act)
    assert verify_cocycle(xi)
    cls = cyclic_class(xi)
    assert cls.a.valuation() % 2 == 1
    assert not cls.trivial
    # the dual carries the inverse cocycle
    xid = cocycle_from_maps(dual(M), act, dual_datum(xi.maps))
    assert all(xid.values[k] == xi.values[k].inverse() for k in xi.values)
    assert cyclic_invariant(xid) == cls.a.inverse()
    # End(M) = M (x) M* descends
    E = tensor(M, dual(M))
    assert cyclic_class(compute_cocycle(E, act)).trivial


def test_multiplicative():
    M, act = half_twist(3)
    xi = compute_cocycle(M, act)
    sq = xi * xi
    assert verify_cocycle(sq)
    assert cyclic_invariant(sq) == cyclic_invariant(xi) ** 2
    assert cyclic_class(sq).trivial
    rng = random.Random(2)
    alpha = {i: random_element(act.L, rng, unit=True) for i in range(act.n)}
    db = coboundary(act, alpha)
    assert cyclic_invariant(xi * db) == cyclic_invariant(xi) * cyclic_invariant(db)


@pytest.mark.parametrize("p,n", [(3, 2), (5, 2), (2, 3), (3, 3)])
def test_coboundary_round_trip(p, n):
    rng = random.Random(p + n)
    L = make_field(p, n)
    act = GaloisAction(L, make_field(p))
    for _ in range(3):
        alpha = {i: random_element(L, rng, low=-1, high=2) for i in range(n)}
        xi = coboundary(act, alpha)
        assert verify_cocycle(xi)
        cls = cyclic_class(xi)
        assert cls.trivial
        back = coboundary(act, cls.witness)
        assert all(back.values[k] == xi.values[k] for k in xi.values)


def test_rescaling_changes_by_coboundary():
    M0, M, act = induced_case(3, 2, 2, 5)
    maps = choose_isomorphisms(M, act)
    rng = random.Random(5)
    alpha = {i: random_element(act.L, rng, unit=True) for i in range(act.n)}
    scaled = {i: scale_morphism(C, alpha[i]) for i, C in maps.items()}
    xi = cocycle_from_maps(M, act, maps)
    xi2 = cocycle_from_maps(M, act, scaled)
    db = coboundary(act, alpha)
    assert all(xi2.values[k] == xi.values[k] * db.values[k] for k in xi.values)
    # the witness rescales the perturbed family back to a datum, which descends
    cls = cyclic_class(xi2)
    assert cls.trivial
    datum = datum_from_witness(xi2, cls.witness)
    desc = descend_with_datum(M, act, datum)
    assert induced_matches(desc, M)
    assert char_poly(desc.obj).coeffs == char_poly(M0).coeffs


def test_verify_perturbed():
    act = GaloisAction(make_field(3, 2), make_field(3))
    one = Cocycle(act, {(i, j): act.L.one() for i in range(2) for j in range(2)})
    assert verify_cocycle(one)
    bad = Cocycle(act, dict(one.values))
    bad.values[(1, 0)] = act.L(2)
    assert not verify_cocycle(bad)


@pytest.mark.parametrize("p,d,n", CASES)
def test_descend_induced(p, d, n):
    M0, M, act = induced_case(p, d, n, 7 * p + d)
    xi = compute_cocycle(M, act)
    desc = descend_with_datum(M, act, xi.maps)
    assert induced_matches(desc, M)
    assert char_poly(desc.obj).coeffs == char_poly(M0).coeffs


def test_not_a_datum():
    M0, M, act = induced_case(3, 2, 2, 9)
    maps = choose_isomorphisms(M, act)
    bad = dict(maps)
    bad[1] = scale_morphism(maps[1], act.L(3))
    with pytest.raises(NotADatum):
        descend_with_datum(M, act, bad)
    K = M.ring.K
    junk = dict(maps)
    junk[1] = [[[K(2)]] for _ in range(M.ring.r)]
    junk[1][0] = [[K(5)]]
    with pytest.raises(NotADatum):
        descend_with_datum(M, act, junk)


def test_not_isomorphic_to_twist():
    L = make_field(3, 2)
    R = build_ring(3, 1, L)
    M = Isocrystal(R, [[[embed(L.gen() + 3, R.K)]]])
    with pytest.raises(NotIsomorphicToTwist):
        compute_cocycle(M, GaloisAction(L, make_field(3)))
