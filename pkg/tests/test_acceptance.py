"""The twelve acceptance criteria.  Each test records one PASS/FAIL line that is
repeated in the terminal summary."""
import random
import subprocess
import sys
from fractions import Fraction
from pathlib import Path

import numpy as np

from frobkit import linalg as la
from frobkit.cocycle import (GaloisAction, coboundary, cocycle_from_maps, compute_cocycle, cyclic_class,
                             cyclic_invariant, descend_with_datum, dual_datum, induced_matches,
                             verify_cocycle)
from frobkit.descent import descend, filtered_descend, twisted_descent_plan
from frobkit.dieudonne import classify_point, katz_lattice, verify_dieudonne
from frobkit.errors import NegativeSlope, NormNotOne, Obstructed, SlopeAboveOne, SlopeZeroNotSimple
from frobkit.frobdata import dataset_from_json, kronecker, theoremF_check
from frobkit.isocrystal import (CharPoly, Isocrystal, char_poly, det, direct_sum, dual, from_L_matrix,
                                induce, is_morphism, linearize, semilinear_iterate, standard_object,
                                tensor)
from frobkit.padic.local import make_field, radical_field
from frobkit.padic.norms import hilbert90_solve
from frobkit.ring import build_ring
from frobkit.slopes import dm_witness, isoclinic_decompose, newton_slopes, reassembly_matrix

from conftest import conjugated, random_element, random_isocrystal, record, standard_sum

AGREE = 29
HALF = Fraction(1, 2)
ROOT = Path(__file__).resolve().parent.parent


def agree(a, b, digits=AGREE):
    """a and b are congruent modulo p^digits (digits counted from p^0, or from
    the leading digit when it has negative valuation)."""
    scale = min([x.valuation() for x in (a, b) if not x.is_zero()] + [0])
    diff = a - b
    known = diff.absolute_precision() if diff.is_zero() else diff.valuation()
    return known - scale >= digits


def matrices_agree(A, B):
    return all(agree(x, y) for ra, rb in zip(A, B) for x, y in zip(ra, rb))


def corpus(count=50, seed=1):
    rng = random.Random(seed)
    return [random_isocrystal(rng) for _ in range(count)]


def _kind(L):
    return "Qp(p^(1/2))" if L.e == 2 else "Qp2" if L.m == 2 else "Qp"


def slopes(M):
    return newton_slopes(char_poly(M)).as_list()


def test_criterion_01_linearization():
    items = corpus()
    ok = all(all(matrices_agree(a, b) for a, b in zip(linearize(M), semilinear_iterate(M, M.d)))
             for M in items)
    kinds = {(M.ring.p, M.L.m, M.L.e) for M in items}
    assert record(1, ok, "linearize equals d-fold semilinear iteration", f"({len(items)} objects, {len(kinds)} field types)")


def test_criterion_02_rational_char_poly():
    ok = True
    for M in corpus():
        per_factor = [la.charpoly(c) for c in linearize(M)]
        shifted = M.ring.sigma(per_factor)
        ok &= all(agree(x, y) for a, b in zip(per_factor, shifted) for x, y in zip(a, b))
        P = char_poly(M)
        ok &= P.field == M.L and P.degree == M.rank
    assert record(2, ok, "char poly coefficients sigma-invariant and in L", "(50 objects)")


def test_criterion_03_slopes():
    ok = True
    for lam in (0, 1, HALF, Fraction(1, 3), Fraction(2, 3), Fraction(3, 2)):
        for p in (2, 3, 5):
            for d in (1, 2):
                E = standard_object(lam, build_ring(p, d, make_field(p)))
                ok &= slopes(E) == [Fraction(lam)] * Fraction(lam).denominator
    rng = random.Random(3)
    pairs = 0
    for M in corpus():
        N = random_isocrystal(rng, p=M.ring.p, d=M.d, n=rng.randint(1, 2), kind=_kind(M.L))
        sM, sN = slopes(M), slopes(N)
        pairs += 1
        ok &= sorted(slopes(tensor(M, N))) == sorted(a + b for a in sM for b in sN)
        ok &= sorted(slopes(dual(M))) == sorted(-a for a in sM)
        ok &= slopes(det(M)) == [sum(sM)]
    assert record(3, ok, "standard slopes; tensor, dual and det slope identities", f"({pairs} pairs)")


def test_criterion_04_decomposition():
    rng = random.Random(4)
    ok = True
    for _ in range(8):
        p = rng.choice([2, 3, 5])
        R = build_ring(p, rng.choice([1, 2]), make_field(p, rng.choice([1, 2])))
        blocks = rng.sample([0, HALF, 1, Fraction(3, 2), -1, 2], 3)
        M = conjugated(standard_sum(R, blocks), rng)
        parts = isoclinic_decompose(M)
        A = reassembly_matrix(parts)
        ok &= [s.slope for s in parts] == sorted(Fraction(b) for b in blocks)
        ok &= is_morphism(A, direct_sum(*[s.obj for s in parts]), M)
        ok &= all(not la.det(a).is_zero() for a in A)
    for lam in (0, 1, HALF, Fraction(1, 3), Fraction(2, 3), Fraction(3, 2)):
        R = build_ring(3, 1, make_field(3))
        w = dm_witness(conjugated(standard_object(lam, R), rng))
        ok &= all(matrices_agree(a, b) for a, b in zip(w.standard.S, w.base_changed.S))
    assert record(4, ok, "isoclinic decomposition round trip; DM standard forms recovered")


def test_criterion_05_half_twist_example():
    ok = True
    for p in (3, 5):
        L = radical_field(p, 2, 2)
        M = from_L_matrix(build_ring(p, 2, L), [[L.uniformizer()]])
        try:
            descend(M, make_field(p))
            ok = False
        except Obstructed as exc:
            ok &= int(exc.data["eigenvalue_valuation"]) % 2 == 1
        for K in (radical_field(p, 1, 2), make_field(p, 2)):
            ok &= descend(M, K).verify()
    assert record(5, ok, "Qbar_p(-1/2) over F_{p^2}: obstructed to Q_p, descends to Q_p(sqrt p) and Q_{p^2}")


def test_criterion_06_hilbert90():
    rng = random.Random(6)
    ok = True
    count = 0
    while count < 50:
        p = rng.choice([2, 3, 5])
        m, f = rng.choice([(1, 2), (1, 3), (2, 2)])
        K, L = make_field(p, m), make_field(p, m * f)
        u = random_element(L, rng, unit=True)
        lam = u / u.frobenius(m)
        a = hilbert90_solve(lam, K)
        ok &= agree(a / a.frobenius(m), lam)
        count += 1
    for p in (2, 3, 5):
        try:
            hilbert90_solve(make_field(p, 2)(p), make_field(p))
            ok = False
        except NormNotOne:
            pass
    assert record(6, ok, "Hilbert 90 witnesses for 50 norm-one inputs; NormNotOne on obstructed input")


def test_criterion_07_cocycles():
    ok = True
    for p, d, n in ((3, 1, 2), (3, 2, 2), (5, 2, 2), (2, 3, 2), (3, 3, 3)):
        rng = random.Random(p * d * n)
        M0 = random_isocrystal(rng, p=p, d=d, n=1, kind="Qp")
        M = induce(M0, make_field(p, n))
        act = GaloisAction(M.L, M0.L)
        xi = compute_cocycle(M, act)
        ok &= verify_cocycle(xi) and cyclic_class(xi).trivial
        desc = descend_with_datum(M, act, xi.maps)
        ok &= induced_matches(desc, M) and char_poly(desc.obj) == char_poly(M0)
    L = make_field(3, 2)
    act = GaloisAction(L, make_field(3))
    R = build_ring(3, 2, L)
    T = Isocrystal(R, [[[R.K(3)]], [[R.K(1)]]])
    xi = compute_cocycle(T, act)
    ok &= verify_cocycle(xi) and not cyclic_class(xi).trivial
    xid = cocycle_from_maps(dual(T), act, dual_datum(xi.maps))
    ok &= all(xid.values[k] == xi.values[k].inverse() for k in xi.values)
    rng = random.Random(7)
    alpha = {i: random_element(L, rng, unit=True) for i in range(2)}
    db = coboundary(act, alpha)
    prod = xi * db
    ok &= cyclic_invariant(prod) == cyclic_invariant(xi) * cyclic_invariant(db)
    ok &= cyclic_invariant(xi * xi) == cyclic_invariant(xi) ** 2
    assert record(7, ok, "cocycles verified; induced trivial; multiplicative; dual inverts; pipeline round trip")


def test_criterion_08_filtered_descent():
    ok = True
    for p, d in ((3, 1), (3, 2), (5, 1), (2, 2)):
        rng = random.Random(p + 10 * d)
        Q = make_field(p)
        R0 = build_ring(p, d, Q)
        M0 = conjugated(direct_sum(from_L_matrix(R0, [[Q(1 + p)]]), standard_object(1, R0)), rng)
        M = conjugated(induce(M0, make_field(p, 2)), rng)
        res = filtered_descend(M, Q)
        ok &= res.verify() and char_poly(res.obj) == char_poly(M0)
    ss = standard_object(HALF, build_ring(3, 2, make_field(3, 2)))
    try:
        filtered_descend(ss, make_field(3))
        ok = False
    except SlopeZeroNotSimple:
        pass
    assert record(8, ok, "ordinary rank 2 over Q_{p^2} descends to Q_p; supersingular rejected")


def test_criterion_09_twist_plan():
    plan = twisted_descent_plan([-HALF, HALF], 3, 1, "Qp", "tate")
    ok = (plan.s_over_r == HALF and plan.q_prime == 9 and plan.twist == -HALF
          and plan.predicted_slopes == [0, 1] and plan.consistent)
    third = Fraction(1, 3)
    flagged = twisted_descent_plan([-third, third], 3, 1, "Qp", "tate")
    ok &= not flagged.consistent
    assert record(9, ok, "twist plan for {-1/2, 1/2}; {-1/3, 1/3} flagged")


def _oracle_class(a, b, d, p):
    from frobkit.padic.local import vp_int
    vb = vp_int(b, p)
    va = vp_int(a, p) if a else None
    roots = sorted([Fraction(va), Fraction(vb - va)]) if va is not None and 2 * va < vb else [Fraction(vb, 2)] * 2
    s = [v / d for v in roots]
    return "ordinary" if s == [0, 1] else "supersingular" if s == [HALF, HALF] else "invalid"


def test_criterion_10_dieudonne():
    rng = random.Random(10)
    ok = True
    pool = [0, 1, HALF, Fraction(1, 3), Fraction(2, 3), -1, 2, Fraction(3, 2)]
    for _ in range(10):
        p = rng.choice([2, 3, 5])
        R = build_ring(p, rng.choice([1, 2]), make_field(p))
        M = conjugated(standard_sum(R, rng.sample(pool, 2)), rng)
        admissible = all(0 <= s <= 1 for s in slopes(M))
        try:
            rep = verify_dieudonne(katz_lattice(M))
            ok &= admissible and rep["pass"] and rep["FV"] and rep["VF"]
        except (NegativeSlope, SlopeAboveOne):
            ok &= not admissible
    for _ in range(100):
        p, d = rng.choice([2, 3, 5]), rng.choice([1, 2, 3])
        u = rng.choice([x for x in range(1, 40) if x % p])
        kind = rng.random()
        if kind < 0.4:
            a, b = u, p ** d
        elif kind < 0.7:
            a, b = p ** rng.randint(d // 2 + 1, d + 1) * rng.randint(0, 5), p ** d
        else:
            a, b = u * p ** rng.randint(0, 3), u * p ** rng.randint(0, 2 * d + 1)
        Q = make_field(p)
        ok &= classify_point(CharPoly([Q(b), Q(-a), Q(1)], d))["classification"] == _oracle_class(a, b, d, p)
    assert record(10, ok, "Katz lattices exactly on admissible slopes with FV = VF = p; 100 classifications")


def _random_int_poly(rng):
    from frobkit.frobdata import cyclotomic
    if rng.random() < 0.5:
        poly = [1]
        for _ in range(3):
            phi = list(cyclotomic(rng.choice([1, 2, 3, 4, 5, 6, 8, 10, 12])))
            if len(poly) + len(phi) - 2 > 6:
                break
            poly = [int(c) for c in np.convolve(poly, phi)]
        return poly
    deg = rng.randint(1, 6)
    poly = [rng.randint(-3, 3) for _ in range(deg)] + [1]
    poly[0] = poly[0] or 1
    return poly


def test_criterion_11_finite_monodromy():
    rng = random.Random(11)
    ok = True
    for _ in range(200):
        poly = _random_int_poly(rng)
        roots = np.roots(list(reversed(poly)))
        oracle = bool(np.all(np.abs(np.abs(roots) - 1) < 5e-3))
        ok &= kronecker(poly)[0] == oracle
    unit = dataset_from_json({"p": 5, "rank": 2, "points": [
        {"label": "a", "poly": [1, -1, 1]}, {"label": "b", "poly": [1, 0, 1]}, {"label": "c", "poly": [1, 1, 1]}]})
    rep = theoremF_check(unit)
    ok &= rep["pass"] and rep["finite_monodromy"]["verdict"] == "finite"
    mixed = dataset_from_json({"p": 3, "rank": 2, "det": {"type": "tate", "weight": 1},
                               "points": [{"label": "o", "poly": [3, -1, 1]}]})
    rep = theoremF_check(mixed)
    ok &= not rep["pass"] and rep["points"][0]["excluded"] == "(-1/2, 1/2)"
    assert record(11, ok, "Kronecker verdicts match the float oracle on 200 polynomials; dichotomy check")


def test_criterion_12_cli_determinism():
    runs = [
        (["slopes", "fixtures/e-half.json"], 0),
        (["descend", "fixtures/half-twist.json", "--to", "Qp"], 1),
        (["descend", "fixtures/ordinary-q9.json", "--to", "Qp"], 0),
        (["cocycle", "fixtures/half-twist-q9.json", "--to", "Qp"], 1),
        (["lattice", "fixtures/e-half.json"], 0),
        (["lint", "fixtures/dataset.json"], 0),
        (["finmon", "fixtures/unit-root.json"], 0),
        (["slopes", "fixtures/missing.json"], 2),
    ]
    ok = True
    for args, code in runs:
        outs = [subprocess.run([sys.executable, "-m", "frobkit.cli", *args], capture_output=True, cwd=ROOT)
                for _ in range(2)]
        ok &= outs[0].stdout == outs[1].stdout and outs[0].returncode == outs[1].returncode == code
    assert record(12, ok, "byte-identical CLI reports on the fixtures; exit codes 0 / 1 / 2")
