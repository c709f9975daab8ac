"""Descent of isocrystals to smaller coefficient fields.

Rank one objects are classified by the eigenvalue of F^d and descend exactly
when that eigenvalue is a norm from Q_q (x) K.  Higher rank objects with a
simple slope-0 part descend along a cyclic unramified step by transporting the
descent datum of the slope-0 line.  The twist planner handles rank two points
with antisymmetric slopes.
"""
from dataclasses import dataclass, field
from fractions import Fraction
from math import ceil

from . import linalg as la
from .cocycle import (GaloisAction, compute_cocycle, cyclic_class, datum_from_witness,
                      descend_with_datum, induced_matches)
from .errors import (BoundViolation, CharPolyNotRational, EigenvalueNotInK, EndTooBig,
                     NotAntisymmetricSlopes, NotInSubfield, NotSubfield,
                     Obstructed, PrecisionLoss, SlopeZeroNotSimple)
from .expr import element_to_string
from .isocrystal import Isocrystal, change_basis, char_poly, hom_space, induce
from .padic.embed import embed, is_subfield, project
from .padic.norms import is_norm_algebra
from .ring import CoeffRingElement, build_ring
from .slopes import isoclinic_decompose, reassembly_matrix, slope_factor


@dataclass
class DescentResult:
    obj: Isocrystal            # over Q_q (x) K
    certificate: list          # B over Q_q (x) L: sigma(B) S B^{-1} = induce(obj)
    source: Isocrystal
    method: str

    def verify(self):
        target = induce(self.obj, self.source.L)
        conj = change_basis(self.source, self.certificate)
        return all(la.matrices_equal(a, b) for a, b in zip(conj.S, target.S))

    def to_json(self):
        from .io import isocrystal_to_json
        return {"outcome": "descended", "method": self.method,
                "object": isocrystal_to_json(self.obj),
                "certificate": [[[element_to_string(x) for x in row] for row in comp]
                                for comp in self.certificate],
                "certificate_verified": self.verify()}


# ---------------------------------------------------------------------------
# rank one
# ---------------------------------------------------------------------------

def rank1_eigenvalue(M):
    """The eigenvalue of F^d on a rank-1 object, as an element of L."""
    if M.rank != 1:
        raise ValueError(f"expected a rank-1 object, got rank {M.rank}")
    from .isocrystal import linearize
    lin = linearize(M)
    return M.ring.project_L([comp[0][0] for comp in lin], "F^d eigenvalue")


def rank1_object(ring, lam):
    """A rank-1 object over `ring` whose F^d eigenvalue is lam (an element of L).

    S = (y, 1, ..., 1) in the factor components, where y has norm lam from the
    factor field; raises Obstructed when no such y exists.
    """
    ok, y = is_norm_algebra(lam, ring.d)
    if not ok:
        f = ring.d // ring.r
        raise Obstructed(
            f"eigenvalue is not a norm from Q_q (x) {lam.field}",
            {"eigenvalue": element_to_string(lam),
             "eigenvalue_valuation": str(lam.normalized_valuation()),
             "norm_degree": f,
             "reason": f"normalized valuation {lam.normalized_valuation()} is not divisible by {f}"})
    K = ring.K
    y = embed(y, K)
    comps = [[[y]]] + [[[K.one()]] for _ in range(ring.r - 1)]
    return Isocrystal(ring, comps)


def rank1_descend(M, K, rng=None):
    """Descend a rank-1 object to coefficients K (a subfield of L)."""
    lam = rank1_eigenvalue(M)
    if not is_subfield(K, M.L):
        raise NotSubfield(f"{K} is not a subfield of {M.L}")
    try:
        lam0 = project(lam, K)
    except NotInSubfield as exc:
        raise EigenvalueNotInK(f"F^d eigenvalue does not lie in {K}") from exc
    R0 = build_ring(M.ring.p, M.ring.d, K)
    M0 = rank1_object(R0, lam0)
    ring = M.ring
    target = induce(M0, M.L)
    # b = lam' sigma(b) with lam' = s / s' gives sigma(b) s b^{-1} = s'
    ratio = CoeffRingElement(ring, [a[0][0] / b[0][0] for a, b in zip(M.S, target.S)])
    b = ring.hilbert90(ratio, rng)
    cert = [[[x]] for x in b.comps]
    return DescentResult(M0, cert, M, "rank1")


# ---------------------------------------------------------------------------
# filtered descent
# ---------------------------------------------------------------------------

def _check_rational(P, L0):
    try:
        return [project(c, L0) for c in P.coeffs]
    except NotInSubfield as exc:
        raise CharPolyNotRational(f"characteristic polynomial has coefficients outside {L0}") from exc


def _block(comps, rows, cols):
    return [[[A[i][j] for j in cols] for i in rows] for A in comps]


def _block_diag(a, b, K):
    out = []
    for A, B in zip(a, b):
        n1, n2 = len(A), len(B)
        X = la.zeros(n1 + n2, n1 + n2, K)
        for i in range(n1):
            for j in range(n1):
                X[i][j] = A[i][j]
        for i in range(n2):
            for j in range(n2):
                X[n1 + i][n1 + j] = B[i][j]
        out.append(X)
    return out


def _complement_datum(Nc, action):
    """Effective datum on the complement, from its cocycle and a coboundary witness."""
    xi = compute_cocycle(Nc, action)
    cls = cyclic_class(xi)
    if not cls.trivial:
        raise Obstructed("the complement of the slope-0 line has a nontrivial cocycle class",
                         {"invariant": element_to_string(cls.a),
                          "invariant_valuation": str(cls.a.normalized_valuation()),
                          "norm_degree": action.n})
    return datum_from_witness(xi, cls.witness)


def filtered_descend(M, L0, rng=None):
    """Descend M along the cyclic unramified step L / L0, given a simple slope-0 part.

    At a point the slope decomposition splits M as N1 (+) Nc with N1 the slope-0
    line.  N1 always descends; Nc must have one-dimensional End, and its cocycle
    class is decided by the norm criterion.  The data are glued block-diagonally
    and executed in the decomposition basis.
    """
    action = GaloisAction(M.L, L0)
    ring = M.ring
    K = ring.K
    P = char_poly(M)
    _check_rational(P, L0)
    factors = slope_factor(P)
    zero = [f for s, f in factors if s == 0]
    if len(zero) != 1 or zero[0].degree != 1:
        mult = zero[0].degree if zero else 0
        raise SlopeZeroNotSimple(f"slope 0 occurs with multiplicity {mult}, expected 1")
    n = M.rank
    if n == 1:
        return rank1_descend(M, L0, rng)
    summands = isoclinic_decompose(M)
    ordered = [s for s in summands if s.slope == 0] + [s for s in summands if s.slope != 0]
    W = reassembly_matrix(ordered)
    Mdec = change_basis(M, W)
    rest = list(range(1, n))
    N1 = Isocrystal(ring, _block(Mdec.S, [0], [0]))
    Nc = Isocrystal(ring, _block(Mdec.S, rest, rest))
    if hom_space(Nc, Nc).dim_L > 1:
        raise EndTooBig("End of the complement of the slope-0 line has dimension > 1 over L")
    B1 = rank1_descend(N1, L0, rng).certificate
    datum_c = _complement_datum(Nc, action)
    maps = {}
    for i in range(action.n):
        gB1 = action.act_comps(ring, B1, i)
        n_g = [[[gb[0][0] / b[0][0]]] for b, gb in zip(B1, gB1)]
        maps[i] = _block_diag(n_g, datum_c[i], K)
    desc = descend_with_datum(Mdec, action, maps, rng)
    if not induced_matches(desc, Mdec):
        raise PrecisionLoss("descended object does not reproduce the input at precision")
    cert = [la.matmul(b, w) for b, w in zip(desc.certificate, W)]
    return DescentResult(desc.obj, cert, M, "filtered")


def descend(M, K, rng=None):
    """Dispatch: rank 1 by the norm criterion, otherwise filtered descent."""
    if M.rank == 1:
        return rank1_descend(M, K, rng)
    if M.L.eisenstein != K.eisenstein:
        raise NotSubfield("higher-rank descent is only supported along unramified steps")
    return filtered_descend(M, K, rng)


# ---------------------------------------------------------------------------
# twisted descent planning
# ---------------------------------------------------------------------------

@dataclass
class TwistPlan:
    p: int
    d: int
    s_over_r: Fraction
    q_prime_exponent: int          # q' = p^(this)
    twist: Fraction
    predicted_slopes: list
    target: str
    det: str = None
    contradictions: list = field(default_factory=list)

    @property
    def q_prime(self):
        return self.p ** self.q_prime_exponent

    @property
    def consistent(self):
        return not self.contradictions

    def to_json(self):
        return {"p": self.p, "q": self.p ** self.d, "s_over_r": str(self.s_over_r),
                "q_prime": self.q_prime, "q_prime_exponent": self.q_prime_exponent,
                "twist": str(self.twist),
                "predicted_slopes": [str(s) for s in self.predicted_slopes],
                "target": self.target, "det": self.det,
                "contradictions": list(self.contradictions), "consistent": self.consistent}

    def apply(self, M):
        """Base change M to F_q' and twist; returns (object, twist info)."""
        from .isocrystal import change_q, tate_twist
        return tate_twist(change_q(M, self.q_prime_exponent), self.twist)


def twisted_descent_plan(slopes, p, d=1, target="L", det=None):
    """Plan for a rank-2 point whose slopes are {-s/r, s/r}."""
    slopes = sorted(Fraction(s) for s in slopes)
    if len(slopes) != 2 or slopes[0] != -slopes[1] or slopes[1] <= 0:
        raise NotAntisymmetricSlopes(f"point slopes {[str(s) for s in slopes]} are not of the form -s/r, s/r with s/r > 0")
    a = slopes[1]
    if a > Fraction(1, 2):
        raise BoundViolation(f"slope {a} exceeds the rank-2 bound 1/2")
    r = a.denominator
    k = ceil(r / d)
    plan = TwistPlan(p, d, a, d * k, -a, [Fraction(0), 2 * a], target, det)
    if target == "Qp" and det == "tate":
        if (2 * a).denominator != 1:
            plan.contradictions.append(f"2s/r = {2 * a} is not an integer")
        elif 2 * a > 1:
            plan.contradictions.append(f"2s/r = {2 * a} exceeds 1")
    return plan
