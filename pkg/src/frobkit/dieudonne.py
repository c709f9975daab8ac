"""F-stable lattices in isocrystals with Q_p coefficients, Dieudonne modules,
and the rank-2 ordinary / supersingular classification.

Lattices are given by basis rows over W(F_q) = Z_q.  F acts on the lattice
basis w = Lam v by sigma(Lam) S Lam^{-1}; V = p F^{-1} acts by
sigma^{-1}(Lam) T Lam^{-1} with T = sigma^{-1}(p S^{-1}).

The lattice returned by katz_lattice is the saturation of the standard lattice
and is one representative among many: different admissible lattices for the
same isocrystal are compared with lattice_index.
"""
from dataclasses import dataclass
from fractions import Fraction
from math import ceil

from . import linalg as la
from .errors import NegativeSlope, PrecisionLoss, SlopeAboveOne
from .isocrystal import CharPoly, Isocrystal, char_poly
from .slopes import SlopeMultiset, newton_slopes


@dataclass
class DieudonneModule:
    obj: Isocrystal        # the ambient isocrystal
    lattice: list          # n x n basis rows over Z_q
    F: list                # matrix of F on the lattice basis
    V: list = None         # matrix of V, in Dieudonne mode

    @property
    def ring(self):
        return self.obj.ring

    @property
    def rank(self):
        return self.obj.rank

    def to_json(self):
        from .io import matrix_to_json
        R = self.ring
        out = {"p": R.p, "d": R.d, "coefficient_field": R.L.to_json(),
               "precision": R.precision, "matrix": matrix_to_json([self.F]),
               "lattice": matrix_to_json([self.lattice])}
        if self.V is not None:
            out["V"] = matrix_to_json([self.V])
        return out


def _check_Qp(M):
    if M.L.degree != 1:
        raise ValueError(f"lattices are built for Q_p coefficients, not {M.L}")


def lattice_basis(rows):
    """A basis (n rows) of the Z_q-span of `rows`, by integral elimination.

    The pivot is always an entry of minimal valuation, so every multiplier used
    is integral and the span is unchanged.
    """
    rows = [list(r) for r in rows]
    live = [i for i in range(len(rows))]
    ncols = len(rows[0])
    cols = list(range(ncols))
    basis = []
    while cols:
        best = None
        for i in live:
            for j in cols:
                x = rows[i][j]
                if not x.is_zero() and (best is None or x.valuation() < best[0]):
                    best = (x.valuation(), i, j)
        if best is None:
            break
        _, pi, pj = best
        piv = rows[pi][pj]
        for i in live:
            if i != pi and not rows[i][pj].is_zero():
                c = rows[i][pj] / piv
                rows[i] = [a - c * b for a, b in zip(rows[i], rows[pi])]
        basis.append(rows[pi])
        live.remove(pi)
        cols.remove(pj)
    return basis


def _is_integral_matrix(A):
    return all(x.is_zero() or x.valuation() >= 0 for row in A for x in row)


def _F_rows(M, Lam):
    return la.matmul(M.ring.sigma([Lam])[0], M.S[0])


def _V_matrix(M):
    """T with V(v_i) = sum_j T_ij v_j."""
    ring = M.ring
    p = ring.K(ring.p)
    pSinv = la.scale(p, la.inverse(M.S[0]))
    return ring.sigma([pSinv], -1)[0]


def _V_rows(M, Lam, T):
    return la.matmul(M.ring.sigma([Lam], -1)[0], T)


def saturation_bound(M, slopes):
    maxden = max(Fraction(s).denominator for s in slopes)
    return ceil(M.rank * M.ring.d * maxden)


def katz_lattice(M, mode="dieudonne", start=None):
    """Saturate a lattice under F (and V in Dieudonne mode) until it is stable.

    mode is "crystal" (all slopes >= 0) or "dieudonne" (slopes in [0, 1]).
    """
    _check_Qp(M)
    slopes = newton_slopes(char_poly(M)).as_list()
    if any(s < 0 for s in slopes):
        raise NegativeSlope(f"slope {min(slopes)} is negative; no F-stable lattice exists")
    if mode == "dieudonne" and any(s > 1 for s in slopes):
        raise SlopeAboveOne(f"slope {max(slopes)} exceeds 1; V would not be integral")
    K = M.ring.K
    n = M.rank
    Lam = start or la.identity(n, K)
    T = _V_matrix(M) if mode == "dieudonne" else None
    bound = saturation_bound(M, slopes)
    for _ in range(bound + 1):
        Fm = la.matmul(la.matmul(M.ring.sigma([Lam])[0], M.S[0]), la.inverse(Lam))
        stable = _is_integral_matrix(Fm)
        if T is not None:
            Vm = la.matmul(la.matmul(M.ring.sigma([Lam], -1)[0], T), la.inverse(Lam))
            stable = stable and _is_integral_matrix(Vm)
        if stable:
            return DieudonneModule(M, Lam, Fm, Vm if T is not None else None)
        rows = Lam + _F_rows(M, Lam)
        if T is not None:
            rows = rows + _V_rows(M, Lam, T)
        Lam = lattice_basis(rows)
        if len(Lam) != n:
            raise PrecisionLoss("lattice lost rank during saturation")
    raise PrecisionLoss(f"saturation did not stabilize within {bound} steps")


def verify_dieudonne(D):
    """Integrality of F and V and both composites equal to p, at precision.

    For an F-crystal lattice (no V) only F and the determinant are checked.
    """
    ring = D.ring
    K = ring.K
    n = D.rank
    pI = la.scale(K(ring.p), la.identity(n, K))
    report = {"F_integral": _is_integral_matrix(D.F)}
    keys = ["F_integral", "det_matches_slopes"]
    if D.V is not None:
        keys += ["V_integral", "FV", "VF"]
        report["V_integral"] = _is_integral_matrix(D.V)
        # F(V(w)) = sigma(V) F ;  V(F(w)) = sigma^{-1}(F) V
        report["FV"] = la.matrices_equal(la.matmul(ring.sigma([D.V])[0], D.F), pI)
        report["VF"] = la.matrices_equal(la.matmul(ring.sigma([D.F], -1)[0], D.V), pI)
    slopes = newton_slopes(char_poly(D.obj)).as_list()
    detF = la.det(D.F)
    report["det_valuation"] = str(detF.valuation()) if not detF.is_zero() else None
    report["det_matches_slopes"] = (not detF.is_zero()) and Fraction(detF.valuation()) == sum(slopes)
    report["pass"] = all(report[k] for k in keys)
    return report


def lattice_index(A, B):
    """Containment in both directions and v_p(det A) - v_p(det B).

    When A is inside B the last number is the length of B / A over Z_q.
    """
    ab = la.matmul(A, la.inverse(B))
    ba = la.matmul(B, la.inverse(A))
    return {"A_in_B": _is_integral_matrix(ab), "B_in_A": _is_integral_matrix(ba),
            "relative_length": la.det(A).valuation() - la.det(B).valuation()}


# ---------------------------------------------------------------------------
# rank 2 classification
# ---------------------------------------------------------------------------

ORDINARY = [Fraction(0), Fraction(1)]
SUPERSINGULAR = [Fraction(1, 2), Fraction(1, 2)]


def classify_slopes(slopes, coefficients_Qp=True, weight=1):
    slopes = sorted(Fraction(s) for s in slopes)
    out = {"slopes": SlopeMultiset.from_list(slopes).to_json(), "reasons": []}
    if len(slopes) != 2:
        out["classification"] = "invalid"
        out["reasons"].append(f"rank {len(slopes)} is not 2")
        return out
    if slopes == ORDINARY:
        out["classification"] = "ordinary"
        return out
    if slopes == SUPERSINGULAR:
        out["classification"] = "supersingular"
        return out
    out["classification"] = "invalid"
    reasons = out["reasons"]
    if sum(slopes) != weight:
        reasons.append(f"slope sum {sum(slopes)} differs from the determinant weight {weight}")
    if slopes[1] - slopes[0] > 1:
        reasons.append(f"slopes differ by {slopes[1] - slopes[0]} > 1")
    if slopes[0] == -slopes[1] and slopes[1].denominator == 1:
        reasons.append(f"slopes of the form (-a, a) with a = {slopes[1]} are excluded by the gap bound")
    if coefficients_Qp:
        counts = {}
        for s in slopes:
            counts[s] = counts.get(s, 0) + 1
        for s, k in sorted(counts.items()):
            if k % s.denominator:
                reasons.append(f"slope {s} must occur a multiple of {s.denominator} times with Q_p coefficients")
    if all(s.denominator == 1 for s in slopes) and sum(slopes) == weight == 1:
        reasons.append("integral slopes summing to 1 within the gap bound must be (0, 1)")
    return out


def classify_point(x, weight=1):
    """Classify a rank-2 point given a DieudonneModule, Isocrystal or CharPoly."""
    if isinstance(x, DieudonneModule):
        x = x.obj
    if isinstance(x, Isocrystal):
        qp = x.L.degree == 1
        x = char_poly(x)
    elif isinstance(x, CharPoly):
        qp = x.field.degree == 1
    else:
        raise TypeError(f"cannot classify {type(x).__name__}")
    return classify_slopes(newton_slopes(x).as_list(), qp, weight)
