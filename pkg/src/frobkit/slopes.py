"""Newton polygons, slope-pure factorization, isoclinic decomposition,
Dieudonne-Manin witnesses and slope-bound checks."""
from dataclasses import dataclass
from fractions import Fraction
from math import gcd

from . import linalg as la
from .errors import (BudgetExceeded, FactorInconsistency, FrobkitError, InseparableSlopes,
                     PrecisionLoss, PrecisionZero)
from .isocrystal import (CharPoly, Isocrystal, change_basis, change_q, char_poly, direct_sum,
                         linearize, standard_object)
from .padic.embed import embed
from .ring import ring_map

SLOPE_GUARD_DIGITS = 4


class NoStandardForm(FrobkitError, ValueError):
    """The multiplicity of slope s/r is not a multiple of r, so no E^(s/r) blocks exist."""


@dataclass
class SlopeMultiset:
    entries: list      # sorted [(Fraction, multiplicity)]

    @classmethod
    def from_list(cls, slopes):
        counts = {}
        for s in slopes:
            s = Fraction(s)
            counts[s] = counts.get(s, 0) + 1
        return cls(sorted(counts.items()))

    def as_list(self):
        return [s for s, k in self.entries for _ in range(k)]

    @property
    def rank(self):
        return sum(k for _, k in self.entries)

    def shifted(self, c):
        return SlopeMultiset([(s + c, k) for s, k in self.entries])

    def negated(self):
        return SlopeMultiset(sorted((-s, k) for s, k in self.entries))

    def total(self):
        return sum((s * k for s, k in self.entries), Fraction(0))

    def to_json(self):
        return [[str(s), k] for s, k in self.entries]

    def __repr__(self):
        return "{" + ", ".join(f"{s} x{k}" for s, k in self.entries) + "}"


# ---------------------------------------------------------------------------
# Newton polygon
# ---------------------------------------------------------------------------

def _lower_hull(points):
    hull = []
    for pt in points:
        while len(hull) >= 2:
            (x1, y1), (x2, y2) = hull[-2], hull[-1]
            # drop hull[-1] if it lies on or above the segment hull[-2] -> pt
            if (y2 - y1) * (pt[0] - x1) >= (pt[1] - y1) * (x2 - x1):
                hull.pop()
            else:
                break
        hull.append(pt)
    return hull


def newton_vertices(coeffs):
    """Vertices (i, v(c_i)) of the lower convex hull; coefficient list low degree first."""
    if coeffs[0].is_zero():
        raise PrecisionZero("constant term is zero at precision")
    points = [(i, c.valuation()) for i, c in enumerate(coeffs) if not c.is_zero()]
    hull = _lower_hull(points)
    # a coefficient that is zero only at precision could still lie under the hull
    for i, c in enumerate(coeffs):
        if c.is_zero() and not c.is_exact_zero():
            bound = c.absolute_precision()
            if _below(hull, i, bound):
                raise PrecisionZero(f"coefficient {i} is zero at precision but could change the Newton polygon")
    return hull


def _below(hull, i, y):
    for (x1, y1), (x2, y2) in zip(hull, hull[1:]):
        if x1 <= i <= x2:
            return y < y1 + Fraction(y2 - y1) * (i - x1) / (x2 - x1)
    return False


def root_valuations(coeffs):
    """[(valuation, multiplicity)] of the roots, ascending valuation."""
    return _hull_roots(newton_vertices(coeffs))


def valuation_polygon(vals):
    """Root valuations from exact coefficient valuations (None marks a zero coefficient)."""
    if vals[0] is None:
        raise ValueError("constant term is zero")
    return _hull_roots(_lower_hull([(i, Fraction(v)) for i, v in enumerate(vals) if v is not None]))


def _hull_roots(hull):
    out = []
    for (x1, y1), (x2, y2) in zip(hull, hull[1:]):
        out.append((-Fraction(y2 - y1) / (x2 - x1), x2 - x1))
    # the hull runs left to right, i.e. from large to small root valuations
    return sorted(out)


def newton_slopes(P):
    """Slope multiset of a CharPoly (root valuations divided by d)."""
    entries = {}
    for v, k in root_valuations(P.coeffs):
        s = v / P.d
        entries[s] = entries.get(s, 0) + k
    return SlopeMultiset(sorted(entries.items()))


# ---------------------------------------------------------------------------
# slope factorization
# ---------------------------------------------------------------------------

def poly_mul(a, b):
    F = a[0].field
    out = [F.zero() for _ in range(len(a) + len(b) - 1)]
    for i, x in enumerate(a):
        if x.is_exact_zero():
            continue
        for j, y in enumerate(b):
            out[i + j] = out[i + j] + x * y
    return out


def poly_divmod_monic(a, b):
    """Division by a monic b."""
    F = a[0].field
    a = list(a)
    db = len(b) - 1
    if len(a) - 1 < db:
        return [F.zero()], a
    q = [F.zero() for _ in range(len(a) - db)]
    for k in range(len(a) - 1, db - 1, -1):
        c = a[k]
        q[k - db] = c
        if c.is_exact_zero():
            continue
        for i in range(db + 1):
            a[k - db + i] = a[k - db + i] - c * b[i]
    rem = a[:db] if db else [F.zero()]
    return q, rem


def _mul_mod(a, b, A):
    return poly_divmod_monic(poly_mul(a, b), A)[1]


def _inverse_mod(Q, A):
    """U with U*Q = 1 mod A (A monic of degree k)."""
    F = A[0].field
    k = len(A) - 1
    Qr = poly_divmod_monic(Q, A)[1]
    Qr = Qr + [F.zero()] * (k - len(Qr))
    # multiplication-by-Q matrix in the basis 1, t, ..., t^(k-1) (row convention)
    rows = []
    for i in range(k):
        prod = _mul_mod([F.zero()] * i + [F.one()], Qr, A)
        rows.append(prod + [F.zero()] * (k - len(prod)))
    target = [F.one()] + [F.zero()] * (k - 1)
    sol = la.solve_right(la.transpose(rows), target)
    if sol is None:
        raise PrecisionLoss("factor is not coprime to its cofactor at precision")
    return sol


def _split(P, k, max_iter=80):
    """Monic A of degree k (roots of large valuation) and B = P / A."""
    ck = P[k]
    A = [c / ck for c in P[:k]] + [P[0].field.one()]
    for _ in range(max_iter):
        Q, R = poly_divmod_monic(P, A)
        if all(c.is_zero() for c in R):
            return A, Q
        U = _inverse_mod(Q, A)
        delta = _mul_mod(R, U, A)
        delta = delta + [P[0].field.zero()] * (k - len(delta))
        A = [a + dlt for a, dlt in zip(A[:k], delta)] + [A[k]]
    raise PrecisionLoss("slope factorization did not converge")


def slope_factor(P):
    """[(slope, monic slope-pure factor)] with factors multiplying back to P."""
    coeffs = list(P.coeffs)
    hull = newton_vertices(coeffs)
    segs = []
    for (x1, y1), (x2, y2) in zip(hull, hull[1:]):
        segs.append((-Fraction(y2 - y1) / (x2 - x1), x1, x2))
    _check_separation(segs, P)
    factors = []
    rest = coeffs
    # peel segments from the left (largest root valuation first)
    for idx, (v, x1, x2) in enumerate(segs):
        if idx == len(segs) - 1:
            factors.append((v / P.d, rest))
            break
        A, B = _split(rest, x2 - x1)
        factors.append((v / P.d, A))
        rest = B
    factors.sort(key=lambda t: t[0])
    return [(s, CharPoly(f, P.d)) for s, f in factors]


def _check_separation(segs, P):
    F = P.field
    tol = Fraction(1, F.e * P.d * SLOPE_GUARD_DIGITS)
    for (a, _, _), (b, _, _) in zip(segs, segs[1:]):
        if abs(a - b) / P.d <= tol:
            raise InseparableSlopes(f"slopes {a / P.d} and {b / P.d} are not separated")


# ---------------------------------------------------------------------------
# isoclinic decomposition
# ---------------------------------------------------------------------------

@dataclass
class Summand:
    slope: Fraction
    obj: Isocrystal
    inclusion: list    # component list of m x n matrices (rows span the summand)


def _poly_at_matrix(coeffs, Phi):
    K = Phi[0][0].field
    n = len(Phi)
    acc = la.zeros(n, n, K)
    for c in reversed(coeffs):
        acc = la.matmul(acc, Phi)
        ce = embed(c, K)
        for i in range(n):
            acc[i][i] = acc[i][i] + ce
    return acc


def kernel_tolerance(mat, precision):
    mv = la.min_valuation(mat)
    return None if mv is None else mv + Fraction(precision, 2)


def sub_object(M, W):
    """Object spanned by the rows of W (component list, free columns = identity)."""
    ring = M.ring
    sW = ring.sigma(W)
    comps = []
    for k in range(ring.r):
        Y = la.matmul(sW[k], M.S[k])
        free = _identity_columns(W[k])
        comps.append([[row[j] for j in free] for row in Y])
    return Isocrystal(ring, comps)


def _identity_columns(W):
    cols = []
    for i, row in enumerate(W):
        for j, x in enumerate(row):
            if x == 1 and all(W[a][j].is_zero() for a in range(len(W)) if a != i):
                cols.append(j)
                break
    if len(cols) != len(W):
        raise PrecisionLoss("kernel basis is not in reduced form")
    return cols


def isoclinic_decompose(M):
    """[Summand] with one entry per slope, in increasing slope order."""
    P = char_poly(M)
    factors = slope_factor(P)
    if len(factors) == 1:
        K = M.ring.K
        ident = [la.identity(M.rank, K) for _ in range(M.ring.r)]
        return [Summand(factors[0][0], M, ident)]
    Phi = linearize(M)
    out = []
    for slope, Pl in factors:
        W = []
        for k in range(M.ring.r):
            mat = _poly_at_matrix(Pl.coeffs, Phi[k])
            tol = kernel_tolerance(mat, M.ring.precision)
            basis = la.left_kernel(mat, tol)
            if len(basis) != Pl.degree:
                raise FactorInconsistency(
                    f"slope {slope}: kernel of dimension {len(basis)} in factor {k}, expected {Pl.degree}")
            W.append(basis)
        out.append(Summand(slope, sub_object(M, W), W))
    return out


def reassembly_matrix(summands):
    r = len(summands[0].inclusion)
    return [[row for s in summands for row in s.inclusion[k]] for k in range(r)]


# ---------------------------------------------------------------------------
# Dieudonne-Manin witness
# ---------------------------------------------------------------------------

@dataclass
class DMWitness:
    R: int                  # the witness lives over F_{p^R}
    blocks: list            # slopes, one per standard block
    basis: list             # component list: rows are the new basis vectors
    standard: Isocrystal    # direct sum of the standard objects over F_{p^R}
    base_changed: Isocrystal


def _lcm(a, b):
    return a * b // gcd(a, b)


def default_budget(M, slopes):
    base = M.ring.d
    for s in slopes:
        base = _lcm(base, Fraction(s).denominator)
    return base * 6


def dm_witness(M, budget=None):
    """Basis over F_{p^R} in which M is a direct sum of standard objects."""
    summands = isoclinic_decompose(M)
    if budget is None:
        budget = default_budget(M, [s.slope for s in summands])
    parts = []
    for s in summands:
        parts.append((s, _dm_isoclinic(s.obj, s.slope, budget)))
    if len(parts) == 1:
        return parts[0][1]
    # bring every part to a common R and stack the bases through the inclusions
    R = 1
    for _, w in parts:
        R = _lcm(R, w.R)
    parts = [(s, w if w.R == R else _dm_isoclinic(s.obj, s.slope, budget, start=R)) for s, w in parts]
    MR = change_q(M, R)
    rows = []
    for s, w in parts:
        inc = change_q_matrix(s.inclusion, M, MR)
        rows.append([la.matmul(w.basis[k], inc[k]) for k in range(MR.ring.r)])
    basis = [[row for part in rows for row in part[k]] for k in range(MR.ring.r)]
    blocks = [b for _, w in parts for b in w.blocks]
    standard = direct_sum(*[standard_object(b, MR.ring) for b in blocks])
    return DMWitness(R, blocks, basis, standard, change_basis(MR, basis))


def change_q_matrix(A, M, MR):
    return ring_map(A, M.ring, MR.ring)


def _dm_isoclinic(M, slope, budget, start=None):
    lam = Fraction(slope)
    s, r = lam.numerator, lam.denominator
    n = M.rank
    if n % r:
        raise NoStandardForm(f"rank {n} is not a multiple of the slope denominator {r}")
    step = _lcm(M.ring.d, r)
    R = start or step
    while R <= budget:
        w = _try_dm(M, s, r, R)
        if w is not None:
            return w
        R += step
    raise BudgetExceeded(f"no standard form found over F_(p^R) for R <= {budget}")


def _try_dm(M, s, r, R):
    MR = change_q(M, R)
    ring = MR.ring
    K = ring.K
    n = M.rank
    ps = embed(ring.L(Fraction(ring.p) ** (-s)), K)
    # U = p^-s sigma^(r-1)(S) ... sigma(S) S : matrix of p^-s F^r
    U = MR.S
    cur = MR.S
    for _ in range(1, r):
        cur = ring.sigma(cur)
        U = [la.matmul(c, u) for c, u in zip(cur, U)]
    U = [la.scale(ps, u) for u in U]
    # G(x) = sigma^r(x) U has G^(R/r) linear with matrix Ulin
    Ulin = U
    cur = U
    for _ in range(1, R // r):
        cur = ring.sigma(cur, r)
        Ulin = [la.matmul(c, u) for c, u in zip(cur, Ulin)]
    ident = la.identity(n, K)
    if not all(la.matrices_equal(u, ident) for u in Ulin):
        return None

    def G(vec):
        sv = ring.sigma(vec, r)
        return [la.vecmat(sv[k], U[k]) for k in range(ring.r)]

    def F(vec):
        sv = ring.sigma(vec)
        return [la.vecmat(sv[k], MR.S[k]) for k in range(ring.r)]

    chosen = [[] for _ in range(ring.r)]
    blocks = []
    for c in ring.candidates():
        for i in range(n):
            y = [[c.comps[k] if j == i else K.zero() for j in range(n)] for k in range(ring.r)]
            x = y
            acc = y
            for _ in range(1, R // r):
                x = G(x)
                acc = [[a + b for a, b in zip(va, vb)] for va, vb in zip(acc, x)]
            if all(all(e.is_zero() for e in acc[k]) for k in range(ring.r)):
                continue
            # v_0 = x, v_j = p^-s F^j(x)
            block = [acc]
            v = acc
            for j in range(1, r):
                v = F(v)
                if j == 1:
                    v = [[ps * e for e in comp] for comp in v]
                block.append(v)
            trial = [chosen[k] + [b[k] for b in block] for k in range(ring.r)]
            if all(la.rank(trial[k]) == len(trial[k]) for k in range(ring.r)):
                chosen = trial
                blocks.append(Fraction(s, r))
                if len(chosen[0]) == n:
                    standard = direct_sum(*[standard_object(b, ring) for b in blocks])
                    return DMWitness(R, blocks, chosen, standard, change_basis(MR, chosen))
    return None


# ---------------------------------------------------------------------------
# slope bounds
# ---------------------------------------------------------------------------

def slope_bounds_check(P, n=None, point_degree=1, weight=None):
    """Rank bound and consecutive-gap checks on the slopes of P.

    Slopes are divided by ``point_degree`` on top of P.d and, when ``weight`` is
    given, centered by subtracting weight/2.  Rank 2 uses the bound 1/2; rank n
    uses (n-1)/2.
    """
    ms = newton_slopes(P)
    slopes = [s / point_degree for s in ms.as_list()]
    n = n or len(slopes)
    centered = [s - Fraction(weight, 2) for s in slopes] if weight is not None else slopes
    bound = Fraction(1, 2) if n == 2 else Fraction(n - 1, 2)
    within = all(abs(s) <= bound for s in centered)
    gaps = [b - a for a, b in zip(centered, centered[1:])]
    gap_ok = all(g <= 1 for g in gaps)
    return {
        "slopes": SlopeMultiset.from_list(slopes).to_json(),
        "centered_slopes": [str(s) for s in centered],
        "checks": {
            "rank_bound": {"bound": str(bound), "pass": within},
            "consecutive_gap": {"max_gap": str(max(gaps)) if gaps else "0", "pass": gap_ok},
        },
        "pass": within and gap_ok,
    }
