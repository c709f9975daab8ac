"""F-isocrystals over F_q with coefficients in L.

An isocrystal is a free module of rank n over Q_q (x) L with a bijective
sigma (x) 1 -semilinear F.  It is stored through the matrix S with
F(v_i) = sum_j S[i][j] v_j, so on row coordinates F(a) = sigma(a) S and

    F^d(a) = a * sigma^(d-1)(S) ... sigma(S) S.

A morphism with matrix A (a -> a A) commutes with F exactly when
S_M A = sigma(A) S_N.  Worked 2x2 example: for S = [[0, p], [1, 0]],
F(v_0) = p v_1 and F(v_1) = v_0, so F^2 = p on both basis vectors.

Matrices over the ring are component lists: ``S[k]`` is the n x n matrix of
factor k over K'.
"""
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import combinations
from math import gcd

from . import linalg as la
from .errors import NotSubfield, PrecisionZero, RingMismatch
from .padic.embed import embed, is_subfield, project
from .padic.local import LocalField, radical_field
from .padic.norms import _ramified_coords
from .ring import build_ring, deep_map, ring_map, ring_map_data


@dataclass
class CharPoly:
    """Monic polynomial over L, coefficients lowest degree first."""
    coeffs: list
    d: int = 1

    @property
    def field(self):
        return self.coeffs[0].field

    @property
    def degree(self):
        return len(self.coeffs) - 1

    def __eq__(self, other):
        if not isinstance(other, CharPoly) or other.degree != self.degree:
            return False
        return all(a == b for a, b in zip(self.coeffs, other.coeffs))

    def to_json(self):
        from .expr import element_to_string
        return {"coefficients": [element_to_string(c) for c in self.coeffs], "d": self.d}

    def __repr__(self):
        return f"CharPoly({self.to_json()['coefficients']}, d={self.d})"


def poly_mul(a, b):
    F = a[0].field
    out = [F.zero() for _ in range(len(a) + len(b) - 1)]
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            out[i + j] = out[i + j] + x * y
    return out


class Isocrystal:
    def __init__(self, ring, S):
        self.ring = ring
        self.S = [[list(row) for row in comp] for comp in S]
        if len(self.S) != ring.r:
            raise ValueError(f"matrix has {len(self.S)} components, ring has {ring.r}")

    @property
    def rank(self):
        return len(self.S[0])

    n = rank

    @property
    def L(self):
        return self.ring.L

    @property
    def d(self):
        return self.ring.d

    def __repr__(self):
        return f"Isocrystal(rank={self.rank}, ring={self.ring})"

    def check_invertible(self):
        for comp in self.S:
            if la.det(comp).is_zero():
                raise PrecisionZero("F is not bijective: S is singular at precision")
        return True

    def same_ring(self, other):
        if self.ring != other.ring:
            raise RingMismatch(f"{self.ring} vs {other.ring}")

    # delegates
    def linearize(self):
        return linearize(self)

    def char_poly(self):
        return char_poly(self)


# ---------------------------------------------------------------------------
# construction helpers
# ---------------------------------------------------------------------------

def matrix_from_L(ring, rows):
    """Component list of an L-valued matrix (entries ints, Fractions or L elements)."""
    K = ring.K
    L = ring.L
    mat = [[embed(L(x) if not hasattr(x, "field") else x, K) for x in row] for row in rows]
    return [mat] + [[list(r) for r in mat] for _ in range(ring.r - 1)]


def from_L_matrix(ring, rows):
    return Isocrystal(ring, matrix_from_L(ring, rows))


def standard_object(slope, ring):
    """E^(s/r): F(v_0) = p^s v_1, F(v_i) = v_(i+1), F(v_(r-1)) = v_0."""
    lam = Fraction(slope)
    s, r = lam.numerator, lam.denominator
    L = ring.L
    rows = [[L.zero() for _ in range(r)] for _ in range(r)]
    if r == 1:
        rows[0][0] = L(Fraction(ring.p) ** s)
    else:
        rows[0][1] = L(Fraction(ring.p) ** s)
        for i in range(1, r - 1):
            rows[i][i + 1] = L.one()
        rows[r - 1][0] = L.one()
    return from_L_matrix(ring, rows)


def unit_object(ring):
    return standard_object(0, ring)


def direct_sum(*objs):
    ring = objs[0].ring
    for o in objs[1:]:
        objs[0].same_ring(o)
    K = ring.K
    n = sum(o.rank for o in objs)
    comps = []
    for k in range(ring.r):
        mat = la.zeros(n, n, K)
        off = 0
        for o in objs:
            for i in range(o.rank):
                for j in range(o.rank):
                    mat[off + i][off + j] = o.S[k][i][j]
            off += o.rank
        comps.append(mat)
    return Isocrystal(ring, comps)


def change_basis(M, B):
    """The object in the basis w = B v: S' = sigma(B) S B^{-1} (B a component list)."""
    sB = M.ring.sigma(B)
    comps = [la.matmul(la.matmul(sB[k], M.S[k]), la.inverse(B[k])) for k in range(M.ring.r)]
    return Isocrystal(M.ring, comps)


# ---------------------------------------------------------------------------
# linearization and characteristic polynomial
# ---------------------------------------------------------------------------

def linearize(M):
    """Matrix of F^d: sigma^(d-1)(S) ... sigma(S) S (component list)."""
    ring = M.ring
    acc = M.S
    cur = M.S
    for _ in range(1, ring.d):
        cur = ring.sigma(cur)
        acc = [la.matmul(c, a) for c, a in zip(cur, acc)]
    return acc


def semilinear_iterate(M, times):
    """Oracle: apply a -> sigma(a) S `times` times to each basis row vector."""
    ring = M.ring
    K = ring.K
    n = M.rank
    rows = []
    for i in range(n):
        vec = [[K.one() if j == i else K.zero() for j in range(n)] for _ in range(ring.r)]
        for _ in range(times):
            sv = ring.sigma(vec)
            vec = [la.vecmat(sv[k], M.S[k]) for k in range(ring.r)]
        rows.append(vec)
    return [[rows[i][k] for i in range(n)] for k in range(ring.r)]


def char_poly(M):
    """Characteristic polynomial of F^d, certified to lie in L[t]."""
    lin = linearize(M)
    per_factor = [la.charpoly(comp) for comp in lin]
    coeffs = M.ring.project_L(per_factor, "characteristic polynomial")
    return CharPoly(coeffs, M.ring.d)


# ---------------------------------------------------------------------------
# tensor operations
# ---------------------------------------------------------------------------

def tensor(M, N):
    M.same_ring(N)
    comps = []
    for A, B in zip(M.S, N.S):
        n1, n2 = len(A), len(B)
        comps.append([[A[i][j] * B[k][l] for j in range(n1) for l in range(n2)]
                      for i in range(n1) for k in range(n2)])
    return Isocrystal(M.ring, comps)


def dual(M):
    comps = [la.transpose(la.inverse(A)) for A in M.S]
    return Isocrystal(M.ring, comps)


def exterior(M, k):
    n = M.rank
    subsets = list(combinations(range(n), k))
    comps = []
    for A in M.S:
        comps.append([[la.det([[A[i][j] for j in J] for i in I]) for J in subsets] for I in subsets])
    return Isocrystal(M.ring, comps)


def det(M):
    return exterior(M, M.rank)


# ---------------------------------------------------------------------------
# coefficient change
# ---------------------------------------------------------------------------

def induce(M, Lp):
    """Same matrix viewed over Q_q (x) L' for L in L'."""
    R2 = build_ring(M.ring.p, M.ring.d, Lp)
    if not is_subfield(M.L, Lp):
        raise NotSubfield(f"{M.L} is not a subfield of {Lp}")
    return Isocrystal(R2, ring_map(M.S, M.ring, R2))


def change_q(M, d_new):
    """Base change to F_q' (q' = p^d_new, d | d_new); S is kept, the ring grows."""
    R2 = build_ring(M.ring.p, d_new, M.L)
    if d_new % M.ring.d:
        raise RingMismatch("new residue degree must be a multiple of d")
    return Isocrystal(R2, ring_map(M.S, M.ring, R2))


@lru_cache(maxsize=None)
def _unram_gram(big, small):
    """Basis g^k (k < f) of big over small and the inverse trace Gram matrix."""
    f = big.m // small.m
    g = big.gen()
    basis = [g ** k for k in range(f)]
    gram = [[_trace(basis[a] * basis[b], small) for b in range(f)] for a in range(f)]
    return basis, la.inverse(gram)


def _trace(z, small):
    big = z.field
    acc = z
    for i in range(1, big.m // small.m):
        acc = acc + z.frobenius(i * small.m)
    return project(acc, small)


def unram_coords(y, small):
    """Coordinates of y in big = small(g) over small, basis g^k."""
    basis, ginv = _unram_gram(y.field, small)
    f = len(basis)
    tr = [_trace(y * b, small) for b in basis]
    return [sum((tr[a] * ginv[a][k] for a in range(f)), small.zero()) for k in range(f)]


def ring_preimage(comps, R0, R, data):
    """Components over R0 of an element of R lying in the image of R0."""
    c, e0 = data
    out = []
    K0 = R0.K
    for j in range(R0.r):
        y = R.component_phi(comps, j + e0)
        out.append(deep_map(y, lambda z: project(z.frobenius(-c), K0)))
    return out


def restrict(M, L0):
    """Forget down to Q_q (x) L0: rank multiplies by [L : L0]."""
    L = M.L
    if L0 == L:
        return M
    if not is_subfield(L0, L):
        raise NotSubfield(f"{L0} is not a subfield of {L}")
    if L.m != L0.m:
        mid = LocalField(L.p, L0.m, L.eisenstein, L.precision)
        return restrict(_restrict_unramified(M, mid), L0)
    return _restrict_ramified(M, L0)


def _restrict_unramified(M, L0):
    R = M.ring
    L = R.L
    R0 = build_ring(R.p, R.d, L0)
    data = ring_map_data(R0, R)
    basis = [L.gen() ** k for k in range(L.m // L0.m)]
    f = len(basis)
    # dual basis of L over L0 under the trace form
    gram = [[_trace(a * b, L0) for b in basis] for a in basis]
    ginv = la.inverse(gram)
    dual_basis = [sum((embed(ginv[a][k], L) * basis[a] for a in range(f)), L.zero()) for k in range(f)]
    twists = [k * L0.m for k in range(L.m // L0.m)]
    n = M.rank
    K = R.K
    big = [[None] * (n * f) for _ in range(n * f)]
    for i in range(n):
        for k in range(f):
            for j in range(n):
                # x = s_ij * beta_k ; c_l = (1 (x) Tr)(x * beta*_l)
                x = [M.S[c][i][j] * embed(basis[k], K) for c in range(R.r)]
                for l in range(f):
                    y = [x[c] * embed(dual_basis[l], K) for c in range(R.r)]
                    acc = None
                    for s in twists:
                        tw = R.galois_twist(y, s)
                        acc = tw if acc is None else [a + b for a, b in zip(acc, tw)]
                    big[i * f + k][j * f + l] = ring_preimage(acc, R0, R, data)
    comps = [[[big[a][b][c] for b in range(n * f)] for a in range(n * f)] for c in range(R0.r)]
    return Isocrystal(R0, comps)


def _restrict_ramified(M, L0):
    R = M.ring
    L = R.L
    R0 = build_ring(R.p, R.d, L0)
    K0 = R0.K
    c = L.e // L0.e
    n = M.rank
    tau = R.K.uniformizer()
    comps = []
    for comp in M.S:
        mat = la.zeros(n * c, n * c, K0)
        for i in range(n):
            for k in range(c):
                for j in range(n):
                    coords = _ramified_coords(comp[i][j] * tau ** k, K0)
                    for l in range(c):
                        mat[i * c + k][j * c + l] = coords[l]
        comps.append(mat)
    return Isocrystal(R0, comps)


def norm_poly(P, L0):
    """Norm of a polynomial over L down to L0: charpoly of the restricted companion matrix."""
    L = P.field
    if L0 == L:
        return P
    n = P.degree
    R = build_ring(L.p, 1, L)
    comp = la.zeros(n, n, R.K)
    for i in range(n - 1):
        comp[i][i + 1] = R.K.one()
    for j in range(n):
        comp[n - 1][j] = -embed(P.coeffs[j], R.K)
    return char_poly(restrict(Isocrystal(R, [comp]), L0))


# ---------------------------------------------------------------------------
# Tate twists
# ---------------------------------------------------------------------------

def twist_field(L, b):
    """Smallest radical field containing L and p^(1/b)."""
    if b == 1:
        return L
    bl = L.radical_degree
    if bl is None:
        raise NotSubfield(f"{L} is not a radical field; cannot adjoin p^(1/{b})")
    e = bl * b // gcd(bl, b)
    return radical_field(L.p, L.m, e, L.precision)


def p_power(F, w):
    """p^w in a radical field F whose ramification index is divisible by w's denominator."""
    w = Fraction(w)
    if w.denominator == 1:
        return F(Fraction(F.p) ** w.numerator)
    e = F.e
    if e % w.denominator or F.radical_degree is None:
        raise NotSubfield(f"p^{w} is not in {F}")
    return F.uniformizer() ** (w.numerator * e // w.denominator)


def tate_twist(M, w):
    """M (x) Qbar_p(w): F is multiplied by p^(-w), so every slope moves by -w.

    Returns (twisted object, info) where info records the enlarged coefficient
    field and whether the twist is Galois-stable (b | d).
    """
    w = Fraction(w)
    b = w.denominator
    Lp = twist_field(M.L, b)
    N = induce(M, Lp) if Lp != M.L else M
    scal = embed(p_power(Lp, -w), N.ring.K)
    comps = [[[scal * x for x in row] for row in comp] for comp in N.S]
    info = {"twist": str(w), "coefficient_field": Lp.to_json(),
            "galois_stable": M.ring.d % b == 0}
    return Isocrystal(N.ring, comps), info


# ---------------------------------------------------------------------------
# Hom spaces
# ---------------------------------------------------------------------------

@dataclass
class HomSpace:
    dim_L: int
    basis: list        # morphisms as component lists of n_M x n_N matrices
    degree_L: int      # [L : Q_p]
    coords: list       # L-coordinates of each basis morphism (unknown order of hom_space)

    @property
    def dim_Qp(self):
        return self.dim_L * self.degree_L


def hom_tolerance(ring):
    return ring.precision // 2


def hom_space(M, N, tol=None):
    """Morphisms A (row convention) with S_M A = sigma(A) S_N."""
    M.same_ring(N)
    ring = M.ring
    K, L = ring.K, ring.L
    r = ring.r
    nM, nN = M.rank, N.rank
    tol = hom_tolerance(ring) if tol is None else tol
    # reduce to tau(X) = Sp X Tp on factor 0
    Sp = la.identity(nM, K)
    Tp = la.identity(nN, K)
    Tinv = [la.inverse(T) for T in N.S]
    for i in range(r):
        Sp = la.matmul(M.S[i], Sp)
        Tp = la.matmul(Tp, Tinv[i])
    s = ring.tau_power
    f = K.m // L.m
    gpow = [K.gen() ** k for k in range(f)]
    unknowns = [(k, i, j) for k in range(f) for i in range(nM) for j in range(nN)]
    columns = []
    for (k, i, j) in unknowns:
        X = la.zeros(nM, nN, K)
        X[i][j] = gpow[k]
        image = la.matsub(la.entrywise(X, lambda x: x.frobenius(s)), la.matmul(la.matmul(Sp, X), Tp))
        col = []
        for row in image:
            for y in row:
                col.extend(unram_coords(y, L) if f > 1 else [project(y, L)])
        columns.append(col)
    system = la.transpose(columns)
    kernel = la.right_kernel(system, tol)
    basis = []
    for vec in kernel:
        X = la.zeros(nM, nN, K)
        for (k, i, j), c in zip(unknowns, vec):
            if not c.is_zero():
                X[i][j] = X[i][j] + embed(c, K) * gpow[k]
        comps = [X]
        for i in range(r - 1):
            comps.append(la.matmul(la.matmul(M.S[i], comps[-1]), Tinv[i]))
        basis.append(comps)
    return HomSpace(len(kernel), basis, L.degree, kernel)


def is_morphism(A, M, N):
    sA = M.ring.sigma(A)
    return all(la.matrices_equal(la.matmul(M.S[k], A[k]), la.matmul(sA[k], N.S[k]))
               for k in range(M.ring.r))
