"""Galois twists, the two-cocycle of a choice of isomorphisms M -> gM, the
cyclic class invariant, and descent along an effective datum.

The step L/L0 is cyclic unramified of degree n; the generator g acts on L as
sigma^(m_L0).  Group elements are exponents 0..n-1.  In the row convention a
morphism c_h : M -> hM has matrix C_h with S C_h = sigma(C_h) h(S), and

    xi(g, h) = scalar of  C_g . g(C_h) . C_gh^{-1}

(first c_g, then the twist of c_h, then back along c_gh).
"""
from dataclasses import dataclass, field

from . import linalg as la
from .errors import (EndTooBig, NoWitness, NotADatum, NotIsomorphicToTwist, NotSubfield,
                     PrecisionLoss)
from .isocrystal import Isocrystal, hom_space, is_morphism, ring_preimage
from .padic.embed import embed, is_subfield, project
from .padic.norms import is_norm
from .ring import build_ring, ring_map_data


@dataclass(frozen=True)
class GaloisAction:
    L: object
    L0: object

    def __post_init__(self):
        if self.L.eisenstein != self.L0.eisenstein or self.L.m % self.L0.m or self.L.p != self.L0.p:
            raise NotSubfield(f"{self.L}/{self.L0} is not a cyclic unramified step")

    @property
    def n(self):
        return self.L.m // self.L0.m

    def power(self, i):
        """Frobenius exponent of g^i."""
        return (i % self.n) * self.L0.m

    def act(self, x, i):
        return x.frobenius(self.power(i))

    def act_comps(self, ring, comps, i):
        return ring.galois_twist(comps, self.power(i))

    def elements(self):
        return range(self.n)


def galois_twist(M, action, i=1):
    """The twisted object gM: S -> g(S)."""
    return Isocrystal(M.ring, action.act_comps(M.ring, M.S, i))


def _scalar_of(ring, X, what):
    """The L-scalar lam with X = lam * I (component list of matrices)."""
    n = len(X[0])
    lam = [comp[0][0] for comp in X]
    for comp, c in zip(X, lam):
        for i in range(n):
            for j in range(n):
                expected = c if i == j else 0
                if not comp[i][j] == expected:
                    raise PrecisionLoss(f"{what} is not a scalar at precision")
    return ring.project_L(lam, what)


def normalize_morphism(hs, idx=0):
    """Basis morphism of a hom space, scaled so its first coordinate of minimal
    valuation (in the L-coordinates of the solve) is a power of the uniformizer."""
    coords = hs.coords[idx]
    A = hs.basis[idx]
    best = None
    for c in coords:
        if not c.is_zero() and (best is None or c.valuation() < best.valuation()):
            best = c
    L = best.field
    pi = L.uniformizer()
    lam = pi ** best.normalized_valuation() / best
    return scale_morphism(A, lam)


def scale_morphism(A, lam):
    K = A[0][0][0].field
    c = embed(lam, K)
    return [[[c * x for x in row] for row in comp] for comp in A]


@dataclass
class Cocycle:
    action: GaloisAction
    values: dict                       # (i, j) -> element of L
    maps: dict = field(default_factory=dict)   # i -> C_(g^i), when attached to an object

    def __call__(self, i, j):
        n = self.action.n
        return self.values[(i % n, j % n)]

    def to_json(self):
        from .expr import element_to_string
        return {f"{i},{j}": element_to_string(v) for (i, j), v in sorted(self.values.items())}

    def __mul__(self, other):
        return Cocycle(self.action, {k: v * other.values[k] for k, v in self.values.items()})

    def inverse(self):
        return Cocycle(self.action, {k: v.inverse() for k, v in self.values.items()})


def cocycle_from_maps(M, action, maps):
    """xi table from a family {i: C_(g^i)} of morphisms M -> g^i M."""
    ring = M.ring
    n = action.n
    values = {}
    inv = {i: [la.inverse(c) for c in maps[i]] for i in range(n)}
    for i in range(n):
        for j in range(n):
            gC = action.act_comps(ring, maps[j], i)
            X = [la.matmul(la.matmul(maps[i][k], gC[k]), inv[(i + j) % n][k]) for k in range(ring.r)]
            values[(i, j)] = _scalar_of(ring, X, f"xi({i},{j})")
    return Cocycle(action, values, dict(maps))


def choose_isomorphisms(M, action):
    """Canonical c_(g^i): identity for i = 0, normalized hom basis otherwise."""
    end = hom_space(M, M)
    if end.dim_L > 1:
        raise EndTooBig(f"End(M) has dimension {end.dim_L} over L; the class would not be canonical")
    K = M.ring.K
    maps = {0: [la.identity(M.rank, K) for _ in range(M.ring.r)]}
    for i in range(1, action.n):
        hs = hom_space(M, galois_twist(M, action, i))
        if hs.dim_L == 0:
            raise NotIsomorphicToTwist(f"M is not isomorphic to its twist by g^{i}")
        if hs.dim_L > 1:
            raise EndTooBig(f"Hom(M, g^{i}M) has dimension {hs.dim_L}")
        maps[i] = normalize_morphism(hs)
    return maps


def compute_cocycle(M, action):
    return cocycle_from_maps(M, action, choose_isomorphisms(M, action))


def verify_cocycle(xi):
    """g1(xi(g2, g3)) xi(g1, g2 g3) == xi(g1 g2, g3) xi(g1, g2) for all triples."""
    act = xi.action
    n = act.n
    for a in range(n):
        for b in range(n):
            for c in range(n):
                lhs = act.act(xi(b, c), a) * xi(a, b + c)
                rhs = xi(a + b, c) * xi(a, b)
                if not lhs == rhs:
                    return False
    return True


@dataclass
class CyclicClass:
    a: object                 # element of L0
    trivial: bool
    witness: dict = None      # i -> alpha(g^i), with xi = d(alpha)

    def to_json(self):
        from .expr import element_to_string
        out = {"invariant": element_to_string(self.a), "trivial": self.trivial,
               "invariant_valuation": str(self.a.valuation())}
        if self.witness is not None:
            out["witness"] = {str(i): element_to_string(v) for i, v in sorted(self.witness.items())}
        return out


def cyclic_invariant(xi):
    """a = prod_i xi(g^i, g), an element of L0."""
    act = xi.action
    acc = act.L.one()
    for i in range(act.n):
        acc = acc * xi(i, 1)
    return project(acc, act.L0)


def cyclic_class(xi):
    """Invariant a, triviality verdict (a is a norm from L), and a witness alpha
    with xi(x, y) = alpha(x) x(alpha(y)) / alpha(xy) when trivial."""
    act = xi.action
    a = cyclic_invariant(xi)
    if a == 1:
        ok, beta = True, act.L.one()
    else:
        ok, beta = is_norm(a, act.n)
    if not ok:
        return CyclicClass(a, False)
    beta = embed(beta, act.L) if beta.field != act.L else beta
    # alpha(g^(k+1)) = alpha(g^k) g^k(beta) / xi(g^k, g); closes up since Nm(beta) = a
    alpha = {0: xi(0, 0)}
    for k in range(act.n - 1):
        alpha[k + 1] = alpha[k] * act.act(beta, k) / xi(k, 1)
    return CyclicClass(a, True, alpha)


def coboundary(action, alpha):
    """d(alpha)(x, y) = alpha(x) x(alpha(y)) / alpha(xy)."""
    n = action.n
    values = {}
    for i in range(n):
        for j in range(n):
            values[(i, j)] = alpha[i] * action.act(alpha[j], i) / alpha[(i + j) % n]
    return Cocycle(action, values)


def datum_from_witness(xi, alpha):
    """Rescale the maps behind xi so that the new cocycle is identically 1."""
    maps = {}
    for i, C in xi.maps.items():
        maps[i] = scale_morphism(C, alpha[i].inverse())
    return maps


# ---------------------------------------------------------------------------
# descent along an effective datum
# ---------------------------------------------------------------------------

@dataclass
class Descended:
    obj: Isocrystal          # over Q_q (x) L0
    certificate: list        # B over Q_q (x) L with sigma(B) S B^{-1} = induce(obj)


def _y_candidates(ring, n, rng=None):
    K = ring.K
    L = ring.L
    gens = [L.gen() ** i for i in range(L.m)] if L.m > 1 else [L.one()]
    if rng is not None:
        for _ in range(4):
            yield [[[embed(L(rng.randrange(-ring.p, ring.p + 1)), K) for _ in range(n)] for _ in range(n)]
                   for _ in range(ring.r)]
    for c in gens:
        ce = embed(c, K)
        yield [[[ce if i == j else K.zero() for j in range(n)] for i in range(n)] for _ in range(ring.r)]
    for c in gens:
        ce = embed(c, K)
        for a in range(n):
            for b in range(n):
                if a != b:
                    mats = []
                    for _ in range(ring.r):
                        Y = [[K.one() if i == j else K.zero() for j in range(n)] for i in range(n)]
                        Y[a][b] = ce
                        mats.append(Y)
                    yield mats


def check_datum(M, action, maps):
    for i in range(action.n):
        if not is_morphism(maps[i], M, galois_twist(M, action, i)):
            raise NotADatum(f"c_(g^{i}) is not a morphism M -> g^{i}M")
    xi = cocycle_from_maps(M, action, maps)
    bad = [k for k, v in xi.values.items() if not v == 1]
    if bad:
        raise NotADatum(f"cocycle is not identically 1 at {bad[:3]}")
    return xi


def descend_with_datum(M, action, maps, rng=None):
    """Object over Q_q (x) L0 whose induction is M, from a datum with xi = 1."""
    check_datum(M, action, maps)
    ring = M.ring
    n = M.rank
    invs = {i: [la.inverse(c) for c in maps[i]] for i in range(action.n)}
    R0 = build_ring(ring.p, ring.d, action.L0)
    data = ring_map_data(R0, ring)
    for Y in _y_candidates(ring, n, rng):
        B = None
        for h in range(action.n):
            hY = action.act_comps(ring, Y, h)
            term = [la.matmul(hY[k], invs[h][k]) for k in range(ring.r)]
            B = term if B is None else [la.matadd(a, b) for a, b in zip(B, term)]
        if any(la.det(b).is_zero() for b in B):
            continue
        sB = ring.sigma(B)
        Sp = [la.matmul(la.matmul(sB[k], M.S[k]), la.inverse(B[k])) for k in range(ring.r)]
        try:
            S0 = ring_preimage(Sp, R0, ring, data)
        except Exception:
            continue
        return Descended(Isocrystal(R0, S0), B)
    raise NoWitness("no candidate produced an invertible descent matrix")


def induced_matches(desc, M):
    """Certificate check: sigma(B) S B^{-1} equals the induction of the descended object."""
    from .isocrystal import induce
    ind = induce(desc.obj, M.L)
    ring = M.ring
    sB = ring.sigma(desc.certificate)
    Sp = [la.matmul(la.matmul(sB[k], M.S[k]), la.inverse(desc.certificate[k])) for k in range(ring.r)]
    return all(la.matrices_equal(a, b) for a, b in zip(Sp, ind.S))


def speiser_subfield_check(L, L0):
    return is_subfield(L0, L)


def dual_datum(maps):
    """Inverse-transpose maps, an isomorphism family for the dual object."""
    return {i: [la.transpose(la.inverse(c)) for c in C] for i, C in maps.items()}
