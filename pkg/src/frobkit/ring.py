"""The coefficient ring Q_q (x) L as a product of r = gcd(d, m_L) copies of K'.

K' is the unramified extension of Q_p of degree lcm(d, m_L) with L's Eisenstein
polynomial.  Factor i is the map phi_i(a (x) b) = sigma^i(a) * b.  Because
phi_i(sigma(a) (x) b) = phi_{i+1}(a (x) b), the semilinear action sigma (x) 1
moves component i+1 to slot i; at the wrap it applies tau = sigma^(beta*m),
where r = alpha*d + beta*m, the element of Gal(K'/Q_p) that restricts to
sigma^r on Q_q and to the identity on L.

Components are stored as plain lists so that the same maps work on scalars,
vectors and matrices over K' (see :func:`deep_map`).
"""
from dataclasses import dataclass
from math import gcd

from .errors import InvarianceFailure, Inconsistent, NoWitness, NormNotOne, RingMismatch
from . import linalg as la
from .padic.embed import embed, project, is_subfield
from .padic.local import LocalField


def deep_map(obj, fn):
    if isinstance(obj, list):
        return [deep_map(o, fn) for o in obj]
    return fn(obj)


def deep_zip(a, b, fn):
    if isinstance(a, list):
        return [deep_zip(x, y, fn) for x, y in zip(a, b)]
    return fn(a, b)


def _lcm(a, b):
    return a * b // gcd(a, b)


@dataclass(frozen=True)
class CoeffRing:
    p: int
    d: int
    L: LocalField

    @property
    def r(self):
        return gcd(self.d, self.L.m)

    @property
    def factor_count(self):
        return self.r

    @property
    def K(self):
        """The factor field K'."""
        return LocalField(self.p, _lcm(self.d, self.L.m), self.L.eisenstein, self.L.precision)

    factor_field = K

    @property
    def Qq(self):
        return LocalField(self.p, self.d, None, self.L.precision)

    @property
    def precision(self):
        return self.L.precision

    @property
    def tau_power(self):
        """Exponent s with tau = sigma^s (0 <= s < [K':Q_p]_unram)."""
        d, m, r = self.d, self.L.m, self.r
        order = _lcm(d, m)
        for beta in range(d // r):
            if (beta * m - r) % d == 0:
                return (beta * m) % order
        raise AssertionError("Bezout failed")  # pragma: no cover

    def with_precision(self, n):
        return CoeffRing(self.p, self.d, self.L.with_precision(n))

    def __repr__(self):
        return f"Q_{{{self.p}^{self.d}}} (x) {self.L}"

    def describe(self):
        K = self.K
        return {"p": self.p, "d": self.d, "coefficient_field": self.L.to_json(),
                "factor_count": self.r, "factor_field": K.to_json(),
                "wrap_frobenius_power": self.tau_power}

    # -- semilinear actions on component lists -----------------------------
    def sigma(self, comps, times=1):
        """(sigma (x) 1)^times on a component list."""
        times %= self.d
        for _ in range(times):
            s = self.tau_power
            comps = list(comps[1:]) + [deep_map(comps[0], lambda x: x.frobenius(s))]
        return comps

    def phi_shift(self, k):
        """(i, u) with 0 <= i < r and k = i + u*m (mod d)."""
        r, m, d = self.r, self.L.m, self.d
        i = k % r
        for u in range(d // r):
            if (i + u * m - k) % d == 0:
                return i, u
        raise AssertionError("no shift found")  # pragma: no cover

    def component_phi(self, comps, k):
        """phi_k(x) for any integer k, computed from x's r components."""
        i, u = self.phi_shift(k)
        s = u * self.L.m
        return deep_map(comps[i], lambda x: x.frobenius(s))

    def galois_twist(self, comps, s):
        """(1 (x) sigma^s) on components; sigma^s must preserve L (always true here)."""
        return [deep_map(self.component_phi(comps, i - s), lambda x: x.frobenius(s))
                for i in range(self.r)]

    # -- scalars -------------------------------------------------------------
    def from_L(self, b):
        x = embed(b, self.K)
        return CoeffRingElement(self, [x] * self.r)

    def from_Qq(self, a):
        x = embed(a, self.K)
        return CoeffRingElement(self, [x.frobenius(i) for i in range(self.r)])

    def scalar(self, value):
        return self.from_L(self.L(value))

    def one(self):
        return self.scalar(1)

    def zero(self):
        return self.scalar(0)

    def element(self, comps):
        comps = list(comps)
        if len(comps) != self.r:
            raise ValueError(f"expected {self.r} components, got {len(comps)}")
        return CoeffRingElement(self, [self.K(c) if not hasattr(c, "field") else c for c in comps])

    def project_L(self, comps, what="element"):
        """Certify sigma (x) 1 invariance of a component list and return its L-value."""
        shifted = self.sigma(comps)
        flat_a, flat_b = _flatten(comps), _flatten(shifted)
        if not all(x == y for x, y in zip(flat_a, flat_b)):
            raise InvarianceFailure(f"{what} is not sigma (x) 1 invariant at precision")
        try:
            return deep_map(comps[0], lambda x: project(x, self.L))
        except Exception as exc:
            raise InvarianceFailure(f"{what} does not lie in the coefficient field: {exc}") from exc

    def algebra_norm(self, x):
        """Norm of Q_q (x) L over L: product of the d iterates of sigma (x) 1."""
        acc = x
        cur = x
        for _ in range(1, self.d):
            cur = cur.sigma()
            acc = acc * cur
        return acc

    def candidates(self, rng=None):
        """Units used by Poincare-series constructions.

        The enumeration is deterministic; with a random.Random a few random
        small-digit elements are tried first.
        """
        K = self.K
        g = K.gen()
        mons = [K.one()] + [g ** i for i in range(1, K.m)]
        if rng is not None:
            for _ in range(8):
                comps = [sum((K(rng.randrange(self.p)) * mon for mon in mons), K.zero())
                         for _ in range(self.r)]
                yield CoeffRingElement(self, comps)
        for mon in mons:
            yield CoeffRingElement(self, [mon] * self.r)
        for j in range(self.r):
            for mon in mons:
                yield CoeffRingElement(self, [mon if k == j else K.zero() for k in range(self.r)])
        for i in range(1, K.m):
            yield CoeffRingElement(self, [K.one() + g ** i] * self.r)

    def hilbert90(self, lam, rng=None):
        """a with a = lam * (sigma (x) 1)(a), given algebra norm 1.

        Solutions form a free rank-one L-module, so each Poincare sum is either
        a unit or zero; the first unit is returned.
        """
        norm = self.algebra_norm(lam)
        if not norm == self.one():
            raise NormNotOne("algebra norm is not 1 at precision")
        partial = [self.one()]
        for i in range(1, self.d):
            partial.append(partial[-1] * lam.sigma(i - 1))
        for c in self.candidates(rng):
            b = self.zero()
            ci = c
            for i in range(self.d):
                b = b + partial[i] * ci
                ci = ci.sigma()
            if b.is_unit():
                return b
        raise NoWitness(f"no Hilbert 90 candidate gave a unit at precision {self.precision}")


def _flatten(obj):
    if isinstance(obj, list):
        out = []
        for o in obj:
            out.extend(_flatten(o))
        return out
    return [obj]


class CoeffRingElement:
    __slots__ = ("ring", "comps")
    __hash__ = None

    def __init__(self, ring, comps):
        self.ring = ring
        self.comps = list(comps)

    def _coerce(self, other):
        if isinstance(other, CoeffRingElement):
            if other.ring != self.ring:
                raise RingMismatch("elements of different coefficient rings")
            return other
        return self.ring.scalar(other)

    def __add__(self, other):
        other = self._coerce(other)
        return CoeffRingElement(self.ring, [a + b for a, b in zip(self.comps, other.comps)])

    __radd__ = __add__

    def __sub__(self, other):
        other = self._coerce(other)
        return CoeffRingElement(self.ring, [a - b for a, b in zip(self.comps, other.comps)])

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __neg__(self):
        return CoeffRingElement(self.ring, [-a for a in self.comps])

    def __mul__(self, other):
        other = self._coerce(other)
        return CoeffRingElement(self.ring, [a * b for a, b in zip(self.comps, other.comps)])

    __rmul__ = __mul__

    def is_unit(self):
        return all(not a.is_zero() for a in self.comps)

    def inverse(self):
        return CoeffRingElement(self.ring, [a.inverse() for a in self.comps])

    def __truediv__(self, other):
        return self * self._coerce(other).inverse()

    def __pow__(self, n):
        return CoeffRingElement(self.ring, [a ** n for a in self.comps])

    def sigma(self, times=1):
        return CoeffRingElement(self.ring, self.ring.sigma(self.comps, times))

    def __eq__(self, other):
        try:
            other = self._coerce(other)
        except (TypeError, ValueError, RingMismatch):
            return NotImplemented
        return all(a == b for a, b in zip(self.comps, other.comps))

    def project_L(self):
        return self.ring.project_L(self.comps)

    def to_json(self):
        from .expr import element_to_string
        return [element_to_string(a) for a in self.comps]

    def __repr__(self):
        return f"CoeffRingElement({self.to_json()})"


def build_ring(p, d, L):
    if L.p != p:
        raise ValueError("coefficient field has a different residue characteristic")
    if d < 1:
        raise ValueError("d must be >= 1")
    return CoeffRing(p, d, L)


# ---------------------------------------------------------------------------
# maps between rings
# ---------------------------------------------------------------------------

def ring_map_data(R1, R2):
    """(c, e0) describing Q_q (x) L -> Q_q' (x) L' with d | d', L in L'.

    epsilon = sigma^c o embed : K1' -> K2' is compatible with both embeddings of L,
    and epsilon(phi_j(x)) = phi'_{j+e0}(x).
    """
    if R1.p != R2.p or R2.d % R1.d or not is_subfield(R1.L, R2.L):
        raise RingMismatch(f"no ring map {R1} -> {R2}")
    K1, K2 = R1.K, R2.K
    if not is_subfield(K1, K2):
        raise RingMismatch(f"factor field {K1} does not embed in {K2}")
    order2 = K2.m
    gL = R1.L.gen() if R1.L.m > 1 else None
    gq = R1.Qq.gen() if R1.d > 1 else None
    c_found = None
    for c in range(order2):
        if gL is None or embed(embed(gL, K1), K2).frobenius(c) == embed(embed(gL, R2.L), K2):
            c_found = c
            break
    if c_found is None:
        raise RingMismatch("no compatible embedding of factor fields")  # pragma: no cover
    e0 = 0
    if gq is not None:
        lhs = embed(embed(gq, K1), K2).frobenius(c_found)
        target = embed(gq, R2.Qq)
        for e in range(order2):
            if lhs == embed(target, K2).frobenius(e):
                e0 = e
                break
        else:
            raise RingMismatch("Q_q generator has no matching conjugate")  # pragma: no cover
    return c_found, e0


def ring_map(comps, R1, R2, data=None):
    """Image of a component list under Q_q (x) L -> Q_q' (x) L'."""
    c, e0 = data or ring_map_data(R1, R2)
    K2 = R2.K

    def eps(x):
        return embed(x, K2).frobenius(c)

    # phi'_k(iota x) = epsilon(phi_{k - e0}(x)); phi' index k is taken mod d'
    return [deep_map(R1.component_phi(comps, k - e0), eps) for k in range(R2.r)]


# ---------------------------------------------------------------------------
# linear systems
# ---------------------------------------------------------------------------

def ring_linear_solve(A, b, tol=None):
    """Solve A x = b componentwise over the factor fields.

    A is a component list of matrices, b a component list of vectors.  Returns a
    dict with per-factor particular solutions and kernel bases; raises
    Inconsistent when a factor has no solution or the factors disagree on rank.
    """
    report = {"factors": [], "ranks": []}
    for k, (Ak, bk) in enumerate(zip(A, b)):
        rk = la.rank(Ak, tol)
        x = la.solve_right(Ak, bk, tol)
        kernel = la.right_kernel(Ak, tol)
        report["ranks"].append(rk)
        report["factors"].append({"solution": x, "kernel": kernel})
        if x is None:
            raise Inconsistent(f"factor {k} has no solution", report)
    if len(set(report["ranks"])) > 1:
        raise Inconsistent(f"factor ranks differ: {report['ranks']}", report)
    return report
