"""Norms, the unramified norm criterion, and a constructive Hilbert 90."""
from math import gcd

from ..errors import NormNotOne, NoWitness, NotSubfield, PrecisionZero
from .embed import embed, is_subfield, project
from .local import LocalField


def unramified_extension(K, f):
    """The unramified extension of K of degree f (same Eisenstein part)."""
    return LocalField(K.p, K.m * f, K.eisenstein, K.precision)


def _conjugate_product(x, K):
    L = x.field
    acc = x
    for i in range(1, L.m // K.m):
        acc = acc * x.frobenius(i * K.m)
    return acc


def _ramified_coords(y, M):
    """Coordinates of y in L over M in the basis 1, tau, ..., tau^(c-1).

    Works when M is L's unramified part (tau = t) or both are radical with
    tau^c = t_M.
    """
    L = y.field
    c = L.e // M.e
    if y.unit is None:
        return [M.zero() for _ in range(c)]
    m = L.m
    coords = []
    for r in range(c):
        vec = [0] * M.degree
        for q in range(M.e):
            j = c * q + r
            vec[q * m:(q + 1) * m] = y.unit[j * m:(j + 1) * m]
        coords.append(M.from_vector(vec, y.shift, y.rel))
    return coords


def _ramified_norm(x, M):
    from ..linalg import det
    L = x.field
    c = L.e // M.e
    tau = L.uniformizer()
    rows = []
    z = x
    for _ in range(c):
        rows.append(_ramified_coords(z, M))
        z = z * tau
    return det(rows)


def norm(x, K):
    """Nm_{L/K}(x) for a supported subfield K of x's field L."""
    L = x.field
    if K == L:
        return x
    if not is_subfield(K, L):
        raise NotSubfield(f"{K} is not a supported subfield of {L}")
    if x.is_exact_zero():
        return K.zero()
    if K.eisenstein == L.eisenstein:
        return project(_conjugate_product(x, K), K)
    # ramified step down to M = Q_{p^{m_L}} with K's ramification, then unramified
    M = LocalField(L.p, L.m, K.eisenstein, L.precision)
    if K.eisenstein is not None and L.radical_degree is None:
        raise NotSubfield(f"cannot take norms from {L} to {K}")
    y = _ramified_norm(x, M)
    return norm(y, K)


def normalized_valuation(x):
    return x.normalized_valuation()


def trace(x, K):
    L = x.field
    acc = x
    for i in range(1, L.m // K.m):
        acc = acc + x.frobenius(i * K.m)
    return project(acc, K)


def _trace_one_element(Lp, K):
    """c in O_{L'} with Tr_{L'/K}(c) = 1 (L'/K unramified)."""
    f = Lp.m // K.m
    if f % K.p:
        return Lp(1) / f
    for i in range(1, Lp.m):
        g = Lp.gen() ** i
        tr = trace(g, K)
        if not tr.is_zero() and tr.valuation() == 0:
            return g / embed(tr, Lp)
    raise NoWitness("no trace-one element found")  # pragma: no cover


def is_norm(x, f):
    """Decide whether x is a norm from the unramified extension of degree f.

    Returns (True, witness) or (False, None); the witness y lies in the degree-f
    extension and satisfies Nm(y) = x at precision.
    """
    if x.is_zero():
        raise PrecisionZero("norm membership of an element that is zero at precision")
    K = x.field
    vK = x.normalized_valuation()
    if vK % f:
        return False, None
    if f == 1:
        return True, x
    Lp = unramified_extension(K, f)
    pi = K.uniformizer()
    u = x / pi ** vK
    w = _unit_norm_preimage(u, Lp)
    witness = embed(pi, Lp) ** (vK // f) * w
    return True, witness


def _unit_norm_preimage(u, Lp):
    K = u.field
    kL = Lp.residue_field()
    Q = K.p ** K.m
    exponent = (kL.order - 1) // (Q - 1)
    ubar = embed(u, Lp).residue()
    zeta = kL.primitive_element()
    k = kL.discrete_log(ubar, kL.pow(zeta, exponent))
    w = Lp.from_vector(list(kL.pow(zeta, k)) + [0] * (Lp.degree - Lp.m), 0, Lp.precision)
    c = _trace_one_element(Lp, K)
    for _ in range(2 * Lp.precision.bit_length() + 6):
        ratio = u / norm(w, K)
        z = ratio - 1
        if z.is_zero():
            return w
        w = w * (1 + embed(z, Lp) * c)
    raise NoWitness("norm preimage iteration did not converge")


def is_norm_algebra(x, d):
    """Norm membership for K -> Q_q (x) K with q = p^d.

    The algebra splits as copies of the unramified extension of K of degree
    d / gcd(d, m_K), so this is is_norm with that degree.
    """
    K = x.field
    return is_norm(x, d // gcd(d, K.m))


def _hilbert90_candidates(L):
    g = L.gen()
    yield L.one()
    for i in range(1, L.m):
        yield g ** i
    for i in range(1, L.m):
        yield 1 + g ** i


def hilbert90_solve(lam, K):
    """a with a / sigma_K(a) = lam, given Nm_{L/K}(lam) = 1 (L/K unramified).

    Poincare series b = sum_i lam^(i) sigma_K^i(c) over the candidate sequence
    1, g, g^2, ..., 1+g, 1+g^2, ...; the first unit b is returned.
    """
    L = lam.field
    if K.eisenstein != L.eisenstein or L.m % K.m:
        raise NotSubfield(f"{L} is not an unramified extension of {K}")
    n = L.m // K.m
    if norm(lam, K) != 1:
        raise NormNotOne("norm of lambda is not 1 at precision")
    if n == 1:
        return L.one()
    partial = [L.one()]
    for i in range(1, n):
        partial.append(partial[-1] * lam.frobenius((i - 1) * K.m))
    for c in _hilbert90_candidates(L):
        b = L.zero()
        for i in range(n):
            b = b + partial[i] * c.frobenius(i * K.m)
        if not b.is_zero() and b.valuation() == 0:
            return b
    raise NoWitness(f"no Hilbert 90 candidate gave a unit at precision {L.precision}")
