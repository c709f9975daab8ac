"""Embeddings between supported fields and projections back to subfields.

Supported inclusions K -> L:
  * K unramified, m_K | m_L (any L);
  * same Eisenstein polynomial, m_K | m_L;
  * both radical, K = Q_{p^a}(p^(1/b)), L = Q_{p^c}(p^(1/e)), a | c, b | e.
The image of g is the least (in residue order) root of K's defining polynomial
in L, Hensel lifted; t goes to t^(e/b) in the radical case.
"""
from functools import lru_cache

from ..errors import NotInSubfield, NotSubfield
from .finite import residue_field
from .local import GUARD_DIGITS, LocalField, PadicElement


def is_subfield(K, L):
    if K.p != L.p or L.m % K.m:
        return False
    if K.eisenstein is None or K.eisenstein == L.eisenstein:
        return True
    bk, bl = K.radical_degree, L.radical_degree
    return bk is not None and bl is not None and bl % bk == 0


def _check(K, L):
    if not is_subfield(K, L):
        raise NotSubfield(f"{K} is not a supported subfield of {L}")


@lru_cache(maxsize=None)
def _gen_root(p, m_src, m_dst, W):
    """Vector (length m_dst) of the chosen root of f_src in Q_{p^m_dst}, mod p^W."""
    U = LocalField(p, m_dst, None, W)
    if m_src == 1:
        return (0,) * m_dst
    if m_src == m_dst:
        return tuple([0, 1] + [0] * (m_dst - 2))
    f = LocalField(p, m_src, None, W).modulus
    k = residue_field(p, m_dst)
    r0 = k.roots_in(list(f), m_src)[0]
    h = U.from_vector(list(r0), 0, W)
    for _ in range(W.bit_length() + 3):
        fh = U.zero()
        dfh = U.zero()
        for c in reversed(f):
            fh = fh * h + c
        for i in range(len(f) - 1, 0, -1):
            dfh = dfh * h + i * f[i]
        if fh.is_zero():
            break
        h = h - fh / dfh
    return tuple(_int_vec(h, W))


def _gen_image(K, L, W):
    vec = _gen_root(K.p, K.m, L.m, W)
    return L.with_precision(W).from_vector(list(vec) + [0] * (L.degree - L.m), 0, W)


def _t_exponent(K, L):
    if K.e == 1:
        return None
    if K.eisenstein == L.eisenstein:
        return 1
    return L.radical_degree // K.radical_degree


def _basis_images(K, L, W):
    """Images (in L at precision W) of K's basis g^i t^j, ordered like K's vectors."""
    LW = L.with_precision(W)
    rho = _gen_image(K, L, W)
    gp = [LW.one()]
    for _ in range(1, K.m):
        gp.append(gp[-1] * rho)
    out = []
    tk = _t_exponent(K, L)
    tpow = LW.one()
    tau = LW.uniformizer() ** tk if tk else None
    for j in range(K.e):
        for i in range(K.m):
            out.append(gp[i] * tpow)
        if tau is not None:
            tpow = tpow * tau
    return out


def embed(x, L):
    K = x.field
    if K == L:
        return L.from_vector(x.unit, x.shift, x.rel) if x.unit else _zero_like(x, L)
    _check(K, L)
    if x.unit is None:
        return _zero_like(x, L)
    W = x.rel + GUARD_DIGITS
    imgs = _basis_images(K, L, W)
    LW = L.with_precision(W)
    acc = LW.zero()
    for c, b in zip(x.unit, imgs):
        if c:
            acc = acc + b * c
    return L.from_vector(_int_vec(acc, W), x.shift, x.rel)


def _zero_like(x, L):
    return PadicElement(L, x.shift, None, 0)


def _int_vec(y, W):
    F = y.field
    if y.unit is None:
        return [0] * F.degree
    s = F.p ** y.shift
    mod = F.p ** W
    return [c * s % mod for c in y.unit]


def project(y, K):
    """Preimage of y under embed(., L); raises NotInSubfield."""
    L = y.field
    if K == L:
        return y
    _check(K, L)
    if y.unit is None:
        return _zero_like(y, K)
    R = y.rel
    p = K.p
    mod = p ** R
    imgs = [_int_vec(b, R + GUARD_DIGITS) for b in _basis_images(K, L, R + GUARD_DIGITS)]
    target = [c % mod for c in y.unit]
    coeffs = _solve_unit_pivots(imgs, target, p, mod)
    return K.from_vector(coeffs, y.shift, R)


def _solve_unit_pivots(columns, target, p, mod):
    """Solve sum_k c_k columns[k] = target mod `mod`, columns spanning a saturated sublattice."""
    n = len(columns)
    rows = len(target)
    # augmented matrix: one row per coordinate
    A = [[columns[k][r] % mod for k in range(n)] + [target[r]] for r in range(rows)]
    pivots = []
    used = set()
    for k in range(n):
        piv = None
        for r in range(rows):
            if r not in used and A[r][k] % p:
                piv = r
                break
        if piv is None:
            raise NotInSubfield("basis images are not a saturated sublattice")
        used.add(piv)
        inv = pow(A[piv][k], -1, mod)
        A[piv] = [v * inv % mod for v in A[piv]]
        for r in range(rows):
            if r != piv and A[r][k]:
                c = A[r][k]
                A[r] = [(v - c * w) % mod for v, w in zip(A[r], A[piv])]
        pivots.append(piv)
    for r in range(rows):
        if r not in used and A[r][n] % mod:
            raise NotInSubfield("element does not lie in the subfield at this precision")
    return [A[pivots[k]][n] for k in range(n)]


def in_subfield(y, K):
    try:
        project(y, K)
        return True
    except NotInSubfield:
        return False
