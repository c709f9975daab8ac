"""Local fields Q_{p^m}(t) and their elements at finite relative precision.

A field is the unramified extension of Q_p of degree m, generated by a root
``g`` of the canonical lift of the least irreducible polynomial of degree m
over F_p, optionally followed by a totally ramified step ``t`` given by an
Eisenstein polynomial with integer coefficients.

An element is stored as ``p**shift * u`` where ``u`` is an integral vector in
the basis ``g^i t^j`` (flat index ``j*m + i``), known modulo ``p**rel`` and not
divisible by p.  Zero is stored with its absolute precision (``shift``), or
with ``shift=None`` for an exact zero.  Precision is tracked honestly: every
digit the element claims to know is correct, so "zero at precision" is an
exact test.
"""
from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from functools import lru_cache
import os

from ..errors import NonPrime, NotEisenstein, PrecisionZero
from .finite import conway_free_polynomial, is_prime, residue_field

DEFAULT_PRECISION = 32
GUARD_DIGITS = 6


def default_precision():
    value = os.environ.get("FROBKIT_PRECISION")
    return int(value) if value else DEFAULT_PRECISION


def vp_int(n, p):
    if n == 0:
        raise ValueError("valuation of 0")
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


@dataclass(frozen=True)
class LocalField:
    p: int
    m: int
    eisenstein: tuple = None
    precision: int = dc_field(default=DEFAULT_PRECISION, compare=False)

    # -- structure -------------------------------------------------------
    @property
    def e(self):
        return 1 if self.eisenstein is None else len(self.eisenstein) - 1

    @property
    def degree(self):
        return self.m * self.e

    @property
    def modulus(self):
        return conway_free_polynomial(self.p, self.m)

    @property
    def is_unramified(self):
        return self.eisenstein is None

    @property
    def radical_degree(self):
        """b when the Eisenstein polynomial is x^b - p, else None."""
        E = self.eisenstein
        if E is None:
            return 1
        if E[0] == -self.p and all(c == 0 for c in E[1:-1]):
            return self.e
        return None

    def unramified_part(self):
        return LocalField(self.p, self.m, None, self.precision)

    def with_precision(self, n):
        return LocalField(self.p, self.m, self.eisenstein, n)

    def with_unram_degree(self, m):
        return LocalField(self.p, m, self.eisenstein, self.precision)

    def residue_field(self):
        return residue_field(self.p, self.m)

    def __repr__(self):
        name = f"Q_{self.p}" if self.m == 1 else f"Q_{{{self.p}^{self.m}}}"
        if self.eisenstein is not None:
            b = self.radical_degree
            name += f"({self.p}^(1/{b}))" if b else f"(t: {list(self.eisenstein)})"
        return name

    # -- constructors ----------------------------------------------------
    def zero(self):
        return PadicElement(self, None, None, 0)

    def one(self):
        return self(1)

    def __call__(self, value):
        if isinstance(value, PadicElement):
            if value.field != self:
                raise ValueError(f"element of {value.field} is not in {self}")
            return value
        if isinstance(value, int):
            return self._from_fraction(value, 1)
        if isinstance(value, Fraction):
            return self._from_fraction(value.numerator, value.denominator)
        raise TypeError(f"cannot build a p-adic element from {type(value).__name__}")

    def _from_fraction(self, num, den):
        if num == 0:
            return self.zero()
        p, N = self.p, self.precision
        v = vp_int(num, p) - vp_int(den, p)
        num //= p ** vp_int(num, p)
        den //= p ** vp_int(den, p)
        mod = p ** N
        unit = num * pow(den, -1, mod) % mod
        vec = [0] * self.degree
        vec[0] = unit
        return PadicElement(self, v, tuple(vec), N)

    def gen(self):
        """The unramified generator g (0 when m == 1)."""
        if self.m == 1:
            return self.zero()
        vec = [0] * self.degree
        vec[1] = 1
        return PadicElement(self, 0, tuple(vec), self.precision)

    def uniformizer(self):
        if self.e == 1:
            return self(self.p)
        vec = [0] * self.degree
        vec[self.m] = 1
        return PadicElement(self, 0, tuple(vec), self.precision)

    def from_vector(self, vec, shift=0, rel=None):
        rel = self.precision if rel is None else rel
        return _normalized(self, shift, list(vec), rel)

    def monomial(self, i, j=0):
        """g^i t^j (i < m, j < e)."""
        vec = [0] * self.degree
        vec[j * self.m + i] = 1
        return PadicElement(self, 0, tuple(vec), self.precision)

    # -- serialization ---------------------------------------------------
    def to_json(self):
        out = {"p": self.p, "unramified_degree": self.m}
        if self.eisenstein is not None:
            out["eisenstein"] = list(self.eisenstein)
        out["precision"] = self.precision
        return out

    @classmethod
    def from_json(cls, data, precision=None):
        return make_field(data["p"], data.get("unramified_degree", 1), data.get("eisenstein"),
                          precision if precision is not None else data.get("precision", default_precision()))


def make_field(p, m=1, eisenstein=None, N=None):
    """Canonical field description; raises NonPrime / NotEisenstein on bad input."""
    N = default_precision() if N is None else N
    if not isinstance(p, int) or not is_prime(p):
        raise NonPrime(f"{p} is not prime")
    if m < 1:
        raise ValueError("unramified degree must be >= 1")
    if N < 1:
        raise ValueError("precision must be >= 1")
    if eisenstein is not None:
        E = tuple(int(c) for c in eisenstein)
        if len(E) < 3 or E[-1] != 1:
            raise NotEisenstein("Eisenstein polynomial must be monic of degree >= 2")
        if E[0] == 0 or vp_int(E[0], p) != 1 or any(c % p for c in E[1:-1]):
            raise NotEisenstein(f"{list(E)} is not Eisenstein at {p}")
        eisenstein = E
    return LocalField(p, m, eisenstein, N)


def radical_field(p, m, b, N=None):
    """Q_{p^m}(p^(1/b)); b == 1 gives the unramified field."""
    if b == 1:
        return make_field(p, m, None, N)
    return make_field(p, m, (-p,) + (0,) * (b - 1) + (1,), N)


# ---------------------------------------------------------------------------
# vector arithmetic in O = Z_p[g, t]
# ---------------------------------------------------------------------------

def _mul_vec(F, a, b, mod):
    m, e = F.m, F.e
    rows = [[0] * (2 * m - 1) for _ in range(2 * e - 1)]
    arows = [a[j * m:(j + 1) * m] for j in range(e)]
    brows = [b[j * m:(j + 1) * m] for j in range(e)]
    for j1, r1 in enumerate(arows):
        if not any(r1):
            continue
        for j2, r2 in enumerate(brows):
            if not any(r2):
                continue
            out = rows[j1 + j2]
            for i1, x in enumerate(r1):
                if x:
                    for i2, y in enumerate(r2):
                        if y:
                            out[i1 + i2] += x * y
    f = F.modulus
    for row in rows:
        for k in range(2 * m - 2, m - 1, -1):
            c = row[k]
            if c:
                row[k] = 0
                base = k - m
                for i in range(m):
                    if f[i]:
                        row[base + i] -= c * f[i]
    if e > 1:
        E = F.eisenstein
        for j in range(2 * e - 2, e - 1, -1):
            row = rows[j]
            if not any(row):
                continue
            for jj in range(e):
                if E[jj]:
                    target = rows[j - e + jj]
                    c = E[jj]
                    for i in range(m):
                        target[i] -= c * row[i]
    return [rows[j][i] % mod for j in range(e) for i in range(m)]


def _gmul(F, a, b, mod):
    """Product of two polynomials in g alone (length-m vectors)."""
    m = F.m
    out = [0] * (2 * m - 1)
    for i1, x in enumerate(a):
        if x:
            for i2, y in enumerate(b):
                out[i1 + i2] += x * y
    f = F.modulus
    for k in range(2 * m - 2, m - 1, -1):
        c = out[k]
        if c:
            out[k] = 0
            for i in range(m):
                out[k - m + i] -= c * f[i]
    return [c % mod for c in out[:m]]


def _tval(F, vec):
    """e * valuation of a nonzero integral vector."""
    p, m, e = F.p, F.m, F.e
    best = None
    for j in range(e):
        row = vec[j * m:(j + 1) * m]
        for c in row:
            if c:
                v = e * vp_int(c, p) + j
                if best is None or v < best:
                    best = v
    return best


def _normalized(F, shift, vec, rel):
    p = F.p
    if rel <= 0:
        return PadicElement(F, None, None, 0) if shift is None else PadicElement(F, shift + rel, None, 0)
    mod = p ** rel
    vec = [c % mod for c in vec]
    if not any(vec):
        return PadicElement(F, shift + rel, None, 0)
    while all(c % p == 0 for c in vec):
        vec = [c // p for c in vec]
        shift += 1
        rel -= 1
    return PadicElement(F, shift, tuple(vec), rel)


@lru_cache(maxsize=None)
def _sigma_gen(p, m, k, W):
    """sigma^k(g) as a length-m integer vector mod p^W (Hensel lift of g^(p^k))."""
    k %= m
    U = LocalField(p, m, None, W)
    if m == 1:
        return (0,)
    if k == 0:
        return tuple([0, 1] + [0] * (m - 2))
    if k > 1:
        prev = U.from_vector(_sigma_gen(p, m, k - 1, W), 0, W)
        return tuple(_pad(prev.frobenius(1), W))
    f = U.modulus
    k_res = residue_field(p, m)
    g_res = k_res.normalize([0, 1])
    h0 = k_res.pow(g_res, p)
    h = U.from_vector(list(h0), 0, W)
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
    return tuple(_pad(h, W))


def _pad(x, W):
    """Integer vector (mod p^W) of an integral element, j = 0 row only."""
    F = x.field
    if x.unit is None:
        return [0] * F.m
    scale = F.p ** x.shift
    return [c * scale % F.p ** W for c in x.unit[:F.m]]


class PadicElement:
    __slots__ = ("field", "shift", "unit", "rel")
    __hash__ = None

    def __init__(self, field, shift, unit, rel):
        self.field = field
        self.shift = shift
        self.unit = unit
        self.rel = rel

    # -- predicates ------------------------------------------------------
    @property
    def zero_flag(self):
        return self.unit is None

    def is_zero(self):
        return self.unit is None

    def is_exact_zero(self):
        return self.unit is None and self.shift is None

    def valuation(self):
        """Valuation normalized by v(p) = 1; a Fraction with denominator dividing e."""
        if self.unit is None:
            raise PrecisionZero("valuation of an element that is zero at precision")
        return self.shift + Fraction(_tval(self.field, self.unit), self.field.e)

    def normalized_valuation(self):
        """Valuation with v(uniformizer) = 1 (an int)."""
        return int(self.valuation() * self.field.e)

    def absolute_precision(self):
        if self.unit is None:
            return float("inf") if self.shift is None else self.shift
        return self.shift + self.rel

    def is_unit(self):
        return self.unit is not None and self.valuation() == 0

    def is_integral(self):
        if self.unit is None:
            return self.shift is None or self.shift >= 0
        return self.valuation() >= 0

    # -- arithmetic ------------------------------------------------------
    def _coerce(self, other):
        if isinstance(other, PadicElement):
            if other.field != self.field:
                raise ValueError(f"field mismatch: {self.field} vs {other.field}")
            return other
        return self.field(other)

    def __add__(self, other):
        other = self._coerce(other)
        if self.is_exact_zero():
            return other
        if other.is_exact_zero():
            return self
        F = self.field
        absprec = min(self.absolute_precision(), other.absolute_precision())
        shifts = [x.shift for x in (self, other) if x.unit is not None]
        if not shifts:
            return PadicElement(F, absprec, None, 0)
        k0 = min(shifts)
        if absprec <= k0:
            return PadicElement(F, absprec, None, 0)
        rel = absprec - k0
        mod = F.p ** rel
        vec = [0] * F.degree
        for x in (self, other):
            if x.unit is not None:
                s = F.p ** (x.shift - k0)
                vec = [(a + s * b) % mod for a, b in zip(vec, x.unit)]
        return _normalized(F, k0, vec, rel)

    __radd__ = __add__

    def __neg__(self):
        if self.unit is None:
            return self
        mod = self.field.p ** self.rel
        return PadicElement(self.field, self.shift, tuple((-c) % mod for c in self.unit), self.rel)

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        other = self._coerce(other)
        F = self.field
        if self.is_exact_zero() or other.is_exact_zero():
            return F.zero()
        if self.unit is None or other.unit is None:
            if self.unit is None and other.unit is None:
                return PadicElement(F, self.shift + other.shift, None, 0)
            z, x = (self, other) if self.unit is None else (other, self)
            return PadicElement(F, z.shift + int(x.valuation() // 1), None, 0)
        rel = min(self.rel, other.rel)
        vec = _mul_vec(F, self.unit, other.unit, F.p ** rel)
        return _normalized(F, self.shift + other.shift, vec, rel)

    __rmul__ = __mul__

    def inverse(self):
        if self.unit is None:
            raise PrecisionZero("inverse of an element that is zero at precision")
        F = self.field
        p, m, e = F.p, F.m, F.e
        j0 = _tval(F, self.unit)
        rel = self.rel
        if j0 == 0:
            w = _unit_inverse(F, self.unit, rel)
            return PadicElement(F, -self.shift, tuple(w), rel)
        # u = t^j0 * unit: multiply by t^(e - j0) to reach valuation exactly 1
        tpow = [0] * F.degree
        tpow[(e - j0) * m] = 1
        mod = p ** rel
        z = _mul_vec(F, self.unit, tpow, mod)
        z = [c // p for c in z]
        rel -= 1
        if rel <= 0:
            raise PrecisionZero("not enough precision to invert")
        w = _unit_inverse(F, z, rel)
        w = _mul_vec(F, w, tpow, p ** rel)
        return _normalized(F, -self.shift - 1, w, rel)

    def __truediv__(self, other):
        other = self._coerce(other)
        return self * other.inverse()

    def __rtruediv__(self, other):
        return self._coerce(other) * self.inverse()

    def __pow__(self, n):
        if n < 0:
            return self.inverse() ** (-n)
        result = self.field.one()
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def __eq__(self, other):
        try:
            other = self._coerce(other)
        except (TypeError, ValueError):
            return NotImplemented
        return (self - other).is_zero()

    def __ne__(self, other):
        result = self.__eq__(other)
        return result if result is NotImplemented else not result

    # -- Galois ------------------------------------------------------------
    def frobenius(self, k=1):
        """sigma^k: the Frobenius lift on the unramified part, fixing t."""
        F = self.field
        k %= F.m
        if self.unit is None or k == 0:
            return self
        p, m, e = F.p, F.m, F.e
        mod = p ** self.rel
        s = [c % mod for c in _sigma_gen(p, m, k, max(self.rel, F.precision) + GUARD_DIGITS)]
        out = []
        for j in range(e):
            row = self.unit[j * m:(j + 1) * m]
            acc = [0] * m
            for c in reversed(row):
                acc = _gmul(F, acc, s, mod)
                acc[0] = (acc[0] + c) % mod
            out.extend(acc)
        return PadicElement(F, self.shift, tuple(out), self.rel)

    def residue(self):
        """Image in the residue field (element must be integral)."""
        F = self.field
        k = F.residue_field()
        if self.unit is None:
            if self.shift is not None and self.shift <= 0:
                raise PrecisionZero("residue unknown at this precision")
            return k.zero()
        v = self.valuation()
        if v < 0:
            raise ValueError("residue of a non-integral element")
        if v > 0:
            return k.zero()
        return k.normalize(list(self.unit[:F.m]))

    def truncate(self, rel):
        if self.unit is None or rel >= self.rel:
            return self
        return _normalized(self.field, self.shift, list(self.unit), rel)

    def __repr__(self):
        if self.unit is None:
            return "0" if self.shift is None else f"O(p^{self.shift})"
        from ..expr import element_to_string
        return element_to_string(self)


def _unit_inverse(F, u, rel):
    p, m = F.p, F.m
    k = F.residue_field()
    r = k.inverse(k.normalize(list(u[:m])))
    w = list(r) + [0] * (F.degree - m)
    mod = p ** rel
    prec = 1
    while prec < rel * F.e:
        uw = _mul_vec(F, u, w, mod)
        corr = [(-c) % mod for c in uw]
        corr[0] = (corr[0] + 2) % mod
        w = _mul_vec(F, w, corr, mod)
        prec *= 2
    return w
