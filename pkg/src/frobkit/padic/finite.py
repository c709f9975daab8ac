"""Arithmetic in F_p[x] and in the residue fields F_{p^m} = F_p[x]/(f).

Polynomials are lists of ints, lowest degree first, without trailing zeros
(the zero polynomial is ``[]``).
"""
from functools import lru_cache
from itertools import product


def is_prime(n):
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    k = 3
    while k * k <= n:
        if n % k == 0:
            return False
        k += 2
    return True


def prime_factors(n):
    out = []
    k = 2
    while k * k <= n:
        if n % k == 0:
            out.append(k)
            while n % k == 0:
                n //= k
        k += 1
    if n > 1:
        out.append(n)
    return out


def _trim(a):
    while a and a[-1] == 0:
        a.pop()
    return a


def pmod(a, p):
    return _trim([c % p for c in a])


def padd(a, b, p):
    n = max(len(a), len(b))
    return _trim([((a[i] if i < len(a) else 0) + (b[i] if i < len(b) else 0)) % p for i in range(n)])


def psub(a, b, p):
    return padd(a, [-c for c in b], p)


def pmul(a, b, p):
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return pmod(out, p)


def pdivmod(a, b, p):
    a = pmod(a, p)
    b = pmod(b, p)
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    inv = pow(b[-1], -1, p)
    q = [0] * max(len(a) - len(b) + 1, 0)
    r = list(a)
    while len(r) >= len(b):
        c = r[-1] * inv % p
        shift = len(r) - len(b)
        q[shift] = c
        for i, y in enumerate(b):
            r[shift + i] = (r[shift + i] - c * y) % p
        _trim(r)
    return _trim(q), r


def pgcd(a, b, p):
    a, b = pmod(a, p), pmod(b, p)
    while b:
        a, b = b, pdivmod(a, b, p)[1]
    if a:
        inv = pow(a[-1], -1, p)
        a = [c * inv % p for c in a]
    return a


def ppowmod(a, e, f, p):
    result = [1]
    base = pdivmod(a, f, p)[1]
    while e:
        if e & 1:
            result = pdivmod(pmul(result, base, p), f, p)[1]
        base = pdivmod(pmul(base, base, p), f, p)[1]
        e >>= 1
    return result


def is_irreducible(f, p):
    """Rabin's test for a monic f over F_p."""
    n = len(f) - 1
    if n <= 0:
        return False
    if n == 1:
        return True
    x = [0, 1]
    if ppowmod(x, p ** n, f, p) != pdivmod(x, f, p)[1]:
        return False
    for q in prime_factors(n):
        h = psub(ppowmod(x, p ** (n // q), f, p), x, p)
        if len(pgcd(h, f, p)) > 1:
            return False
    return True


@lru_cache(maxsize=None)
def conway_free_polynomial(p, m):
    """The least monic irreducible polynomial of degree m over F_p.

    Candidates x^m + c_{m-1}x^{m-1} + ... + c_0 are ordered by the integer
    sum(c_i p^i), i.e. lexicographically on (c_{m-1}, ..., c_0).
    """
    for k in range(p ** m):
        coeffs = [(k // p ** i) % p for i in range(m)] + [1]
        if is_irreducible(coeffs, p):
            return tuple(coeffs)
    raise AssertionError("no irreducible polynomial found")  # pragma: no cover


class ResidueField:
    """F_{p^m} as F_p[x]/(f) with f the canonical defining polynomial.

    Elements are tuples of length m.
    """

    def __init__(self, p, m):
        self.p = p
        self.m = m
        self.modulus = list(conway_free_polynomial(p, m))
        self.order = p ** m

    def normalize(self, a):
        r = pdivmod(list(a), self.modulus, self.p)[1]
        return tuple(r + [0] * (self.m - len(r)))

    def zero(self):
        return (0,) * self.m

    def one(self):
        return self.normalize([1])

    def mul(self, a, b):
        return self.normalize(pmul(list(a), list(b), self.p))

    def add(self, a, b):
        return tuple((x + y) % self.p for x, y in zip(a, b))

    def pow(self, a, e):
        result = self.one()
        while e:
            if e & 1:
                result = self.mul(result, a)
            a = self.mul(a, a)
            e >>= 1
        return result

    def inverse(self, a):
        if not any(a):
            raise ZeroDivisionError("inverse of 0 in residue field")
        return self.pow(a, self.order - 2)

    def elements(self):
        for digits in product(range(self.p), repeat=self.m):
            yield tuple(reversed(digits))

    def evaluate(self, poly, a):
        """Evaluate an integer polynomial (lowest degree first) at a."""
        acc = self.zero()
        for c in reversed(poly):
            acc = self.add(self.mul(acc, a), self.normalize([c % self.p]))
        return acc

    def is_primitive(self, a):
        n = self.order - 1
        if not any(a):
            return False
        return all(self.pow(a, n // q) != self.one() for q in prime_factors(n)) if n > 1 else True

    def primitive_element(self):
        return _primitive_element(self.p, self.m)

    def discrete_log(self, a, base):
        """Least k >= 0 with base^k == a (brute force; residue fields here are small)."""
        x = self.one()
        for k in range(self.order - 1):
            if x == a:
                return k
            x = self.mul(x, base)
        raise ValueError("element not in the subgroup generated by base")

    def roots_in(self, poly_coeffs, sub_degree):
        """Roots of an irreducible integer polynomial of degree ``sub_degree``.

        The roots all lie in the subfield F_{p^sub_degree}; we walk its
        multiplicative group as powers of a generator.
        """
        zeta = self.primitive_element()
        q_sub = self.p ** sub_degree
        z = self.pow(zeta, (self.order - 1) // (q_sub - 1))
        roots = []
        if poly_coeffs[0] % self.p == 0:
            roots.append(self.zero())
        x = self.one()
        for _ in range(q_sub - 1):
            if not any(self.evaluate(list(poly_coeffs), x)):
                roots.append(x)
            x = self.mul(x, z)
        return sorted(roots)


@lru_cache(maxsize=None)
def residue_field(p, m):
    return ResidueField(p, m)


@lru_cache(maxsize=None)
def _primitive_element(p, m):
    k = residue_field(p, m)
    for a in k.elements():
        if k.is_primitive(a):
            return a
    raise AssertionError("no primitive element")  # pragma: no cover
