import random

import pytest

from frobkit import linalg as la
from frobkit.isocrystal import Isocrystal, change_basis, direct_sum, standard_object
from frobkit.padic.local import make_field, radical_field
from frobkit.ring import build_ring


def field_named(p, kind, N=32):
    if kind == "Qp":
        return make_field(p, 1, None, N)
    if kind == "Qp2":
        return make_field(p, 2, None, N)
    return radical_field(p, 1, 2, N)


def random_element(F, rng, unit=False, low=0, high=2):
    vec = [rng.randrange(F.p ** 4) for _ in range(F.degree)]
    if unit:
        vec[0] = vec[0] - vec[0] % F.p + rng.randrange(1, F.p)
        return F.from_vector(vec, 0)
    x = F.from_vector(vec, rng.randrange(low, high))
    return x if not x.is_zero() else F.one()


def random_matrix(F, n, rng, **kw):
    return [[random_element(F, rng, **kw) for _ in range(n)] for _ in range(n)]


def random_invertible(F, n, rng):
    """Unimodular: unit diagonal plus p times random entries."""
    A = random_matrix(F, n, rng)
    p = F(F.p)
    for i in range(n):
        for j in range(n):
            A[i][j] = A[i][j] * p
        A[i][i] = A[i][i] + random_element(F, rng, unit=True)
    return A


def random_isocrystal(rng, p=None, d=None, n=None, kind=None, N=32):
    p = p or rng.choice([2, 3, 5])
    d = d or rng.randint(1, 4)
    n = n or rng.randint(1, 4)
    kind = kind or rng.choice(["Qp", "Qp2", "Qp(p^(1/2))"])
    ring = build_ring(p, d, field_named(p, kind, N))
    while True:
        comps = [random_matrix(ring.K, n, rng, low=0, high=3) for _ in range(ring.r)]
        if all(not la.det(c).is_zero() for c in comps):
            return Isocrystal(ring, comps)


def random_basis(ring, n, rng):
    return [random_invertible(ring.K, n, rng) for _ in range(ring.r)]


def conjugated(M, rng):
    return change_basis(M, random_basis(M.ring, M.rank, rng))


def standard_sum(ring, slopes):
    return direct_sum(*[standard_object(s, ring) for s in slopes])


@pytest.fixture
def rng():
    return random.Random(20240617)


# ---------------------------------------------------------------------------
# acceptance summary: one line per criterion, printed after the run
# ---------------------------------------------------------------------------

ACCEPTANCE = {}


def record(n, ok, title, detail=""):
    ACCEPTANCE[n] = (bool(ok), title, detail)
    print(f"criterion {n:2d} {'PASS' if ok else 'FAIL'}  {title}  {detail}".rstrip())
    return ok


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        ok, title, detail = ACCEPTANCE[n]
        terminalreporter.write_line(f"criterion {n:2d} {'PASS' if ok else 'FAIL'}  {title}  {detail}".rstrip())
