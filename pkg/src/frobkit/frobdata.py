"""Datasets of Frobenius characteristic polynomials at closed points.

A dataset fixes p, q = p^d, a rank n and a determinant class, and lists points
x with their degree d_x and a polynomial with coefficients in Q or Q(sqrt D).
Polynomials are stored monic, low degree first (``charpoly`` form); files may
instead give det(1 - F t) (``lfunction`` form), which is the reversal.

Slopes at x are root valuations divided by d * d_x.  Elements of Q(sqrt D)
are pairs (a, b) meaning a + b sqrt(D).  When p splits in Q(sqrt D) the
embedding sends sqrt(D) to the p-adic root congruent to the least residue
square root of D (for p = 2, the root that is 1 mod 4).
"""
import hashlib
import json
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import gcd

from .dieudonne import classify_slopes
from .errors import MalformedPolynomial, NonIntegralInput
from .padic.local import vp_int
from .slopes import SlopeMultiset, valuation_polygon


# ---------------------------------------------------------------------------
# coefficients
# ---------------------------------------------------------------------------

def _fraction(value, where):
    try:
        if isinstance(value, str):
            return Fraction(value.strip())
        if isinstance(value, bool) or not isinstance(value, (int, Fraction)):
            raise TypeError
        return Fraction(value)
    except (TypeError, ValueError, ZeroDivisionError) as exc:
        raise MalformedPolynomial(f"{where}: cannot read coefficient {value!r}") from exc


def parse_coefficient(value, D, where="coefficient"):
    if isinstance(value, list):
        if D is None or len(value) != 2:
            raise MalformedPolynomial(f"{where}: pair coefficients need a declared field Q(sqrt D)")
        return (_fraction(value[0], where), _fraction(value[1], where))
    return (_fraction(value, where), Fraction(0))


def coefficient_to_json(c):
    a, b = c
    return str(a) if b == 0 else [str(a), str(b)]


def _is_square_mod(D, p):
    return any((x * x - D) % p == 0 for x in range(p))


def _vp_fraction(x, p):
    if x == 0:
        return None
    return vp_int(x.numerator, p) - vp_int(x.denominator, p)


@lru_cache(maxsize=None)
def _split_sqrt(D, p, N):
    """A square root of D in Z_p modulo p^N (p split in Q(sqrt D), p not dividing D)."""
    if p == 2:
        s = 1
        for k in range(3, N + 2):
            if (s * s - D) % 2 ** (k + 1):
                s += 2 ** (k - 1)
        return s % 2 ** N
    s = min(x for x in range(p) if (x * x - D) % p == 0)
    mod = p
    while mod < p ** N:
        mod = min(mod * mod, p ** N)
        s = (s - (s * s - D) * pow(2 * s, -1, mod)) % mod
    return s


def _splits(D, p):
    if D % p == 0:
        return False
    if p == 2:
        return D % 8 == 1
    return _is_square_mod(D % p, p)


def valuation(c, p, D=None):
    """p-adic valuation of a + b sqrt(D) under the fixed embedding (None for 0)."""
    a, b = c
    if b == 0:
        return _vp_fraction(a, p)
    if not _splits(D, p):
        return Fraction(_vp_fraction(a * a - D * b * b, p), 2)
    den = a.denominator * b.denominator
    na, nb = a.numerator * b.denominator, b.numerator * a.denominator
    N = 16
    while True:
        s = _split_sqrt(D, p, N)
        X = (na + nb * s) % p ** N
        if X:
            return Fraction(vp_int(X, p) - vp_int(den, p))
        N *= 2


def _is_algebraic_integer(c, D):
    a, b = c
    if b == 0:
        return a.denominator == 1
    tr, nm = 2 * a, a * a - D * b * b
    return tr.denominator == 1 and nm.denominator == 1


def _norm_poly(coeffs, D):
    """Product of the polynomial and its conjugate: rational coefficients."""
    if all(b == 0 for _, b in coeffs):
        return [a for a, _ in coeffs]
    n = len(coeffs)
    out = [(Fraction(0), Fraction(0))] * (2 * n - 1)
    for i, (a1, b1) in enumerate(coeffs):
        for j, (a2, b2) in enumerate(coeffs):
            # (a1 + b1 r)(a2 - b2 r)
            x, y = out[i + j]
            out[i + j] = (x + a1 * a2 - D * b1 * b2, y + b1 * a2 - a1 * b2)
    if any(y != 0 for _, y in out):
        raise AssertionError("norm polynomial is not rational")  # pragma: no cover
    return [x for x, _ in out]


# ---------------------------------------------------------------------------
# polynomial normalizations
# ---------------------------------------------------------------------------

def charpoly_from_lfunction(coeffs):
    """det(1 - F t) = 1 + c_1 t + ... + c_n t^n  ->  monic t^n + c_1 t^(n-1) + ... + c_n."""
    return list(reversed(coeffs))


def lfunction_from_charpoly(coeffs):
    return list(reversed(coeffs))


# ---------------------------------------------------------------------------
# datasets
# ---------------------------------------------------------------------------

@dataclass
class Point:
    label: str
    degree: int
    coeffs: list            # charpoly form, low degree first, pairs (a, b)


@dataclass
class FrobeniusDataset:
    p: int
    d: int
    rank: int
    points: list
    det: dict = field(default_factory=lambda: {"type": "trivial", "weight": 0})
    D: int = None           # trace field Q(sqrt D); None for Q
    orientation: str = None  # metadata only
    coefficients: str = "Qp"

    @property
    def q(self):
        return self.p ** self.d

    @property
    def weight(self):
        return Fraction(self.det.get("weight", 0)) if self.det.get("type") == "tate" else Fraction(0)

    @property
    def trace_field_degree(self):
        return 1 if self.D is None else 2

    def to_json(self):
        out = {"p": self.p, "d": self.d, "rank": self.rank, "det": dict(self.det),
               "points": [{"label": pt.label, "degree": pt.degree, "form": "charpoly",
                           "poly": [coefficient_to_json(c) for c in pt.coeffs]} for pt in self.points]}
        if self.D is not None:
            out["trace_field"] = {"sqrt": self.D}
        if self.orientation is not None:
            out["orientation"] = self.orientation
        return out


def _read_point(raw, idx, rank, D):
    where = f"point {idx}"
    if not isinstance(raw, dict):
        raise MalformedPolynomial(f"{where}: expected an object")
    label = str(raw.get("label", idx))
    degree = raw.get("degree", 1)
    if not isinstance(degree, int) or isinstance(degree, bool) or degree < 1:
        raise MalformedPolynomial(f"point {label}: degree must be a positive integer")
    poly = raw.get("poly")
    if not isinstance(poly, list) or len(poly) < 2:
        raise MalformedPolynomial(f"point {label}: poly must list at least two coefficients")
    coeffs = [parse_coefficient(c, D, f"point {label}") for c in poly]
    form = raw.get("form", "charpoly")
    if form == "lfunction":
        if coeffs[0] != (1, 0):
            raise MalformedPolynomial(f"point {label}: det(1 - F t) must have constant term 1")
        coeffs = charpoly_from_lfunction(coeffs)
    elif form != "charpoly":
        raise MalformedPolynomial(f"point {label}: unknown form {form!r}")
    if coeffs[-1] != (1, 0):
        raise MalformedPolynomial(f"point {label}: polynomial is not monic")
    if len(coeffs) - 1 != rank:
        raise MalformedPolynomial(f"point {label}: degree {len(coeffs) - 1} does not match rank {rank}")
    if coeffs[0] == (0, 0):
        raise MalformedPolynomial(f"point {label}: constant term is zero")
    return Point(label, degree, coeffs)


def dataset_from_json(data):
    if not isinstance(data, dict):
        raise MalformedPolynomial("dataset must be a JSON object")
    try:
        p, d = int(data["p"]), int(data.get("d", 1))
    except (KeyError, TypeError, ValueError) as exc:
        raise MalformedPolynomial("dataset needs integer p and d") from exc
    tf = data.get("trace_field")
    D = int(tf["sqrt"]) if isinstance(tf, dict) and "sqrt" in tf else None
    raw_points = data.get("points", [])
    rank = int(data.get("rank", len(raw_points[0]["poly"]) - 1 if raw_points else 2))
    points = [_read_point(raw, i, rank, D) for i, raw in enumerate(raw_points)]
    det = dict(data.get("det", {"type": "trivial", "weight": 0}))
    return FrobeniusDataset(p, d, rank, points, det, D, data.get("orientation"),
                            data.get("coefficients", "Qp"))


# ---------------------------------------------------------------------------
# per-point checks
# ---------------------------------------------------------------------------

def point_slopes(pt, ds):
    vals = [valuation(c, ds.p, ds.D) for c in pt.coeffs]
    scale = ds.d * pt.degree
    slopes = []
    for v, k in valuation_polygon(vals):
        slopes.extend([v / scale] * k)
    return sorted(slopes)


def _centered(slopes, ds):
    return [s - ds.weight / 2 for s in slopes]


def _rank_bound(n):
    return Fraction(1, 2) if n == 2 else Fraction(n - 1, 2)


def lint_point(pt, ds):
    slopes = point_slopes(pt, ds)
    centered = _centered(slopes, ds)
    n = ds.rank
    bound = _rank_bound(n)
    gaps = [b - a for a, b in zip(centered, centered[1:])]
    expected_total = n * ds.weight / 2
    algebraic = all(_integral_away_from_p(c, ds.D, ds.p) for c in pt.coeffs)
    checks = {
        "algebraicity": {"pass": algebraic,
                         "detail": "coefficients lie in the trace field with only p in denominators"},
        "rank_bound": {"bound": str(bound), "pass": all(abs(s) <= bound for s in centered),
                       "anchor": "rank-2 slope bounds"},
        "consecutive_gap": {"max_gap": str(max(gaps)) if gaps else "0", "pass": all(g <= 1 for g in gaps),
                            "anchor": "consecutive slopes differ by at most 1"},
        "determinant": {"slope_sum": str(sum(slopes)), "expected": str(expected_total),
                        "pass": sum(slopes) == expected_total},
    }
    report = {"label": pt.label, "degree": pt.degree,
              "slopes": SlopeMultiset.from_list(slopes).to_json(),
              "centered_slopes": [str(s) for s in centered],
              "checks": checks,
              "pass": all(c["pass"] for c in checks.values())}
    if n == 2 and ds.weight == 1:
        # ordinary / supersingular only makes sense for weight-1 (Dieudonne) points
        cls = classify_slopes(slopes, ds.coefficients == "Qp", ds.weight)
        report["class"] = cls["classification"]
    return report


def _integral_away_from_p(c, D, p):
    a, b = c
    k = max(vp_int(a.denominator, p), vp_int(b.denominator, p))
    scale = Fraction(p) ** (k + 1)
    return _is_algebraic_integer((a * scale, b * scale), D)


def fingerprint(ds):
    """Multiset of (degree, polynomial), independent of labels and order."""
    items = sorted((pt.degree, json.dumps([coefficient_to_json(c) for c in pt.coeffs]))
                   for pt in ds.points)
    digest = hashlib.sha256(json.dumps(items).encode()).hexdigest()
    return {"entries": [[deg, json.loads(poly)] for deg, poly in items], "sha256": digest}


def lint(ds):
    points = [lint_point(pt, ds) for pt in ds.points]
    census = {}
    for r in points:
        if "class" in r:
            census[r["class"]] = census.get(r["class"], 0) + 1
    isoclinic = all(len(r["slopes"]) == 1 for r in points)
    try:
        finmon = finite_monodromy_detect(ds)["verdict"]
    except NonIntegralInput as exc:
        finmon = f"not applicable: {exc}"
    return {"points": points,
            "census": dict(sorted(census.items())),
            "fingerprint": fingerprint(ds),
            "isoclinic_everywhere": isoclinic,
            "finite_monodromy": finmon,
            "orientation": ds.orientation,
            "pass": all(r["pass"] for r in points)}


# ---------------------------------------------------------------------------
# roots of unity
# ---------------------------------------------------------------------------

def _int_divmod(a, b):
    """Division of integer polynomials (low degree first) by a monic b."""
    a = list(a)
    q = [0] * max(len(a) - len(b) + 1, 1)
    for i in range(len(a) - len(b), -1, -1):
        c = a[i + len(b) - 1]
        q[i] = c
        if c:
            for j, bj in enumerate(b):
                a[i + j] -= c * bj
    r = a[:len(b) - 1]
    while r and r[-1] == 0:
        r.pop()
    return q, r


@lru_cache(maxsize=None)
def cyclotomic(n):
    """Phi_n, integer coefficients low degree first."""
    num = [-1] + [0] * (n - 1) + [1]
    for k in range(1, n):
        if n % k == 0:
            num, r = _int_divmod(num, cyclotomic(k))
            assert not r
    return tuple(num)


def euler_phi(n):
    return sum(1 for k in range(1, n + 1) if gcd(k, n) == 1)


def _orders_up_to(bound):
    """All n with phi(n) <= bound (phi(n) >= sqrt(n/2) caps the search)."""
    return [n for n in range(1, 2 * bound * bound + 3) if euler_phi(n) <= bound]


def kronecker(coeffs):
    """Exact test that a monic integer polynomial has only roots of unity as roots.

    Returns (verdict, orders) where orders lists the cyclotomic factors found
    (with multiplicity) when the verdict is True.
    """
    poly = [int(c) for c in coeffs]
    if poly[-1] != 1:
        raise NonIntegralInput("polynomial is not monic")
    deg = len(poly) - 1
    orders = []
    for n in _orders_up_to(deg):
        phi = cyclotomic(n)
        while len(poly) - 1 >= len(phi) - 1:
            q, r = _int_divmod(poly, phi)
            if r:
                break
            poly = q
            orders.append(n)
    return len(poly) == 1, orders


def finite_monodromy_detect(ds):
    """Verdict "finite" when every point is isoclinic of slope 0 after normalization
    and every Frobenius root is a root of unity; otherwise "infinite/unknown"."""
    certs = []
    bound = ds.rank * ds.trace_field_degree
    for pt in ds.points:
        for c in pt.coeffs:
            if not _is_algebraic_integer(c, ds.D):
                raise NonIntegralInput(f"point {pt.label}: coefficient {coefficient_to_json(c)} is not integral")
        centered = _centered(point_slopes(pt, ds), ds)
        if any(s != 0 for s in centered):
            return {"verdict": "infinite/unknown", "failing_point": pt.label,
                    "reason": f"normalized slopes {[str(s) for s in centered]} are not all 0",
                    "certificates": certs}
        if ds.weight:
            return {"verdict": "infinite/unknown", "failing_point": pt.label,
                    "reason": "root-of-unity test needs a trivial determinant normalization",
                    "certificates": certs}
        norm = _norm_poly(pt.coeffs, ds.D)
        ok, orders = kronecker(norm)
        if not ok:
            return {"verdict": "infinite/unknown", "failing_point": pt.label,
                    "reason": "some Frobenius root is not a root of unity",
                    "certificates": certs}
        certs.append({"label": pt.label, "cyclotomic_orders": orders,
                      "phi_bound": bound})
    return {"verdict": "finite", "certificates": certs}


def theoremF_check(ds):
    """Pointwise dichotomy for rank-2, Q_p-coefficient, trivial-determinant data:
    each point must be isoclinic of slope 0; otherwise the excluded configuration
    and the reason it is excluded are reported."""
    if ds.rank != 2:
        raise ValueError("the check applies to rank-2 data")
    if not ds.points:
        return {"pass": True, "vacuous": True, "points": [], "isoclinic_everywhere": True,
                "finite_monodromy": {"verdict": "finite", "certificates": []}}
    rows = []
    for pt in ds.points:
        s = _centered(point_slopes(pt, ds), ds)
        row = {"label": pt.label, "centered_slopes": [str(x) for x in s], "isoclinic": s[0] == s[1]}
        if s[0] != s[1]:
            a = s[1]
            if s[0] == -a and a.denominator == 1:
                row["excluded"] = f"(-{a}, {a})"
                row["reason"] = "slopes differ by more than 1, violating the consecutive-slope bound"
            elif s[0] == -a:
                row["excluded"] = f"(-{a}, {a})"
                row["reason"] = (f"slope {a} has denominator {a.denominator} but occurs once; "
                                 f"with Q_p coefficients it must occur a multiple of {a.denominator} times")
            else:
                row["excluded"] = f"({s[0]}, {s[1]})"
                row["reason"] = "slopes are not symmetric, contradicting the trivial determinant"
        rows.append(row)
    iso = all(r["isoclinic"] for r in rows)
    out = {"points": rows, "isoclinic_everywhere": iso, "vacuous": False}
    if iso:
        try:
            out["finite_monodromy"] = finite_monodromy_detect(ds)
        except NonIntegralInput as exc:
            out["finite_monodromy"] = {"verdict": "infinite/unknown", "reason": str(exc)}
    out["pass"] = iso and out.get("finite_monodromy", {}).get("verdict") == "finite"
    return out
