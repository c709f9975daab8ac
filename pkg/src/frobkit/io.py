"""JSON formats for fields, isocrystals and cocycle tables.

An isocrystal file looks like::

    {"p": 3, "d": 2, "coefficient_field": {"p": 3, "unramified_degree": 1},
     "precision": 32, "matrix": [["0", "p"], ["1", "0"]]}

A matrix entry is either one expression string, read as an element of the
coefficient field L, or an array of r strings giving the factor components
over K' (where ``g`` means the generator of K').
"""
import json

from .expr import element_to_string, parse_element
from .isocrystal import Isocrystal
from .padic.embed import embed
from .padic.local import LocalField, default_precision, make_field
from .ring import build_ring


def field_from_json(data, precision=None):
    if isinstance(data, str):
        return field_from_name(data, precision)
    return LocalField.from_json(data, precision)


def field_from_name(name, precision=None, p=None):
    """'Qp', 'Qp2', 'Q_{p^2}', 'Qp(p^(1/2))', 'Qp2(p^(1/3))' relative to a prime p."""
    text = name.replace(" ", "").replace("_", "").replace("{", "").replace("}", "")
    b = 1
    if "(" in text:
        base, rad = text.split("(", 1)
        rad = rad.rstrip(")")
        if not rad.startswith("p^(1/"):
            raise ValueError(f"cannot read field name {name!r}")
        b = int(rad[len("p^(1/"):].rstrip(")"))
        text = base
    if not text.startswith("Q"):
        raise ValueError(f"cannot read field name {name!r}")
    rest = text[1:]
    if rest.startswith("p"):
        if p is None:
            raise ValueError("field name needs the prime from the input file")
        rest = rest[1:].lstrip("^")
        m = int(rest) if rest else 1
        prime = p
    else:
        digits = rest.split("^")
        prime = int(digits[0])
        m = int(digits[1]) if len(digits) > 1 else 1
    N = precision if precision is not None else default_precision()
    if b == 1:
        return make_field(prime, m, None, N)
    from .padic.local import radical_field
    return radical_field(prime, m, b, N)


def _entry(value, ring):
    if isinstance(value, list):
        if len(value) != ring.r:
            raise ValueError(f"entry has {len(value)} components, expected {ring.r}")
        return [parse_element(str(v), ring.K) for v in value]
    x = embed(parse_element(str(value), ring.L), ring.K)
    return [x] * ring.r


def isocrystal_from_json(data, precision=None):
    N = precision if precision is not None else data.get("precision", default_precision())
    p = int(data["p"])
    field = data.get("coefficient_field", {"p": p, "unramified_degree": 1})
    if isinstance(field, str):
        L = field_from_name(field, N, p)
    else:
        L = LocalField.from_json(field, N)
    ring = build_ring(p, int(data.get("d", 1)), L)
    rows = data["matrix"]
    n = len(rows)
    if any(len(row) != n for row in rows):
        raise ValueError("matrix must be square")
    entries = [[_entry(v, ring) for v in row] for row in rows]
    comps = [[[entries[i][j][k] for j in range(n)] for i in range(n)] for k in range(ring.r)]
    return Isocrystal(ring, comps)


def matrix_to_json(comps):
    n_rows = len(comps[0])
    n_cols = len(comps[0][0]) if n_rows else 0
    return [[[element_to_string(c[i][j]) for c in comps] for j in range(n_cols)] for i in range(n_rows)]


def isocrystal_to_json(M):
    R = M.ring
    return {"p": R.p, "d": R.d, "coefficient_field": R.L.to_json(),
            "precision": R.precision, "matrix": matrix_to_json(M.S)}


def load_json(path):
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)


def dumps(obj):
    """Deterministic JSON text."""
    return json.dumps(obj, sort_keys=True, indent=2)
