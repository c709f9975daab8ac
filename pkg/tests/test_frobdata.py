import json
import random
from fractions import Fraction
from pathlib import Path

import numpy as np
import pytest

from frobkit.errors import MalformedPolynomial, NonIntegralInput
from frobkit.frobdata import (charpoly_from_lfunction, cyclotomic, dataset_from_json,
                              finite_monodromy_detect, fingerprint, kronecker, lfunction_from_charpoly,
                              lint, theoremF_check, valuation)

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"


def dataset(polys, p=3, d=1, weight=None, rank=2, **extra):
    data = {"p": p, "d": d, "rank": rank,
            "points": [{"label": f"x{i}", "degree": 1, "poly": poly} for i, poly in enumerate(polys)]}
    if weight is not None:
        data["det"] = {"type": "tate", "weight": weight}
    data.update(extra)
    return dataset_from_json(data)


def test_fixture_lint():
    ds = dataset_from_json(json.loads((FIXTURES / "dataset.json").read_text()))
    rep = lint(ds)
    assert rep["pass"]
    assert rep["census"] == {"ordinary": 2, "supersingular": 2}
    assert rep["orientation"] == "geometric"
    x3 = [pt for pt in rep["points"] if pt["label"] == "x3"][0]
    assert x3["slopes"] == [["0", 1], ["1", 1]]


def test_lint_examples():
    ok = lint(dataset([[3, -1, 1]], weight=1))
    assert ok["pass"] and ok["points"][0]["class"] == "ordinary"
    bad = lint(dataset([[81, -27, 1]], weight=1))
    assert not bad["pass"]
    assert not bad["points"][0]["checks"]["rank_bound"]["pass"]
    det = lint(dataset([[9, -1, 1]], weight=1))
    assert not det["points"][0]["checks"]["determinant"]["pass"]
    frac = lint(dataset([[3, "1/2", 1]], weight=1))
    assert not frac["points"][0]["checks"]["algebraicity"]["pass"]


def test_fingerprint_ignores_labels_and_order():
    a = dataset([[3, -1, 1], [3, 0, 1]], weight=1)
    b = dataset([[3, 0, 1], [3, -1, 1]], weight=1)
    assert fingerprint(a) == fingerprint(b)
    c = dataset([[3, 1, 1], [3, 0, 1]], weight=1)
    assert fingerprint(a)["sha256"] != fingerprint(c)["sha256"]


def test_lfunction_conversion():
    assert charpoly_from_lfunction([Fraction(1), Fraction(-1), Fraction(9)]) == [9, -1, 1]
    assert lfunction_from_charpoly([9, -1, 1]) == [1, -1, 9]


def test_malformed():
    for bad in ({"p": 3, "points": [{"poly": [1, 2, 3]}]},
                {"p": 3, "points": [{"poly": [0, 0, 1]}]},
                {"p": 3, "points": [{"poly": ["x", 0, 1]}]},
                {"p": 3, "points": [{"poly": [[1, 2], 0, 1]}]},
                {"p": 3, "rank": 3, "points": [{"poly": [1, 0, 1]}]},
                {"p": 3, "points": [{"poly": [2, 0, 1], "form": "lfunction"}]},
                {"points": []}, [1, 2]):
        with pytest.raises(MalformedPolynomial):
            dataset_from_json(bad)


def test_quadratic_valuations():
    # 7 splits in Q(sqrt 2): 3^2 = 2 mod 7; 5 is inert in Q(sqrt 2)
    F = Fraction
    assert valuation((F(3), F(1)), 7, 2) in (0, 1)
    assert valuation((F(3), F(1)), 7, 2) + valuation((F(3), F(-1)), 7, 2) == 1
    assert valuation((F(5), F(5)), 5, 2) == 1
    assert valuation((F(0), F(1)), 2, 2) == Fraction(1, 2)


def _float_oracle(poly, tol=5e-3):
    roots = np.roots(list(reversed(poly)))
    return bool(np.all(np.abs(np.abs(roots) - 1) < tol))


def _random_poly(rng):
    if rng.random() < 0.5:
        small = [n for n in range(1, 19) if len(cyclotomic(n)) - 1 <= 6]
        poly = [1]
        while True:
            phi = list(cyclotomic(rng.choice(small)))
            if len(poly) + len(phi) - 2 > 6:
                break
            poly = list(np.convolve(poly, phi))
            if rng.random() < 0.4:
                break
        if rng.random() < 0.3 and len(poly) < 7:
            extra = [rng.choice([-2, 2, 3]), 1]
            poly = list(np.convolve(poly, extra))
        return [int(c) for c in poly]
    deg = rng.randint(1, 6)
    return [rng.choice([-1, 1]) if rng.random() < 0.5 else rng.randint(-3, 3) for _ in range(deg)] + [1]


def test_kronecker_matches_float_oracle():
    rng = random.Random(2024)
    hits = 0
    for _ in range(200):
        poly = _random_poly(rng)
        if poly[0] == 0:
            poly[0] = 1
        verdict, _ = kronecker(poly)
        assert verdict == _float_oracle(poly), poly
        hits += verdict
    assert 30 < hits < 170


def test_finite_monodromy_examples():
    assert finite_monodromy_detect(dataset([[1, -2, 1]] * 3))["verdict"] == "finite"
    rep = finite_monodromy_detect(dataset([[1, -1, 1], [1, -1, 1]]))
    assert rep["verdict"] == "finite" and rep["certificates"][0]["cyclotomic_orders"] == [6]
    assert finite_monodromy_detect(dataset([[1, -3, 1]]))["verdict"] == "infinite/unknown"
    with pytest.raises(NonIntegralInput):
        finite_monodromy_detect(dataset([["1/2", 0, 1]]))
    # zeta_5 + zeta_5^-1 = (-1 + sqrt 5) / 2 lives in Q(sqrt 5)
    gold = dataset([[1, ["1/2", "-1/2"], 1]], p=11, trace_field={"sqrt": 5})
    assert finite_monodromy_detect(gold)["verdict"] == "finite"


def test_theoremF():
    empty = theoremF_check(dataset([]))
    assert empty["pass"] and empty["vacuous"]
    unit = theoremF_check(dataset([[1, -1, 1], [1, 0, 1], [1, 1, 1]]))
    assert unit["pass"] and unit["finite_monodromy"]["verdict"] == "finite"
    ordinary = theoremF_check(dataset([[3, -1, 1], [3, 0, 1]], weight=1))
    assert not ordinary["pass"]
    row = ordinary["points"][0]
    assert row["excluded"] == "(-1/2, 1/2)" and "multiple of 2" in row["reason"]
    wide = theoremF_check(dataset([[1, "-10/3", 1]]))
    assert wide["points"][0]["excluded"] == "(-1, 1)"
    assert "differ by more than 1" in wide["points"][0]["reason"]
