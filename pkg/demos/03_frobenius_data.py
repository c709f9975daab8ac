# %% [markdown]
# Linting Frobenius data
#
# Characteristic polynomials at closed points of a curve over F_3: two ordinary
# points, two supersingular ones, one given as an L-function factor.

# %%
import json
from pathlib import Path

from frobkit.frobdata import dataset_from_json, finite_monodromy_detect, kronecker, lint, theoremF_check

fixtures = Path(__file__).resolve().parent.parent / "fixtures"
ds = dataset_from_json(json.loads((fixtures / "dataset.json").read_text()))
rep = lint(ds)
for pt in rep["points"]:
    print(pt["label"], pt["slopes"], pt["class"], "pass" if pt["pass"] else "FAIL")
print("census:", rep["census"])

# %% [markdown]
# Centered at weight 1 the ordinary points have slopes -1/2 and 1/2, which the
# rank-2 dichotomy rules out for Q_p coefficients with trivial determinant.

# %%
for row in theoremF_check(ds)["points"]:
    print(row["label"], row.get("excluded", "isoclinic"), row.get("reason", ""))

# %% [markdown]
# Unit-root data: every Frobenius root is a root of unity.

# %%
unit = dataset_from_json(json.loads((fixtures / "unit-root.json").read_text()))
print(finite_monodromy_detect(unit))
print(kronecker([1, -3, 1]), kronecker([1, 1, 1, 1, 1]))
