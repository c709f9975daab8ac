# %% [markdown]
# The half Tate twist over F_9
#
# F acts on a rank-one space by sqrt(3).  The coefficient field has to contain
# sqrt(3), and the question is which smaller fields it descends to.

# %%
from fractions import Fraction

from frobkit.cocycle import GaloisAction, compute_cocycle, cyclic_class
from frobkit.descent import descend
from frobkit.errors import Obstructed
from frobkit.isocrystal import Isocrystal, char_poly, induce, tate_twist, unit_object
from frobkit.padic.local import make_field, radical_field
from frobkit.ring import build_ring
from frobkit.slopes import newton_slopes

p = 3
Q3 = make_field(p)
unit = unit_object(build_ring(p, 2, Q3))
M, info = tate_twist(unit, Fraction(-1, 2))
# room for both candidate fields: Q_9(sqrt 3)
M = induce(M, radical_field(p, 2, 2))
print(M)
print("coefficients:", M.L, " galois stable:", info["galois_stable"])

# %%
P = char_poly(M)
print("char poly of F^2:", P)
print("slopes:", newton_slopes(P))

# %% [markdown]
# Descent needs the F^2 eigenvalue p to be a norm.  From Q_9 to Q_3 every norm
# has even valuation, so Q_3 is out.  Q_9 and Q_3(sqrt 3) both work.

# %%
for name, K in [("Q_3", Q3), ("Q_9", make_field(p, 2)), ("Q_3(sqrt 3)", radical_field(p, 1, 2))]:
    try:
        res = descend(M, K)
        print(name, "->", res.obj, "certificate ok:", res.verify())
    except Obstructed as exc:
        print(name, "-> obstructed:", exc.data["reason"])

# %% [markdown]
# Same story through group cohomology: realize the twist over Q_9 (x) Q_9,
# where F is (p, 1) on the two factors, and read off the 2-cocycle.

# %%
L = make_field(p, 2)
R = build_ring(p, 2, L)
T = Isocrystal(R, [[[R.K(p)]], [[R.K(1)]]])
xi = compute_cocycle(T, GaloisAction(L, Q3))
cls = cyclic_class(xi)
print("cocycle:", xi.to_json())
print("invariant:", cls.to_json())
