# %% [markdown]
# An ordinary rank-2 point, start to finish
#
# Build E^0 (+) E^1 with a nontrivial unit root over Q_5, induce to Q_25, hide it
# behind a random change of basis, then take it apart again.

# %%
import random

from frobkit.descent import filtered_descend
from frobkit.dieudonne import classify_point, katz_lattice, verify_dieudonne
from frobkit.isocrystal import change_basis, char_poly, direct_sum, from_L_matrix, induce, standard_object
from frobkit.padic.local import make_field
from frobkit.ring import build_ring
from frobkit.slopes import dm_witness, isoclinic_decompose

rng = random.Random(5)
p = 5
Q5, Q25 = make_field(p), make_field(p, 2)
R0 = build_ring(p, 1, Q5)
M0 = direct_sum(from_L_matrix(R0, [[Q5(-1)]]), standard_object(1, R0))


def shuffle(M):
    K = M.ring.K
    B = [[[K(rng.randrange(p ** 3)) * p + (1 if i == j else 0) for j in range(2)] for i in range(2)]
         for _ in range(M.ring.r)]
    return change_basis(M, B)


M = shuffle(induce(shuffle(M0), Q25))
print(M, "\n", char_poly(M))

# %%
for s in isoclinic_decompose(M):
    print("slope", s.slope, "rank", s.obj.rank)
w = dm_witness(M)
print("standard form over F_(5^%d):" % w.R, w.blocks)

# %% [markdown]
# Filtered descent back to Q_5: the slope-0 line descends by Hilbert 90, the
# slope-1 complement by its (trivial) cocycle class.

# %%
res = filtered_descend(M, Q5)
print("descended:", res.obj)
print("certificate ok:", res.verify(), " same char poly:", char_poly(res.obj) == char_poly(M0))

# %%
D = katz_lattice(res.obj)
print("Dieudonne checks:", verify_dieudonne(D))
print(classify_point(D)["classification"])
