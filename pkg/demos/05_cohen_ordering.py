# coding: utf-8

# # r(A) r(AD) against r(A^2 D)
#
# The same sign classes decide the order of r(A) r(AD) and r(A^2 D). When A
# is reducible only the weak inequality survives.

# In[1]:

import numpy as np

from spectralmono import cohen_ordering, levinger_sweep
from spectralmono.testgen import GenSpec, gen_block_diagonal, gen_nonnegative, gen_reversible_chain

D = np.array([1.0, 2.0, 3.0, 4.0, 5.0])


# In[2]:

for cls in ("C1", "C2", "C3"):
    A = gen_reversible_chain(GenSpec(5, 5, cls))
    rep = cohen_ordering(A, D)
    print(f"{cls}: {rep.lhs:.6f} {rep.relation.value} {rep.rhs:.6f}  (predicted {rep.predicted.value})")

rep = cohen_ordering(gen_block_diagonal(11, [3, 2], "C1"), D)
print(f"reducible C1 blocks: predicted {rep.predicted.value}, observed {rep.relation.value}")


# A related profile: r((1 - m) A + m A^T). It is symmetric about m = 1/2.
# Its largest value is at the midpoint, where the matrix is symmetric, and
# the endpoints give the smallest values.

# In[3]:

prof = levinger_sweep(gen_nonnegative(3, 4), grid=11)
print(np.round(prof.values, 5))
print("midpoint exceeds endpoints by", round(prof.info["midpoint_excess"], 5))
