# coding: utf-8

# # Mixing reduces growth
#
# For an irreducible stochastic P and a nonscalar D, r(((1 - m) I + m P) D)
# decreases strictly in m. The squared family (1 - m) I + m P, squared,
# first falls and then rises again.

# In[1]:

import numpy as np

from spectralmono import karlin_sweep, squared_family_sweep
from spectralmono.testgen import gen_nonscalar_diag, gen_stochastic

np.set_printoptions(precision=5, suppress=True)


# In[2]:

P = gen_stochastic(3, 6, reversible=False)
D = gen_nonscalar_diag(4, 6)
prof = karlin_sweep(P, D, grid=11)
print(prof.values)
print("strictly decreasing:", prof.passed)


# The two-state exchange chain with D = diag(1, 2): the squared family is
# I at both ends and bottoms out at m = 1/2 with r = 3/2.

# In[3]:

P2 = np.array([[0.0, 1.0], [1.0, 0.0]])
prof = squared_family_sweep(P2, [1.0, 2.0], grid=11)
for m, r in zip(prof.grid, prof.values):
    print(f"{m:.1f}  {r:.6f}")
print("minimum near", prof.argmin)
