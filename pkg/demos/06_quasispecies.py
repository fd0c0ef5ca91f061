# coding: utf-8

# # Mutation load with independent sites
#
# Each site mutates through F_k = (1 - m_k) I + m_k P_k and the genotype
# mutation matrix is the Kronecker product of the F_k. For rates in (0, 1/2)
# raising any rate lowers the growth rate r(M_m D), strictly when fitness
# depends on that site.

# In[1]:

import numpy as np

from spectralmono import KroneckerModel, grad_m
from spectralmono.quasispecies import site_sweep

P2 = np.array([[0.0, 1.0], [1.0, 0.0]])


# Two biallelic sites. Fitness depends on site 1 only, so the gradient in
# the site-2 rate is zero.

# In[2]:

D = np.kron([1.0, 3.0], np.ones(2))
rep = grad_m(KroneckerModel([P2, P2], [0.1, 0.3], D))
print("growth rate", rep.r)
print("gradient   ", rep.grad)
print("finite diff", rep.grad_fd)
print("D-condition", rep.d_condition)


# In[3]:

model = KroneckerModel([P2, P2], [0.1, 0.1], [1.0, 2.0, 3.0, 5.0])
grid, vals, check = site_sweep(model, 0, grid=6)
for m, r in zip(grid, vals):
    print(f"m_1 = {m:.3f}  r = {r:.6f}")
print(check.name, check.passed)
