# coding: utf-8

# # Canonical form of a symmetrizable matrix
#
# A nonnegative matrix is symmetrizable when some positive diagonal E makes
# E^-1 A E symmetric. Then A = E K Lambda K^T E^-1 with K orthogonal, and the
# Perron column of K is sqrt(u v).

# In[1]:

import numpy as np

from spectralmono import canonical_form, detect_symmetrizer
from spectralmono.errors import CycleInconsistent

np.set_printoptions(precision=6, suppress=True)


# Start with the smallest interesting example. The off-diagonal ratio 8/2
# fixes E up to scale.

# In[2]:

A = np.array([[0.0, 2.0], [8.0, 0.0]])
sym = detect_symmetrizer(A)
print("E =", sym.E)
print("E^-1 A E =\n", sym.symmetric(A))


# The full canonical form carries the spectrum, the orthogonal K and both
# Perron vectors, normalized so that sum(v) = 1 and u . v = 1.

# In[3]:

cf = canonical_form(A)
print("rho    =", cf.rho)
print("lambda =", cf.lam)
print("v, u   =", cf.v, cf.u)
print("E^2 vs v/u:", cf.E**2, cf.v / cf.u)
print("residual:", cf.residual(A))


# Not every pattern-symmetric matrix is symmetrizable. Around a cycle the
# product of entries must equal the product taken the other way. The
# triangle below fails: 1 * 1 * 1 going one way and 2 * 3 * 1 the other.

# In[4]:

T = np.array([[0.0, 1, 1], [2, 0, 1], [1, 3, 0]])
try:
    detect_symmetrizer(T)
except CycleInconsistent as exc:
    print(exc)
