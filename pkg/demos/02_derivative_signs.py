# coding: utf-8

# # Which way does r(M(m) D) move?
#
# For commuting symmetrizable A and B and a positive diagonal D, the
# spectral radius of ((1 - m) A + m B) D, or of the affine family built from
# A and B, moves in a direction fixed by the signs of the non-Perron
# eigenvalues.

# In[1]:

import numpy as np

from spectralmono import HomotopyFamily, classify_eigen_signs, drdm
from spectralmono.testgen import GenSpec, gen_commuting_pair, gen_nonscalar_diag

np.set_printoptions(precision=4, suppress=True)


# The exchange matrix has eigenvalues 1 and -1, class C2, so mixing pushes
# the growth rate up.

# In[2]:

P2 = np.array([[0.0, 1.0], [1.0, 0.0]])
F = HomotopyFamily.affine(P2, P2, [1.0, 2.0])
print(F.sign_class(), "predicts", F.predicted_trend().value)
for m in (0.0, 0.5, 1.0):
    rep = drdm(F, m)
    print(f"m = {m:.1f}  r = {rep.r_value:.6f}  dr/dm = {rep.dr_analytic:+.6f}  (fd {rep.dr_fd:+.6f})")


# Now a random pair from each class. The per-term contributions show where
# the derivative comes from: one term per eigenvector, the Perron term
# always zero.

# In[3]:

for cls in ("C1", "C2", "C3"):
    A, B = gen_commuting_pair(GenSpec(2024, 5, cls))
    D = gen_nonscalar_diag(7, 5)
    F = HomotopyFamily.affine(A, B, D)
    rep = drdm(F, 0.4)
    print(cls, classify_eigen_signs(F.joint.lambda_A), f"dr/dm = {rep.dr_analytic:+.3e}")
    print("   terms:", rep.per_term)


# With a scalar D there is nothing to move: the growth rate is the constant
# D itself.

# In[4]:

A, B = gen_commuting_pair(GenSpec(1, 5, "C2"))
F = HomotopyFamily.affine(A, B, np.full(5, 3.0))
print([round(drdm(F, m).r_value, 12) for m in (0.0, 0.5, 1.0)])
