# coding: utf-8

# # Sojourn times and mobility
#
# The expected time a chain spends in state i per visit is
# tau_i = 1 / (1 - P_ii). Their harmonic mean EH satisfies
# EH (1 - trace(P)/n) = 1, so EH sits above or below 1 + 1/(n-1) according
# to the sign of the sum of the non-Perron eigenvalues.

# In[1]:

import numpy as np

from spectralmono import sojourn_report
from spectralmono.markov import rank_one_equivalence_report, sojourn_bound_class
from spectralmono.testgen import GenSpec, gen_reversible_chain

np.set_printoptions(precision=4, suppress=True)


# In[2]:

for cls in ("C1", "C2", "C3"):
    P = gen_reversible_chain(GenSpec(10, 4, cls))
    rep = sojourn_report(P)
    b = sojourn_bound_class(P)
    print(f"{cls}: EH = {rep.EH:.5f} {b.relation.value} {rep.threshold:.5f}   "
          f"Shorrocks {rep.shorrocks:.4f}  Geweke {rep.geweke:.4f}  identity residual {rep.identity_residual:.1e}")


# For the rank-one family (1 - alpha) I + alpha v e^T three quite different
# statements agree: the sojourn bound, the sign of the mixing derivative and
# the ordering of r(P D) against r(P^2 D).

# In[3]:

v = np.array([0.2, 0.3, 0.5])
for alpha in (0.5, 1.0, 1.2):
    rep = rank_one_equivalence_report(v, alpha, [1.0, 2.0, 4.0])
    print(f"alpha = {alpha}: legs {rep.legs}, consistent {rep.consistent}")
