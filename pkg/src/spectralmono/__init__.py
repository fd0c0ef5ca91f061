"""Spectral radius monotonicity for symmetrizable nonnegative matrices.

Tools to put symmetrizable (reversible) matrices in canonical form, evaluate
``r(M(m) D)`` and its derivative along homotopy families, classify
eigenvalue sign patterns, analyse sojourn times of Markov chains and the
rank-one family, and study Kronecker mutation-selection models.
"""
__version__ = "0.1.0"

from ._checks import Check, Relation
from ._config import DEFAULT, ToleranceConfig
from .errors import *  # noqa: F401,F403
from .linalg import (
    EigenDecomposition,
    PerronPair,
    is_irreducible,
    jacobi_eigh,
    kron,
    kron_apply,
    perron,
    spectral_radius,
    symmetric_eigh,
)
from .markov import (
    as_column_stochastic,
    geweke_index,
    is_reversible,
    rank_one_chain,
    rank_one_equivalence_report,
    shorrocks_index,
    sojourn_bound_class,
    sojourn_report,
)
from .quasispecies import KroneckerModel, build_Mm, generalized_model, grad_m, growth_rate
from .spectral import (
    HomotopyFamily,
    SignClass,
    SignTag,
    classify_eigen_signs,
    cnd_check,
    cohen_ordering,
    drdm,
    drdm_fd,
    karlin_sweep,
    levinger_sweep,
    spectral_radius_sos,
    squared_family_sweep,
)
from .symmetrize import (
    CanonicalForm,
    JointCanonicalForm,
    canonical_form,
    detect_symmetrizer,
    is_symmetrizable,
    joint_canonical_form,
    stochasticize,
)
