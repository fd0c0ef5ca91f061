import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from spectralmono.errors import DimensionOverflow, Reducible, RegimeWarning, ShapeMismatch
from spectralmono.linalg import spectral_radius
from spectralmono.quasispecies import (
    KroneckerModel,
    build_Mm,
    generalized_model,
    grad_m,
    growth_rate,
    mutation_eigenvalues,
    site_sweep,
)
from spectralmono.testgen import gen_kronecker_factors, gen_site_constant_diag, rng

P2 = np.array([[0.0, 1.0], [1.0, 0.0]])
A28 = np.array([[0.0, 2.0], [8.0, 0.0]])


def test_one_site_reduces_to_mixing_family():
    model = KroneckerModel([P2], [0.3], [1.0, 2.0])
    M = 0.7 * np.eye(2) + 0.3 * P2
    assert growth_rate(model) == pytest.approx(spectral_radius(M * [1.0, 2.0]))
    assert growth_rate(model, "symmetric") == pytest.approx(growth_rate(model))


def test_indexing_is_big_endian():
    model = KroneckerModel([P2, np.ones((3, 3)) / 3], [0.1, 0.2], np.ones(6))
    assert model.flat_index((1, 2)) == 5
    assert model.multi_index(4) == (1, 1)
    assert np.allclose(build_Mm(model), np.kron(*model.site_matrices()))


def test_d_condition_and_zero_gradient():
    # fitness depends on site 0 only
    D = np.kron([1.0, 3.0], np.ones(2))
    rep = grad_m(KroneckerModel([P2, P2], [0.2, 0.3], D))
    assert list(rep.d_condition) == [True, False]
    assert rep.strictness == ("strict", "zero")
    assert rep.grad[0] < 0 and abs(rep.grad[1]) <= 1e-12
    assert rep.passed


def test_regime_warning():
    with pytest.warns(RegimeWarning):
        rep = grad_m(KroneckerModel([P2], [0.7], [1.0, 2.0]))
    assert not rep.regime and rep.strictness == ("unknown",)
    # only the finite-difference oracle is checked outside (0, 1/2)
    assert len(rep.checks) == 1 and rep.passed


def test_validation():
    with pytest.raises(ShapeMismatch):
        KroneckerModel([P2], [0.1, 0.2], [1.0, 2.0])
    with pytest.raises(ValueError):
        KroneckerModel([P2], [1.5], [1.0, 2.0])
    with pytest.raises(Reducible):
        KroneckerModel([np.eye(2)], [0.1], [1.0, 2.0])
    with pytest.raises(DimensionOverflow):
        KroneckerModel([P2] * 13, [0.1] * 13, np.ones(2**13))


def test_mutation_eigenvalues_are_site_products():
    model = KroneckerModel([P2, P2], [0.2, 0.4], np.ones(4))
    assert np.allclose(mutation_eigenvalues(model), [1.0, 0.6, 0.2, 0.12])
    assert np.allclose(mutation_eigenvalues(model), np.sort(np.linalg.eigvals(build_Mm(model)).real)[::-1])


def test_site_sweep_nonincreasing():
    model = KroneckerModel([P2, P2], [0.2, 0.2], [1.0, 2.0, 3.0, 5.0])
    grid, vals, check = site_sweep(model, 1)
    assert grid.size == 21 and check.passed
    assert vals[0] > vals[-1]


def test_general_factor_scaling():
    model = KroneckerModel([A28, P2], [0.2, 0.1], [1.0, 2.0, 3.0, 4.0])
    assert np.allclose(model.radii, [4.0, 1.0])
    gm = generalized_model(model)
    assert gm.scale == pytest.approx(4.0) and gm.passed


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**63 - 1), st.integers(1, 3), st.booleans())
def test_gradient_signs(seed, L, constant_site):
    g = rng(seed)
    factors = gen_kronecker_factors(seed, L, max_n=3)
    dims = [F.shape[0] for F in factors]
    if constant_site:
        D = gen_site_constant_diag(seed, dims, int(g.integers(L)))
    else:
        D = g.uniform(1.0, 3.0, int(np.prod(dims)))
    with warnings.catch_warnings():
        warnings.simplefilter("error", RegimeWarning)
        rep = grad_m(KroneckerModel(factors, g.uniform(0.01, 0.49, L), D))
    assert rep.passed
    assert np.all(rep.grad <= 1e-12)
