import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from spectralmono.errors import GenerationExhausted
from spectralmono.linalg import commute_check, is_irreducible
from spectralmono.spectral import SignTag, classify_eigen_signs, symmetrizable_eigenvalues
from spectralmono.testgen import (
    GenSpec,
    child_seed,
    gen_block_diagonal,
    gen_commuting_pair,
    gen_nonscalar_diag,
    gen_rank_one_draw,
    gen_reversible_chain,
    gen_site_constant_diag,
    gen_stochastic,
    generate_chain,
)


def test_determinism():
    a = gen_reversible_chain(GenSpec(42, 7, "C2"))
    b = gen_reversible_chain(GenSpec(42, 7, "C2"))
    assert a.tobytes() == b.tobytes()
    assert not np.array_equal(a, gen_reversible_chain(GenSpec(43, 7, "C2")))
    assert child_seed(1, 2) == child_seed(1, 2) != child_seed(2, 1)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**63 - 1), st.integers(2, 20), st.sampled_from(["C1", "C2", "C3"]))
def test_chains_have_requested_class(seed, n, cls):
    P = gen_reversible_chain(GenSpec(seed, n, cls))
    assert np.all(P >= 0) and np.allclose(P.sum(axis=0), 1.0, atol=1e-12)
    assert is_irreducible(P)
    lam = symmetrizable_eigenvalues(P)
    assert classify_eigen_signs(lam).tag.value == cls
    if cls != "C3":
        assert np.all(np.abs(lam[1:]) >= 1e-3 * (1 - 1e-9))


def test_mixed():
    P = gen_reversible_chain(GenSpec(5, 6, "Mixed"))
    assert classify_eigen_signs(symmetrizable_eigenvalues(P)).tag is SignTag.MIXED
    with pytest.raises(ValueError):
        gen_reversible_chain(GenSpec(5, 2, "Mixed"))


def test_unsupported_class():
    with pytest.raises(ValueError):
        gen_reversible_chain(GenSpec(0, 4, "C4"))


def test_exhaustion_is_reported():
    # a gap above every admissible |lambda| cannot be met
    with pytest.raises(GenerationExhausted):
        generate_chain(GenSpec(0, 8, "C2", spectral_gap=0.5, attempts=5))


def test_draw_count():
    _, tries = generate_chain(GenSpec(3, 4, "C1"))
    assert 1 <= tries <= 100


@pytest.mark.parametrize("mode, n", [("polynomial", 6), ("shared_k", 5), ("kronecker", 6)])
def test_commuting_pairs(mode, n):
    A, B = gen_commuting_pair(GenSpec(9, n, "C1"), mode)
    assert commute_check(A, B)
    assert np.all(A >= 0) and np.all(B >= 0)


def test_kronecker_needs_composite_n():
    with pytest.raises(ValueError):
        gen_commuting_pair(GenSpec(1, 7, "C1"), "kronecker")


def test_diagonals():
    d = gen_nonscalar_diag(3, 5, ratio_cap=2.0)
    assert d.min() >= 1.0 and d.max() <= 2.0 and np.ptp(d) > 0
    with pytest.raises(ValueError):
        gen_nonscalar_diag(3, 1)
    with pytest.raises(ValueError):
        gen_nonscalar_diag(3, 5, ratio_cap=1.0)
    D = gen_site_constant_diag(4, (2, 3), site=1).reshape(2, 3)
    assert np.allclose(np.ptp(D, axis=1), 0.0) and np.ptp(D[:, 0]) > 0


@pytest.mark.parametrize("reversible", [True, False])
def test_stochastic(reversible):
    P = gen_stochastic(8, 9, reversible=reversible)
    assert np.allclose(P.sum(axis=0), 1.0) and is_irreducible(P)
    assert np.all(np.diag(P) < 1)


def test_rank_one_regimes():
    for regime, check in (("lt", lambda a: a < 1), ("eq", lambda a: a == 1), ("gt", lambda a: a > 1)):
        v, a = gen_rank_one_draw(11, 4, regime)
        assert check(a) and a <= np.min(1 / (1 - v))
    with pytest.raises(ValueError):
        gen_rank_one_draw(11, 4, "ne")


def test_block_diagonal_is_reducible():
    P = gen_block_diagonal(2, [2, 3])
    assert P.shape == (5, 5) and not is_irreducible(P)
    assert not P[:2, 2:].any() and not P[2:, :2].any()
