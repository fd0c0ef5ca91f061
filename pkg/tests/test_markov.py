import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from spectralmono._checks import Relation
from spectralmono.errors import AbsorbingState, AlphaOutOfRange, ComplexSpectrum, NotStochastic
from spectralmono.markov import (
    as_column_stochastic,
    geweke_index,
    is_reversible,
    rank_one_chain,
    rank_one_equivalence_report,
    shorrocks_index,
    sojourn_bound_class,
    sojourn_report,
)
from spectralmono.testgen import GenSpec, gen_reversible_chain, gen_stochastic

P2 = np.array([[0.0, 1.0], [1.0, 0.0]])
V3 = np.array([0.2, 0.3, 0.5])


class TestConvention:
    def test_row_input_is_transposed(self):
        R = np.array([[0.9, 0.1], [0.4, 0.6]])
        P, flipped = as_column_stochastic(R)
        assert flipped and np.array_equal(P, R.T)

    def test_explicit_conventions(self):
        C = np.array([[0.9, 0.4], [0.1, 0.6]])
        assert not as_column_stochastic(C, "column")[1]
        with pytest.raises(NotStochastic):
            as_column_stochastic(C, "row")
        with pytest.raises(NotStochastic):
            as_column_stochastic(np.full((2, 2), 0.3))
        with pytest.raises(ValueError):
            as_column_stochastic(C, "diagonal")

    def test_reversibility(self):
        assert is_reversible(P2)
        cyc = np.roll(np.eye(3), 1, axis=0)
        assert not is_reversible(0.5 * np.eye(3) + 0.3 * cyc + 0.2 * cyc.T)


class TestSojourn:
    def test_uniform_lazy_chain(self):
        rep = sojourn_report(0.5 * np.eye(2) + 0.5 * P2)
        assert np.allclose(rep.tau, 2.0)
        assert rep.EH == pytest.approx(2.0) and rep.bound is Relation.EQ
        assert rep.shorrocks == pytest.approx(1.0) and rep.geweke == pytest.approx(1.0)

    def test_exchange(self):
        rep = sojourn_report(P2)
        assert rep.EH == pytest.approx(1.0) and rep.bound is Relation.LT
        assert rep.shorrocks == pytest.approx(2.0) and rep.geweke == pytest.approx(0.0)

    def test_absorbing(self):
        with pytest.raises(AbsorbingState):
            sojourn_report(np.array([[1.0, 0.5], [0.0, 0.5]]))

    def test_nonreversible_has_no_geweke(self):
        cyc = np.roll(np.eye(3), 1, axis=0)
        P = 0.5 * np.eye(3) + 0.3 * cyc + 0.2 * cyc.T
        assert sojourn_report(P).geweke is None
        with pytest.raises(ComplexSpectrum):
            geweke_index(P)

    @settings(max_examples=60, deadline=None)
    @given(st.integers(0, 2**63 - 1), st.integers(2, 15), st.booleans())
    def test_identity_and_shorrocks(self, seed, n, reversible):
        P = gen_stochastic(seed, n, reversible=reversible)
        rep = sojourn_report(P)
        assert rep.identity_residual <= 1e-12 * (1 + rep.EH)
        assert rep.shorrocks == pytest.approx(n / (n - 1) / rep.EH, rel=1e-13)
        assert shorrocks_index(P.T) == pytest.approx(rep.shorrocks)

    @settings(max_examples=40, deadline=None)
    @given(st.integers(0, 2**63 - 1), st.integers(2, 10), st.sampled_from(["C1", "C2", "C3"]))
    def test_bound_class(self, seed, n, cls):
        if cls == "C2" and n > 2:
            n = min(n, 6)
        P = gen_reversible_chain(GenSpec(seed, n, cls))
        rep = sojourn_bound_class(P)
        assert rep.consistent
        assert rep.predicted is {"C1": Relation.GT, "C2": Relation.LT, "C3": Relation.EQ}[cls]


class TestRankOne:
    def test_spectrum(self):
        P = rank_one_chain(V3, 0.6)
        assert np.allclose(P.sum(axis=0), 1.0)
        assert np.allclose(np.sort(np.linalg.eigvals(P).real), [0.4, 0.4, 1.0])

    def test_upper_end_has_zero_diagonal(self):
        cap = float(np.min(1 / (1 - V3)))
        P = rank_one_chain(V3, cap)
        assert P.min() >= 0.0 and np.isclose(np.diag(P).min(), 0.0, atol=1e-15)

    @pytest.mark.parametrize("alpha", [0.0, -0.1, 3.0])
    def test_alpha_range(self, alpha):
        with pytest.raises(AlphaOutOfRange):
            rank_one_chain(V3, alpha)

    @pytest.mark.parametrize("alpha, sign", [(0.5, 1), (1.0, 0), (1.2, -1)])
    def test_equivalence_legs(self, alpha, sign):
        rep = rank_one_equivalence_report(V3, alpha, [1.0, 2.0, 4.0])
        assert rep.consistent
        assert rep.legs == {"sojourn": sign, "derivative": sign, "squared": sign}

    def test_scalar_D_rejected(self):
        with pytest.raises(ValueError):
            rank_one_equivalence_report(V3, 0.5, [2.0, 2.0, 2.0])
