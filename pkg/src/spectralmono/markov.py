"""Reversible chains, sojourn times, mobility indices and the rank-one family.

Stochastic matrices are held column-stochastic internally (``e^T P = e^T``);
:func:`as_column_stochastic` accepts either orientation. Quantities that
depend only on the diagonal or the spectrum (sojourn times, the
harmonic-mean identity, mobility indices, spectral radii of ``P D``) are the
same in both orientations.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._checks import Check, Relation, observe
from ._config import ToleranceConfig, resolve
from .errors import (
    AbsorbingState,
    AlphaOutOfRange,
    ComplexSpectrum,
    NotStochastic,
    NotSymmetrizable,
    Reducible,
    ShapeMismatch,
)
from .linalg import as_diagonal, as_matrix, is_irreducible, is_nonscalar, spectral_radius
from .spectral import HomotopyFamily, SignClass, SignTag, classify_eigen_signs, drdm, symmetrizable_eigenvalues
from .symmetrize import detect_symmetrizer

__all__ = [
    "as_column_stochastic",
    "is_reversible",
    "SojournReport",
    "sojourn_report",
    "shorrocks_index",
    "geweke_index",
    "BoundReport",
    "sojourn_bound_class",
    "rank_one_chain",
    "EquivalenceReport",
    "rank_one_equivalence_report",
]


def as_column_stochastic(P, convention: str = "auto", tol: ToleranceConfig | None = None):
    """Validate ``P`` and return ``(P_column, transposed)``.

    ``convention`` is ``"column"`` (``e^T P = e^T``), ``"row"`` (``P e = e``)
    or ``"auto"``, which picks whichever sums are within tolerance and
    prefers columns when both are.
    """
    tol = resolve(tol)
    P = as_matrix(P, nonnegative=True)
    n = P.shape[0]
    band = tol.tol_norm * max(1, n)
    col_ok = np.abs(P.sum(axis=0) - 1.0).max() <= band
    row_ok = np.abs(P.sum(axis=1) - 1.0).max() <= band
    if convention == "column":
        if not col_ok:
            raise NotStochastic("column sums differ from 1")
        return P, False
    if convention == "row":
        if not row_ok:
            raise NotStochastic("row sums differ from 1")
        return P.T.copy(), True
    if convention != "auto":
        raise ValueError(f"unknown convention {convention!r}")
    if col_ok:
        return P, False
    if row_ok:
        return P.T.copy(), True
    raise NotStochastic("neither row sums nor column sums equal 1")


def is_reversible(P, tol: ToleranceConfig | None = None) -> bool:
    """Whether the irreducible chain ``P`` satisfies detailed balance (is symmetrizable)."""
    tol = resolve(tol)
    P, _ = as_column_stochastic(P, tol=tol)
    if not is_irreducible(P):
        raise Reducible("reversibility test needs an irreducible chain")
    try:
        detect_symmetrizer(P, tol)
    except NotSymmetrizable:
        return False
    return True


@dataclass(frozen=True)
class SojournReport:
    """Sojourn times and the mobility indices derived from them.

    ``geweke`` is ``None`` when ``P`` is not reversible (its spectrum need
    not be real).
    """

    tau: np.ndarray
    EH: float
    EA_lambda: float
    identity_residual: float
    bound: Relation
    shorrocks: float
    geweke: float | None

    @property
    def n(self) -> int:
        return int(self.tau.shape[0])

    @property
    def threshold(self) -> float:
        """``1 + 1/(n - 1)``, the value of ``EH`` for a rank-one chain."""
        return 1.0 + 1.0 / (self.n - 1)


def _diagonal_checked(P: np.ndarray, tol: ToleranceConfig) -> np.ndarray:
    d = np.diag(P).copy()
    bad = np.flatnonzero(d >= 1.0 - tol.absorbing_tol)
    if bad.size:
        raise AbsorbingState(f"state {int(bad[0])} is absorbing (P_ii = {d[bad[0]]!r})")
    return d


def shorrocks_index(P, tol: ToleranceConfig | None = None) -> float:
    """``(1/(n-1)) * sum(1 - P_ii)``."""
    P, _ = as_column_stochastic(P, tol=tol)
    n = P.shape[0]
    return float(np.sum(1.0 - np.diag(P)) / (n - 1))


def geweke_index(P, tol: ToleranceConfig | None = None) -> float:
    """``(n - sum|lambda_i|)/(n-1)`` for a reversible chain.

    Raises
    ------
    ComplexSpectrum
        If ``P`` is not symmetrizable, so its eigenvalues need not be real.
    """
    tol = resolve(tol)
    P, _ = as_column_stochastic(P, tol=tol)
    n = P.shape[0]
    try:
        lam = symmetrizable_eigenvalues(P, tol)
    except NotSymmetrizable as exc:
        raise ComplexSpectrum(f"Geweke index needs a real spectrum: {exc}") from exc
    return float((n - np.sum(np.abs(lam))) / (n - 1))


def sojourn_report(P, tol: ToleranceConfig | None = None, convention: str = "auto") -> SojournReport:
    """Expected sojourn times and the harmonic-mean identity ``EH (1 - trace/n) = 1``.

    Raises
    ------
    AbsorbingState
        If some ``P_ii >= 1 - tol.absorbing_tol``.
    """
    tol = resolve(tol)
    P, _ = as_column_stochastic(P, convention, tol)
    n = P.shape[0]
    if n < 2:
        raise ShapeMismatch("sojourn report needs at least two states")
    d = _diagonal_checked(P, tol)
    tau = 1.0 / (1.0 - d)
    EH = float(n / np.sum(1.0 / tau))
    EA = float(np.trace(P) / n)
    resid = abs(EH * (1.0 - EA) - 1.0)
    threshold = 1.0 + 1.0 / (n - 1)
    bound = observe(EH - threshold, 1e-12 * (1.0 + EH))
    try:
        geweke = geweke_index(P, tol)
    except ComplexSpectrum:
        geweke = None
    return SojournReport(
        tau=tau,
        EH=EH,
        EA_lambda=EA,
        identity_residual=float(resid),
        bound=bound,
        shorrocks=shorrocks_index(P, tol),
        geweke=geweke,
    )


@dataclass(frozen=True)
class BoundReport:
    """``EH`` against ``1 + 1/(n-1)`` next to the eigenvalue sign class."""

    EH: float
    threshold: float
    relation: Relation
    sign_class: SignClass
    predicted: Relation
    consistent: bool


def _bound_prediction(sc: SignClass) -> Relation:
    # EH > n/(n-1) exactly when the non-Perron eigenvalues sum to a positive value
    if sc.tag is SignTag.C1_ALL_POSITIVE:
        return Relation.GT
    if sc.tag is SignTag.C2_NON_PERRON_NEGATIVE:
        return Relation.LT
    if sc.tag is SignTag.C3_NON_PERRON_ZERO:
        return Relation.EQ
    if sc.tag is SignTag.C4_SAME_SIGN_WITH_ZEROS:
        return Relation.GT if sc.sign > 0 else Relation.LT
    return Relation.UNKNOWN


def sojourn_bound_class(P, tol: ToleranceConfig | None = None) -> BoundReport:
    """Relate the harmonic mean sojourn time to the sign class of a reversible chain.

    C1 predicts ``EH > 1 + 1/(n-1)``, C2 predicts ``<`` and C3 equality. The
    equality band follows from ``zero_tol``: eigenvalues counted as zero may
    move the trace by up to ``(n-1) * zero_tol``.
    """
    tol = resolve(tol)
    P, _ = as_column_stochastic(P, tol=tol)
    if not is_irreducible(P):
        raise Reducible("bound classification needs an irreducible chain")
    rep = sojourn_report(P, tol)
    lam = symmetrizable_eigenvalues(P, tol)
    sc = classify_eigen_signs(lam)
    band = 10.0 * sc.zero_tol * max(rep.EH, rep.threshold) ** 2 + 1e-12
    relation = observe(rep.EH - rep.threshold, band)
    predicted = _bound_prediction(sc)
    return BoundReport(rep.EH, rep.threshold, relation, sc, predicted, predicted.accepts(relation))


def rank_one_chain(v, alpha: float, tol: ToleranceConfig | None = None) -> np.ndarray:
    """``(1 - alpha) I + alpha v e^T`` for a positive probability vector ``v``.

    Valid for ``0 < alpha <= min_i 1/(1 - v_i)``. At the upper end some
    diagonal entries are zero; rounding residue there is clipped.

    Raises
    ------
    AlphaOutOfRange
        If ``alpha`` lies outside the interval.
    """
    tol = resolve(tol)
    v = np.asarray(v, dtype=float).ravel()
    n = v.size
    if n < 2:
        raise ShapeMismatch("rank-one chain needs at least two states")
    if not np.all(np.isfinite(v)) or np.any(v <= 0):
        raise ValueError("v must be strictly positive")
    if abs(v.sum() - 1.0) > tol.tol_norm * n:
        raise ValueError(f"v must sum to 1, got {v.sum()!r}")
    alpha = float(alpha)
    cap = float(np.min(1.0 / (1.0 - v)))
    if not 0.0 < alpha <= cap * (1.0 + 1e-12):
        raise AlphaOutOfRange(f"alpha = {alpha!r} outside (0, {cap!r}]")
    P = (1.0 - alpha) * np.eye(n) + alpha * np.outer(v, np.ones(n))
    d = np.diag(P)
    if np.any(d < -1e-12):
        raise AlphaOutOfRange(f"alpha = {alpha!r} makes a diagonal entry negative")
    np.fill_diagonal(P, np.maximum(d, 0.0))
    return P


@dataclass(frozen=True)
class EquivalenceReport:
    """Three legs for a rank-one chain ``P`` that should agree in sign.

    Each leg is mapped to +1, 0 or -1: ``EH`` above/at/below
    ``1 + 1/(n-1)``; ``dr(P[(1-m)I + mQ]D)/dm`` negative/zero/positive at
    every sampled ``m``; ``r(P^2 D)`` below/equal/above ``r(P D)``.
    """

    alpha: float
    EH: float
    threshold: float
    derivatives: np.ndarray
    grid: np.ndarray
    r_PD: float
    r_P2D: float
    legs: dict
    consistent: bool
    checks: list


def rank_one_equivalence_report(
    v,
    alpha: float,
    D,
    Q=None,
    grid=(0.0, 0.25, 0.5, 0.75, 1.0),
    tol: ToleranceConfig | None = None,
    deriv_tol: float = 1e-10,
    order_tol: float = 1e-9,
) -> EquivalenceReport:
    """Evaluate the sojourn bound, derivative sign and squared ordering for ``P`` in the rank-one family.

    ``Q`` defaults to ``v e^T``, which commutes with ``P``. ``D`` must be a
    nonscalar positive diagonal.
    """
    tol = resolve(tol)
    P = rank_one_chain(v, alpha, tol)
    n = P.shape[0]
    d = as_diagonal(D, n)
    if not is_nonscalar(d, tol):
        raise ValueError("D must be nonscalar")
    vv = np.asarray(v, dtype=float).ravel()
    Qm = np.outer(vv, np.ones(n)) if Q is None else as_column_stochastic(Q, tol=tol)[0]
    fam = HomotopyFamily.affine(P, Qm, d, tol)
    grid = np.asarray(grid, dtype=float)
    ders = np.array([drdm(fam, m, with_fd=False).dr_analytic for m in grid])

    rep = sojourn_report(P, tol)
    eh_band = 1e-9 * rep.threshold
    eh_sign = int(np.sign(rep.EH - rep.threshold)) if abs(rep.EH - rep.threshold) > eh_band else 0

    signs = {(-1 if x > deriv_tol else 1 if x < -deriv_tol else 0) for x in ders}
    der_sign = signs.pop() if len(signs) == 1 else None

    r_PD = spectral_radius(P * d[None, :])
    r_P2D = spectral_radius((P @ P) * d[None, :])
    diff = r_P2D - r_PD
    band = order_tol * max(1.0, r_PD, r_P2D)
    sq_sign = -1 if diff > band else 1 if diff < -band else 0

    legs = {"sojourn": eh_sign, "derivative": der_sign, "squared": sq_sign}
    consistent = der_sign is not None and eh_sign == der_sign == sq_sign
    checks = [
        Check("derivative sign constant over grid", der_sign is not None),
        Check("derivative leg matches sojourn leg", der_sign == eh_sign, der_sign, eh_sign),
        Check("squared ordering leg matches sojourn leg", sq_sign == eh_sign, sq_sign, eh_sign),
    ]
    return EquivalenceReport(
        alpha=float(alpha),
        EH=rep.EH,
        threshold=rep.threshold,
        derivatives=ders,
        grid=grid,
        r_PD=r_PD,
        r_P2D=r_P2D,
        legs=legs,
        consistent=bool(consistent),
        checks=checks,
    )
