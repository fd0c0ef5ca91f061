"""Diagonal symmetrizability and canonical forms.

A nonnegative ``A`` is diagonally symmetrizable when ``E^{-1} A E`` is
symmetric for a positive diagonal ``E``. Such an ``A`` factors as
``A = E K diag(lam) K^T E^{-1}`` with ``K`` orthogonal; commuting pairs share
``E`` and ``K``.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from ._config import ToleranceConfig, resolve
from .errors import (
    CycleInconsistent,
    JointDiagonalizationFailed,
    NotCommuting,
    NotJointlySymmetrizable,
    NotSymmetrizable,
    PatternAsymmetric,
    Reducible,
    ShapeMismatch,
)
from .linalg import as_matrix, commute_check, inf_norm, is_irreducible, symmetric_eigh

__all__ = [
    "Symmetrizer",
    "CanonicalForm",
    "JointCanonicalForm",
    "Stochasticized",
    "detect_symmetrizer",
    "is_symmetrizable",
    "canonical_form",
    "joint_canonical_form",
    "stochasticize",
]


@dataclass(frozen=True)
class Symmetrizer:
    """Positive diagonal ``E`` (as a vector) with ``E^{-1} A E`` symmetric.

    ``E`` equals 1 at the first index of every connected component of the
    positive pattern; ``components`` labels the component of each index.
    """

    E: np.ndarray
    components: np.ndarray

    def symmetric(self, A) -> np.ndarray:
        A = np.asarray(A, dtype=float)
        S = A * self.E[None, :] / self.E[:, None]
        return 0.5 * (S + S.T)


def _witness_cycle(parent: np.ndarray, i: int, j: int) -> tuple[int, ...]:
    def to_root(k):
        path = [k]
        while parent[k] >= 0:
            k = parent[k]
            path.append(k)
        return path

    pi, pj = to_root(i), to_root(j)
    on_pj = set(pj)
    lca = next(k for k in pi if k in on_pj)
    up = pi[: pi.index(lca) + 1]
    down = pj[: pj.index(lca)][::-1]
    cycle = up + down
    # canonical rotation: smallest index first, smaller neighbour second
    k = cycle.index(min(cycle))
    cycle = cycle[k:] + cycle[:k]
    if len(cycle) > 2 and cycle[1] > cycle[-1]:
        cycle = [cycle[0]] + cycle[1:][::-1]
    return tuple(int(c) for c in cycle)


def _cycle_products(A: np.ndarray, cycle: tuple[int, ...]) -> tuple[float, float]:
    nxt = cycle[1:] + cycle[:1]
    forward = float(np.prod([A[a, b] for a, b in zip(cycle, nxt)]))
    backward = float(np.prod([A[b, a] for a, b in zip(cycle, nxt)]))
    return forward, backward


def detect_symmetrizer(A, tol: ToleranceConfig | None = None) -> Symmetrizer:
    """Find ``E`` with ``E^{-1} A E`` symmetric, or explain why none exists.

    Ratios ``E_j / E_i = sqrt(A_ji / A_ij)`` are propagated along a BFS
    spanning forest of the positive pattern; every remaining edge must
    satisfy the same ratio, which is the Kolmogorov cycle condition.

    Raises
    ------
    PatternAsymmetric
        ``A_ij > 0`` while ``A_ji == 0``.
    CycleInconsistent
        A non-tree edge closes a cycle whose forward and backward products
        differ; the exception carries the cycle.
    """
    tol = resolve(tol)
    A = as_matrix(A, nonnegative=True)
    n = A.shape[0]
    pattern = A > 0
    bad = np.argwhere(pattern & ~pattern.T)
    if bad.size:
        i, j = bad[0]
        raise PatternAsymmetric((int(i), int(j)))

    E = np.ones(n)
    parent = np.full(n, -1)
    comp = np.full(n, -1)
    tree = np.zeros((n, n), dtype=bool)
    label = 0
    for root in range(n):
        if comp[root] >= 0:
            continue
        comp[root] = label
        queue = deque([root])
        while queue:
            i = queue.popleft()
            for j in np.flatnonzero(pattern[i]):
                if comp[j] < 0:
                    comp[j] = label
                    parent[j] = i
                    tree[i, j] = tree[j, i] = True
                    E[j] = E[i] * np.sqrt(A[j, i] / A[i, j])
                    queue.append(j)
        label += 1

    iu, ju = np.nonzero(np.triu(pattern & ~tree, k=1))
    if iu.size:
        s_ij = A[iu, ju] * E[ju] / E[iu]
        s_ji = A[ju, iu] * E[iu] / E[ju]
        rel = np.abs(s_ij - s_ji) / np.maximum(s_ij, s_ji)
        worst = int(np.argmax(rel))
        if rel[worst] > tol.tol_sym:
            cycle = _witness_cycle(parent, int(iu[worst]), int(ju[worst]))
            forward, backward = _cycle_products(A, cycle)
            raise CycleInconsistent(cycle, forward, backward)
    return Symmetrizer(E, comp)


def is_symmetrizable(A, tol: ToleranceConfig | None = None) -> bool:
    try:
        detect_symmetrizer(A, tol)
    except (PatternAsymmetric, CycleInconsistent):
        return False
    return True


def _fix_signs(K: np.ndarray) -> np.ndarray:
    K = K.copy()
    if K[:, 0].sum() < 0:
        K[:, 0] = -K[:, 0]
    for c in range(1, K.shape[1]):
        k = int(np.argmax(np.abs(K[:, c])))
        if K[k, c] < 0:
            K[:, c] = -K[:, c]
    return K


def _perron_scaling(E: np.ndarray, K: np.ndarray, tol: ToleranceConfig):
    """Rescale ``E`` so that ``v = E K_1`` sums to one and ``u = K_1 / E``.

    With this scaling ``u^T v = 1`` and ``E**2 == v / u`` hold simultaneously.
    """
    k1 = K[:, 0]
    if np.any(k1 <= 0):
        # tiny negative entries are rounding noise only if they are tiny
        if np.min(k1) < -tol.tol_eig * np.max(np.abs(k1)) or np.all(k1 <= 0):
            raise Reducible("leading eigenvector is not single-signed; matrix is reducible")
    E = E / float(E @ k1)
    return E, E * k1, k1 / E


@dataclass(frozen=True)
class CanonicalForm:
    """``A = E K diag(lam) K^T E^{-1}`` with the Perron root at index 0.

    ``E`` is scaled so that ``v = E K[:, 0]`` sums to one and
    ``u = K[:, 0] / E``; hence ``u @ v == 1``, ``E**2 == v / u`` and
    ``K[:, 0] == sqrt(u * v)``.
    """

    E: np.ndarray
    K: np.ndarray
    lam: np.ndarray
    u: np.ndarray
    v: np.ndarray
    perron_index: int = 0

    @property
    def rho(self) -> float:
        return float(self.lam[0])

    def reconstruct(self) -> np.ndarray:
        X = self.E[:, None] * self.K
        return (X * self.lam) @ (self.K.T / self.E[None, :])

    def right_eigenvectors(self) -> np.ndarray:
        return self.E[:, None] * self.K

    def left_eigenvectors(self) -> np.ndarray:
        return self.K.T / self.E[None, :]

    def residual(self, A) -> float:
        A = np.asarray(A, dtype=float)
        return inf_norm(A - self.reconstruct()) / (1.0 + inf_norm(A))


def canonical_form(A, tol: ToleranceConfig | None = None) -> CanonicalForm:
    """Canonical form of a symmetrizable irreducible nonnegative matrix."""
    tol = resolve(tol)
    A = as_matrix(A, nonnegative=True)
    if not is_irreducible(A):
        raise Reducible("canonical form needs an irreducible matrix")
    sym = detect_symmetrizer(A, tol)
    eig = symmetric_eigh(sym.symmetric(A), tol)
    K = _fix_signs(eig.vectors)
    E, v, u = _perron_scaling(sym.E, K, tol)
    return CanonicalForm(E=E, K=K, lam=eig.values, u=u, v=v)


@dataclass(frozen=True)
class JointCanonicalForm:
    """Shared ``E`` and ``K`` diagonalizing a commuting symmetrizable pair."""

    E: np.ndarray
    K: np.ndarray
    lambda_A: np.ndarray
    lambda_B: np.ndarray
    u: np.ndarray
    v: np.ndarray

    def reconstruct(self, which: str = "A") -> np.ndarray:
        lam = self.lambda_A if which == "A" else self.lambda_B
        X = self.E[:, None] * self.K
        return (X * lam) @ (self.K.T / self.E[None, :])

    def residuals(self, A, B) -> tuple[float, float]:
        A = np.asarray(A, dtype=float)
        B = np.asarray(B, dtype=float)
        return (
            inf_norm(A - self.reconstruct("A")) / (1.0 + inf_norm(A)),
            inf_norm(B - self.reconstruct("B")) / (1.0 + inf_norm(B)),
        )


def _clusters(values: np.ndarray, gap: float) -> list[np.ndarray]:
    """Split descending ``values`` wherever consecutive entries differ by more than ``gap``."""
    breaks = np.flatnonzero(-np.diff(values) > gap) + 1
    return np.split(np.arange(values.size), breaks)


def joint_canonical_form(A, B, tol: ToleranceConfig | None = None) -> JointCanonicalForm:
    """Simultaneous canonical form of commuting symmetrizable ``A`` and ``B``.

    ``E`` is the symmetrizer of ``A + B`` and must symmetrize each matrix. Inside every
    eigenvalue cluster of ``E^{-1} A E`` the basis is rotated to diagonalize
    the compressed ``E^{-1} B E``. Columns are ordered Perron first, then by
    descending ``lambda_A`` with ties broken by descending ``lambda_B``.
    """
    tol = resolve(tol)
    A = as_matrix(A, nonnegative=True)
    B = as_matrix(B, nonnegative=True)
    if A.shape != B.shape:
        raise ShapeMismatch(f"shapes differ: {A.shape} vs {B.shape}")
    if not commute_check(A, B, tol.tol_sym):
        raise NotCommuting("A and B do not commute")
    # the pattern of A + B pins E down on every component either matrix connects
    try:
        E = detect_symmetrizer(A + B, tol).E
    except NotSymmetrizable as exc:
        raise NotJointlySymmetrizable(f"A + B is not symmetrizable: {exc}") from exc
    SA_raw = A * E[None, :] / E[:, None]
    SB_raw = B * E[None, :] / E[:, None]
    for name, X in (("A", SA_raw), ("B", SB_raw)):
        if inf_norm(X - X.T) > tol.tol_sym * (1.0 + inf_norm(X)):
            raise NotJointlySymmetrizable(f"no common symmetrizer: E^-1 {name} E is not symmetric")
    SA = 0.5 * (SA_raw + SA_raw.T)
    SB = 0.5 * (SB_raw + SB_raw.T)

    eig = symmetric_eigh(SA, tol)
    K = eig.vectors.copy()
    groups = _clusters(eig.values, tol.tol_cluster * (1.0 + inf_norm(SA)))
    lamA = np.empty_like(eig.values)
    lamB = np.empty_like(eig.values)
    for g in groups:
        Q = K[:, g]
        if g.size > 1:
            sub = symmetric_eigh(Q.T @ SB @ Q, tol)
            Q = Q @ sub.vectors
            K[:, g] = Q
        lamA[g] = np.einsum("ij,ij->j", Q, SA @ Q)
        lamB[g] = np.einsum("ij,ij->j", Q, SB @ Q)

    # stable ordering: clusters of A descending, lambda_B descending within
    cluster_id = np.empty(lamA.size, dtype=int)
    for c, g in enumerate(groups):
        cluster_id[g] = c
    order = np.lexsort((-lamB, cluster_id))
    K, lamA, lamB = K[:, order], lamA[order], lamB[order]
    if lamB[0] < np.max(lamB) - tol.tol_cluster * (1.0 + inf_norm(SB)):
        raise JointDiagonalizationFailed("Perron columns of A and B do not coincide")

    K = _fix_signs(K)
    scale_b = 1.0 + inf_norm(SB)
    offB = inf_norm(K.T @ SB @ K - np.diag(lamB)) / scale_b
    offA = inf_norm(K.T @ SA @ K - np.diag(lamA)) / (1.0 + inf_norm(SA))
    if max(offA, offB) > 10 * tol.tol_cluster:
        raise JointDiagonalizationFailed(
            f"shared basis leaves off-diagonal residual {max(offA, offB):.3e}"
        )
    E, v, u = _perron_scaling(E, K, tol)
    return JointCanonicalForm(E=E, K=K, lambda_A=lamA, lambda_B=lamB, u=u, v=v)


class Stochasticized(NamedTuple):
    P: np.ndarray
    rho: float
    u: np.ndarray


def stochasticize(A, tol: ToleranceConfig | None = None) -> Stochasticized:
    """Column-stochastic ``P = D_u A D_u^{-1} / r(A)`` from the left Perron vector ``u``.

    ``A`` is recovered as ``rho * D_u^{-1} P D_u``.
    """
    tol = resolve(tol)
    A = as_matrix(A, nonnegative=True)
    cf = canonical_form(A, tol)
    u = cf.u
    P = u[:, None] * A / u[None, :] / cf.rho
    return Stochasticized(P, cf.rho, u)
