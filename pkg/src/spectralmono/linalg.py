"""Dense real matrix primitives.

Symmetric eigendecomposition (cyclic Jacobi or LAPACK), Perron pair
extraction for irreducible nonnegative matrices, spectral radius of
arbitrary nonnegative matrices, Kronecker products and a few structural
predicates.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from functools import reduce
from typing import Sequence

import numpy as np
from scipy.sparse.csgraph import connected_components

from ._config import ToleranceConfig, resolve
from .errors import (
    DimensionOverflow,
    NoConvergence,
    NotFinite,
    NotNonnegative,
    NotSquare,
    NotSymmetric,
    Reducible,
    ShapeMismatch,
)

__all__ = [
    "EigenDecomposition",
    "PerronPair",
    "as_matrix",
    "as_diagonal",
    "inf_norm",
    "jacobi_eigh",
    "symmetric_eigh",
    "perron",
    "spectral_radius",
    "kron",
    "kron_apply",
    "is_irreducible",
    "is_nonscalar",
    "commute_check",
]


def as_matrix(A, *, square: bool = True, nonnegative: bool = False) -> np.ndarray:
    """Validate and convert ``A`` to a 2-D float array."""
    A = np.asarray(A, dtype=float)
    if A.ndim != 2:
        raise ShapeMismatch(f"expected a 2-D matrix, got shape {A.shape}")
    if square and A.shape[0] != A.shape[1]:
        raise NotSquare(f"expected a square matrix, got shape {A.shape}")
    if not np.all(np.isfinite(A)):
        raise NotFinite("matrix has NaN or infinite entries")
    if nonnegative and np.any(A < 0):
        i, j = np.argwhere(A < 0)[0]
        raise NotNonnegative(f"negative entry A[{i},{j}] = {A[i, j]!r}")
    return A


def as_diagonal(D, n: int | None = None, *, positive: bool = True) -> np.ndarray:
    """Return the diagonal of ``D`` as a 1-D array.

    Accepts either a vector of diagonal entries or a square diagonal matrix.
    """
    D = np.asarray(D, dtype=float)
    if D.ndim == 2:
        if D.shape[0] != D.shape[1] or np.any(D - np.diag(np.diag(D))):
            raise ShapeMismatch("expected a diagonal matrix")
        D = np.diag(D).copy()
    if D.ndim != 1:
        raise ShapeMismatch(f"expected a vector of diagonal entries, got shape {D.shape}")
    if n is not None and D.shape[0] != n:
        raise ShapeMismatch(f"diagonal has length {D.shape[0]}, expected {n}")
    if not np.all(np.isfinite(D)):
        raise NotFinite("diagonal has NaN or infinite entries")
    if positive and np.any(D <= 0):
        raise NotNonnegative("diagonal must be strictly positive")
    return D


def inf_norm(A) -> float:
    """Induced infinity norm (max absolute row sum); max-abs for vectors."""
    A = np.asarray(A)
    if A.size == 0:
        return 0.0
    if A.ndim == 1:
        return float(np.max(np.abs(A)))
    return float(np.max(np.abs(A).sum(axis=1)))


def is_nonscalar(d, tol: ToleranceConfig | None = None) -> bool:
    """True when the diagonal ``d`` is not a multiple of the identity."""
    tol = resolve(tol)
    d = np.asarray(d, dtype=float)
    scale = max(float(np.max(np.abs(d))), np.finfo(float).tiny)
    return float(np.ptp(d)) > tol.tol_scalar * scale


@dataclass(frozen=True)
class EigenDecomposition:
    """Eigenvalues in descending order with matching orthonormal columns."""

    values: np.ndarray
    vectors: np.ndarray

    def reconstruct(self) -> np.ndarray:
        Q = self.vectors
        return (Q * self.values) @ Q.T


def _check_symmetric(S: np.ndarray, tol: ToleranceConfig) -> None:
    asym = inf_norm(S - S.T)
    if asym > tol.tol_sym * (1.0 + inf_norm(S)):
        raise NotSymmetric(f"matrix is not symmetric: ||S - S^T|| = {asym:.3e}")


def _sorted_desc(values: np.ndarray, vectors: np.ndarray) -> EigenDecomposition:
    order = np.argsort(-values, kind="stable")
    return EigenDecomposition(values[order].copy(), vectors[:, order].copy())


def jacobi_eigh(S, tol: ToleranceConfig | None = None) -> EigenDecomposition:
    """Symmetric eigendecomposition by cyclic Jacobi rotations.

    Sweeps the strict upper triangle row by row until the off-diagonal
    Frobenius norm drops below ``1e-14 * ||S||_F``.

    Raises
    ------
    NotSymmetric
        If ``S`` is not symmetric within ``tol.tol_sym``.
    NoConvergence
        If ``tol.max_sweeps`` sweeps do not reach the threshold.
    """
    tol = resolve(tol)
    S = as_matrix(S)
    _check_symmetric(S, tol)
    n = S.shape[0]
    a = 0.5 * (S + S.T)
    V = np.eye(n)
    fro = np.linalg.norm(a)
    threshold = 1e-14 * fro
    for _ in range(tol.max_sweeps):
        off = np.linalg.norm(a - np.diag(np.diag(a)))
        if off <= threshold:
            return _sorted_desc(np.diag(a).copy(), V)
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if abs(apq) <= 1e-300:
                    continue
                theta = (a[q, q] - a[p, p]) / (2.0 * apq)
                t = np.copysign(1.0, theta) / (abs(theta) + np.hypot(theta, 1.0))
                c = 1.0 / np.hypot(t, 1.0)
                s = t * c
                ap = a[:, p].copy()
                aq = a[:, q]
                a[:, p] = c * ap - s * aq
                a[:, q] = s * ap + c * aq
                ap = a[p, :].copy()
                aq = a[q, :]
                a[p, :] = c * ap - s * aq
                a[q, :] = s * ap + c * aq
                a[p, q] = a[q, p] = 0.0
                vp = V[:, p].copy()
                V[:, p] = c * vp - s * V[:, q]
                V[:, q] = s * vp + c * V[:, q]
    off = np.linalg.norm(a - np.diag(np.diag(a)))
    if off <= threshold:
        return _sorted_desc(np.diag(a).copy(), V)
    raise NoConvergence(f"Jacobi did not converge in {tol.max_sweeps} sweeps (off = {off:.3e})")


def symmetric_eigh(S, tol: ToleranceConfig | None = None) -> EigenDecomposition:
    """Descending symmetric eigendecomposition using ``tol.eigensolver``."""
    tol = resolve(tol)
    if tol.eigensolver == "jacobi":
        return jacobi_eigh(S, tol)
    if tol.eigensolver != "lapack":
        raise ValueError(f"unknown eigensolver {tol.eigensolver!r}")
    S = as_matrix(S)
    _check_symmetric(S, tol)
    w, Q = np.linalg.eigh(0.5 * (S + S.T))
    return _sorted_desc(w, Q)


@dataclass(frozen=True)
class PerronPair:
    """Perron root with right vector ``v`` (``sum(v) == 1``) and left vector ``u`` (``u @ v == 1``)."""

    rho: float
    v: np.ndarray
    u: np.ndarray

    def residuals(self, A) -> tuple[float, float]:
        A = np.asarray(A, dtype=float)
        return (
            inf_norm(A @ self.v - self.rho * self.v),
            inf_norm(self.u @ A - self.rho * self.u),
        )


def _power_vector(B: np.ndarray, shift: float, tol: ToleranceConfig) -> np.ndarray:
    n = B.shape[0]
    x = np.full(n, 1.0 / n)
    Bs = B + shift * np.eye(n)
    check_every = 8
    for it in range(1, tol.max_iters + 1):
        y = Bs @ x
        x = y / y.sum()
        if it % check_every == 0:
            Bx = B @ x
            rho = Bx.sum()  # x sums to one
            if rho <= 0:
                continue
            if inf_norm(Bx - rho * x) <= 0.1 * tol.tol_eig * rho * inf_norm(x):
                return x
    raise NoConvergence(f"power iteration did not converge in {tol.max_iters} iterations")


def _lapack_vector(B: np.ndarray) -> np.ndarray:
    w, X = np.linalg.eig(B)
    k = int(np.argmax(w.real))
    x = X[:, k].real
    return x / x.sum()


def perron(A, tol: ToleranceConfig | None = None, method: str = "power") -> PerronPair:
    """Perron root and normalized left/right Perron vectors.

    Parameters
    ----------
    A : (n, n) array_like
        Nonnegative irreducible matrix.
    method : {"power", "eig"}
        ``"power"`` runs power iteration on ``A + c I`` (``c > 0`` makes the
        shifted matrix primitive); ``"eig"`` takes the dominant pair from a
        dense LAPACK eigensolve. Both are verified by residuals.

    Returns
    -------
    PerronPair
        ``rho`` is the two-sided Rayleigh quotient ``u^T A v / u^T v``.
    """
    tol = resolve(tol)
    A = as_matrix(A, nonnegative=True)
    if not is_irreducible(A):
        raise Reducible("matrix is reducible; the Perron pair is not unique")
    n = A.shape[0]
    if method == "power":
        shift = max(float(np.max(np.diag(A))), inf_norm(A) / n)
        v = _power_vector(A, shift, tol)
        u = _power_vector(A.T, shift, tol)
    elif method == "eig":
        v = _lapack_vector(A)
        u = _lapack_vector(A.T)
    else:
        raise ValueError(f"unknown method {method!r}")
    if np.any(v <= 0) or np.any(u <= 0):
        raise NoConvergence("Perron vectors are not strictly positive")
    u = u / (u @ v)
    rho = float(u @ A @ v)
    pair = PerronPair(rho, v, u)
    rv, ru = pair.residuals(A)
    scale = max(rho, np.finfo(float).tiny)
    if rv > tol.tol_eig * scale * max(1.0, inf_norm(v)) or ru > tol.tol_eig * scale * max(
        1.0, inf_norm(u)
    ):
        raise NoConvergence(f"Perron residuals too large: right {rv:.3e}, left {ru:.3e}")
    return pair


def spectral_radius(A) -> float:
    """Spectral radius ``max |lambda_i|`` of a square nonnegative matrix.

    Reducible matrices are split into strongly connected components and the
    largest component radius is returned.
    """
    A = as_matrix(A, nonnegative=True)
    n = A.shape[0]
    if n == 1:
        return float(abs(A[0, 0]))
    ncomp, labels = connected_components(A > 0, directed=True, connection="strong")
    if ncomp == 1:
        return float(np.max(np.abs(np.linalg.eigvals(A))))
    best = 0.0
    for c in range(ncomp):
        idx = np.flatnonzero(labels == c)
        block = A[np.ix_(idx, idx)]
        if idx.size == 1:
            r = abs(block[0, 0])
        else:
            r = float(np.max(np.abs(np.linalg.eigvals(block))))
        best = max(best, r)
    return float(best)


def kron(factors: Sequence, dim_cap: int | None = None) -> np.ndarray:
    """Left-fold Kronecker product ``((F1 x F2) x F3) x ...``."""
    if len(factors) == 0:
        raise ValueError("kron needs at least one factor")
    mats = [np.atleast_2d(np.asarray(F, dtype=float)) for F in factors]
    cap = resolve(None).dim_cap if dim_cap is None else dim_cap
    rows = int(np.prod([M.shape[0] for M in mats]))
    cols = int(np.prod([M.shape[1] for M in mats]))
    if max(rows, cols) > cap:
        raise DimensionOverflow(f"Kronecker product of size {rows}x{cols} exceeds cap {cap}")
    return reduce(np.kron, mats)


def kron_apply(mats: Sequence[np.ndarray], x: np.ndarray) -> np.ndarray:
    """Compute ``(M1 x M2 x ... x ML) @ x`` without forming the product.

    Square factors only; ``x`` is indexed big-endian like :func:`kron`.
    """
    shape = tuple(M.shape[0] for M in mats)
    X = np.asarray(x, dtype=float).reshape(shape)
    for axis, M in enumerate(mats):
        X = np.moveaxis(np.tensordot(M, X, axes=([1], [axis])), 0, axis)
    return X.reshape(-1)


def _reaches_all(adj: np.ndarray) -> bool:
    n = adj.shape[0]
    seen = np.zeros(n, dtype=bool)
    seen[0] = True
    queue = deque([0])
    while queue:
        i = queue.popleft()
        for j in np.flatnonzero(adj[i] & ~seen):
            seen[j] = True
            queue.append(j)
    return bool(seen.all())


def is_irreducible(A) -> bool:
    """True iff the digraph of the positive pattern of ``A`` is strongly connected.

    A 1x1 matrix counts as irreducible only when its entry is positive.
    """
    A = as_matrix(A, nonnegative=True)
    if A.shape[0] == 1:
        return bool(A[0, 0] > 0)
    pattern = A > 0
    return _reaches_all(pattern) and _reaches_all(pattern.T)


def commute_check(A, B, tol: float = 1e-9) -> bool:
    """``||AB - BA|| <= tol * (1 + ||A|| ||B||)`` in the infinity norm."""
    A = as_matrix(A)
    B = as_matrix(B)
    if A.shape != B.shape:
        raise ShapeMismatch(f"shapes differ: {A.shape} vs {B.shape}")
    return inf_norm(A @ B - B @ A) <= tol * (1.0 + inf_norm(A) * inf_norm(B))
