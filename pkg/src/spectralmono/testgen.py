"""Seeded generators for structured test matrices.

Every generator draws from ``numpy.random.Generator(PCG64(seed))`` so equal
seeds give bit-identical output on any platform numpy supports. Independent
streams come from :func:`child_seed`, which hashes ``(seed, stream)``
through ``numpy.random.SeedSequence``.

Chains are column-stochastic (``e^T P = e^T``). Each generated chain is
checked (irreducible, reversible, sign class, spectral gap) before it is
returned; draws that fail are discarded and redrawn up to
``GenSpec.attempts`` times.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import null_space
from scipy.stats import ortho_group

from ._config import ToleranceConfig, resolve
from .errors import GenerationExhausted, NotSymmetrizable
from .linalg import is_irreducible, is_nonscalar
from .spectral import SignTag, classify_eigen_signs, symmetrizable_eigenvalues
from .symmetrize import detect_symmetrizer

__all__ = [
    "GenSpec",
    "rng",
    "child_seed",
    "gen_reversible_chain",
    "generate_chain",
    "gen_commuting_pair",
    "gen_nonscalar_diag",
    "gen_site_constant_diag",
    "gen_stochastic",
    "gen_nonnegative",
    "gen_symmetrizable",
    "gen_rank_one_draw",
    "gen_kronecker_factors",
    "gen_block_diagonal",
]

_CLASSES = {
    "C1": SignTag.C1_ALL_POSITIVE,
    "C2": SignTag.C2_NON_PERRON_NEGATIVE,
    "C3": SignTag.C3_NON_PERRON_ZERO,
    "Mixed": SignTag.MIXED,
}


@dataclass(frozen=True)
class GenSpec:
    """Recipe for one generated chain.

    ``spectral_gap`` is the smallest ``|lambda|`` allowed for non-Perron
    eigenvalues in classes whose non-Perron eigenvalues are nonzero.
    """

    seed: int
    n: int
    sign_class: str = "C1"
    spectral_gap: float = 1e-3
    attempts: int = 100

    @property
    def tag(self) -> SignTag:
        if isinstance(self.sign_class, SignTag):
            return self.sign_class
        try:
            return _CLASSES[str(self.sign_class)]
        except KeyError:
            raise ValueError(f"unsupported sign class {self.sign_class!r}") from None


def rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(int(seed)))


def child_seed(seed: int, stream: int) -> int:
    """Deterministic 64-bit seed for stream ``stream`` of ``seed``."""
    return int(np.random.SeedSequence([int(seed), int(stream)]).generate_state(1, np.uint64)[0])


def _weighted_graph(g: np.random.Generator, n: int, density: float = 0.5) -> np.ndarray:
    """Symmetric positive weights on a random connected graph (tree plus extra edges)."""
    W = np.zeros((n, n))
    order = g.permutation(n)
    for k in range(1, n):
        i, j = order[k], order[g.integers(k)]
        W[i, j] = W[j, i] = g.uniform(0.1, 1.0)
    extra = np.triu(g.random((n, n)) < density, 1)
    w = np.triu(g.uniform(0.1, 1.0, (n, n)), 1) * extra
    W = np.where(W > 0, W, w + w.T)
    return W


def _random_walk(W: np.ndarray) -> np.ndarray:
    """Column-stochastic walk ``P_ij = W_ij / sum_k W_kj``."""
    return W / W.sum(axis=0)[None, :]


def _eigen_chain(g: np.random.Generator, pi: np.ndarray, lam: np.ndarray) -> np.ndarray:
    """Chain with stationary ``pi`` and non-Perron spectrum ``lam``.

    ``S = sqrt(pi) sqrt(pi)^T + K2 diag(lam) K2^T`` with ``K2`` a random
    orthonormal basis of the complement of ``sqrt(pi)``; then
    ``P = D S D^{-1}`` with ``D = diag(sqrt(pi))``.
    """
    n = pi.size
    q = np.sqrt(pi)
    basis = null_space(q[None, :])
    if n > 2:
        basis = basis @ ortho_group.rvs(n - 1, random_state=g)
    S = np.outer(q, q) + (basis * lam) @ basis.T
    S = 0.5 * (S + S.T)
    P = q[:, None] * S / q[None, :]
    P[np.abs(P) < 1e-15] = 0.0
    return P


def _draw_chain(g: np.random.Generator, spec: GenSpec) -> np.ndarray:
    n, tag, gap = spec.n, spec.tag, spec.spectral_gap
    if tag is SignTag.C3_NON_PERRON_ZERO:
        v = g.dirichlet(np.full(n, 2.0))
        return np.outer(v, np.ones(n))
    if tag is SignTag.C1_ALL_POSITIVE:
        P = _random_walk(_weighted_graph(g, n))
        m = g.uniform(0.05, (1.0 - gap) / 2.0)
        return (1.0 - m) * np.eye(n) + m * P
    if tag is SignTag.C2_NON_PERRON_NEGATIVE and n == 2:
        m = g.uniform((1.0 + gap) / 2.0, 1.0)
        return (1.0 - m) * np.eye(2) + m * np.array([[0.0, 1.0], [1.0, 0.0]])
    if tag is SignTag.MIXED and n < 3:
        raise ValueError("mixed sign classes need n >= 3")
    pi = g.dirichlet(np.full(n, 20.0))
    cap = 0.95 * pi.min()
    if tag is SignTag.C2_NON_PERRON_NEGATIVE:
        lam = -g.uniform(gap, max(cap, gap), n - 1)
    else:
        lam = g.uniform(gap, max(cap, gap), n - 1) * g.choice([-1.0, 1.0], n - 1)
        lam[0], lam[1] = abs(lam[0]), -abs(lam[1])
    return _eigen_chain(g, pi, np.sort(lam)[::-1])


def _validate_chain(P: np.ndarray, spec: GenSpec, tol: ToleranceConfig) -> bool:
    if np.any(P < 0) or not is_irreducible(P):
        return False
    if np.abs(P.sum(axis=0) - 1.0).max() > 1e-12 * spec.n:
        return False
    try:
        detect_symmetrizer(P, tol)
    except NotSymmetrizable:
        return False
    lam = symmetrizable_eigenvalues(P, tol)
    sc = classify_eigen_signs(lam)
    if sc.tag is not spec.tag:
        return False
    if spec.tag in (SignTag.C1_ALL_POSITIVE, SignTag.C2_NON_PERRON_NEGATIVE, SignTag.MIXED):
        return bool(np.all(np.abs(lam[1:]) >= spec.spectral_gap * (1 - 1e-9)))
    return True


def generate_chain(spec: GenSpec, tol: ToleranceConfig | None = None) -> tuple[np.ndarray, int]:
    """Like :func:`gen_reversible_chain` but also return the number of draws used."""
    tol = resolve(tol)
    if spec.n < 2:
        raise ValueError("chains need n >= 2")
    g = rng(spec.seed)
    for attempt in range(1, spec.attempts + 1):
        P = _draw_chain(g, spec)
        if _validate_chain(P, spec, tol):
            return P, attempt
    raise GenerationExhausted(
        f"no valid {spec.tag.value} chain with n = {spec.n} in {spec.attempts} attempts"
    )


def gen_reversible_chain(spec: GenSpec, tol: ToleranceConfig | None = None) -> np.ndarray:
    """Irreducible reversible column-stochastic chain of the requested sign class.

    C1 chains are lazy random walks ``(1-m) I + m P`` on a random weighted
    graph with ``m < (1 - gap)/2``; C3 chains are ``v e^T``; two-state C2
    chains are ``(1-m) I + m [[0, 1], [1, 0]]`` with ``m > (1 + gap)/2``; the
    remaining cases come from a prescribed spectrum with ``|lambda| < 0.95
    min(pi)``, which keeps every entry nonnegative.

    Raises
    ------
    GenerationExhausted
        If no draw passes validation within ``spec.attempts``.
    """
    return generate_chain(spec, tol)[0]


def gen_commuting_pair(spec: GenSpec, mode: str = "polynomial", tol: ToleranceConfig | None = None):
    """Commuting symmetrizable nonnegative pair ``(A, B)``.

    Modes
    -----
    ``"polynomial"``
        ``A`` from :func:`gen_reversible_chain`, ``B = (c0 I + c1 A + c2 A^2)
        / (c0 + c1 + c2)`` with ``c1 > 0``; both stochastic.
    ``"shared_k"``
        Both chains share stationary distribution and eigenvectors, with
        ``lambda_A > lambda_B`` entrywise off the Perron slot.
    ``"kronecker"``
        ``(P x I, I x Q)`` for chains of sizes ``n1 * n2 = n``; this pair is
        reducible by construction.
    """
    g = rng(child_seed(spec.seed, 1))
    n = spec.n
    if mode == "polynomial":
        A = gen_reversible_chain(spec, tol)
        c = g.uniform(0.0, 1.0, 3)
        c[1] += 0.1
        B = (c[0] * np.eye(n) + c[1] * A + c[2] * (A @ A)) / c.sum()
        return A, B
    if mode == "shared_k":
        gap = spec.spectral_gap
        for _ in range(spec.attempts):
            pi = g.dirichlet(np.full(n, 20.0))
            cap = 0.9 * pi.min()
            if gap >= cap:
                continue
            lamB = g.uniform(-cap, cap - gap, n - 1)
            lamA = np.minimum(lamB + g.uniform(gap, 2 * cap, n - 1), cap)
            order = np.argsort(-lamA)
            seed = g.integers(2**63)
            A = _eigen_chain(rng(seed), pi, lamA[order])
            B = _eigen_chain(rng(seed), pi, lamB[order])
            if is_irreducible(A) and is_irreducible(B) and np.all(A >= 0) and np.all(B >= 0):
                return A, B
        raise GenerationExhausted(f"no shared-eigenvector pair with n = {n}")
    if mode == "kronecker":
        n1 = next((k for k in range(2, n) if n % k == 0), None)
        if n1 is None:
            raise ValueError(f"kronecker mode needs a composite n, got {n}")
        n2 = n // n1
        P = gen_reversible_chain(GenSpec(child_seed(spec.seed, 2), n1, spec.sign_class, spec.spectral_gap, spec.attempts), tol)
        Q = gen_reversible_chain(GenSpec(child_seed(spec.seed, 3), n2, spec.sign_class, spec.spectral_gap, spec.attempts), tol)
        return np.kron(P, np.eye(n2)), np.kron(np.eye(n1), Q)
    raise ValueError(f"unknown mode {mode!r}")


def gen_nonscalar_diag(seed: int, n: int, ratio_cap: float = 3.0, tol: ToleranceConfig | None = None, attempts: int = 100) -> np.ndarray:
    """Positive diagonal (as a vector) with entries in ``[1, ratio_cap]`` that is not a multiple of ``I``."""
    tol = resolve(tol)
    if n < 2:
        raise ValueError("a nonscalar diagonal needs n >= 2")
    if ratio_cap <= 1.0 + 10 * tol.tol_scalar:
        raise ValueError("ratio_cap is too close to 1 for a nonscalar diagonal")
    g = rng(seed)
    for _ in range(attempts):
        d = g.uniform(1.0, ratio_cap, n)
        if d.max() / d.min() >= 1.0 + 10 * tol.tol_scalar and is_nonscalar(d, tol):
            return d
    raise GenerationExhausted("could not draw a nonscalar diagonal")


def gen_site_constant_diag(seed: int, dims, site: int, ratio_cap: float = 3.0) -> np.ndarray:
    """Fitness vector over ``prod(dims)`` genotypes that does not depend on index ``site``."""
    dims = tuple(int(k) for k in dims)
    g = rng(seed)
    shape = tuple(1 if k == site else d for k, d in enumerate(dims))
    base = g.uniform(1.0, ratio_cap, shape)
    return np.broadcast_to(base, dims).reshape(-1).copy()


def gen_stochastic(seed: int, n: int, density: float = 0.4, reversible: bool = False) -> np.ndarray:
    """Irreducible column-stochastic matrix with every ``P_ii < 1``.

    Non-reversible draws put random positive weights on a directed Hamiltonian
    cycle plus random extra arcs; reversible ones are random walks on a
    weighted undirected graph.
    """
    g = rng(seed)
    if reversible:
        P = _random_walk(_weighted_graph(g, n, density))
        lazy = g.uniform(0.0, 0.9)
        return (1 - lazy) * P + lazy * np.eye(n)
    W = (g.random((n, n)) < density) * g.uniform(0.05, 1.0, (n, n))
    perm = g.permutation(n)
    W[perm, np.roll(perm, 1)] = g.uniform(0.1, 1.0, n)
    return W / W.sum(axis=0)[None, :]


def gen_nonnegative(seed: int, n: int, density: float = 0.5, scale: float = 1.0) -> np.ndarray:
    """Irreducible nonnegative matrix with random support containing a directed cycle."""
    g = rng(seed)
    W = (g.random((n, n)) < density) * g.exponential(scale, (n, n))
    perm = g.permutation(n)
    W[perm, np.roll(perm, 1)] += g.uniform(0.1, 1.0, n) * scale
    return W


def gen_symmetrizable(seed: int, n: int, density: float = 0.5, spread: float = 2.0) -> np.ndarray:
    """``E S E^{-1}`` with ``S`` symmetric nonnegative on a connected graph and ``E`` log-uniform in ``[1/spread, spread]``."""
    g = rng(seed)
    S = _weighted_graph(g, n, density)
    S[np.diag_indices(n)] = g.uniform(0.0, 1.0, n) * (g.random(n) < 0.5)
    E = np.exp(g.uniform(-np.log(spread), np.log(spread), n))
    return E[:, None] * S / E[None, :]


def gen_rank_one_draw(seed: int, n: int, regime: str) -> tuple[np.ndarray, float]:
    """``(v, alpha)`` for the rank-one family with ``alpha < 1``, ``= 1`` or ``> 1``.

    ``regime`` is ``"lt"``, ``"eq"`` or ``"gt"``; ``alpha`` stays at least
    0.01 away from 1 in the strict regimes.
    """
    g = rng(seed)
    v = g.dirichlet(np.full(n, 3.0))
    cap = float(np.min(1.0 / (1.0 - v)))
    if regime == "lt":
        alpha = g.uniform(0.05, 0.99)
    elif regime == "eq":
        alpha = 1.0
    elif regime == "gt":
        lo = 1.0 + 0.01 * (cap - 1.0)
        alpha = g.uniform(lo, cap)
    else:
        raise ValueError(f"unknown regime {regime!r}")
    return v, float(alpha)


def gen_kronecker_factors(seed: int, L: int, max_n: int = 3, general: bool = False) -> list[np.ndarray]:
    """Per-site factors of size 2..max_n: reversible chains, or scaled symmetrizable matrices."""
    g = rng(seed)
    out = []
    for _ in range(L):
        n = int(g.integers(2, max_n + 1))
        s = int(g.integers(2**63))
        if general:
            out.append(g.uniform(0.5, 3.0) * gen_symmetrizable(s, n, density=0.7))
        else:
            out.append(_random_walk(_weighted_graph(rng(s), n, 0.7)))
    return out


def gen_block_diagonal(seed: int, sizes, sign_class: str = "C1") -> np.ndarray:
    """Reducible chain with irreducible reversible diagonal blocks of one sign class."""
    blocks = [
        gen_reversible_chain(GenSpec(child_seed(seed, k), int(s), sign_class)) for k, s in enumerate(sizes)
    ]
    N = sum(b.shape[0] for b in blocks)
    P = np.zeros((N, N))
    at = 0
    for b in blocks:
        k = b.shape[0]
        P[at:at + k, at:at + k] = b
        at += k
    return P
