"""Multilocus mutation-selection models with independent sites.

The mutation operator is a Kronecker product over ``L`` sites,

    M_m = F_1 x F_2 x ... x F_L,    F_k = (1 - m_k) r_k I + m_k A_k,

where ``A_k`` is a symmetrizable irreducible nonnegative matrix with
spectral radius ``r_k`` (``r_k = 1`` for a stochastic ``A_k``), and the
growth rate is ``r(M_m D)`` for a positive diagonal fitness ``D`` over the
``N = prod(n_k)`` genotypes. Genotypes are indexed big-endian, site 1
outermost, the same order as ``numpy.kron`` and C-order reshapes:
``flat = ((i_1 n_2 + i_2) n_3 + i_3) ...`` with zero-based ``i_k``.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from ._checks import Check
from ._config import ToleranceConfig, resolve
from .errors import DimensionOverflow, Reducible, RegimeWarning, ShapeMismatch
from .linalg import (
    as_diagonal,
    as_matrix,
    is_irreducible,
    kron,
    kron_apply,
    perron,
    spectral_radius,
    symmetric_eigh,
)
from .symmetrize import Stochasticized, detect_symmetrizer, stochasticize

__all__ = [
    "KroneckerModel",
    "GradientReport",
    "GeneralizedModel",
    "build_Mm",
    "growth_rate",
    "grad_m",
    "site_sweep",
    "mutation_eigenvalues",
    "generalized_model",
]


def _is_stochastic(A: np.ndarray, tol: ToleranceConfig) -> bool:
    band = tol.tol_norm * max(1, A.shape[0])
    return bool(
        np.abs(A.sum(axis=0) - 1.0).max() <= band or np.abs(A.sum(axis=1) - 1.0).max() <= band
    )


@dataclass(frozen=True)
class KroneckerModel:
    """Site factors, per-site mutation rates and genotype fitnesses.

    Parameters
    ----------
    factors : sequence of (n_k, n_k) arrays
        Irreducible symmetrizable nonnegative matrices, one per site.
    m : sequence of float
        Mutation rates in ``[0, 1]``.
    D : array_like
        Positive fitnesses of length ``prod(n_k)`` or a diagonal matrix.
    """

    factors: tuple
    m: np.ndarray
    D: np.ndarray
    tol: ToleranceConfig = field(default_factory=resolve, repr=False)
    radii: np.ndarray = field(init=False, repr=False)
    symmetrizers: tuple = field(init=False, repr=False)

    def __post_init__(self):
        tol = resolve(self.tol)
        facs = tuple(as_matrix(A, nonnegative=True) for A in self.factors)
        if not facs:
            raise ShapeMismatch("model needs at least one site")
        m = np.asarray(self.m, dtype=float).ravel()
        if m.size != len(facs):
            raise ShapeMismatch(f"{len(facs)} factors but {m.size} mutation rates")
        if np.any((m < 0) | (m > 1)):
            raise ValueError("mutation rates must lie in [0, 1]")
        N = int(np.prod([A.shape[0] for A in facs]))
        if N > tol.dim_cap:
            raise DimensionOverflow(f"{N} genotypes exceed the cap {tol.dim_cap}")
        D = as_diagonal(self.D, N)
        syms, radii = [], []
        for k, A in enumerate(facs):
            if not is_irreducible(A):
                raise Reducible(f"factor {k} is reducible")
            syms.append(detect_symmetrizer(A, tol).E)
            radii.append(1.0 if _is_stochastic(A, tol) else spectral_radius(A))
        object.__setattr__(self, "factors", facs)
        object.__setattr__(self, "m", m)
        object.__setattr__(self, "D", D)
        object.__setattr__(self, "tol", tol)
        object.__setattr__(self, "radii", np.array(radii))
        object.__setattr__(self, "symmetrizers", tuple(syms))

    @property
    def L(self) -> int:
        return len(self.factors)

    @property
    def dims(self) -> tuple:
        return tuple(A.shape[0] for A in self.factors)

    @property
    def N(self) -> int:
        return int(np.prod(self.dims))

    def flat_index(self, multi) -> int:
        return int(np.ravel_multi_index(tuple(multi), self.dims))

    def multi_index(self, flat: int) -> tuple:
        return tuple(int(i) for i in np.unravel_index(flat, self.dims))

    def with_m(self, m) -> "KroneckerModel":
        return KroneckerModel(self.factors, m, self.D, self.tol)

    def site_matrices(self) -> list[np.ndarray]:
        """``F_k = (1 - m_k) r_k I + m_k A_k`` for every site."""
        return [
            (1.0 - mk) * rk * np.eye(A.shape[0]) + mk * A
            for A, mk, rk in zip(self.factors, self.m, self.radii)
        ]

    def site_derivatives(self) -> list[np.ndarray]:
        """``dF_k/dm_k = A_k - r_k I``."""
        return [A - rk * np.eye(A.shape[0]) for A, rk in zip(self.factors, self.radii)]

    def d_condition(self) -> np.ndarray:
        """Per site: does ``D`` differ between some pair of genotypes differing only there?"""
        Dt = self.D.reshape(self.dims)
        band = self.tol.tol_scalar * float(self.D.max())
        return np.array([bool(np.any(np.ptp(Dt, axis=k) > band)) for k in range(self.L)])


def build_Mm(model: KroneckerModel) -> np.ndarray:
    """Assembled ``N x N`` mutation matrix (without ``D``)."""
    return kron(model.site_matrices(), model.tol.dim_cap)


def _symmetric_perron(model: KroneckerModel):
    """Dominant eigenpair of ``D^(1/2) S D^(1/2)`` with ``S = E^{-1} M_m E``.

    Returns ``(r, v, u)`` with ``sum(v) = 1`` and ``u @ v = 1``.
    """
    S_sites = [
        0.5 * (S + S.T)
        for S in (F * E[None, :] / E[:, None] for F, E in zip(model.site_matrices(), model.symmetrizers))
    ]
    S = kron(S_sites, model.tol.dim_cap)
    sD = np.sqrt(model.D)
    eig = symmetric_eigh(sD[:, None] * S * sD[None, :], model.tol)
    x = eig.vectors[:, 0]
    x = x if x.sum() >= 0 else -x
    E = kron([E[:, None] for E in model.symmetrizers]).ravel()
    v = E * x / sD
    v = v / v.sum()
    u = sD * x / E
    return float(eig.values[0]), v, u / (u @ v)


def growth_rate(model: KroneckerModel, method: str = "power") -> float:
    """``r(M_m D)``.

    ``"power"`` runs Perron power iteration on the assembled matrix (falling
    back to a block eigensolve when ``M_m D`` is reducible, e.g. at
    ``m = 0``); ``"symmetric"`` takes the top eigenvalue of the symmetrized
    product.
    """
    if method == "symmetric":
        return _symmetric_perron(model)[0]
    if method != "power":
        raise ValueError(f"unknown method {method!r}")
    MD = build_Mm(model) * model.D[None, :]
    if is_irreducible(MD):
        return perron(MD, model.tol).rho
    return spectral_radius(MD)


@dataclass(frozen=True)
class GradientReport:
    """Partial derivatives of the growth rate in each site's mutation rate.

    ``strictness`` holds ``"strict"`` (``grad < 0`` expected), ``"zero"``
    (``D`` constant over the site) or ``"unknown"`` (outside ``(0, 1/2)``).
    """

    r: float
    grad: np.ndarray
    d_condition: np.ndarray
    strictness: tuple
    grad_fd: np.ndarray | None
    regime: bool
    checks: list

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)


def _gradient(model: KroneckerModel) -> tuple[float, np.ndarray]:
    r, v, u = _symmetric_perron(model)
    Dv = model.D * v
    F = model.site_matrices()
    dF = model.site_derivatives()
    grad = np.empty(model.L)
    for k in range(model.L):
        mats = F[:k] + [dF[k]] + F[k + 1:]
        grad[k] = u @ kron_apply(mats, Dv)
    return r, grad


def _fd_gradient(model: KroneckerModel, h: float) -> np.ndarray:
    out = np.empty(model.L)
    for k in range(model.L):
        lo, hi = model.m.copy(), model.m.copy()
        lo[k] = max(0.0, lo[k] - h)
        hi[k] = min(1.0, hi[k] + h)
        out[k] = (growth_rate(model.with_m(hi), "symmetric") - growth_rate(model.with_m(lo), "symmetric")) / (hi[k] - lo[k])
    return out


def grad_m(
    model: KroneckerModel,
    with_fd: bool = True,
    sign_tol: float = 1e-12,
    zero_tol: float = 1e-10,
) -> GradientReport:
    """Gradient ``dr(M_m D)/dm_k = u^T (dM_m/dm_k) D v`` via mode products.

    The sign checks apply when every ``m_k`` lies in ``(0, 1/2)``, where all
    eigenvalues of ``M_m`` are positive: ``grad_k <= sign_tol`` everywhere,
    ``grad_k < -sign_tol`` where the D-condition holds and
    ``|grad_k| <= zero_tol`` where it fails. Otherwise a
    :class:`RegimeWarning` is issued and only the oracle check is kept.
    """
    r, grad = _gradient(model)
    cond = model.d_condition()
    regime = bool(np.all((model.m > 0) & (model.m < 0.5)))
    if not regime:
        warnings.warn("some mutation rates lie outside (0, 1/2); no sign guarantee", RegimeWarning, stacklevel=2)
    strictness = tuple(
        ("strict" if c else "zero") if regime else ("zero" if not c else "unknown") for c in cond
    )
    checks: list[Check] = []
    for k, (g, s) in enumerate(zip(grad, strictness)):
        if s == "strict":
            checks.append(Check(f"site {k}: grad < 0", bool(g < -sign_tol), float(g), -sign_tol, sign_tol))
        elif s == "zero":
            checks.append(Check(f"site {k}: grad = 0", bool(abs(g) <= zero_tol), float(g), 0.0, zero_tol))
    fd = None
    if with_fd:
        h = model.tol.fd_step
        fd = _fd_gradient(model, h)
        bound = max(model.tol.fd_tol, 10 * h * h) * max(1.0, r)
        err = float(np.max(np.abs(fd - grad)))
        checks.append(Check("sensitivity formula matches finite differences", err <= bound, err, 0.0, bound))
    return GradientReport(r, grad, cond, strictness, fd, regime, checks)


def site_sweep(model: KroneckerModel, site: int, grid=21) -> tuple[np.ndarray, np.ndarray, Check]:
    """Growth rate as ``m_site`` runs over ``grid`` (default 21 points in ``[0, 1/2)``).

    Returns ``(grid, values, check)`` where the check asserts a nonincreasing
    profile within ``tol_mono * (1 + r)`` per step.
    """
    if isinstance(grid, (int, np.integer)):
        grid = np.linspace(0.0, 0.5, int(grid), endpoint=False)
    grid = np.asarray(grid, dtype=float)
    vals = []
    for t in grid:
        m = model.m.copy()
        m[site] = t
        vals.append(growth_rate(model.with_m(m), "symmetric"))
    vals = np.array(vals)
    steps = np.diff(vals)
    slack = model.tol.tol_mono * (1.0 + np.abs(vals[:-1]))
    worst = float(np.max(steps - slack)) if steps.size else 0.0
    return grid, vals, Check(f"site {site}: nonincreasing", worst <= 0.0, worst, 0.0, model.tol.tol_mono)


def mutation_eigenvalues(model: KroneckerModel) -> np.ndarray:
    """Eigenvalues of ``M_m`` as products of per-site eigenvalues, descending."""
    per_site = []
    for F, E in zip(model.site_matrices(), model.symmetrizers):
        S = F * E[None, :] / E[:, None]
        per_site.append(np.linalg.eigvalsh(0.5 * (S + S.T)))
    prod = per_site[0]
    for lam in per_site[1:]:
        prod = np.multiply.outer(prod, lam).ravel()
    return np.sort(prod)[::-1]


@dataclass(frozen=True)
class GeneralizedModel:
    """Stochastic counterpart of a model with general factors.

    ``r(M_m D) = scale * r(M'_m D)`` where ``M'_m`` uses the stochasticized
    factors ``P_k = D_u A_k D_u^{-1} / r_k``.
    """

    stochastic: KroneckerModel
    scale: float
    per_factor: tuple
    checks: list

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)


def generalized_model(model: KroneckerModel, rate_tol: float = 1e-9, grad_tol: float = 1e-8) -> GeneralizedModel:
    """Reduce general symmetrizable factors to stochastic ones and verify the scale identities."""
    per: list[Stochasticized] = [stochasticize(A, model.tol) for A in model.factors]
    stoch = KroneckerModel(tuple(p.P for p in per), model.m, model.D, model.tol)
    scale = float(np.prod(model.radii))
    r0 = growth_rate(model, "symmetric")
    r1 = growth_rate(stoch, "symmetric")
    rel = abs(r0 - scale * r1) / max(abs(r0), 1e-300)
    _, g0 = _gradient(model)
    _, g1 = _gradient(stoch)
    gerr = float(np.max(np.abs(g0 - scale * g1) / (1.0 + np.abs(g0))))
    checks = [
        Check("growth rate scales by prod r(A_k)", rel <= rate_tol, r0, scale * r1, rate_tol),
        Check("gradient scales by prod r(A_k)", gerr <= grad_tol, gerr, 0.0, grad_tol),
    ]
    return GeneralizedModel(stoch, scale, tuple(per), checks)
