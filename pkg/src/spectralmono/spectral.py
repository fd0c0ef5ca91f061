"""Spectral radius along homotopies of commuting symmetrizable matrices.

Two one-parameter families are supported, both multiplied on the right by a
positive diagonal ``D``:

* affine product ``M(m) = A [(1 - m) r_B I + m B]``
* convex combination ``M(m) = (1 - m) A + m B`` (requires ``r_A == r_B``)

With the shared canonical form ``A = E K diag(lam_A) K^T E^{-1}`` (same for
``B``) the symmetric matrix ``S_m = D^{1/2} K Lam_m K^T D^{1/2}`` is similar
to ``M(m) D``. Its dominant eigenvector ``x`` gives ``y = K^T D^{1/2} x`` and

    r(M(m) D)      = sum_i Lam_m[i] * y_i**2
    d r(M(m) D)/dm = sum_i Lam_m'[i] * y_i**2

The sign of the derivative then follows from the signs of the non-Perron
eigenvalues of ``A`` (affine) or of ``lam_A - lam_B`` (convex).
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import null_space

from ._checks import Check, Relation, observe
from ._config import ToleranceConfig, resolve
from .errors import (
    EmptySpectrum,
    OracleDisagreement,
    Reducible,
    ShapeMismatch,
    SOSMismatch,
    StepTooLarge,
)
from .linalg import (
    as_diagonal,
    as_matrix,
    inf_norm,
    is_irreducible,
    is_nonscalar,
    spectral_radius,
    symmetric_eigh,
)
from .symmetrize import JointCanonicalForm, detect_symmetrizer, joint_canonical_form

__all__ = [
    "SignTag",
    "SignClass",
    "classify_eigen_signs",
    "symmetrizable_eigenvalues",
    "HomotopyFamily",
    "SOSResult",
    "DerivativeReport",
    "OrderingReport",
    "Profile",
    "spectral_radius_sos",
    "drdm",
    "drdm_fd",
    "drdm_sensitivity",
    "cohen_ordering",
    "karlin_sweep",
    "squared_family_sweep",
    "levinger_sweep",
    "cnd_check",
]


class SignTag(str, enum.Enum):
    C1_ALL_POSITIVE = "C1"
    C2_NON_PERRON_NEGATIVE = "C2"
    C3_NON_PERRON_ZERO = "C3"
    C4_SAME_SIGN_WITH_ZEROS = "C4"
    MIXED = "Mixed"


@dataclass(frozen=True)
class SignClass:
    """Sign pattern of the non-Perron eigenvalues.

    ``sign`` is +1 or -1 for C4 (the sign of the nonzero non-Perron values)
    and ``None`` otherwise.
    """

    tag: SignTag
    zero_tol: float
    sign: int | None = None

    def derivative_trend(self) -> Relation:
        """Predicted sign of ``d r(A[(1-m) r_B I + m B] D)/dm`` for nonscalar ``D``."""
        if self.tag is SignTag.C1_ALL_POSITIVE:
            return Relation.LT
        if self.tag is SignTag.C2_NON_PERRON_NEGATIVE:
            return Relation.GT
        if self.tag is SignTag.C3_NON_PERRON_ZERO:
            return Relation.EQ
        if self.tag is SignTag.C4_SAME_SIGN_WITH_ZEROS:
            return Relation.LE if self.sign > 0 else Relation.GE
        return Relation.UNKNOWN

    def __str__(self) -> str:
        if self.tag is SignTag.C4_SAME_SIGN_WITH_ZEROS:
            return f"C4({'+' if self.sign > 0 else '-'})"
        return self.tag.value


def classify_eigen_signs(lam, zero_tol: float | None = None) -> SignClass:
    """Classify a real spectrum whose first entry is the Perron root.

    Values with ``|lambda| <= zero_tol`` count as zero; the default band is
    ``1e-8 * max|lambda|``.
    """
    lam = np.asarray(lam, dtype=float).ravel()
    if lam.size == 0:
        raise EmptySpectrum("no eigenvalues to classify")
    scale = float(np.max(np.abs(lam)))
    if zero_tol is None:
        zero_tol = resolve(None).zero_tol * scale
    if lam[0] < np.max(lam) - max(zero_tol, 1e-12 * max(scale, 1.0)):
        raise ValueError("the first eigenvalue must be the Perron root (the maximum)")
    rest = lam[1:]
    pos = rest > zero_tol
    neg = rest < -zero_tol
    zero = ~(pos | neg)
    if lam[0] > zero_tol and pos.all():
        return SignClass(SignTag.C1_ALL_POSITIVE, zero_tol)
    if rest.size and neg.all():
        return SignClass(SignTag.C2_NON_PERRON_NEGATIVE, zero_tol)
    if zero.all():
        return SignClass(SignTag.C3_NON_PERRON_ZERO, zero_tol)
    if zero.any() and not (pos.any() and neg.any()):
        return SignClass(SignTag.C4_SAME_SIGN_WITH_ZEROS, zero_tol, 1 if pos.any() else -1)
    return SignClass(SignTag.MIXED, zero_tol)


def symmetrizable_eigenvalues(A, tol: ToleranceConfig | None = None) -> np.ndarray:
    """Real spectrum of a symmetrizable nonnegative matrix, descending (reducible allowed)."""
    tol = resolve(tol)
    sym = detect_symmetrizer(A, tol)
    return symmetric_eigh(sym.symmetric(A), tol).values


@dataclass(frozen=True)
class HomotopyFamily:
    """``M(m) D`` for the affine-product or convex-combination shape.

    Build with :meth:`affine` or :meth:`convex`; both validate the inputs and
    cache the joint canonical form of ``(A, B)``.
    """

    shape: str
    A: np.ndarray
    B: np.ndarray
    D: np.ndarray
    joint: JointCanonicalForm
    tol: ToleranceConfig = field(default_factory=resolve)

    @classmethod
    def _build(cls, shape, A, B, D, tol):
        tol = resolve(tol)
        A = as_matrix(A, nonnegative=True)
        B = as_matrix(B, nonnegative=True)
        D = as_diagonal(D, A.shape[0])
        if A.shape != B.shape:
            raise ShapeMismatch(f"shapes differ: {A.shape} vs {B.shape}")
        if not (is_irreducible(A) and is_irreducible(B)):
            raise Reducible("homotopy families need irreducible A and B")
        joint = joint_canonical_form(A, B, tol)
        return cls(shape, A, B, D, joint, tol)

    @classmethod
    def affine(cls, A, B, D, tol: ToleranceConfig | None = None) -> "HomotopyFamily":
        """``M(m) = A [(1 - m) r_B I + m B]``."""
        return cls._build("affine", A, B, D, tol)

    @classmethod
    def convex(cls, A, B, D, tol: ToleranceConfig | None = None) -> "HomotopyFamily":
        """``M(m) = (1 - m) A + m B``; ``A`` and ``B`` must share their Perron root."""
        fam = cls._build("convex", A, B, D, tol)
        rA, rB = fam.joint.lambda_A[0], fam.joint.lambda_B[0]
        if abs(rA - rB) > fam.tol.tol_eig * max(1.0, abs(rA)) * 10:
            raise ValueError(f"convex family needs equal Perron roots, got {rA!r} and {rB!r}")
        return fam

    @property
    def r_B(self) -> float:
        return float(self.joint.lambda_B[0])

    def eigenvalues(self, m: float) -> np.ndarray:
        """Eigenvalues of ``M(m)`` in the shared column order."""
        lamA, lamB = self.joint.lambda_A, self.joint.lambda_B
        if self.shape == "affine":
            return lamA * ((1.0 - m) * self.r_B + m * lamB)
        return (1.0 - m) * lamA + m * lamB

    def eigenvalue_slopes(self) -> np.ndarray:
        """``d/dm`` of :meth:`eigenvalues` (constant in ``m``)."""
        lamA, lamB = self.joint.lambda_A, self.joint.lambda_B
        if self.shape == "affine":
            return lamA * (lamB - self.r_B)
        return lamB - lamA

    def M(self, m: float) -> np.ndarray:
        n = self.A.shape[0]
        if self.shape == "affine":
            return self.A @ ((1.0 - m) * self.r_B * np.eye(n) + m * self.B)
        return (1.0 - m) * self.A + m * self.B

    def dM(self) -> np.ndarray:
        n = self.A.shape[0]
        if self.shape == "affine":
            return self.A @ (self.B - self.r_B * np.eye(n))
        return self.B - self.A

    def matrix(self, m: float) -> np.ndarray:
        """``M(m) D`` assembled densely."""
        return self.M(m) * self.D[None, :]

    def predicted_trend(self) -> Relation:
        """Sign of ``dr/dm`` implied by the eigenvalue conditions."""
        if not is_nonscalar(self.D, self.tol):
            return Relation.EQ
        lamA, lamB = self.joint.lambda_A, self.joint.lambda_B
        if self.shape == "affine":
            return classify_eigen_signs(lamA).derivative_trend()
        scale = float(np.max(np.abs(np.concatenate([lamA, lamB]))))
        d = lamA[1:] - lamB[1:]
        band = self.tol.zero_tol * scale
        if d.size == 0 or np.all(np.abs(d) <= band):
            return Relation.EQ
        if np.all(d > band):
            return Relation.LT
        if np.all(d < -band):
            return Relation.GT
        if np.all(d >= -band):
            return Relation.LE
        if np.all(d <= band):
            return Relation.GE
        return Relation.UNKNOWN

    def sign_class(self) -> SignClass | None:
        return classify_eigen_signs(self.joint.lambda_A) if self.shape == "affine" else None


@dataclass(frozen=True)
class SOSResult:
    """Sum-of-squares evaluation at one ``m``.

    ``v`` and ``u`` are the right/left Perron vectors of ``M(m) D`` obtained
    from the symmetric eigenvector ``x_hat``.
    """

    m: float
    r: float
    r_eig: float
    y: np.ndarray
    x_hat: np.ndarray
    v: np.ndarray
    u: np.ndarray

    @property
    def y_squared(self) -> np.ndarray:
        return self.y**2


def _check_m(m: float) -> float:
    m = float(m)
    if not 0.0 <= m <= 1.0:
        raise ValueError(f"m must lie in [0, 1], got {m!r}")
    return m


def spectral_radius_sos(F: HomotopyFamily, m: float) -> SOSResult:
    """Evaluate ``r(M(m) D)`` as a sum of squares.

    Raises
    ------
    SOSMismatch
        If the expansion disagrees with the eigenvalue of ``S_m`` or
        ``sum(y**2) != x_hat^T D x_hat`` beyond ``tol.tol_sos``.
    """
    m = _check_m(m)
    tol = F.tol
    K = F.joint.K
    lam_m = F.eigenvalues(m)
    sD = np.sqrt(F.D)
    H = (K * lam_m) @ K.T
    S = sD[:, None] * H * sD[None, :]
    eig = symmetric_eigh(0.5 * (S + S.T), tol)
    r_eig = float(eig.values[0])
    x = eig.vectors[:, 0]
    if x.sum() < 0:
        x = -x
    y = K.T @ (sD * x)
    r_sos = float(np.sum(lam_m * y**2))
    bound = tol.tol_sos * (1.0 + abs(r_eig))
    if abs(r_sos - r_eig) > bound:
        raise SOSMismatch(f"sum of squares {r_sos!r} != eigenvalue {r_eig!r}")
    ynorm, xdx = float(y @ y), float(x @ (F.D * x))
    if abs(ynorm - xdx) > tol.tol_sos * (1.0 + xdx):
        raise SOSMismatch(f"sum(y**2) = {ynorm!r} but x^T D x = {xdx!r}")
    E = F.joint.E
    v = E * x / sD
    v = v / v.sum()
    u = sD * x / E
    u = u / (u @ v)
    return SOSResult(m=m, r=r_sos, r_eig=r_eig, y=y, x_hat=x, v=v, u=u)


@dataclass(frozen=True)
class DerivativeReport:
    m: float
    r_value: float
    dr_analytic: float
    dr_fd: float | None
    y_squared: np.ndarray
    per_term: np.ndarray
    predicted: Relation

    def observed(self, tol: float) -> Relation:
        return observe(self.dr_analytic, tol)


def drdm(F: HomotopyFamily, m: float, with_fd: bool = True) -> DerivativeReport:
    """Analytic ``dr(M(m) D)/dm`` as a sum of per-eigenvector terms.

    The Perron term is identically zero. ``dr_fd`` holds the finite
    difference oracle from :func:`drdm_fd` unless ``with_fd`` is false.
    """
    sos = spectral_radius_sos(F, m)
    y2 = sos.y_squared
    per_term = F.eigenvalue_slopes() * y2
    fd = drdm_fd(F, sos.m) if with_fd else None
    return DerivativeReport(
        m=sos.m,
        r_value=sos.r,
        dr_analytic=float(np.sum(per_term)),
        dr_fd=fd,
        y_squared=y2,
        per_term=per_term,
        predicted=F.predicted_trend(),
    )


def _dominant_pair(M: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Right/left eigenvectors of the dominant real eigenvalue, ``sum(v) == 1`` and ``u @ v == 1``."""
    def right(X):
        w, V = np.linalg.eig(X)
        k = int(np.argmax(w.real))
        x = V[:, k].real
        return x / x.sum()

    v = right(M)
    u = right(M.T)
    return v, u / (u @ v)


def drdm_sensitivity(F: HomotopyFamily, m: float) -> float:
    """``u^T (dM/dm) D v`` with the Perron pair of ``M(m) D`` from a general eigensolve."""
    m = _check_m(m)
    v, u = _dominant_pair(F.matrix(m))
    return float(u @ (F.dM() * F.D[None, :]) @ v)


def drdm_fd(F: HomotopyFamily, m: float, h: float | None = None, check: bool = True) -> float:
    """Finite-difference derivative of ``r(M(m) D)``.

    Central differences in the interior, second-order one-sided at the ends
    of ``[0, 1]``. With ``check`` the result is compared against
    :func:`drdm_sensitivity`.

    Raises
    ------
    StepTooLarge
        If the stencil does not fit inside ``[0, 1]``.
    OracleDisagreement
        If the two oracles differ by more than ``max(tol.fd_tol, 10 h**2)``.
    """
    m = _check_m(m)
    h = F.tol.fd_step if h is None else float(h)
    if not 0.0 < h <= 0.25:
        raise StepTooLarge(f"step h = {h!r} must lie in (0, 0.25]")

    def r(t):
        return spectral_radius(F.matrix(t))

    if m - h >= 0.0 and m + h <= 1.0:
        fd = (r(m + h) - r(m - h)) / (2.0 * h)
    elif m + 2 * h <= 1.0:
        fd = (-3.0 * r(m) + 4.0 * r(m + h) - r(m + 2 * h)) / (2.0 * h)
    elif m - 2 * h >= 0.0:
        fd = (3.0 * r(m) - 4.0 * r(m - h) + r(m - 2 * h)) / (2.0 * h)
    else:
        raise StepTooLarge(f"step h = {h!r} does not fit around m = {m!r}")
    if check:
        sens = drdm_sensitivity(F, m)
        bound = max(F.tol.fd_tol, 10.0 * h * h)
        if abs(fd - sens) > bound:
            raise OracleDisagreement(
                f"finite difference {fd!r} and sensitivity formula {sens!r} differ at m = {m!r}"
            )
    return float(fd)


@dataclass(frozen=True)
class OrderingReport:
    """``lhs`` vs ``rhs`` with the relation predicted from the sign class."""

    lhs: float
    rhs: float
    relation: Relation
    predicted: Relation
    consistent: bool
    sign_class: SignClass | None = None
    tol: float = 0.0


def cohen_ordering(A, D, tol: ToleranceConfig | None = None, rel_tol: float = 1e-9) -> OrderingReport:
    """Order of ``r(A) r(AD)`` against ``r(A^2 D)`` for symmetrizable ``A``.

    Reducible ``A`` is allowed; strict predictions are then weakened.
    ``rel_tol`` sets the equality band relative to ``max(1, lhs, rhs)``.
    """
    tol = resolve(tol)
    A = as_matrix(A, nonnegative=True)
    d = as_diagonal(D, A.shape[0])
    lam = symmetrizable_eigenvalues(A, tol)
    sc = classify_eigen_signs(lam)
    AD = A * d[None, :]
    lhs = spectral_radius(A) * spectral_radius(AD)
    rhs = spectral_radius(A @ AD)
    if not is_nonscalar(d, tol):
        predicted = Relation.EQ
    else:
        # decreasing dr/dm along m in [0, 1] means lhs (m = 0) > rhs (m = 1)
        predicted = sc.derivative_trend().flipped()
        if not is_irreducible(A):
            predicted = predicted.weakened()
    band = rel_tol * max(1.0, lhs, rhs)
    relation = observe(lhs - rhs, band)
    return OrderingReport(lhs, rhs, relation, predicted, predicted.accepts(relation), sc, band)


@dataclass(frozen=True)
class Profile:
    """Spectral radius sampled over a grid of ``m`` values, plus the checks applied."""

    grid: np.ndarray
    values: np.ndarray
    checks: list[Check]
    info: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    @property
    def argmin(self) -> float:
        return float(self.grid[int(np.argmin(self.values))])


def _grid(grid) -> np.ndarray:
    if isinstance(grid, (int, np.integer)):
        return np.linspace(0.0, 1.0, int(grid))
    g = np.asarray(grid, dtype=float).ravel()
    if g.size < 2 or np.any(np.diff(g) <= 0) or g[0] < 0 or g[-1] > 1:
        raise ValueError("grid must be increasing inside [0, 1]")
    return g


def _monotone_check(name, values, direction, tol_mono) -> Check:
    """``direction=-1``: each step may rise by at most ``tol_mono * (1 + r)``; ``+1`` the mirror."""
    if values.size < 2:
        return Check(name, True, 0.0, 0.0, tol_mono)
    steps = direction * np.diff(values)
    slack = tol_mono * (1.0 + np.abs(values[:-1]))
    worst = int(np.argmin(steps + slack))
    return Check(name, bool(np.all(steps >= -slack)), float(steps[worst]), float(-slack[worst]), tol_mono)


def _stochastic(P, tol: ToleranceConfig) -> np.ndarray:
    P = as_matrix(P, nonnegative=True)
    rows = np.abs(P.sum(axis=1) - 1.0).max()
    cols = np.abs(P.sum(axis=0) - 1.0).max()
    if min(rows, cols) > 1e3 * tol.tol_norm * P.shape[0]:
        raise ValueError("matrix is neither row- nor column-stochastic")
    return P


def karlin_sweep(P, D, grid=101, tol: ToleranceConfig | None = None) -> Profile:
    """``r([(1-m) I + m P] D)`` over ``grid``; strictly decreasing for nonscalar ``D``.

    ``P`` may be row- or column-stochastic; the spectral radius is the same.
    """
    tol = resolve(tol)
    P = _stochastic(P, tol)
    if not is_irreducible(P):
        raise Reducible("mixing sweep needs an irreducible stochastic matrix")
    d = as_diagonal(D, P.shape[0])
    g = _grid(grid)
    n = P.shape[0]
    vals = np.array([spectral_radius(((1 - m) * np.eye(n) + m * P) * d[None, :]) for m in g])
    if is_nonscalar(d, tol):
        checks = [_monotone_check("decreasing in m", vals, -1, tol.tol_mono)]
        strict_steps = int(np.sum(np.diff(vals) < 0))
    else:
        spread = float(np.ptp(vals))
        checks = [Check("constant for scalar D", spread <= tol.tol_mono * (1 + vals.max()), spread, 0.0, tol.tol_mono)]
        strict_steps = 0
    return Profile(g, vals, checks, {"strict_steps": strict_steps})


def squared_family_sweep(P, D, grid=101, tol: ToleranceConfig | None = None) -> Profile:
    """``r([(1-m) I + m P]^2 D)`` over ``grid``.

    For a two-state chain with ``lambda_2(P) = 1 - a - b`` the profile falls
    until ``m* = 1 / (a + b)`` and rises afterwards (``m* = 1/2`` for the
    exchange matrix); larger chains are profiled without assertions.
    """
    tol = resolve(tol)
    P = _stochastic(P, tol)
    d = as_diagonal(D, P.shape[0])
    g = _grid(grid)
    n = P.shape[0]
    vals = []
    for m in g:
        M = (1 - m) * np.eye(n) + m * P
        vals.append(spectral_radius((M @ M) * d[None, :]))
    vals = np.array(vals)
    checks: list[Check] = []
    info: dict = {}
    if not is_nonscalar(d, tol):
        spread = float(np.ptp(vals))
        checks.append(Check("constant for scalar D", spread <= tol.tol_mono * (1 + vals.max()), spread, 0.0, tol.tol_mono))
    elif n == 2:
        a_plus_b = 1.0 - (P[0, 0] + P[1, 1] - 1.0)
        turn = 1.0 / a_plus_b if a_plus_b > 0 else np.inf
        info["turning_point"] = turn
        left = g <= turn + 1e-12
        right = g >= turn - 1e-12
        checks.append(_monotone_check("decreasing before turning point", vals[left], -1, tol.tol_mono))
        if right.sum() > 1:
            checks.append(_monotone_check("increasing after turning point", vals[right], +1, tol.tol_mono))
        if turn <= 1.0:
            spacing = float(np.max(np.diff(g)))
            am = float(g[int(np.argmin(vals))])
            checks.append(Check("argmin near turning point", abs(am - turn) <= spacing + 1e-12, am, turn, spacing))
    return Profile(g, vals, checks, info)


def levinger_sweep(A, grid=101, tol: ToleranceConfig | None = None) -> Profile:
    """Profile of ``r((1-m) A + m A^T)`` over ``grid``.

    Checks symmetry about 1/2 and the orientation "nonincreasing on
    [0, 1/2], nondecreasing on [1/2, 1]". Note that for nonnegative ``A``
    the midpoint matrix is the symmetric part, whose spectral radius is at
    least ``r(A)``, so any non-symmetric ``A`` fails the orientation checks;
    ``info["midpoint_excess"]`` reports how far the midpoint exceeds the
    endpoints. ``info["second_differences"]`` gives the discrete curvature
    without asserting anything about it.
    """
    tol = resolve(tol)
    A = as_matrix(A, nonnegative=True)
    if not is_irreducible(A):
        raise Reducible("transpose sweep needs an irreducible matrix")
    g = _grid(grid)
    vals = np.array([spectral_radius((1 - m) * A + m * A.T) for m in g])
    if np.allclose(g[::-1], 1.0 - g, atol=1e-12):
        mirror = vals[::-1]
    else:
        mirror = np.array([spectral_radius(m * A + (1 - m) * A.T) for m in g])
    asym = float(np.max(np.abs(vals - mirror)))
    left = g <= 0.5 + 1e-12
    right = g >= 0.5 - 1e-12
    checks = [
        Check("symmetric about 1/2", asym <= 1e-9 * (1 + vals.max()), asym, 0.0, 1e-9),
        _monotone_check("nonincreasing on [0, 1/2]", vals[left], -1, tol.tol_mono),
        _monotone_check("nondecreasing on [1/2, 1]", vals[right], +1, tol.tol_mono),
    ]
    info = {
        "second_differences": np.diff(vals, 2),
        # r at the midpoint against the endpoints; positive means the profile peaks at 1/2
        "midpoint_excess": float(np.interp(0.5, g, vals) - max(vals[0], vals[-1])),
    }
    return Profile(g, vals, checks, info)


def cnd_check(S, zero_tol: float | None = None, tol: ToleranceConfig | None = None) -> bool:
    """Conditional negative definiteness: ``x^T S x < 0`` whenever ``e^T x = 0``, ``x != 0``.

    Tested on the compression of ``S`` to an orthonormal basis of the
    hyperplane orthogonal to the all-ones vector.
    """
    tol = resolve(tol)
    S = as_matrix(S)
    n = S.shape[0]
    eig = symmetric_eigh(S, tol)  # symmetry check
    if n == 1:
        return True
    Q = null_space(np.ones((1, n)))
    proj = symmetric_eigh(Q.T @ (0.5 * (S + S.T)) @ Q, tol)
    if zero_tol is None:
        zero_tol = tol.zero_tol * max(1.0, float(np.max(np.abs(eig.values))))
    return bool(np.all(proj.values < -zero_tol))
