"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Run alone with ``pytest tests/test_acceptance.py -v -s`` to see the lines
as they are produced; they are also repeated in the terminal summary.
"""
import numpy as np
import pytest

from spectralmono import (
    HomotopyFamily,
    KroneckerModel,
    canonical_form,
    cohen_ordering,
    detect_symmetrizer,
    drdm,
    drdm_fd,
    generalized_model,
    grad_m,
    karlin_sweep,
    levinger_sweep,
    rank_one_equivalence_report,
    sojourn_report,
    spectral_radius,
    squared_family_sweep,
)
from spectralmono._checks import Relation, observe
from spectralmono.errors import CycleInconsistent
from spectralmono.testgen import (
    GenSpec,
    child_seed,
    gen_commuting_pair,
    gen_kronecker_factors,
    gen_nonnegative,
    gen_nonscalar_diag,
    gen_rank_one_draw,
    gen_site_constant_diag,
    gen_stochastic,
    gen_symmetrizable,
    rng,
)

P2 = np.array([[0.0, 1.0], [1.0, 0.0]])
CLASSES = ("C1", "C2", "C3")
PER_CLASS = 1000
H = 1e-6


@pytest.fixture(scope="module")
def sign_corpus():
    """1000 commuting pairs per class, n cycling through 2..20, with nonscalar D and 5 interior m values."""
    corpus = []
    for c, cls in enumerate(CLASSES):
        for k in range(PER_CLASS):
            seed = child_seed(1000 + c, k)
            n = 2 + k % 19
            A, B = gen_commuting_pair(GenSpec(seed, n, cls), "polynomial")
            D = gen_nonscalar_diag(child_seed(seed, 7), n)
            ms = np.sort(rng(child_seed(seed, 8)).uniform(0.01, 0.99, 5))
            corpus.append((cls, A, B, D, ms))
    return corpus


def test_criterion_1_golden_2x2(record_criterion):
    D = np.array([1.0, 2.0])
    got = {
        "r(D)": (spectral_radius(np.diag(D)), 2.0),
        "r(P2 D)": (spectral_radius(P2 * D), np.sqrt(2.0)),
        "r(P2^2 D)": (spectral_radius(P2 @ P2 * D), 2.0),
    }
    prof = squared_family_sweep(P2, D, grid=[0.0, 0.5, 1.0])
    for m, val, want in zip(prof.grid, prof.values, (2.0, 1.5, 2.0)):
        got[f"r(M({m:g})^2 D)"] = (val, want)
    worst = max(abs(a - b) for a, b in got.values())
    fine = squared_family_sweep(P2, D, grid=101)
    ok = worst <= 1e-10 and fine.passed
    record_criterion(1, ok, f"max abs error {worst:.2e} over {len(got)} golden values; decrease on [0, 1/2] {fine.passed}")
    assert ok


def test_criterion_2_derivative_signs(sign_corpus, record_criterion):
    bad_sign, bad_oracle, worst_gap, n_evals = [], [], 0.0, 0
    expect = {"C1": Relation.LT, "C2": Relation.GT, "C3": Relation.EQ}
    for idx, (cls, A, B, D, ms) in enumerate(sign_corpus):
        F = HomotopyFamily.affine(A, B, D)
        for m in ms:
            rep = drdm(F, m, with_fd=False)
            fd = drdm_fd(F, m, H, check=False)
            n_evals += 1
            band = 1e-10 if cls == "C3" else 1e-12
            if observe(rep.dr_analytic, band) is not expect[cls]:
                bad_sign.append((idx, cls, m, rep.dr_analytic))
            gap = abs(rep.dr_analytic - fd)
            worst_gap = max(worst_gap, gap)
            if gap > max(1e-6, 10 * H * H):
                bad_oracle.append((idx, m, gap))
    ok = not bad_sign and not bad_oracle
    record_criterion(
        2,
        ok,
        f"{n_evals} derivatives, {len(bad_sign)} wrong signs, {len(bad_oracle)} oracle disagreements "
        f"(max |analytic - fd| {worst_gap:.2e})",
    )
    assert ok, (bad_sign[:5], bad_oracle[:5])


def test_criterion_3_squared_ordering(sign_corpus, record_criterion):
    want = {"C1": Relation.GT, "C2": Relation.LT, "C3": Relation.EQ}
    wrong, wrong_scalar = [], []
    for idx, (cls, A, _, D, _) in enumerate(sign_corpus):
        rep = cohen_ordering(A, D, rel_tol=1e-9 if cls == "C3" else 1e-13)
        if rep.relation is not want[cls]:
            wrong.append((idx, cls, rep.lhs - rep.rhs))
        ctl = cohen_ordering(A, np.full(A.shape[0], float(D[0])), rel_tol=1e-9)
        if ctl.relation is not Relation.EQ:
            wrong_scalar.append((idx, ctl.lhs - ctl.rhs))
    ok = not wrong and not wrong_scalar
    record_criterion(3, ok, f"{len(sign_corpus)} instances: {len(wrong)} wrong orderings, {len(wrong_scalar)} scalar-D controls unequal")
    assert ok, (wrong[:5], wrong_scalar[:5])


def test_criterion_4_mixing_sweep(record_criterion):
    failures, total = [], 0
    for reversible in (True, False):
        for k in range(200):
            seed = child_seed(4000 + reversible, k)
            n = 2 + k % 11
            P = gen_stochastic(seed, n, reversible=reversible)
            D = gen_nonscalar_diag(child_seed(seed, 1), n)
            prof = karlin_sweep(P, D, grid=101)
            total += 1
            if not prof.passed:
                failures.append((reversible, k))
    ok = not failures
    record_criterion(4, ok, f"{total} chains (200 reversible, 200 not), {len(failures)} non-decreasing profiles")
    assert ok, failures[:5]


def test_criterion_5_harmonic_mean_identity(record_criterion):
    worst_id, worst_sh = 0.0, 0.0
    bad = 0
    for k in range(1000):
        seed = child_seed(5000, k)
        n = 2 + k % 19
        P = gen_stochastic(seed, n, density=0.5, reversible=bool(k % 2))
        rep = sojourn_report(P)
        id_ok = rep.identity_residual <= 1e-12 * (1 + rep.EH)
        expect = (n / (n - 1)) / rep.EH
        sh_err = abs(rep.shorrocks - expect) / expect
        sh_ok = sh_err <= 8 * np.finfo(float).eps * n
        worst_id = max(worst_id, rep.identity_residual / (1 + rep.EH))
        worst_sh = max(worst_sh, sh_err)
        bad += not (id_ok and sh_ok)
    ok = bad == 0
    record_criterion(5, ok, f"1000 chains, worst identity residual {worst_id:.1e}, worst Shorrocks relative error {worst_sh:.1e}")
    assert ok


def test_criterion_6_rank_one_equivalence(record_criterion):
    counts = {"lt": 0, "eq": 0, "gt": 0}
    inconsistent = []
    for k in range(500):
        regime = ("lt", "eq", "gt")[k % 3]
        seed = child_seed(6000, k)
        n = 2 + k % 9
        v, alpha = gen_rank_one_draw(seed, n, regime)
        D = gen_nonscalar_diag(child_seed(seed, 1), n)
        rep = rank_one_equivalence_report(v, alpha, D)
        counts[regime] += 1
        expected = {"lt": 1, "eq": 0, "gt": -1}[regime]
        if not rep.consistent or rep.legs["sojourn"] != expected:
            inconsistent.append((k, regime, alpha, rep.legs))
    ok = not inconsistent
    record_criterion(6, ok, f"500 draws (alpha<1: {counts['lt']}, =1: {counts['eq']}, >1: {counts['gt']}), {len(inconsistent)} inconsistent")
    assert ok, inconsistent[:5]


def test_criterion_7_quasispecies(record_criterion):
    bad, n_zero_sites, n_strict_sites = [], 0, 0
    for k in range(200):
        seed = child_seed(7000, k)
        g = rng(seed)
        L = 1 + k % 3
        factors = gen_kronecker_factors(child_seed(seed, 1), L, max_n=3)
        dims = [F.shape[0] for F in factors]
        m = g.uniform(0.01, 0.49, L)
        if k % 2:
            D = gen_site_constant_diag(child_seed(seed, 2), dims, int(g.integers(L)))
        else:
            D = g.uniform(1.0, 3.0, int(np.prod(dims)))
        rep = grad_m(KroneckerModel(factors, m, D), with_fd=False)
        for kappa, (gk, cond) in enumerate(zip(rep.grad, rep.d_condition)):
            if cond:
                n_strict_sites += 1
                ok_site = gk < -1e-12
            else:
                n_zero_sites += 1
                ok_site = abs(gk) <= 1e-10
            if not (ok_site and gk <= 1e-12):
                bad.append((k, kappa, gk, cond))
    worst_scale = 0.0
    for k in range(100):
        seed = child_seed(7100, k)
        g = rng(seed)
        L = 1 + k % 3
        factors = gen_kronecker_factors(child_seed(seed, 1), L, max_n=3, general=True)
        N = int(np.prod([F.shape[0] for F in factors]))
        gm = generalized_model(KroneckerModel(factors, g.uniform(0.01, 0.49, L), g.uniform(1.0, 3.0, N)))
        c = gm.checks[0]
        worst_scale = max(worst_scale, abs(c.lhs - c.rhs) / abs(c.lhs))
        if not c.passed:
            bad.append(("scale", k, c.lhs, c.rhs))
    ok = not bad
    record_criterion(
        7,
        ok,
        f"200 models ({n_strict_sites} sites with varying D, {n_zero_sites} with constant D), "
        f"100 general-factor models (worst scale error {worst_scale:.1e}), {len(bad)} failures",
    )
    assert ok, bad[:5]


def test_criterion_8_canonical_round_trips(sign_corpus, record_criterion):
    worst_res, worst_id = 0.0, 0.0
    mats = [A for _, A, _, _, _ in sign_corpus]
    mats += [gen_symmetrizable(child_seed(8000, k), 2 + k % 19) for k in range(500)]
    for A in mats:
        cf = canonical_form(A)
        worst_res = max(worst_res, cf.residual(A))
        ratio = cf.v / cf.u
        worst_id = max(
            worst_id,
            float(np.max(np.abs(cf.E**2 - ratio) / ratio)),
            float(np.max(np.abs(cf.K[:, 0] - np.sqrt(cf.u * cf.v)))),
        )
    T = np.array([[0, 1, 1], [2, 0, 1], [1, 3, 0]], dtype=float)
    try:
        detect_symmetrizer(T)
        witness = None
    except CycleInconsistent as exc:
        witness = (exc.cycle, exc.forward, exc.backward)
    triangle_ok = witness is not None and witness[0] == (0, 1, 2) and witness[1:] == (1.0, 6.0)
    ok = worst_res <= 1e-9 and worst_id <= 1e-8 and triangle_ok
    record_criterion(
        8,
        ok,
        f"{len(mats)} matrices, worst residual {worst_res:.1e}, worst E^2/Perron-column error {worst_id:.1e}, "
        f"triangle witness {witness}",
    )
    assert ok


@pytest.mark.xfail(
    strict=True,
    reason="the stated orientation is reversed: for nonnegative A, r((A + A^T)/2) >= r(A), "
    "so the profile peaks at m = 1/2 (see the decisions ledger)",
)
def test_criterion_9_transpose_sweep(record_criterion):
    asym_fail, orient_fail, worst_asym, worst_excess = 0, 0, 0.0, 0.0
    for k in range(100):
        A = gen_nonnegative(child_seed(9000, k), 2 + k % 9)
        prof = levinger_sweep(A, grid=101)
        sym, down, up = prof.checks
        asym_fail += not sym.passed
        orient_fail += not (down.passed and up.passed)
        worst_asym = max(worst_asym, sym.lhs)
        worst_excess = max(worst_excess, prof.info["midpoint_excess"])
    ok = asym_fail == 0 and orient_fail == 0
    record_criterion(
        9,
        ok,
        f"100 matrices: symmetry failures {asym_fail} (worst {worst_asym:.1e}), "
        f"nonincreasing/nondecreasing failures {orient_fail} (midpoint exceeds endpoints by up to {worst_excess:.3g})",
    )
    assert ok
