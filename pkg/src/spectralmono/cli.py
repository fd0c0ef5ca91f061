"""``spectralmono`` command-line front end.

Every subcommand prints (or writes with ``-o``) one JSON report::

    {"command", "inputs", "tolerances", "results", "assertions"}

Exit status is 0 when all assertions pass, 2 when at least one fails and 1
for unreadable input or a precondition error (reported on stderr).

Tolerances come from, in increasing priority, the built-in defaults, a TOML
or JSON config file (``--config`` or ``$SPECTRALMONO_CONFIG``) and
``--tol-*`` flags.
"""
from __future__ import annotations

import argparse
import dataclasses
import hashlib
import json
import os
import sys
import warnings

import numpy as np

from . import __version__
from ._checks import Check, Relation, observe
from ._config import ToleranceConfig
from .errors import CycleInconsistent, PatternAsymmetric, RegimeWarning, SpectralMonoError
from .linalg import is_nonscalar
from .markov import as_column_stochastic, is_reversible, sojourn_bound_class, sojourn_report
from .matrixio import diag_json, dumps, matrix_json, read_matrix, write_atomic
from .quasispecies import KroneckerModel, grad_m
from .spectral import (
    HomotopyFamily,
    classify_eigen_signs,
    cohen_ordering,
    drdm,
    drdm_fd,
    drdm_sensitivity,
    symmetrizable_eigenvalues,
)
from .symmetrize import canonical_form
from .testgen import GenSpec, gen_commuting_pair, gen_nonscalar_diag, generate_chain

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

ENV_CONFIG = "SPECTRALMONO_CONFIG"


def _flag(field: str) -> str:
    name = field.removeprefix("tol_").removesuffix("_tol")
    return "--tol-" + name.replace("_", "-")


def load_config(path: str) -> dict:
    """Tolerance overrides from a TOML or JSON file, optionally under a ``tolerances`` table."""
    with open(path, "rb") as fh:
        raw = fh.read()
    if path.endswith(".json"):
        data = json.loads(raw.decode("utf-8"))
    else:
        data = tomllib.loads(raw.decode("utf-8"))
    data = data.get("tolerances", data)
    known = set(ToleranceConfig.field_names())
    unknown = sorted(set(data) - known)
    if unknown:
        raise ValueError(f"{path}: unknown tolerance keys {unknown}")
    return data


def resolve_tolerances(args) -> ToleranceConfig:
    values: dict = {}
    path = args.config or os.environ.get(ENV_CONFIG)
    if path:
        values.update(load_config(path))
    for f in dataclasses.fields(ToleranceConfig):
        given = getattr(args, f.name, None)
        if given is not None:
            values[f.name] = given
    return ToleranceConfig(**values)


class Report:
    """Collects inputs, results and assertions for one command."""

    def __init__(self, command: str, tol: ToleranceConfig):
        self.command = command
        self.tol = tol
        self.inputs: dict = {}
        self.results: dict = {}
        self.assertions: list[dict] = []

    def add_input(self, name: str, inp) -> np.ndarray:
        self.inputs[name] = inp.describe()
        return inp.value

    def check(self, check: Check) -> None:
        self.assertions.append(check.as_dict())

    def assert_(self, name: str, passed: bool, lhs=None, rhs=None, tol=None) -> None:
        self.check(Check(name, bool(passed), lhs, rhs, tol))

    @property
    def passed(self) -> bool:
        return all(a["passed"] for a in self.assertions)

    def as_dict(self) -> dict:
        return {
            "command": self.command,
            "version": __version__,
            "inputs": self.inputs,
            "tolerances": dataclasses.asdict(self.tol),
            "results": self.results,
            "assertions": self.assertions,
        }


def _read(report: Report, name: str, path: str, **kw) -> np.ndarray:
    return report.add_input(name, read_matrix(path, **kw))


def _stochastic(report: Report, name: str, path: str, args) -> np.ndarray:
    P = _read(report, name, path)
    Pc, transposed = as_column_stochastic(P, args.convention, report.tol)
    report.inputs[name]["convention"] = "row" if transposed else "column"
    return Pc


def cmd_canon(args, report: Report) -> None:
    A = _read(report, "matrix", args.matrix)
    cf = canonical_form(A, report.tol)
    res = cf.residual(A)
    e2 = float(np.max(np.abs(cf.E**2 - cf.v / cf.u) / (cf.v / cf.u)))
    k1 = float(np.max(np.abs(cf.K[:, 0] - np.sqrt(cf.u * cf.v))))
    report.results.update(
        rho=cf.rho, E=cf.E, K=cf.K, **{"lambda": cf.lam}, u=cf.u, v=cf.v, residual=res
    )
    report.assert_("reconstruction residual", res <= 1e-9, res, 0.0, 1e-9)
    report.assert_("E^2 = v / u", e2 <= 1e-8, e2, 0.0, 1e-8)
    report.assert_("Perron column K_1 = sqrt(u v)", k1 <= 1e-8, k1, 0.0, 1e-8)
    report.assert_("sum(v) = 1", abs(cf.v.sum() - 1) <= 1e-12, float(cf.v.sum()), 1.0, 1e-12)
    report.assert_("u . v = 1", abs(cf.u @ cf.v - 1) <= 1e-12, float(cf.u @ cf.v), 1.0, 1e-12)


def cmd_derivative(args, report: Report) -> None:
    A = _read(report, "A", args.A)
    B = _read(report, "B", args.B)
    D = _read(report, "D", args.D, diag=True)
    build = HomotopyFamily.affine if args.form == "affine" else HomotopyFamily.convex
    F = build(A, B, D, report.tol)
    predicted = F.predicted_trend()
    sc = F.sign_class()
    grid = np.linspace(0.0, 1.0, args.grid)
    h = report.tol.fd_step
    oracle_tol = max(report.tol.fd_tol, 10 * h * h)
    rows = []
    for m in grid:
        rep = drdm(F, m, with_fd=False)
        fd = drdm_fd(F, m, h, check=False)
        sens = drdm_sensitivity(F, m)
        rows.append(
            {
                "m": rep.m,
                "r": rep.r_value,
                "dr_analytic": rep.dr_analytic,
                "dr_fd": fd,
                "dr_sensitivity": sens,
                "per_term": rep.per_term,
                "y_squared": rep.y_squared,
            }
        )
        report.assert_(f"m={m:.6g}: analytic vs finite difference", abs(rep.dr_analytic - fd) <= oracle_tol, rep.dr_analytic, fd, oracle_tol)
        report.assert_(f"m={m:.6g}: Perron term vanishes", abs(rep.per_term[0]) <= 1e-12, float(rep.per_term[0]), 0.0, 1e-12)
        if predicted is not Relation.UNKNOWN:
            obs = observe(rep.dr_analytic, args.sign_tol)
            label = "scalar D => constant" if not is_nonscalar(F.D, report.tol) else "sign matches prediction"
            report.assert_(f"m={m:.6g}: {label}", predicted.accepts(obs), rep.dr_analytic, 0.0, args.sign_tol)
    report.results.update(
        form=args.form,
        sign_class=str(sc) if sc is not None else None,
        predicted=None if predicted is Relation.UNKNOWN else predicted.value,
        informational=predicted is Relation.UNKNOWN,
        rows=rows,
    )


def cmd_ordering(args, report: Report) -> None:
    A = _read(report, "A", args.A)
    D = _read(report, "D", args.D, diag=True)
    rep = cohen_ordering(A, D, report.tol)
    report.results.update(
        lhs=rep.lhs,
        rhs=rep.rhs,
        relation=rep.relation.value,
        predicted=None if rep.predicted is Relation.UNKNOWN else rep.predicted.value,
        sign_class=str(rep.sign_class),
        informational=rep.predicted is Relation.UNKNOWN,
    )
    report.assert_("r(A) r(AD) vs r(A^2 D) matches prediction", rep.consistent, rep.lhs, rep.rhs, rep.tol)


def cmd_sojourn(args, report: Report) -> None:
    P = _stochastic(report, "P", args.P, args)
    rep = sojourn_report(P, report.tol)
    n = rep.n
    report.results.update(
        tau=rep.tau,
        EH=rep.EH,
        EA_lambda=rep.EA_lambda,
        identity_residual=rep.identity_residual,
        threshold=rep.threshold,
        bound=rep.bound.value,
        shorrocks=rep.shorrocks,
        geweke=rep.geweke,
    )
    id_tol = 1e-12 * (1 + rep.EH)
    report.assert_("EH (1 - trace/n) = 1", rep.identity_residual <= id_tol, rep.identity_residual, 0.0, id_tol)
    expect = n / (n - 1) / rep.EH
    report.assert_("Shorrocks = (n/(n-1)) / EH", abs(rep.shorrocks - expect) <= 1e-12 * expect, rep.shorrocks, expect, 1e-12)
    try:
        reversible = is_reversible(P, report.tol)
    except SpectralMonoError:
        reversible = False
    report.results["reversible"] = reversible
    if reversible:
        b = sojourn_bound_class(P, report.tol)
        report.results.update(sign_class=str(b.sign_class), predicted=b.predicted.value)
        report.assert_("EH bound matches sign class", b.consistent, b.EH, b.threshold, None)


def _parse_m(text: str) -> list[float]:
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise SpectralMonoError(f"--m expects comma-separated numbers, got {text!r}") from None


def cmd_quasispecies(args, report: Report) -> None:
    factors = [_read(report, f"factor{k + 1}", p) for k, p in enumerate(args.factors)]
    D = _read(report, "D", args.D, diag=True)
    model = KroneckerModel(factors, _parse_m(args.m), D, report.tol)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", RegimeWarning)
        g = grad_m(model)
    report.results.update(
        growth_rate=g.r,
        grad=g.grad,
        grad_fd=g.grad_fd,
        d_condition=g.d_condition,
        strictness=list(g.strictness),
        regime=g.regime,
        warnings=[str(w.message) for w in caught if issubclass(w.category, RegimeWarning)],
    )
    for c in g.checks:
        report.check(c)


def cmd_gen(args, report: Report) -> None:
    out = args.out
    files: dict[str, str] = {}
    spec = GenSpec(args.seed, args.n, args.sign_class, args.gap, args.attempts)
    if args.kind == "chain":
        P, tries = generate_chain(spec, report.tol)
        files[f"{out}.json"] = matrix_json(P)
        report.results["draws"] = tries
        sc = classify_eigen_signs(symmetrizable_eigenvalues(P, report.tol))
        report.results["sign_class"] = str(sc)
        report.assert_(f"generated chain is class {args.sign_class}", sc.tag is spec.tag, str(sc), args.sign_class)
    elif args.kind == "pair":
        A, B = gen_commuting_pair(spec, args.mode, report.tol)
        files[f"{out}_A.json"] = matrix_json(A)
        files[f"{out}_B.json"] = matrix_json(B)
        comm = float(np.max(np.abs(A @ B - B @ A)))
        report.assert_("AB = BA", comm <= 1e-10, comm, 0.0, 1e-10)
    else:
        d = gen_nonscalar_diag(args.seed, args.n, args.ratio_cap, report.tol)
        files[f"{out}.json"] = diag_json(d)
        ratio = float(d.max() / d.min())
        report.assert_("nonscalar", ratio >= 1 + 10 * report.tol.tol_scalar, ratio, 1 + 10 * report.tol.tol_scalar, report.tol.tol_scalar)
    for path, text in files.items():
        write_atomic(path, text)
    report.results["files"] = {p: hashlib.sha256(t.encode()).hexdigest() for p, t in files.items()}
    report.results.update(kind=args.kind, seed=args.seed, n=args.n)


def _common_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    g = common.add_argument_group("tolerances and output")
    g.add_argument("--config", default=argparse.SUPPRESS, help=f"TOML or JSON tolerance file (default ${ENV_CONFIG})")
    g.add_argument("--convention", choices=("row", "column", "auto"), default=argparse.SUPPRESS, help="orientation of stochastic inputs")
    g.add_argument("-o", "--output", default=argparse.SUPPRESS, help="write the report here instead of stdout")
    for f in dataclasses.fields(ToleranceConfig):
        if f.name == "eigensolver":
            g.add_argument("--eigensolver", choices=("lapack", "jacobi"), default=argparse.SUPPRESS)
            continue
        kind = int if f.type in ("int", int) else float
        g.add_argument(_flag(f.name), dest=f.name, type=kind, default=argparse.SUPPRESS, metavar=kind.__name__.upper())
    return common


def build_parser() -> argparse.ArgumentParser:
    common = _common_parser()
    parser = argparse.ArgumentParser(prog="spectralmono", description=__doc__.splitlines()[0], parents=[common])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("canon", parents=[common], help="canonical form E K Lambda K^T E^-1")
    p.add_argument("--matrix", required=True, metavar="FILE")
    p.set_defaults(func=cmd_canon)

    p = sub.add_parser("derivative", parents=[common], help="dr/dm along a homotopy family")
    p.add_argument("--A", required=True, metavar="FILE")
    p.add_argument("--B", required=True, metavar="FILE")
    p.add_argument("--D", required=True, metavar="FILE")
    p.add_argument("--form", choices=("affine", "convex"), default="affine")
    p.add_argument("--grid", type=int, default=11, metavar="K", help="number of m values in [0, 1]")
    p.add_argument("--sign-tol", type=float, default=1e-10, help="dead band for the observed sign")
    p.set_defaults(func=cmd_derivative)

    p = sub.add_parser("ordering", parents=[common], help="r(A) r(AD) against r(A^2 D)")
    p.add_argument("--A", required=True, metavar="FILE")
    p.add_argument("--D", required=True, metavar="FILE")
    p.set_defaults(func=cmd_ordering)

    p = sub.add_parser("sojourn", parents=[common], help="sojourn times and mobility indices")
    p.add_argument("--P", required=True, metavar="FILE")
    p.set_defaults(func=cmd_sojourn)

    p = sub.add_parser("quasispecies", parents=[common], help="growth rate and mutation-rate gradient")
    p.add_argument("--factors", nargs="+", required=True, metavar="FILE")
    p.add_argument("--m", required=True, metavar="LIST", help="comma-separated per-site rates")
    p.add_argument("--D", required=True, metavar="FILE")
    p.set_defaults(func=cmd_quasispecies)

    p = sub.add_parser("gen", parents=[common], help="write seeded test matrices")
    p.add_argument("--kind", choices=("chain", "pair", "diag"), required=True)
    p.add_argument("--class", dest="sign_class", choices=("C1", "C2", "C3", "Mixed"), default="C1")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--mode", choices=("polynomial", "shared_k", "kronecker"), default="polynomial")
    p.add_argument("--gap", type=float, default=1e-3)
    p.add_argument("--attempts", type=int, default=100)
    p.add_argument("--ratio-cap", type=float, default=3.0)
    p.add_argument("--out", default="generated", metavar="PREFIX", help="output file prefix")
    p.set_defaults(func=cmd_gen)
    return parser


def _describe_error(exc: Exception) -> str:
    if isinstance(exc, CycleInconsistent):
        cyc = " -> ".join(str(i + 1) for i in (*exc.cycle, exc.cycle[0]))
        return (
            f"not symmetrizable: cycle {cyc} (states numbered from 1) violates the product condition, "
            f"forward {exc.forward:.17g} != backward {exc.backward:.17g}"
        )
    if isinstance(exc, PatternAsymmetric):
        i, j = exc.edge
        return f"not symmetrizable: entry ({i + 1}, {j + 1}) is positive but ({j + 1}, {i + 1}) is zero"
    return str(exc)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    for name, default in (("config", None), ("convention", "auto"), ("output", None)):
        if not hasattr(args, name):
            setattr(args, name, default)
    try:
        tol = resolve_tolerances(args)
        report = Report(args.command, tol)
        args.func(args, report)
    except (SpectralMonoError, ValueError, OSError) as exc:
        print(f"spectralmono {args.command}: error: {_describe_error(exc)}", file=sys.stderr)
        return 1
    text = dumps(report.as_dict()) + "\n"
    if args.output:
        write_atomic(args.output, text)
    else:
        sys.stdout.write(text)
    return 0 if report.passed else 2


if __name__ == "__main__":
    sys.exit(main())
