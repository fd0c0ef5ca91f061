"""Centralized numerical tolerances."""
from __future__ import annotations

import dataclasses
from dataclasses import dataclass


@dataclass(frozen=True)
class ToleranceConfig:
    """Tolerances and iteration caps shared by every routine.

    All ``tol_*`` values are relative unless stated otherwise.
    """

    tol_sym: float = 1e-9
    tol_eig: float = 1e-10
    tol_orth: float = 1e-10
    tol_scalar: float = 1e-9
    tol_norm: float = 1e-10
    tol_cluster: float = 1e-7
    tol_mono: float = 1e-10
    zero_tol: float = 1e-8
    tol_sos: float = 1e-9
    fd_tol: float = 1e-6
    absorbing_tol: float = 1e-12
    fd_step: float = 1e-6
    max_sweeps: int = 64
    max_iters: int = 200_000
    dim_cap: int = 4096
    eigensolver: str = "lapack"

    def replace(self, **changes) -> "ToleranceConfig":
        return dataclasses.replace(self, **changes)

    @classmethod
    def field_names(cls) -> list[str]:
        return [f.name for f in dataclasses.fields(cls)]


DEFAULT = ToleranceConfig()


def resolve(tol: ToleranceConfig | None = None) -> ToleranceConfig:
    return DEFAULT if tol is None else tol
