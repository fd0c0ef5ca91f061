"""Named numeric checks and sign relations shared by all reports."""
from __future__ import annotations

import enum
from dataclasses import dataclass


@dataclass(frozen=True)
class Check:
    """One verified claim: ``passed`` records whether ``lhs`` vs ``rhs`` held within ``tol``."""

    name: str
    passed: bool
    lhs: float | None = None
    rhs: float | None = None
    tol: float | None = None

    def as_dict(self) -> dict:
        return {"name": self.name, "passed": bool(self.passed), "lhs": self.lhs, "rhs": self.rhs, "tol": self.tol}


class Relation(str, enum.Enum):
    """Order relation between two quantities, or the sign of one against zero."""

    LT = "<"
    GT = ">"
    EQ = "="
    LE = "<="
    GE = ">="
    UNKNOWN = "?"

    def accepts(self, observed: "Relation") -> bool:
        """Whether an observed strict relation (``<``, ``=``, ``>``) is allowed by this prediction."""
        allowed = {
            Relation.LT: {Relation.LT},
            Relation.GT: {Relation.GT},
            Relation.EQ: {Relation.EQ},
            Relation.LE: {Relation.LT, Relation.EQ},
            Relation.GE: {Relation.GT, Relation.EQ},
            Relation.UNKNOWN: {Relation.LT, Relation.EQ, Relation.GT},
        }
        return observed in allowed[self]

    def weakened(self) -> "Relation":
        return {Relation.LT: Relation.LE, Relation.GT: Relation.GE}.get(self, self)

    def flipped(self) -> "Relation":
        return {
            Relation.LT: Relation.GT,
            Relation.GT: Relation.LT,
            Relation.LE: Relation.GE,
            Relation.GE: Relation.LE,
        }.get(self, self)


def observe(diff: float, tol: float) -> Relation:
    """Relation of ``diff`` to zero with a symmetric dead band ``tol``."""
    if diff > tol:
        return Relation.GT
    if diff < -tol:
        return Relation.LT
    return Relation.EQ
