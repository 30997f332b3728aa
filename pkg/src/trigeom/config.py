"""Run configuration: strongness mode, search budgets, verdicts."""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Any


class StrongnessMode(Enum):
    """Quantifier domain for strongness tests.

    LCLOSED restricts test sets C to those making A ∪ C L-closed in the
    ambient; LITERAL quantifies over all subsets.  LCLOSED is the default:
    under the literal reading the empty graph fails to be strong in graphs
    that are perfectly fine members of the class.
    """

    LCLOSED = "l-closed"
    LITERAL = "literal"


@dataclass(frozen=True)
class Budgets:
    """Explicit caps for every exhaustive search; overrun raises BudgetExceeded."""

    subset_cap: int = 20            # max |free set| for full 2^k sweeps
    oracle_cap: int = 10            # max |G| for brute-force closure oracle
    check_k_cap: int = 16           # max |G| for the exact C6 lattice sweep
    cluster_cap: int = 2_000_000    # node budget for the cluster branch & bound
    pair_ext_cap: int = 8           # max |B| when scanning for simple pairs
    pair_base_cap: int = 10         # max attachment-set size for pair bases
    copies_cap: int = 10_000        # max number of enumerated copies

    @staticmethod
    def from_env(base: "Budgets | None" = None) -> "Budgets":
        b = base or Budgets()
        overrides = {}
        for f in (
            "subset_cap",
            "oracle_cap",
            "check_k_cap",
            "cluster_cap",
            "pair_ext_cap",
            "pair_base_cap",
            "copies_cap",
        ):
            v = os.environ.get(f"TRIGEOM_{f.upper()}")
            if v is not None:
                overrides[f] = int(v)
        return replace(b, **overrides) if overrides else b


@dataclass(frozen=True)
class RunConfig:
    n: int = 6
    mode: StrongnessMode = StrongnessMode.LCLOSED
    dual6b: bool = False
    budgets: Budgets = field(default_factory=Budgets)
    seed: int = 0
    jobs: int = 1

    def header(self) -> dict:
        return {
            "n": self.n,
            "mode": self.mode.value,
            "dual6b": self.dual6b,
            "budgets": vars(self.budgets) | {},
            "seed": self.seed,
        }


@dataclass(frozen=True)
class Verdict:
    """A boolean decision plus an independently checkable certificate."""

    holds: bool
    operation: str
    mode: StrongnessMode | None = None
    certificate: Any = None
    detail: dict = field(default_factory=dict)

    def to_doc(self) -> dict:
        cert = self.certificate
        if isinstance(cert, (frozenset, set)):
            cert = sorted(cert)
        return {
            "operation": self.operation,
            "holds": self.holds,
            "mode": self.mode.value if self.mode else None,
            "certificate": cert,
            "detail": _jsonable(self.detail),
        }

    def report(self) -> str:
        return json.dumps(self.to_doc(), sort_keys=True, indent=2)


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, (frozenset, set)):
        return sorted(_jsonable(v) for v in x)
    if isinstance(x, Enum):
        return x.value
    return x
