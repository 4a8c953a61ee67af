"""Per-attribute privacy budgets and their sequential composition."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping

from .mechanism import PerturbationConfig, check_epsilon, check_seed, epsilon_of_matrix

TOTAL_LABEL = "sequential-composition upper bound"


def compose_sequential(budgets: Iterable[float]) -> float:
    # fsum is correctly rounded, so the result does not depend on order.
    return math.fsum(check_epsilon(b) for b in budgets)


@dataclass(frozen=True)
class BudgetLedger:
    entries: Mapping[str, float] = field(default_factory=dict)
    total: float = 0.0
    seed: int = 0

    def __post_init__(self):
        entries = {name: check_epsilon(eps) for name, eps in dict(self.entries).items()}
        object.__setattr__(self, "entries", entries)
        object.__setattr__(self, "seed", check_seed(self.seed))
        if abs(self.total - compose_sequential(entries.values())) > 1e-9:
            raise ValueError(f"ledger total {self.total!r} does not equal the sum of its entries")

    def with_entry(self, name: str, epsilon: float) -> "BudgetLedger":
        entries = dict(self.entries)
        entries[name] = epsilon
        return BudgetLedger(entries, compose_sequential(entries.values()), self.seed)

    def to_dict(self) -> dict:
        return {
            "seed": self.seed,
            "per_attribute": dict(self.entries),
            "total_epsilon": self.total,
            "total_epsilon_kind": TOTAL_LABEL,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"

    @classmethod
    def from_dict(cls, doc: Mapping) -> "BudgetLedger":
        return cls(dict(doc["per_attribute"]), float(doc["total_epsilon"]), doc["seed"])


def ledger_of(config: PerturbationConfig) -> BudgetLedger:
    entries = {name: epsilon_of_matrix(P) for name, P in config.per_attribute.items()}
    return BudgetLedger(entries, compose_sequential(entries.values()), config.master_seed)
