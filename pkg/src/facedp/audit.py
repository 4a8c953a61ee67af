"""Empirical check of the randomized-response ratio bound on a released pair.

The realized design matrix is estimated by counting (true, released) bit
pairs; its implied epsilon is compared against the configured budget plus a
slack.  An attribute with an empty stratum cannot be estimated and is
reported as inconclusive, never as a pass.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Mapping

import numpy as np

from .attribute_db import AttributeDatabase, check_aligned, normalize_name
from .mechanism import DesignMatrix, PerturbationConfig, epsilon_of_matrix, log_ratio_epsilon

DEFAULT_SLACK = 0.15

PASS, FAIL, INCONCLUSIVE = "pass", "fail", "inconclusive"


class EmptyStratumError(ValueError):
    pass


@dataclass(frozen=True)
class TransitionCounts:
    """``nuv`` = number of records with true bit u released as v."""

    n00: int
    n01: int
    n10: int
    n11: int

    @property
    def stratum_counts(self) -> tuple[int, int]:
        return self.n00 + self.n01, self.n10 + self.n11

    def to_dict(self) -> dict[str, int]:
        return {"n00": self.n00, "n01": self.n01, "n10": self.n10, "n11": self.n11}


@dataclass(frozen=True)
class EmpiricalMatrix:
    counts: TransitionCounts

    def __post_init__(self):
        x0, x1 = self.counts.stratum_counts
        if x0 == 0 or x1 == 0:
            raise EmptyStratumError(f"empty stratum (x=0: {x0}, x=1: {x1}); row cannot be estimated")

    @property
    def p00(self) -> float:
        return self.counts.n00 / self.counts.stratum_counts[0]

    @property
    def p01(self) -> float:
        return self.counts.n01 / self.counts.stratum_counts[0]

    @property
    def p10(self) -> float:
        return self.counts.n10 / self.counts.stratum_counts[1]

    @property
    def p11(self) -> float:
        return self.counts.n11 / self.counts.stratum_counts[1]

    def rows(self) -> list[list[float]]:
        return [[self.p00, self.p01], [self.p10, self.p11]]


def count_transitions(original: AttributeDatabase, perturbed: AttributeDatabase, name: str) -> TransitionCounts:
    check_aligned(original, perturbed)
    name = normalize_name(name)
    x = original.column(name).astype(np.int64)
    y = perturbed.column(name).astype(np.int64)
    n00, n01, n10, n11 = np.bincount(2 * x + y, minlength=4)[:4]
    return TransitionCounts(int(n00), int(n01), int(n10), int(n11))


def empirical_design_matrix(original: AttributeDatabase, perturbed: AttributeDatabase, name: str) -> EmpiricalMatrix:
    return EmpiricalMatrix(count_transitions(original, perturbed, name))


def empirical_epsilon(matrix) -> float:
    """Implied epsilon of an estimated (or exact) 2x2 matrix; ``inf`` on a zero cell."""
    if isinstance(matrix, (EmpiricalMatrix, DesignMatrix)):
        p00, p01, p10, p11 = matrix.p00, matrix.p01, matrix.p10, matrix.p11
    else:
        (p00, p01), (p10, p11) = matrix
    return log_ratio_epsilon(p00, p01, p10, p11)


@dataclass(frozen=True)
class AttributeAudit:
    attribute: str
    counts: TransitionCounts
    target_epsilon: float
    empirical_epsilon: float | None
    verdict: str

    @property
    def empirical_matrix(self) -> list[list[float]] | None:
        try:
            return EmpiricalMatrix(self.counts).rows()
        except EmptyStratumError:
            return None

    def to_dict(self) -> dict:
        eps = self.empirical_epsilon
        if eps is not None and math.isinf(eps):
            eps = "inf"
        x0, x1 = self.counts.stratum_counts
        return {
            "counts": self.counts.to_dict(),
            "stratum_counts": {"x0": x0, "x1": x1},
            "empirical_matrix": self.empirical_matrix,
            "empirical_epsilon": eps,
            "target_epsilon": self.target_epsilon,
            "verdict": self.verdict,
        }


@dataclass(frozen=True)
class AuditReport:
    attributes: Mapping[str, AttributeAudit]
    slack: float

    @property
    def verdict(self) -> str:
        verdicts = [a.verdict for a in self.attributes.values()]
        if FAIL in verdicts:
            return FAIL
        if INCONCLUSIVE in verdicts:
            return INCONCLUSIVE
        return PASS

    @property
    def passed(self) -> bool:
        return self.verdict == PASS

    def to_dict(self) -> dict:
        return {
            "slack": self.slack,
            "verdict": self.verdict,
            "attributes": {name: a.to_dict() for name, a in self.attributes.items()},
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"


def audit_attribute(counts: TransitionCounts, name: str, target: float, slack: float) -> AttributeAudit:
    try:
        eps = empirical_epsilon(EmpiricalMatrix(counts))
    except EmptyStratumError:
        return AttributeAudit(name, counts, target, None, INCONCLUSIVE)
    verdict = PASS if eps <= target + slack else FAIL
    return AttributeAudit(name, counts, target, eps, verdict)


def audit(
    original: AttributeDatabase,
    perturbed: AttributeDatabase,
    config: PerturbationConfig,
    slack: float = DEFAULT_SLACK,
) -> AuditReport:
    slack = float(slack)
    if not slack >= 0:
        raise ValueError(f"slack must be >= 0, got {slack!r}")
    check_aligned(original, perturbed)
    results = {}
    for name, P in config.per_attribute.items():
        counts = count_transitions(original, perturbed, name)
        results[name] = audit_attribute(counts, name, epsilon_of_matrix(P), slack)
    return AuditReport(results, slack)
