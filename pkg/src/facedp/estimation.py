"""Debiased frequency estimation and label-level utility metrics."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .attribute_db import AttributeDatabase, check_aligned, frequency, normalize_name
from .mechanism import DesignMatrix, PerturbationConfig

Z95 = 1.96


@dataclass(frozen=True)
class FrequencyEstimate:
    raw_point: float
    clamped_point: float
    variance: float
    ci95_low: float
    ci95_high: float
    n: int


def debias_frequency(observed_lambda: float, P: DesignMatrix, n: int) -> FrequencyEstimate:
    """Invert ``Pr[y=1] = pi * p11 + (1 - pi) * p01`` for ``pi``.

    The variance is the plug-in binomial variance of the observed rate scaled
    by the inverse gain; the interval is a normal approximation and should
    not be trusted much below n = 1000.
    """
    if n < 1:
        raise ValueError("n must be at least 1")
    gain = P.p11 - P.p01
    if gain == 0.0:
        raise ValueError("singular design matrix (p11 == p01): frequency is not identifiable")
    lam = float(observed_lambda)
    raw = (lam - P.p01) / gain
    var = max(lam * (1.0 - lam), 0.0) / (n * gain * gain)
    half = Z95 * math.sqrt(var)
    return FrequencyEstimate(
        raw_point=raw,
        clamped_point=min(1.0, max(0.0, raw)),
        variance=var,
        ci95_low=raw - half,
        ci95_high=raw + half,
        n=int(n),
    )


def _changed(original: AttributeDatabase, perturbed: AttributeDatabase, name: str) -> int:
    check_aligned(original, perturbed)
    name = normalize_name(name)
    if len(original) == 0:
        raise ValueError("flip rate of an empty database is undefined")
    return int(np.count_nonzero(original.column(name) != perturbed.column(name)))


def flip_rate(original: AttributeDatabase, perturbed: AttributeDatabase, name: str) -> float:
    return _changed(original, perturbed, name) / len(original)


def keep_rate(original: AttributeDatabase, perturbed: AttributeDatabase, name: str) -> float:
    """Fraction of records whose label survived; expectation is the diagonal keep probability."""
    return (len(original) - _changed(original, perturbed, name)) / len(original)


@dataclass(frozen=True)
class UtilityRow:
    attribute: str
    keep_rate: float
    true_frequency: float
    debiased_estimate: FrequencyEstimate

    @property
    def absolute_error(self) -> float:
        return abs(self.debiased_estimate.raw_point - self.true_frequency)


UTILITY_CSV_HEADER = "attribute,keep_rate,true_frequency,debiased_estimate,absolute_error"


def utility_report(
    original: AttributeDatabase, perturbed: AttributeDatabase, config: PerturbationConfig
) -> list[UtilityRow]:
    check_aligned(original, perturbed)
    rows = []
    for name, P in config.per_attribute.items():
        est = debias_frequency(frequency(perturbed, name), P, len(perturbed))
        rows.append(UtilityRow(name, keep_rate(original, perturbed, name), frequency(original, name), est))
    return rows


def utility_csv(rows: list[UtilityRow]) -> str:
    lines = [UTILITY_CSV_HEADER]
    for r in rows:
        lines.append(
            f"{r.attribute},{r.keep_rate!r},{r.true_frequency!r},"
            f"{r.debiased_estimate.raw_point!r},{r.absolute_error!r}"
        )
    return "\n".join(lines) + "\n"
