"""Privacy/utility sweep over Warner keep probabilities."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .attribute_db import AttributeDatabase, frequency, normalize_name, select_attributes
from .estimation import debias_frequency, keep_rate
from .mechanism import PerturbationConfig, U64_MAX, check_seed, epsilon_of_warner, perturb_database, warner_matrix
from .synthetic import PAPER_ATTRIBUTES

DEFAULT_PW = (0.6, 0.7, 0.8, 0.9)
DEFAULT_TRIALS = 10


@dataclass(frozen=True)
class SweepRow:
    p_w: float
    epsilon: float
    keep_rate: dict[str, float] = field(default_factory=dict)
    estimation_error: dict[str, float] = field(default_factory=dict)

    def __post_init__(self):
        if not math.isclose(self.epsilon, epsilon_of_warner(self.p_w), rel_tol=0, abs_tol=1e-12):
            raise ValueError(f"epsilon {self.epsilon} inconsistent with p_w {self.p_w}")


def default_attributes(db: AttributeDatabase) -> list[str]:
    present = [a for a in PAPER_ATTRIBUTES if a in db.names]
    if not present:
        raise ValueError(f"none of the default attributes {list(PAPER_ATTRIBUTES)} are in the schema; pass them explicitly")
    return present


def run_sweep(
    db: AttributeDatabase,
    attributes: Sequence[str] | None = None,
    pws: Sequence[float] = DEFAULT_PW,
    trials: int = DEFAULT_TRIALS,
    seed: int = 0,
) -> list[SweepRow]:
    """Average keep-rate and debiasing error over ``trials`` seeds per p_w.

    Trial ``t`` uses seed ``seed + t`` for every p_w, so rows share random
    draws and differ only in the keep threshold.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    seed = check_seed(seed)
    if seed + trials - 1 > U64_MAX:
        raise ValueError("seed + trials exceeds the 64-bit seed range")
    for p in pws:
        epsilon_of_warner(p)
    names = [normalize_name(a) for a in attributes] if attributes else default_attributes(db)
    sub = select_attributes(db, names)
    truth = {a: frequency(sub, a) for a in names}

    rows = []
    for p in pws:
        P = warner_matrix(p)
        keeps = {a: [] for a in names}
        errors = {a: [] for a in names}
        for t in range(trials):
            config = PerturbationConfig(seed + t, {a: P for a in names})
            released = perturb_database(sub, config)
            for a in names:
                keeps[a].append(keep_rate(sub, released, a))
                est = debias_frequency(frequency(released, a), P, len(released))
                errors[a].append(abs(est.raw_point - truth[a]))
        rows.append(
            SweepRow(
                p_w=float(p),
                epsilon=epsilon_of_warner(p),
                keep_rate={a: float(np.mean(keeps[a])) for a in names},
                estimation_error={a: float(np.mean(errors[a])) for a in names},
            )
        )
    return rows


def sweep_csv(rows: list[SweepRow]) -> str:
    names = list(rows[0].keep_rate) if rows else []
    header = ["p_w", "epsilon"]
    header += [f"keep_rate:{a}" for a in names]
    header += [f"estimation_error:{a}" for a in names]
    lines = [",".join(header)]
    for r in rows:
        cells = [repr(r.p_w), repr(r.epsilon)]
        cells += [repr(r.keep_rate[a]) for a in names]
        cells += [repr(r.estimation_error[a]) for a in names]
        lines.append(",".join(cells))
    return "\n".join(lines) + "\n"
