"""Randomized response on binary attributes.

Design matrices follow the convention ``p[u][v] = Pr[output v | true u]``:
rows are indexed by the true bit, columns by the released bit.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Mapping

import numpy as np

from .attribute_db import AttributeDatabase, normalize_name

ROW_SUM_TOL = 1e-12
EPS_SLACK = 1e-12
U64_MAX = 2**64 - 1


@dataclass(frozen=True)
class DesignMatrix:
    p00: float
    p01: float
    p10: float
    p11: float

    def __post_init__(self):
        for key in ("p00", "p01", "p10", "p11"):
            v = float(getattr(self, key))
            if not (0.0 < v < 1.0):
                raise ValueError(f"{key}={v!r} must lie strictly inside (0, 1)")
            object.__setattr__(self, key, v)
        if abs(self.p00 + self.p01 - 1.0) > ROW_SUM_TOL:
            raise ValueError(f"row 0 sums to {self.p00 + self.p01!r}, not 1")
        if abs(self.p10 + self.p11 - 1.0) > ROW_SUM_TOL:
            raise ValueError(f"row 1 sums to {self.p10 + self.p11!r}, not 1")

    @classmethod
    def from_rows(cls, rows) -> "DesignMatrix":
        (a, b), (c, d) = rows
        return cls(a, b, c, d)

    def rows(self) -> tuple[tuple[float, float], tuple[float, float]]:
        return (self.p00, self.p01), (self.p10, self.p11)

    def as_array(self) -> np.ndarray:
        return np.array(self.rows())

    def to_dict(self) -> dict[str, float]:
        return {"p00": self.p00, "p01": self.p01, "p10": self.p10, "p11": self.p11}


def check_warner_pw(p_w: float) -> float:
    p_w = float(p_w)
    if not (0.0 < p_w < 1.0):
        raise ValueError(f"Warner parameter p_w={p_w!r} must lie in (0, 1)")
    if p_w == 0.5:
        raise ValueError("Warner parameter p_w=0.5 gives epsilon=0: the release carries no information")
    return p_w


def check_epsilon(epsilon: float) -> float:
    epsilon = float(epsilon)
    if not math.isfinite(epsilon) or epsilon < 0:
        raise ValueError(f"privacy budget must be finite and >= 0, got {epsilon!r}")
    return epsilon


def warner_matrix(p_w: float) -> DesignMatrix:
    p_w = check_warner_pw(p_w)
    return DesignMatrix(p_w, 1.0 - p_w, 1.0 - p_w, p_w)


def epsilon_of_warner(p_w: float) -> float:
    p_w = check_warner_pw(p_w)
    return abs(math.log(p_w) - math.log1p(-p_w))


def log_ratio_epsilon(p00: float, p01: float, p10: float, p11: float) -> float:
    """Smallest epsilon with every same-output probability ratio <= e^epsilon.

    Returns ``inf`` if any entry is zero.  Shared by the exact and the
    empirical (audit) paths.
    """
    if min(p00, p01, p10, p11) <= 0.0:
        return math.inf
    return max(abs(math.log(p00) - math.log(p10)), abs(math.log(p11) - math.log(p01)))


def epsilon_of_matrix(P: DesignMatrix) -> float:
    return log_ratio_epsilon(P.p00, P.p01, P.p10, P.p11)


def satisfies_dp(P: DesignMatrix, target: float) -> bool:
    """Check the four ratio inequalities of epsilon-DP randomized response."""
    target = check_epsilon(target)
    bound = math.exp(target) * (1.0 + EPS_SLACK)
    return (
        P.p00 <= bound * P.p10
        and P.p11 <= bound * P.p01
        and P.p01 <= bound * P.p11
        and P.p10 <= bound * P.p00
    )


def optimal_matrix(epsilon: float) -> DesignMatrix:
    """Symmetric matrix with the largest keep probability allowed at ``epsilon``.

    Diagonal ``e^eps / (e^eps + 1)``, off-diagonal ``1 / (e^eps + 1)``.
    """
    epsilon = check_epsilon(epsilon)
    if epsilon == 0.0:
        raise ValueError("epsilon=0 yields the degenerate all-1/2 mechanism")
    off = 1.0 / (math.exp(epsilon) + 1.0) if epsilon < 700 else 0.0
    if off == 0.0:
        raise ValueError(f"epsilon={epsilon!r} too large: off-diagonal underflows to 0")
    return DesignMatrix(1.0 - off, off, off, 1.0 - off)


def ratio_family_matrix(q: float) -> DesignMatrix:
    """Symmetric matrix with keep/flip odds ``q``: diagonal ``q / (1 + q)``."""
    q = float(q)
    if not q > 0:
        raise ValueError("odds q must be positive")
    off = 1.0 / (1.0 + q)
    return DesignMatrix(1.0 - off, off, off, 1.0 - off)


def perturb_value(x: int, P: DesignMatrix, draw: float) -> int:
    if x == 0:
        return 0 if draw < P.p00 else 1
    if x == 1:
        return 1 if draw < P.p11 else 0
    raise ValueError(f"x must be 0 or 1, got {x!r}")


def perturb_bits(bits: np.ndarray, P: DesignMatrix, draws: np.ndarray) -> np.ndarray:
    """Vectorized :func:`perturb_value`."""
    bits = np.asarray(bits)
    keep = np.where(bits == 1, draws < P.p11, draws < P.p00)
    return np.where(keep, bits, 1 - bits).astype(np.uint8)


# -- keyed PRF ---------------------------------------------------------------
#
# draw(seed, r, a) = top 53 bits of
#     mix(mix(seed ^ K0) ^ mix(r * K1 + a * K2 + K3))  / 2**53
# where mix is the SplitMix64 finalizer.  All arithmetic is mod 2**64.  The
# function is part of the reproducibility contract: changing it changes
# every perturbed release for a given seed.

_K0 = np.uint64(0x9E3779B97F4A7C15)
_K1 = np.uint64(0xBF58476D1CE4E5B9)
_K2 = np.uint64(0x94D049BB133111EB)
_K3 = np.uint64(0xD6E8FEB86659FD93)
_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)


def _mix64(z: np.ndarray) -> np.ndarray:
    z = z.astype(np.uint64, copy=True)
    z ^= z >> np.uint64(30)
    z *= _M1
    z ^= z >> np.uint64(27)
    z *= _M2
    z ^= z >> np.uint64(31)
    return z


def check_seed(seed) -> int:
    if isinstance(seed, bool) or not isinstance(seed, (int, np.integer)):
        raise TypeError(f"seed must be an integer, got {type(seed).__name__}")
    seed = int(seed)
    if not 0 <= seed <= U64_MAX:
        raise ValueError(f"seed {seed} outside the unsigned 64-bit range")
    return seed


def prf_uniform(seed: int, record_index, attribute_index) -> np.ndarray:
    """Deterministic uniform draws in [0, 1) keyed by (seed, record, attribute)."""
    seed = check_seed(seed)
    r = np.asarray(record_index, dtype=np.uint64)
    a = np.asarray(attribute_index, dtype=np.uint64)
    with np.errstate(over="ignore"):
        key = _mix64(np.asarray(np.uint64(seed) ^ _K0))
        counter = _mix64(r * _K1 + a * _K2 + _K3)
        z = _mix64(key ^ counter)
    return (z >> np.uint64(11)).astype(np.float64) * (1.0 / 2**53)


@dataclass(frozen=True)
class PerturbationConfig:
    master_seed: int
    per_attribute: Mapping[str, DesignMatrix] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "master_seed", check_seed(self.master_seed))
        items = {}
        for name, P in dict(self.per_attribute).items():
            if not isinstance(P, DesignMatrix):
                raise TypeError(f"attribute {name!r}: expected DesignMatrix, got {type(P).__name__}")
            items[normalize_name(name)] = P
        object.__setattr__(self, "per_attribute", items)

    def with_seed(self, seed: int) -> "PerturbationConfig":
        return PerturbationConfig(seed, self.per_attribute)

    def to_dict(self) -> dict:
        return {
            "master_seed": self.master_seed,
            "attributes": {name: P.to_dict() for name, P in self.per_attribute.items()},
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"

    @classmethod
    def from_dict(cls, doc: Mapping) -> "PerturbationConfig":
        if "master_seed" not in doc:
            raise ValueError("config is missing 'master_seed'")
        attrs = doc.get("attributes", {})
        if not isinstance(attrs, Mapping):
            raise ValueError("'attributes' must be an object")
        return cls(doc["master_seed"], {name: _matrix_from_spec(name, spec) for name, spec in attrs.items()})

    @classmethod
    def from_json(cls, text: str) -> "PerturbationConfig":
        return cls.from_dict(json.loads(text))


def _matrix_from_spec(name: str, spec) -> DesignMatrix:
    if not isinstance(spec, Mapping):
        raise ValueError(f"attribute {name!r}: matrix spec must be an object")
    keys = set(spec)
    try:
        if keys == {"warner_pw"}:
            return warner_matrix(spec["warner_pw"])
        if keys == {"epsilon"}:
            return optimal_matrix(spec["epsilon"])
        if keys == {"p00", "p01", "p10", "p11"}:
            return DesignMatrix(spec["p00"], spec["p01"], spec["p10"], spec["p11"])
    except (TypeError, ValueError) as exc:
        raise ValueError(f"attribute {name!r}: {exc}") from None
    raise ValueError(
        f"attribute {name!r}: expected keys p00/p01/p10/p11, warner_pw, or epsilon; got {sorted(keys)}"
    )


def perturb_database(db: AttributeDatabase, config: PerturbationConfig) -> AttributeDatabase:
    """Release ``db`` with each configured attribute passed through its matrix.

    The draw for record ``r`` and attribute column ``a`` is
    ``prf_uniform(config.master_seed, r, a)``, so the result is a pure function
    of ``(db, config)``.  Unconfigured attributes pass through unchanged.
    """
    cols = {name: db.schema.index(name) for name in config.per_attribute}
    out = np.array(db.bits, copy=True)
    records = np.arange(len(db), dtype=np.uint64)
    for name, a in cols.items():
        draws = prf_uniform(config.master_seed, records, a)
        out[:, a] = perturb_bits(db.bits[:, a], config.per_attribute[name], draws)
    return AttributeDatabase(db.schema, db.record_ids, out)
