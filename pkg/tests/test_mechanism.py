import json
import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from facedp.attribute_db import select_attributes
from facedp.mechanism import (
    DesignMatrix,
    PerturbationConfig,
    epsilon_of_matrix,
    epsilon_of_warner,
    optimal_matrix,
    perturb_bits,
    perturb_database,
    perturb_value,
    prf_uniform,
    ratio_family_matrix,
    satisfies_dp,
    warner_matrix,
)
from facedp.synthetic import random_database


def smallest_epsilon_by_bisection(P, hi=50.0, iters=200):
    """Independent oracle: bisect on the four raw ratio inequalities."""

    def ok(eps):
        b = math.exp(eps)
        return P.p00 <= b * P.p10 and P.p11 <= b * P.p01 and P.p01 <= b * P.p11 and P.p10 <= b * P.p00

    lo = 0.0
    if ok(lo):
        return 0.0
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        if ok(mid):
            hi = mid
        else:
            lo = mid
    return hi


valid_pw = st.floats(0.001, 0.999).filter(lambda p: p != 0.5)


@st.composite
def matrices(draw):
    a = draw(st.floats(0.001, 0.999))
    b = draw(st.floats(0.001, 0.999))
    return DesignMatrix(a, 1.0 - a, 1.0 - b, b)


# -- warner_matrix / epsilon_of_warner ---------------------------------------


def test_warner_matrix_examples():
    assert warner_matrix(0.9).rows() == ((0.9, pytest.approx(0.1)), (pytest.approx(0.1), 0.9))
    assert warner_matrix(0.6).rows() == ((0.6, pytest.approx(0.4)), (pytest.approx(0.4), 0.6))


@pytest.mark.parametrize("bad", [0.5, 0.0, 1.0, -0.1, 1.5])
def test_warner_rejects(bad):
    with pytest.raises(ValueError):
        warner_matrix(bad)
    with pytest.raises(ValueError):
        epsilon_of_warner(bad)


@pytest.mark.parametrize(
    "p_w, expected",
    [(0.9, math.log(9)), (0.1, math.log(9)), (0.6, math.log(1.5)), (0.7, math.log(7 / 3)), (0.8, math.log(4))],
)
def test_epsilon_of_warner(p_w, expected):
    assert epsilon_of_warner(p_w) == pytest.approx(expected, abs=1e-12)


def test_reported_constants():
    assert epsilon_of_warner(0.9) == pytest.approx(2.1972246, abs=1e-7)
    assert epsilon_of_warner(0.6) == pytest.approx(0.4054651, abs=1e-7)


@given(valid_pw)
def test_warner_symmetry(p):
    assert epsilon_of_warner(p) == pytest.approx(epsilon_of_warner(1.0 - p), rel=1e-9, abs=1e-12)


@given(valid_pw)
def test_warner_rows_stochastic(p):
    P = warner_matrix(p)
    assert abs(P.p00 + P.p01 - 1) <= 1e-12 and abs(P.p10 + P.p11 - 1) <= 1e-12


# -- epsilon_of_matrix -------------------------------------------------------


def test_epsilon_of_matrix_examples():
    P = warner_matrix(0.8)
    ratios = [P.p00 / P.p10, P.p11 / P.p01, P.p01 / P.p11, P.p10 / P.p00]
    assert max(math.log(r) for r in ratios) == pytest.approx(math.log(4))
    assert epsilon_of_matrix(P) == pytest.approx(math.log(4), abs=1e-12)
    assert epsilon_of_matrix(DesignMatrix(0.5, 0.5, 0.5, 0.5)) == 0.0
    P = DesignMatrix(0.999, 0.001, 0.5, 0.5)
    assert epsilon_of_matrix(P) == pytest.approx(math.log(500), abs=1e-9)
    assert epsilon_of_matrix(P) == pytest.approx(6.2146, abs=1e-4)


@given(matrices())
def test_epsilon_of_matrix_matches_bisection_oracle(P):
    assert epsilon_of_matrix(P) == pytest.approx(smallest_epsilon_by_bisection(P), abs=1e-9)


@given(valid_pw)
def test_warner_epsilon_agrees_with_matrix_epsilon(p):
    assert epsilon_of_warner(p) == pytest.approx(epsilon_of_matrix(warner_matrix(p)), abs=1e-12)


# -- satisfies_dp ------------------------------------------------------------


def test_satisfies_dp_examples():
    P = warner_matrix(0.9)
    assert satisfies_dp(P, math.log(9))
    assert not satisfies_dp(P, math.log(4))


@given(matrices())
def test_satisfies_dp_tightness(P):
    eps = epsilon_of_matrix(P)
    assert satisfies_dp(P, eps)
    if eps > 1e-6:
        assert not satisfies_dp(P, eps - 1e-6)


def test_satisfies_dp_rejects_negative_target():
    with pytest.raises(ValueError):
        satisfies_dp(warner_matrix(0.9), -1.0)


# -- optimal_matrix ----------------------------------------------------------


@pytest.mark.parametrize("eps, diag", [(math.log(9), 0.9), (math.log(1.5), 0.6)])
def test_optimal_matrix_examples(eps, diag):
    P = optimal_matrix(eps)
    assert P.p00 == pytest.approx(diag, abs=1e-12) and P.p11 == pytest.approx(diag, abs=1e-12)
    assert P.p01 == pytest.approx(1 - diag, abs=1e-12) and P.p10 == pytest.approx(1 - diag, abs=1e-12)


def test_optimal_matrix_rejects_zero():
    with pytest.raises(ValueError, match="degenerate"):
        optimal_matrix(0.0)


@given(st.floats(1e-4, 20.0), st.floats(1e-9, 1.0 - 1e-6))
def test_optimal_matrix_dominates_ratio_family(eps, frac):
    P = optimal_matrix(eps)
    assert satisfies_dp(P, eps)
    q = 1.0 + frac * (math.exp(eps) - 1.0)
    assume(1.0 < q < math.exp(eps))
    Q = ratio_family_matrix(q)
    assume(Q.p00 < 1.0)
    assert satisfies_dp(Q, eps)
    assert Q.p00 < P.p00


@given(st.fractions(min_value=1, max_value=10**6), st.fractions(min_value=Fraction(1, 10**9), max_value=1))
def test_keep_probability_increasing_in_odds(q, dq):
    assert q / (1 + q) < (q + dq) / (1 + q + dq)


# -- DesignMatrix invariants ------------------------------------------------


@pytest.mark.parametrize("entries", [(0.6, 0.5, 0.4, 0.6), (0.0, 1.0, 0.5, 0.5), (1.0, 0.0, 0.5, 0.5), (0.5, 0.5, 0.6, 0.5)])
def test_design_matrix_rejects(entries):
    with pytest.raises(ValueError):
        DesignMatrix(*entries)


# -- perturb_value -----------------------------------------------------------


def test_perturb_value_examples():
    P = warner_matrix(0.9)
    assert perturb_value(1, P, 0.30) == 1
    assert perturb_value(1, P, 0.95) == 0
    assert perturb_value(0, P, 0.05) == 0
    assert perturb_value(0, P, 0.95) == 1


@pytest.mark.parametrize("P", [warner_matrix(0.7), DesignMatrix(0.999, 0.001, 0.5, 0.5), DesignMatrix(0.25, 0.75, 0.1, 0.9)])
def test_threshold_sampling_is_exact_on_grid(P):
    m = 10**6
    draws = np.arange(m) / m
    for u in (0, 1):
        out = perturb_bits(np.full(m, u), P, draws)
        freq1 = out.mean()
        expected = P.p01 if u == 0 else P.p11
        assert abs(freq1 - expected) <= 2 / m
    scalar = [perturb_value(1, P, d) for d in draws[::997]]
    assert scalar == perturb_bits(np.ones(len(scalar), dtype=int), P, draws[::997]).tolist()


# -- PRF ---------------------------------------------------------------------


def test_prf_range_and_stability():
    d = prf_uniform(42, np.arange(1000), 3)
    assert d.min() >= 0.0 and d.max() < 1.0
    assert np.array_equal(d, prf_uniform(42, np.arange(1000), 3))
    assert not np.array_equal(d, prf_uniform(43, np.arange(1000), 3))
    assert not np.array_equal(d, prf_uniform(42, np.arange(1000), 4))


def test_prf_pinned_values():
    # Reproducibility contract: changing the PRF changes every release.
    assert prf_uniform(42, [0, 1, 2], 0).tolist() == [0.7111822224757409, 0.5629058553294085, 0.20042275128635345]
    assert prf_uniform(2**64 - 1, [123456789], 7).tolist() == [0.22156281356217877]


def test_prf_is_keyed_by_index_not_order():
    idx = np.arange(5000)
    forward = prf_uniform(7, idx, 1)
    backward = prf_uniform(7, idx[::-1], 1)[::-1]
    assert np.array_equal(forward, backward)
    assert forward[1234] == prf_uniform(7, 1234, 1)


def test_prf_uniformity_chi_square():
    d = prf_uniform(2024, np.arange(200_000), 0)
    counts = np.histogram(d, bins=100, range=(0, 1))[0]
    expected = len(d) / 100
    chi2 = ((counts - expected) ** 2 / expected).sum()
    # 99 dof: 99.9th percentile is about 148.2
    assert chi2 < 148.2
    # draws across attributes of the same record are uncorrelated
    e = prf_uniform(2024, np.arange(200_000), 1)
    assert abs(np.corrcoef(d, e)[0, 1]) < 0.01


def test_prf_seed_range():
    prf_uniform(2**64 - 1, [0], 0)
    with pytest.raises(ValueError):
        prf_uniform(2**64, [0], 0)
    with pytest.raises(ValueError):
        prf_uniform(-1, [0], 0)


# -- perturb_database --------------------------------------------------------


def test_perturb_database_identity_config():
    db = random_database(100, seed=1)
    assert perturb_database(db, PerturbationConfig(5, {})) == db


def test_perturb_database_deterministic_and_passthrough():
    db = random_database(500, seed=2)
    config = PerturbationConfig(42, {"Male": warner_matrix(0.7), "Young": warner_matrix(0.9)})
    a = perturb_database(db, config)
    b = perturb_database(db, config)
    assert a == b
    assert a.record_ids == db.record_ids and a.schema == db.schema
    untouched = [n for n in db.names if n not in ("Male", "Young")]
    assert select_attributes(a, untouched) == select_attributes(db, untouched)
    assert a != perturb_database(db, config.with_seed(43))


def test_perturb_database_uses_documented_draws():
    db = random_database(300, names=("A", "B"), seed=4)
    P = DesignMatrix(0.3, 0.7, 0.2, 0.8)
    out = perturb_database(db, PerturbationConfig(99, {"B": P}))
    draws = prf_uniform(99, np.arange(300), 1)
    expected = [perturb_value(int(x), P, float(d)) for x, d in zip(db.bits[:, 1], draws)]
    assert out.bits[:, 1].tolist() == expected


def test_perturb_database_unknown_attribute():
    db = random_database(10, names=("A",))
    with pytest.raises(KeyError, match="Smiling"):
        perturb_database(db, PerturbationConfig(0, {"Smiling": warner_matrix(0.9)}))


def test_keep_rate_100k():
    n = 100_000
    db = random_database(n, names=("A",), seed=11)
    out = perturb_database(db, PerturbationConfig(12345, {"A": warner_matrix(0.8)}))
    sigma = math.sqrt(0.8 * 0.2 / n)
    assert 3 * sigma < 0.004
    keep = float((out.bits == db.bits).mean())
    assert abs(keep - 0.8) <= 0.004


def test_keep_rate_bound_matches_monte_carlo_oracle():
    # The 0.004 window is about 3.16 sigma; a numpy-driven simulation should
    # land inside it nearly always.
    rng = np.random.default_rng(0)
    keeps = rng.binomial(100_000, 0.8, size=2000) / 100_000
    assert np.mean(np.abs(keeps - 0.8) <= 0.004) > 0.99


# -- config JSON -------------------------------------------------------------


def test_config_json_shorthands():
    doc = {
        "master_seed": 7,
        "attributes": {
            "Male": {"warner_pw": 0.9},
            "Pale Skin": {"epsilon": math.log(1.5)},
            "Young": {"p00": 0.7, "p01": 0.3, "p10": 0.2, "p11": 0.8},
        },
    }
    config = PerturbationConfig.from_json(json.dumps(doc))
    assert config.master_seed == 7
    assert config.per_attribute["Male"] == warner_matrix(0.9)
    assert config.per_attribute["Pale_Skin"].p00 == pytest.approx(0.6)
    assert config.per_attribute["Young"] == DesignMatrix(0.7, 0.3, 0.2, 0.8)
    again = PerturbationConfig.from_json(config.to_json())
    assert again == config


@pytest.mark.parametrize(
    "doc",
    [
        {"master_seed": 1, "attributes": {"A": {"warner_pw": 0.5}}},
        {"master_seed": 1, "attributes": {"A": {"epsilon": 0}}},
        {"master_seed": 1, "attributes": {"A": {"p00": 0.5}}},
        {"master_seed": -1, "attributes": {}},
        {"master_seed": 2**64, "attributes": {}},
        {"master_seed": 1.5, "attributes": {}},
        {"attributes": {}},
    ],
)
def test_config_rejects(doc):
    with pytest.raises((ValueError, TypeError)):
        PerturbationConfig.from_dict(doc)
