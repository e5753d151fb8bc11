from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from tstable import DomainError, Params
from tstable.graph_lab import trial_seed
from tstable.moments import (
    build_profile,
    log_binom,
    log_expected_count,
    log_f,
    log_prob_tstable_upper,
    logsumexp,
    mstar_prediction,
)


def test_params_validation():
    assert Params(1, 0.5).b == 2.0
    for t, p in [(-1, 0.5), (1, 0.0), (1, 1.0)]:
        with pytest.raises(DomainError):
            Params(t, p)


@given(t=st.integers(0, 3), k=st.integers(2, 30), p=st.floats(0.05, 0.95))
def test_log_f_at_zero_edges(t, k, p):
    params = Params(t, p)
    assert log_f(params, k, 0) == pytest.approx(math.comb(k, 2) * math.log1p(-p))


def test_log_f_worked_case():
    assert log_f(Params(1, 0.5), 4, 1) == pytest.approx(math.log(0.09375), rel=1e-13)


def test_log_f_domain():
    with pytest.raises(DomainError):
        log_f(Params(1, 0.5), 4, 3)


@pytest.mark.parametrize("t, p", [(1, 0.5), (2, 0.3), (3, 0.7)])
def test_saddle_mode_tracks_exact(t, p):
    params = Params(t, p)
    k = 300
    for m in range(20, t * k // 2 - 20, 37):
        assert log_f(params, k, m, "saddle") == pytest.approx(log_f(params, k, m, "exact"), abs=0.05)


def test_profile_t0():
    prof = build_profile(Params(0, 0.4), 25)
    assert prof.m_star == 0
    assert prof.log_sum == pytest.approx(math.comb(25, 2) * math.log(0.6))


def test_profile_mstar_example():
    prof = build_profile(Params(1, 0.5), 400)
    assert prof.mode == "exact"
    assert abs(prof.m_star - 190) <= 8


def test_profile_has_one_crossing():
    prof = build_profile(Params(1, 0.5), 400)
    above = prof.ratios >= 1
    assert np.count_nonzero(above[:-1] != above[1:]) == 1


def test_profile_switches_to_saddle():
    prof = build_profile(Params(2, 0.5), 40, exact_limit=50)
    assert prof.mode == "saddle"
    exact = build_profile(Params(2, 0.5), 40)
    assert prof.m_star == exact.m_star


@pytest.mark.parametrize("t, k, p, want", [(1, 100, 0.5, 45.0), (2, 200, 0.5, 190.0), (0, 50, 0.5, 0.0)])
def test_mstar_prediction_examples(t, k, p, want):
    assert mstar_prediction(Params(t, p), k) == pytest.approx(want)


def test_mstar_prediction_as_p_to_one():
    assert mstar_prediction(Params(1, 1 - 1e-12), 100) == pytest.approx(50.0, abs=1e-4)


def test_prob_bound_t0_is_exact():
    params = Params(0, 0.5)
    assert log_prob_tstable_upper(params, 12).log_bound == pytest.approx(66 * math.log(0.5))


def test_log_sum_bracketed_by_max_term():
    prof = build_profile(Params(2, 0.3), 60)
    top = prof.log_f[prof.m_star]
    assert top <= prof.log_sum <= top + math.log(2 * 60 / 2 + 1)


def test_prob_bound_dominates_simulation():
    params = Params(1, 0.5)
    k, n_samples = 20, 100_000
    bound = math.exp(log_prob_tstable_upper(params, k).log_bound)
    # all C(20,2) edges at once: draw 190 bits per sample
    rng = np.random.default_rng(trial_seed(11, 0))
    pairs = [(u, v) for u in range(k) for v in range(u + 1, k)]
    hits = 0
    for _ in range(10):
        draws = rng.random((n_samples // 10, len(pairs))) < params.p
        deg = np.zeros((draws.shape[0], k), dtype=np.int64)
        for e, (u, v) in enumerate(pairs):
            deg[:, u] += draws[:, e]
            deg[:, v] += draws[:, e]
        hits += int(np.count_nonzero(deg.max(axis=1) <= 1))
    assert hits / n_samples <= bound


def test_expected_count_small_case():
    ec = log_expected_count(Params(0, 0.5), 3, 2, "upper")
    assert ec.log_value == pytest.approx(math.log(1.5))


def test_expected_count_domain():
    with pytest.raises(DomainError):
        log_expected_count(Params(1, 0.5), 5, 6)
    with pytest.raises(DomainError):
        log_expected_count(Params(1, 0.5), 50, 6, side="middle")


def test_expected_count_first_moment_sides():
    from tstable.formulas import alpha_formula

    params = Params(1, 0.5)
    n = 10**6
    a = alpha_formula(params, n)
    assert log_expected_count(params, n, math.ceil(a + 0.2), "upper").log_value < 0
    assert log_expected_count(params, n, math.floor(a - 0.2), "lower").log_value > 0


def test_lower_never_exceeds_upper():
    params = Params(2, 0.5)
    for k in (5, 20, 40):
        lo = log_expected_count(params, 1000, k, "lower").log_value
        hi = log_expected_count(params, 1000, k, "upper").log_value
        assert lo <= hi


def test_logsumexp_and_binom():
    assert logsumexp([0.0, 0.0]) == pytest.approx(math.log(2))
    assert logsumexp([-math.inf, -math.inf]) == -math.inf
    assert log_binom(10, 3) == pytest.approx(math.log(120))
    assert log_binom(3, 5) == -math.inf



def test_dual_mode_agreement_near_mstar():
    params = Params(2, 0.5)
    m_star = build_profile(params, 100).m_star
    for m in range(m_star - 10, min(m_star + 11, 100)):
        assert abs(log_f(params, 100, m, "saddle") - log_f(params, 100, m, "exact")) <= 0.05
