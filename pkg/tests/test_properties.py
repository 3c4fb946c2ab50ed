"""Randomized invariant suites; run alone with ``pytest tests/test_properties.py``."""

import tempfile
from pathlib import Path

import numpy as np
import pytest
from hypothesis import HealthCheck, given, settings
from hypothesis import strategies as st

from psk_receiver._validation import DegenerateEvidenceError
from psk_receiver.ensemble import SystemModel, make_mpsk_ensemble
from psk_receiver.files import read_schedule, write_schedule
from psk_receiver.montecarlo import simulate_trials
from psk_receiver.photodetection import bayes_update, log_likelihoods
from psk_receiver.receiver import Strategy, evaluate_strategy

CASES = settings(max_examples=1000, deadline=None, suppress_health_check=[HealthCheck.too_slow])

seeds = st.integers(0, 2**32 - 1)
n_states = st.integers(2, 6)
mean_photons = st.floats(0.0, 4.0)
models = st.builds(
    SystemModel,
    efficiency=st.floats(0.05, 1.0),
    visibility=st.floats(0.5, 1.0),
    dark_per_pulse=st.floats(0.0, 0.05),
    slices=st.integers(1, 5),
)
betas = st.complex_numbers(max_magnitude=4, allow_nan=False, allow_infinity=False)


def _priors(rng, m):
    return rng.dirichlet(np.ones(m))


def _update_or_impossible(prior, beta, clicked, e, model):
    try:
        return bayes_update(prior, beta, clicked, e, model)
    except DegenerateEvidenceError:
        assert np.all(np.isneginf(log_likelihoods(beta, clicked, e, model)))
        return None


def _strategy(rng, n):
    kind = rng.choice(["non-optimized", "flat", "sequential", "historical"])
    if kind == "non-optimized":
        return Strategy(kind, [1.0])
    size = {"flat": 1, "sequential": n, "historical": 2**n - 1}[kind]
    return Strategy(kind, rng.uniform(0, 5, size))


@CASES
@given(n_states, mean_photons, models, betas, st.booleans(), seeds)
def test_belief_normalization(m, n, model, beta, clicked, seed):
    e = make_mpsk_ensemble(m, n)
    prior = _priors(np.random.default_rng(seed), m)
    post = _update_or_impossible(prior, beta, clicked, e, model)
    if post is None:
        return
    assert abs(post.sum() - 1) < 1e-12
    assert np.all(post >= 0)


@CASES
@given(n_states, mean_photons, models, betas, betas, st.booleans(), st.booleans(), seeds)
def test_likelihood_factorization(m, n, model, b1, b2, c1, c2, seed):
    e = make_mpsk_ensemble(m, n)
    prior = _priors(np.random.default_rng(seed), m)
    first = _update_or_impossible(prior, b1, c1, e, model)
    two_step = None if first is None else _update_or_impossible(first, b2, c2, e, model)
    if two_step is None:
        return
    log_joint = np.log(prior) + log_likelihoods(b1, c1, e, model) + log_likelihoods(b2, c2, e, model)
    joint = np.exp(log_joint - log_joint.max())
    np.testing.assert_allclose(two_step, joint / joint.sum(), atol=1e-12)


@CASES
@given(n_states, st.floats(0.01, 4.0), st.integers(1, 5), st.integers(0, 5), seeds)
def test_monotone_evidence(m, n, slices, target, seed):
    e = make_mpsk_ensemble(m, n)
    k = target % m
    prior = _priors(np.random.default_rng(seed), m)
    post = bayes_update(prior, e.amplitudes[k], False, e, SystemModel(slices=slices))
    assert post[k] >= prior[k] - 1e-15


@CASES
@given(n_states, mean_photons, models, seeds)
def test_leaf_probability_conservation(m, n, model, seed):
    rng = np.random.default_rng(seed)
    e = make_mpsk_ensemble(m, n, _priors(rng, m))
    report = evaluate_strategy(_strategy(rng, model.slices), e, model)
    np.testing.assert_allclose(report.likelihoods.sum(axis=0), 1.0, atol=1e-10)
    np.testing.assert_allclose(report.channel.sum(axis=1), 1.0, atol=1e-10)


@CASES
@given(n_states, mean_photons, models, st.integers(1, 5), seeds)
def test_phase_covariance(m, n, model, shift, seed):
    rng = np.random.default_rng(seed)
    priors = _priors(rng, m)
    strategy = _strategy(rng, model.slices)
    base = evaluate_strategy(strategy, make_mpsk_ensemble(m, n, priors), model)
    rotated = evaluate_strategy(strategy, make_mpsk_ensemble(m, n, np.roll(priors, shift)), model)
    assert rotated.p_error == pytest.approx(base.p_error, abs=1e-12)


@CASES
@given(st.integers(2, 5), st.floats(0.0, 3.0), models, st.integers(1, 300), st.integers(0, 2**63 - 1), seeds)
def test_seed_determinism(m, n, model, trials, seed, strategy_seed):
    e = make_mpsk_ensemble(m, n)
    strategy = _strategy(np.random.default_rng(strategy_seed), model.slices)
    a = simulate_trials(strategy, e, model, trials, seed)
    b = simulate_trials(strategy, e, model, trials, seed)
    np.testing.assert_array_equal(a.confusion, b.confusion)


@CASES
@given(n_states, mean_photons, models, seeds)
def test_schedule_file_round_trip(m, n, model, seed):
    rng = np.random.default_rng(seed)
    e = make_mpsk_ensemble(m, n, _priors(rng, m))
    strategy = _strategy(rng, model.slices)
    p_error = evaluate_strategy(strategy, e, model).p_error
    with tempfile.TemporaryDirectory() as tmp:
        path = write_schedule(Path(tmp) / "s.json", strategy, e, model, p_error)
        s2, e2, m2, recorded = read_schedule(path)
    assert m2 == model
    assert evaluate_strategy(s2, e2, m2).p_error == pytest.approx(recorded, abs=1e-10)
