"""Smoke tests for the Python bindings."""

import math
import os

import numpy as np
import pytest

import scbandits as scb

DATA_DIR = os.path.join(os.path.dirname(__file__), "..", "..", "data")


def test_metrics_known_values():
    assert scb.normalized_cumulative_regret([1, 0, 1, 0]) == 0.5
    assert scb.normalized_cumulative_regret([1, 1, 1]) == 0.0
    assert scb.normalized_cumulative_regret([0] * 7 + [1] * 3) == pytest.approx(0.7)
    with pytest.raises(scb.DataError):
        scb.normalized_cumulative_regret([])


def test_sigmoid():
    assert scb.sigmoid(0.0) == 0.5
    assert scb.sigmoid(2.0) == pytest.approx(0.880797, abs=1e-6)
    assert scb.sigmoid(700.0) == pytest.approx(1.0)


def test_rng_determinism():
    a = scb.RngStream(42)
    b = scb.RngStream(42)
    assert [a.uniform() for _ in range(100)] == [b.uniform() for _ in range(100)]
    assert scb.derive_seed(7, 0) != scb.derive_seed(7, 1)


def test_beta_bernoulli_agent():
    rng = scb.RngStream(1)
    agent = scb.BetaBernoulliAgent(2, scb.ExplorationKind.ThompsonSampling)
    for _ in range(500):
        arm = agent.select(rng)
        reward = 1 if (arm == 0 and rng.uniform() < 0.9) or (
            arm == 1 and rng.uniform() < 0.1
        ) else 0
        agent.update_now(arm, reward)
    states = agent.states()
    assert states[0].mean() > states[1].mean()


def test_glm_agent_predict_and_refit():
    agent = scb.GlmAgent(2, 1, 1.0, scb.ExplorationKind.ThompsonSampling)
    x = np.array([1.0])
    assert agent.predict(x, 0) == 0.5
    agent.buffer(x, 0, 1)
    agent.batch_refit()
    assert agent.predict(x, 0) == pytest.approx(scb.sigmoid(0.4011), abs=1e-3)


def test_scb_policy_branches():
    params = scb.ExplorationParams()
    params.alpha_ucb = 0.0
    glm = scb.GlmAgent(2, 2, 1.0, scb.ExplorationKind.Ucb, params)
    glm.mutable_posterior(0).mean = np.array([math.log(0.6 / 0.4), 0.0])
    glm.mutable_posterior(1).mean = np.array([math.log(0.4 / 0.6), 0.0])
    config = scb.ScbConfig()
    config.delta = 1.4
    config.nc_source = scb.NcSource.FixedDefaultArm
    config.default_arm = 1
    policy = scb.ScbPolicy(config, glm)
    rng_c, rng_nc = scb.RngStream(1), scb.RngStream(2)
    record = policy.select(np.array([1.0, 0.0]), 1, rng_c, rng_nc)
    assert record.provenance == scb.Provenance.Contextual
    assert record.pred_contextual == pytest.approx(0.6)
    assert record.pred_noncontextual == pytest.approx(0.4)


def test_dataset_and_env():
    dataset = scb.load_dataset(os.path.join(DATA_DIR, "iris.csv"), "species")
    assert dataset.size() == 150
    assert dataset.num_classes == 3
    assert dataset.dim() == 4
    env = scb.BanditEnv(dataset, horizon=10, seed=3)
    for _ in range(10):
        x = env.step()
        assert x.shape == (4,)
        assert env.reward(0) in (0, 1)
    assert env.done()


def test_run_experiment_deterministic():
    config = scb.ExperimentConfig()
    config.dataset_path = os.path.join(DATA_DIR, "iris.csv")
    config.label_column = "species"
    config.agent_spec = "SCBTSAgent_Ratio"
    config.runs = 2
    config.horizon = 200
    config.batch_size = 50
    config.master_seed = 11
    first = scb.run_experiment(config)
    second = scb.run_experiment(config)
    assert first.runs[0].rewards == second.runs[0].rewards
    assert first.mean_final_regret == second.mean_final_regret
    assert first.mean_noncontextual_fraction is not None
    assert len(first.runs[0].decisions) == 200


def test_roster():
    names = scb.roster()
    assert len(names) == 16
    assert "SCBTSAgent_Ratio" in names
    assert "meanSCBUCBAgent" in names


def test_replay_hand_count():
    log = scb.ReplayLog()
    log.dim = 1
    events = []
    for arm, reward in [(0, 1), (1, 0), (0, 0), (1, 1)]:
        e = scb.LoggedEvent()
        e.context = np.zeros(1)
        e.logged_arm = arm
        e.reward = reward
        e.candidate_count = 2
        events.append(e)
    log.events = events
    report = scb.replay_evaluate(lambda x, k: 0, log)
    assert report.matched_count == 2
    assert report.estimated_rate == pytest.approx(0.5)


def test_generated_log_sweep():
    config = scb.LogGenConfig()
    config.events = 2000
    config.arms = 2
    config.dim = 1
    config.means = [0.7, 0.3]
    config.seed = 5
    log, means, _ = scb.generate_log(config)
    assert means == [0.7, 0.3]

    def scores(x, k):
        return [scb.sigmoid(x[0]), scb.sigmoid(-x[0])]

    sweep = scb.scb_delta_sweep(
        scores, lambda x, k: 0, scb.Comparator.Ratio, log, [1.0, 2.0, 1e9]
    )
    fractions = [p.noncontextual_fraction for p in sweep]
    assert fractions == sorted(fractions)
