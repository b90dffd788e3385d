import numpy as np
import pytest

from mdpforge import NextState, Reward, new_spec
from mdpforge.solver import (
    NoConvergenceError,
    UnboundedError,
    bellman_residual,
    compute_q_table,
    greedy_policy,
    solve_lp,
    value_iteration,
)

from helpers import (
    enumerate_value,
    one_round_spec,
    random_mdp_spec,
    rebuild_with_rewards,
    self_loop_spec,
)


def chain_spec():
    # s0 -> s1 -> terminal, reward 1 on each hop, gamma 0.9
    spec = new_spec(0.9)
    s0, s1 = spec.state(), spec.state()
    t = spec.state(terminal=True)
    a = spec.action()
    spec.transition(s0, a, NextState(s1))
    spec.transition(s0, a, Reward(1.0))
    spec.transition(s1, a, NextState(t))
    spec.transition(s1, a, Reward(1.0))
    return spec


def test_lp_one_round():
    m = one_round_spec().validate()
    v = solve_lp(m)
    # enumeration of the two one-step episodes gives v(start) = max(0, 1)
    assert enumerate_value(m, 0) == 1.0
    assert v == pytest.approx([1.0, 0.0], abs=1e-9)


def test_lp_single_step_reward():
    spec = new_spec(0.9)
    s = spec.state()
    t = spec.state(terminal=True)
    a = spec.action()
    spec.transition(s, a, NextState(t))
    spec.transition(s, a, Reward(5.0))
    v = solve_lp(spec.validate())
    assert v[s] == pytest.approx(5.0, abs=1e-9)


def test_lp_unbounded_positive_self_loop():
    spec = new_spec(1.0)
    s = spec.state("loop")
    a = spec.action()
    spec.transition(s, a, NextState(s))
    spec.transition(s, a, Reward(1.0))
    with pytest.raises(UnboundedError) as err:
        solve_lp(spec.validate())
    assert err.value.state == "loop"


def test_lp_zero_gain_cycle_reports_dead_ends():
    spec = new_spec(1.0)
    s0, s1 = spec.state("u"), spec.state("w")
    a = spec.action()
    spec.transition(s0, a, NextState(s1))
    spec.transition(s1, a, NextState(s0))
    with pytest.raises(UnboundedError, match="terminal"):
        solve_lp(spec.validate())


def test_q_table_one_round():
    m = one_round_spec().validate()
    q = compute_q_table(m, solve_lp(m))
    assert q[0] == pytest.approx([0.0, 1.0], abs=1e-9)
    assert q[1] == pytest.approx([0.0, 0.0], abs=0.0)


def test_q_table_zero_rewards():
    spec = new_spec(0.9)
    s = spec.state()
    t = spec.state(terminal=True)
    a = spec.action()
    spec.transition(s, a, NextState(t))
    m = spec.validate()
    q = compute_q_table(m, solve_lp(m))
    assert np.all(q == 0.0)


def test_q_table_self_loop_consistent_with_oracle():
    spec = self_loop_spec()
    spec.discount = 0.5
    m = spec.validate()
    v = solve_lp(m)
    q = compute_q_table(m, v)
    # symmetric rewards cancel, so q(s,a) = 0.5 * 0.75 * v(s) and v = 0
    assert q[0, 0] == pytest.approx(0.5 * 0.75 * v[0], abs=1e-12)
    assert np.max(np.abs(v - value_iteration(m, tol=1e-12))) <= 1e-9


def test_q_table_dimension_mismatch():
    m = one_round_spec().validate()
    with pytest.raises(ValueError, match="shape"):
        compute_q_table(m, np.zeros(3))


def test_value_iteration_one_round():
    m = one_round_spec().validate()
    v = value_iteration(m, tol=1e-10)
    assert v == pytest.approx([1.0, 0.0], abs=0.0)


def test_value_iteration_chain():
    v = value_iteration(chain_spec().validate(), tol=1e-12)
    assert v[:2] == pytest.approx([1.9, 1.0], abs=1e-12)


def test_value_iteration_requires_positive_tol():
    with pytest.raises(ValueError, match="tol"):
        value_iteration(one_round_spec().validate(), tol=0.0)


def test_value_iteration_no_convergence():
    spec = new_spec(1.0)
    s = spec.state()
    a = spec.action()
    spec.transition(s, a, NextState(s))
    spec.transition(s, a, Reward(1.0))
    with pytest.raises(NoConvergenceError):
        value_iteration(spec.validate(), tol=1e-10, max_iter=50)


def test_lp_matches_value_iteration_on_random_mdps():
    rng = np.random.default_rng(2024)
    for _ in range(40):
        gamma = float(rng.uniform(0.5, 0.95))
        m = random_mdp_spec(rng, gamma=gamma).validate()
        v_lp = solve_lp(m)
        v_vi = value_iteration(m, tol=1e-10)
        assert np.max(np.abs(v_lp - v_vi)) <= 1e-6


def test_bellman_residual_of_lp_solution():
    rng = np.random.default_rng(7)
    for _ in range(25):
        m = random_mdp_spec(rng, gamma=float(rng.uniform(0.5, 0.95))).validate()
        v = solve_lp(m)
        q = compute_q_table(m, v)
        assert np.max(q.max(axis=1)[~m.terminal] - v[~m.terminal]) <= 1e-9
        assert bellman_residual(m, v) <= 1e-9
        assert np.all(v[m.terminal] == 0.0)


def test_reward_shift_monotonicity():
    rng = np.random.default_rng(11)
    for _ in range(10):
        spec = random_mdp_spec(rng, gamma=0.9)
        v = solve_lp(spec.validate())
        shifted = rebuild_with_rewards(spec, lambda r: r + 0.7)
        v_up = solve_lp(shifted.validate())
        assert np.all(v_up >= v - 1e-9)


def test_reward_scaling_and_greedy_invariance():
    rng = np.random.default_rng(13)
    for _ in range(10):
        spec = random_mdp_spec(rng, gamma=0.9)
        m = spec.validate()
        v = solve_lp(m)
        scaled = rebuild_with_rewards(spec, lambda r: 3.0 * r).validate()
        v_scaled = solve_lp(scaled)
        assert np.allclose(v_scaled, 3.0 * v, atol=1e-7)
        q, q_scaled = compute_q_table(m, v), compute_q_table(scaled, v_scaled)
        assert np.array_equal(greedy_policy(q), greedy_policy(q_scaled))


def test_greedy_policy_tie_breaks_low():
    q = np.array([[1.0, 1.0], [0.0, 2.0]])
    assert greedy_policy(q).tolist() == [0, 1]
