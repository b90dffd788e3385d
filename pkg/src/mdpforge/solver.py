"""Exact optimal values for validated MDPs.

``solve_lp`` minimizes the sum of state values subject to the Bellman
inequalities v(s) >= r(s,a) + gamma * sum_t P(s,a,t) v(t) over all
non-terminal states and actions, with terminal values pinned to zero; the
optimum is the optimal value function.  ``value_iteration`` is kept as an
independent cross-check.  ``compute_q_table`` derives action values from a
solved v, which is observationally equivalent to solving for q directly.
"""

from __future__ import annotations

import numpy as np
from scipy.optimize import linprog

from .core import MdpError, ValidatedMdp

# Bellman optimality must hold to this accuracy on solver output.
BELLMAN_TOL = 1e-9


class SolverError(MdpError):
    pass


class UnboundedError(SolverError):
    """Optimal value diverges (gamma = 1 with a reward-accumulating cycle)."""

    def __init__(self, message: str, state: str | None = None):
        super().__init__(message)
        self.state = state


class NoConvergenceError(SolverError):
    pass


def compute_q_table(m: ValidatedMdp, v: np.ndarray) -> np.ndarray:
    """q(s,a) = r(s,a) + gamma * sum_t P(s,a,t) v(t); terminal rows stay 0."""
    v = np.asarray(v, dtype=float)
    if v.shape != (m.n_states,):
        raise ValueError(f"value vector has shape {v.shape}, "
                         f"expected ({m.n_states},)")
    return m.expected_reward + m.discount * (m.p @ v)


def value_iteration(m: ValidatedMdp, tol: float = 1e-10,
                    max_iter: int = 100_000) -> np.ndarray:
    """Iterate v <- max_a [r + gamma P v] from v = 0 until the sup-norm
    change drops to ``tol``."""
    if not tol > 0.0:
        raise ValueError(f"tol must be positive, got {tol!r}")
    v = np.zeros(m.n_states)
    for _ in range(max_iter):
        v_next = compute_q_table(m, v).max(axis=1)
        delta = float(np.max(np.abs(v_next - v)))
        v = v_next
        if delta <= tol:
            return v
    raise NoConvergenceError(
        f"value iteration did not converge within {max_iter} iterations "
        f"(gamma={m.discount}); the MDP may have no proper optimal policy")


def greedy_policy(q: np.ndarray) -> np.ndarray:
    """Per-state argmax over actions; ties go to the lowest action index."""
    return np.asarray(q).argmax(axis=1)


def bellman_residual(m: ValidatedMdp, v: np.ndarray) -> float:
    """sup-norm of v - max_a q(s,a) over non-terminal states."""
    best = compute_q_table(m, v).max(axis=1)
    diff = np.abs(v - best)
    return float(diff[~m.terminal].max()) if (~m.terminal).any() else 0.0


def solve_lp(m: ValidatedMdp) -> np.ndarray:
    """Optimal state values by linear programming.

    Raises :class:`UnboundedError` when no finite optimal value exists,
    which at gamma = 1 means a positive-reward cycle (value grows without
    bound) or states that cannot reach a terminal state.
    """
    nt = np.flatnonzero(~m.terminal)
    if nt.size == 0:
        return np.zeros(m.n_states)
    pos = {int(s): k for k, s in enumerate(nt)}

    gamma = m.discount
    rows = []
    rhs = []
    for s in nt:
        for a in range(m.n_actions):
            row = gamma * m.p[s, a, nt]
            row[pos[int(s)]] -= 1.0
            rows.append(row)
            rhs.append(-m.expected_reward[s, a])
    res = linprog(c=np.ones(nt.size), A_ub=np.array(rows), b_ub=np.array(rhs),
                  bounds=[(None, None)] * nt.size, method="highs")

    if res.status == 2:
        # The Bellman inequalities admit no finite solution: some cycle
        # accumulates positive reward without discounting it away.
        state = _diverging_state(m)
        raise UnboundedError(
            "optimal value is unbounded: gamma = 1 with a positive-reward "
            f"cycle{f' through state {state!r}' if state else ''}", state)
    if res.status == 3:
        dead = _dead_end_states(m)
        detail = (f"; state(s) {', '.join(repr(s) for s in dead)} cannot reach "
                  "a terminal state" if dead else "")
        raise UnboundedError(
            f"value function is not pinned down: gamma = 1 with a "
            f"non-terminating zero-gain cycle{detail}",
            dead[0] if dead else None)
    if res.status != 0:
        raise SolverError(f"linear program failed unexpectedly: {res.message}")

    v = np.zeros(m.n_states)
    v[nt] = res.x
    return _polish(m, v)


def _polish(m: ValidatedMdp, v: np.ndarray) -> np.ndarray:
    """Evaluate the greedy policy exactly and keep whichever value vector
    has the smaller Bellman residual.

    LP solutions carry solver tolerances (~1e-8); solving the greedy
    policy's linear system tightens them to machine precision.
    """
    nt = np.flatnonzero(~m.terminal)
    q = compute_q_table(m, v)
    policy = greedy_policy(q)
    p_pi = m.p[nt, policy[nt], :][:, nt]
    r_pi = m.expected_reward[nt, policy[nt]]
    try:
        exact_nt = np.linalg.solve(np.eye(nt.size) - m.discount * p_pi, r_pi)
    except np.linalg.LinAlgError:
        return v
    exact = np.zeros(m.n_states)
    exact[nt] = exact_nt
    if not np.all(np.isfinite(exact)):
        return v
    return exact if bellman_residual(m, exact) <= bellman_residual(m, v) else v


def _diverging_state(m: ValidatedMdp) -> str | None:
    """Find a state whose value keeps growing under Bellman sweeps."""
    v = np.zeros(m.n_states)
    sweeps = 4 * m.n_states + 16
    for _ in range(sweeps):
        v_next = compute_q_table(m, v).max(axis=1)
        delta = v_next - v
        v = v_next
    growing = np.flatnonzero(delta > 1e-9)
    return m.states[int(growing[0])].name if growing.size else None


def _dead_end_states(m: ValidatedMdp) -> list[str]:
    """States from which no action sequence can reach a terminal state."""
    reach = set(np.flatnonzero(m.terminal).tolist())
    frontier = list(reach)
    into = [set(np.flatnonzero(m.p[:, :, t].sum(axis=1) > 0).tolist())
            for t in range(m.n_states)]
    while frontier:
        t = frontier.pop()
        for s in into[t]:
            if s not in reach:
                reach.add(s)
                frontier.append(s)
    return [s.name for s in m.states if s.index not in reach]
