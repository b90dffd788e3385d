"""Shared test utilities: model builders, comparisons, and a DOT checker."""

import numpy as np

from mdpforge import MdpSpec, NextState, Reward, new_spec


def one_round_spec() -> MdpSpec:
    """Two states, two actions, one of which pays a reward of 1."""
    spec = new_spec(1.0)
    start = spec.state("start")
    end = spec.state("end", terminal=True)
    a0 = spec.action()
    a1 = spec.action()
    spec.transition(start, a0, NextState(end))
    spec.transition(start, a1, NextState(end))
    spec.transition(start, a1, Reward(1.0))
    return spec


def self_loop_spec() -> MdpSpec:
    """One action: reward +-1 evenly, stay with probability 3/4 else leave."""
    spec = new_spec(1.0)
    s = spec.state("s")
    t = spec.state("t", terminal=True)
    a = spec.action("a")
    spec.transition(s, a, Reward(-1.0))
    spec.transition(s, a, Reward(1.0))
    spec.transition(s, a, NextState(s), 3)
    spec.transition(s, a, NextState(t), 1)
    return spec


def assert_mdp_equal(m1, m2, tol=0.0):
    assert m1.state_names == m2.state_names
    assert m1.action_names == m2.action_names
    assert m1.discount == m2.discount
    assert np.array_equal(m1.terminal, m2.terminal)
    if tol:
        assert np.allclose(m1.p, m2.p, atol=tol, rtol=0)
        assert np.allclose(m1.expected_reward, m2.expected_reward, atol=tol, rtol=0)
    else:
        assert np.array_equal(m1.p, m2.p)
        assert np.array_equal(m1.expected_reward, m2.expected_reward)
    for row1, row2 in zip(m1.reward_dists, m2.reward_dists):
        for d1, d2 in zip(row1, row2):
            assert len(d1) == len(d2)
            for (v1, p1), (v2, p2) in zip(d1, d2):
                assert v1 == v2
                assert abs(p1 - p2) <= tol if tol else p1 == p2


def random_mdp_spec(rng: np.random.Generator, max_states=8, max_actions=4,
                    gamma=0.9) -> MdpSpec:
    """Random small MDP: every (state, action) covered, random rewards."""
    n_s = int(rng.integers(2, max_states + 1))
    n_a = int(rng.integers(1, max_actions + 1))
    spec = new_spec(gamma)
    # state 0 always regular; each further state terminal with probability 0.3
    terminal = [False] + [bool(rng.random() < 0.3) for _ in range(n_s - 1)]
    for k in range(n_s):
        spec.state(terminal=terminal[k])
    for _ in range(n_a):
        spec.action()
    for s in range(n_s):
        if terminal[s]:
            continue
        for a in range(n_a):
            n_succ = int(rng.integers(1, 4))
            targets = rng.choice(n_s, size=min(n_succ, n_s), replace=False)
            for t in targets:
                spec.transition(s, a, NextState(int(t)),
                                float(rng.uniform(0.1, 5.0)))
            for _ in range(int(rng.integers(0, 3))):
                spec.transition(s, a, Reward(float(rng.uniform(-5.0, 5.0))),
                                float(rng.uniform(0.1, 5.0)))
    return spec


def enumerate_value(m, state, _depth=0) -> float:
    """Optimal value by brute-force recursion over the episode tree.

    Independent of the solver module; only terminates on MDPs whose
    reachable transitions form a DAG.
    """
    if m.is_terminal(state):
        return 0.0
    if _depth > 64:
        raise RecursionError("enumerate_value needs an acyclic MDP")
    best = -np.inf
    for a in range(m.n_actions):
        value = sum(v * p for v, p in m.reward_dists[state][a])
        for t in np.flatnonzero(m.p[state, a]):
            value += m.discount * m.p[state, a, t] * \
                enumerate_value(m, int(t), _depth + 1)
        best = max(best, value)
    return best


def rebuild_with_rewards(spec: MdpSpec, fn) -> MdpSpec:
    """Copy a spec, mapping every reward value through ``fn``."""
    out = new_spec(spec.discount)
    for s in spec.states:
        out.state(s.name, terminal=s.terminal)
    for a in spec.actions:
        out.action(a.name)
    for e in spec.entries:
        outcome = Reward(fn(e.outcome.value)) if isinstance(e.outcome, Reward) \
            else e.outcome
        out.transition(e.state, e.action, outcome, e.weight)
    return out


class DotSyntaxError(ValueError):
    pass


def check_dot(text: str) -> int:
    """Validate DOT digraph syntax; returns the statement count.

    Independent grammar checker for the subset of DOT this package emits:
    ``digraph [id] { stmt* }`` where a statement is a node (``id [attrs];``),
    an edge (``id -> id [attrs];``) or a bare ``id=value;`` graph attribute.
    """
    tokens = _dot_tokens(text)
    pos = 0

    def peek():
        return tokens[pos] if pos < len(tokens) else ("EOF", "")

    def take(kind=None, value=None):
        nonlocal pos
        tok = peek()
        if kind and tok[0] != kind:
            raise DotSyntaxError(f"expected {kind}, got {tok}")
        if value and tok[1] != value:
            raise DotSyntaxError(f"expected {value!r}, got {tok}")
        pos += 1
        return tok

    def attrs():
        take("SYM", "[")
        while peek() != ("SYM", "]"):
            take("ID")
            take("SYM", "=")
            take("ID")
            if peek() == ("SYM", ","):
                take()
        take("SYM", "]")

    take("ID", "digraph")
    if peek()[0] == "ID":
        take("ID")
    take("SYM", "{")
    count = 0
    while peek() != ("SYM", "}"):
        take("ID")
        if peek() == ("SYM", "->"):
            take()
            take("ID")
        elif peek() == ("SYM", "="):
            take()
            take("ID")
        if peek() == ("SYM", "["):
            attrs()
        take("SYM", ";")
        count += 1
    take("SYM", "}")
    if peek()[0] != "EOF":
        raise DotSyntaxError(f"trailing input: {peek()}")
    return count


def _dot_tokens(text: str):
    tokens = []
    i = 0
    while i < len(text):
        c = text[i]
        if c.isspace():
            i += 1
        elif c == '"':
            j = i + 1
            out = []
            while j < len(text) and text[j] != '"':
                if text[j] == "\\":
                    j += 1
                    if j >= len(text):
                        raise DotSyntaxError("dangling escape")
                out.append(text[j])
                j += 1
            if j >= len(text):
                raise DotSyntaxError("unterminated string")
            tokens.append(("ID", "".join(out)))
            i = j + 1
        elif text.startswith("->", i):
            tokens.append(("SYM", "->"))
            i += 2
        elif c in "{}[];=,":
            tokens.append(("SYM", c))
            i += 1
        elif c.isalnum() or c in "_.-":
            j = i
            while j < len(text) and (text[j].isalnum() or text[j] in "_.-"):
                j += 1
            tokens.append(("ID", text[i:j]))
            i = j
        else:
            raise DotSyntaxError(f"bad character {c!r} at offset {i}")
    return tokens
