"""Finite MDP model: builder API, validation, and the frozen solvable form.

An MDP is specified incrementally on a mutable :class:`MdpSpec` (states,
actions, weighted transition entries, discount) and then normalized by
:meth:`MdpSpec.validate` into an immutable :class:`ValidatedMdp` holding a
dense probability tensor and per-(state, action) reward distributions.

Rewards and next states form two independent categorical distributions per
(state, action): an entry contributes either to where the process moves or
to what it pays out, never both at once.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

# Guaranteed bound on |sum(P row) - 1| and |sum(reward probs) - 1| after
# validation.
PROB_TOL = 1e-12


class MdpError(Exception):
    """Base class for every error raised by this package."""


class SpecError(MdpError):
    """Invalid use of the builder API (names, weights, discount, terminals)."""


class ValidationError(MdpError):
    """Specification cannot be normalized into a solvable MDP.

    ``gaps`` lists (state name, action name) pairs that lack a next-state
    outcome, when that is the cause.
    """

    def __init__(self, message: str, gaps=()):
        super().__init__(message)
        self.gaps = tuple(gaps)


@dataclass(frozen=True)
class StateDef:
    name: str
    index: int
    terminal: bool = False


@dataclass(frozen=True)
class ActionDef:
    name: str
    index: int


@dataclass(frozen=True)
class NextState:
    """Outcome: the process moves to the state with this index."""

    state: int


@dataclass(frozen=True)
class Reward:
    """Outcome: the process pays out this scalar reward."""

    value: float

    def __post_init__(self):
        if not math.isfinite(self.value):
            raise SpecError(f"reward value must be finite, got {self.value!r}")
        object.__setattr__(self, "value", float(self.value))


Outcome = NextState | Reward


@dataclass(frozen=True)
class TransitionEntry:
    """One weighted outcome attached to a (state, action) pair."""

    state: int
    action: int
    outcome: Outcome
    weight: float = 1.0


class MdpSpec:
    """Mutable MDP under construction.

    >>> spec = MdpSpec()
    >>> start = spec.state("start")
    >>> end = spec.state("end", terminal=True)
    >>> a0, a1 = spec.action(), spec.action()
    >>> spec.transition(start, a0, NextState(end))
    >>> spec.transition(start, a1, NextState(end))
    >>> spec.transition(start, a1, Reward(1.0))
    >>> mdp = spec.validate()
    """

    def __init__(self, discount: float = 1.0):
        if not (isinstance(discount, (int, float)) and math.isfinite(discount)):
            raise SpecError(f"discount out of range (0, 1]: {discount!r}")
        if not 0.0 < discount <= 1.0:
            raise SpecError(f"discount out of range (0, 1]: {discount!r}")
        self.discount = float(discount)
        self.states: list[StateDef] = []
        self.actions: list[ActionDef] = []
        self.entries: list[TransitionEntry] = []
        self._names: set[str] = set()

    @property
    def n_states(self) -> int:
        return len(self.states)

    @property
    def n_actions(self) -> int:
        return len(self.actions)

    def state(self, name: str | None = None, terminal: bool = False) -> int:
        """Declare a state and return its index. Auto-names are ``s<k>``."""
        index = len(self.states)
        if name is None:
            name = f"s{index}"
        if name in self._names:
            raise SpecError(f"duplicate name: {name!r}")
        self._names.add(name)
        self.states.append(StateDef(name, index, bool(terminal)))
        return index

    def action(self, name: str | None = None) -> int:
        """Declare an action and return its index. Auto-names are ``a<k>``."""
        index = len(self.actions)
        if name is None:
            name = f"a{index}"
        if name in self._names:
            raise SpecError(f"duplicate name: {name!r}")
        self._names.add(name)
        self.actions.append(ActionDef(name, index))
        return index

    def transition(self, state: int, action: int, outcome: Outcome,
                   weight: float = 1.0) -> None:
        """Record one weighted outcome for (state, action).

        Duplicate (state, action, outcome) entries are allowed and accumulate
        weight at validation time.
        """
        if not 0 <= state < len(self.states):
            raise SpecError(f"unknown state index {state}")
        if not 0 <= action < len(self.actions):
            raise SpecError(f"unknown action index {action}")
        if self.states[state].terminal:
            raise SpecError(
                f"transition out of terminal state {self.states[state].name!r}")
        if not isinstance(outcome, (NextState, Reward)):
            raise SpecError(f"outcome must be NextState or Reward, got {outcome!r}")
        if isinstance(outcome, NextState) and not 0 <= outcome.state < len(self.states):
            raise SpecError(f"unknown next-state index {outcome.state}")
        weight = float(weight)
        if not (math.isfinite(weight) and weight > 0.0):
            raise SpecError(f"weight must be a positive real, got {weight!r}")
        self.entries.append(TransitionEntry(state, action, outcome, weight))

    def validate(self, allow_missing: bool = False) -> ValidatedMdp:
        """Normalize into a frozen :class:`ValidatedMdp`.

        Per (state, action), next-state weights normalize to transition
        probabilities and reward weights normalize to an independent
        categorical reward distribution (empty reward spec = point mass at 0).

        Every non-terminal state needs at least one next-state outcome for
        every action. With ``allow_missing`` the gaps get a zero-reward
        self-loop injected instead of raising.
        """
        return _validate(self, allow_missing)


def new_spec(discount: float = 1.0) -> MdpSpec:
    """Create an empty specification. Alias for ``MdpSpec(discount)``."""
    return MdpSpec(discount)


@dataclass(frozen=True, eq=False)
class ValidatedMdp:
    """Frozen, normalized MDP.

    ``p[s, a, t]`` is the probability of moving to ``t`` when taking ``a``
    in ``s``; rows of terminal states are all zero.  ``reward_dists[s][a]``
    is a tuple of (value, probability) pairs sorted by value; terminal pairs
    hold the point mass at 0.  ``injected`` lists (state, action) pairs whose
    self-loop was added by ``allow_missing``.
    """

    states: tuple[StateDef, ...]
    actions: tuple[ActionDef, ...]
    discount: float
    entries: tuple[TransitionEntry, ...]
    p: np.ndarray
    reward_dists: tuple[tuple[tuple[tuple[float, float], ...], ...], ...]
    expected_reward: np.ndarray
    terminal: np.ndarray
    injected: tuple[tuple[int, int], ...] = ()

    @property
    def n_states(self) -> int:
        return len(self.states)

    @property
    def n_actions(self) -> int:
        return len(self.actions)

    @property
    def state_names(self) -> tuple[str, ...]:
        return tuple(s.name for s in self.states)

    @property
    def action_names(self) -> tuple[str, ...]:
        return tuple(a.name for a in self.actions)

    def is_terminal(self, state: int) -> bool:
        return bool(self.terminal[state])

    def has_outcomes(self, state: int, action: int) -> bool:
        """Whether any entry (including injected ones) targets (state, action)."""
        return any(e.state == state and e.action == action for e in self.entries)

    def to_env(self, seed: int = 0):
        """Create an episodic simulation session (see :mod:`mdpforge.env`)."""
        from . import env

        return env.make_env(self, seed)

    def to_graph(self):
        """Convert to a renderable graph (see :mod:`mdpforge.graph`)."""
        from . import graph

        return graph.to_graph(self)


def _validate(spec: MdpSpec, allow_missing: bool) -> ValidatedMdp:
    if not spec.states:
        raise ValidationError("no states declared")
    if not spec.actions:
        raise ValidationError("no actions declared")

    n_s, n_a = len(spec.states), len(spec.actions)
    entries = list(spec.entries)

    # Accumulate weights per (state, action), keyed by exact outcome, so that
    # duplicate entries behave like a single entry with the summed weight.
    next_w: dict[tuple[int, int], dict[int, float]] = {}
    reward_w: dict[tuple[int, int], dict[float, float]] = {}
    for e in entries:
        key = (e.state, e.action)
        if isinstance(e.outcome, NextState):
            bucket = next_w.setdefault(key, {})
            bucket[e.outcome.state] = bucket.get(e.outcome.state, 0.0) + e.weight
        else:
            bucket = reward_w.setdefault(key, {})
            bucket[e.outcome.value] = bucket.get(e.outcome.value, 0.0) + e.weight

    gaps = [(s, a) for s in range(n_s) if not spec.states[s].terminal
            for a in range(n_a) if (s, a) not in next_w]
    injected: list[tuple[int, int]] = []
    if gaps and not allow_missing:
        names = [(spec.states[s].name, spec.actions[a].name) for s, a in gaps]
        lines = "; ".join(f"state {sn!r} action {an!r}" for sn, an in names)
        raise ValidationError(f"missing transition: {lines}", gaps=names)
    for s, a in gaps:
        next_w[(s, a)] = {s: 1.0}
        entries.append(TransitionEntry(s, a, NextState(s), 1.0))
        injected.append((s, a))

    p = np.zeros((n_s, n_a, n_s))
    expected = np.zeros((n_s, n_a))
    point_zero = ((0.0, 1.0),)
    dists: list[list[tuple[tuple[float, float], ...]]] = []
    for s in range(n_s):
        row: list[tuple[tuple[float, float], ...]] = []
        for a in range(n_a):
            targets = next_w.get((s, a))
            if targets:
                total = sum(targets.values())
                for t, w in targets.items():
                    p[s, a, t] = w / total
            rewards = reward_w.get((s, a))
            if rewards:
                total = sum(rewards.values())
                dist = tuple(sorted((v, w / total) for v, w in rewards.items()))
                expected[s, a] = sum(v * q for v, q in dist)
            else:
                dist = point_zero
            row.append(dist)
        dists.append(row)

    p.setflags(write=False)
    expected.setflags(write=False)
    terminal = np.array([s.terminal for s in spec.states], dtype=bool)
    terminal.setflags(write=False)
    return ValidatedMdp(
        states=tuple(spec.states),
        actions=tuple(spec.actions),
        discount=spec.discount,
        entries=tuple(entries),
        p=p,
        reward_dists=tuple(tuple(row) for row in dists),
        expected_reward=expected,
        terminal=terminal,
        injected=tuple(injected),
    )
