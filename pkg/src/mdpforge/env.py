"""Episodic simulation of a validated MDP behind a reset/step interface.

Reproducibility contract: the generator is numpy's PCG64 seeded with the
64-bit session seed, and every draw consumes exactly one uniform double
from it, mapped by inverse CDF.  A step draws the successor state first and
the reward second; ``sample_action`` draws one more uniform.  Equal
(mdp, seed, action sequence) therefore yields bit-identical trajectories.

The initial state is always the first declared state (index 0).
"""

from __future__ import annotations

import json
from bisect import bisect_right
from dataclasses import dataclass

import numpy as np

from .core import MdpError, ValidatedMdp

_SEED_MASK = (1 << 64) - 1


class EnvError(MdpError):
    pass


class NotResetError(EnvError):
    pass


class EpisodeDoneError(EnvError):
    pass


class InvalidActionError(EnvError):
    pass


@dataclass(frozen=True)
class StepResult:
    """Outcome of one step.

    ``reward`` is one draw from the declared reward distribution, not its
    expectation.  ``info`` carries the sampled reward-distribution index and
    the probability of the next-state transition that was taken.
    """

    observation: int
    reward: float
    done: bool
    info: dict


@dataclass(frozen=True)
class _Categorical:
    """Support values plus cumulative probabilities for inverse-CDF draws."""

    values: tuple
    probs: tuple[float, ...]
    cum: tuple[float, ...]

    @classmethod
    def from_pairs(cls, pairs):
        values = tuple(v for v, _ in pairs)
        probs = tuple(p for _, p in pairs)
        cum = []
        total = 0.0
        for p in probs:
            total += p
            cum.append(total)
        return cls(values, probs, tuple(cum))

    def draw(self, u: float) -> int:
        # u in [0, 1); clamp guards the last bucket against rounding in cum
        return min(bisect_right(self.cum, u), len(self.values) - 1)


class EnvSession:
    """A running episode over a fixed :class:`ValidatedMdp`.

    Single-threaded mutable state; create one session per concurrent
    episode.  Stepping a finished episode raises instead of absorbing, and
    the session must be reset once before stepping.
    """

    def __init__(self, mdp: ValidatedMdp, seed: int = 0):
        self.mdp = mdp
        self.seed = int(seed) & _SEED_MASK
        self._rng = np.random.Generator(np.random.PCG64(self.seed))
        self.current: int | None = None
        self.done = False
        self.steps = 0
        self.episode_reward = 0.0
        self._next: list[list[_Categorical | None]] = []
        self._rewards: list[list[_Categorical]] = []
        for s in range(mdp.n_states):
            next_row: list[_Categorical | None] = []
            reward_row: list[_Categorical] = []
            for a in range(mdp.n_actions):
                targets = np.flatnonzero(mdp.p[s, a])
                if targets.size:
                    pairs = [(int(t), float(mdp.p[s, a, t])) for t in targets]
                    next_row.append(_Categorical.from_pairs(pairs))
                else:
                    next_row.append(None)
                reward_row.append(_Categorical.from_pairs(mdp.reward_dists[s][a]))
            self._next.append(next_row)
            self._rewards.append(reward_row)

    @property
    def n_actions(self) -> int:
        return self.mdp.n_actions

    @property
    def n_states(self) -> int:
        return self.mdp.n_states

    def reset(self) -> int:
        """Start a fresh episode in state 0 and return the observation."""
        self.current = 0
        self.done = self.mdp.is_terminal(0)
        self.steps = 0
        self.episode_reward = 0.0
        return 0

    def step(self, action: int) -> StepResult:
        """Sample one transition and one reward for the given action."""
        if self.current is None:
            raise NotResetError("step before reset")
        if self.done:
            raise EpisodeDoneError("episode is done; call reset")
        action = int(action)
        if not 0 <= action < self.mdp.n_actions:
            raise InvalidActionError(
                f"action {action} outside [0, {self.mdp.n_actions})")

        dist = self._next[self.current][action]
        pick = dist.draw(float(self._rng.random()))
        next_state = dist.values[pick]
        next_prob = dist.probs[pick]

        rdist = self._rewards[self.current][action]
        ridx = rdist.draw(float(self._rng.random()))
        reward = rdist.values[ridx]

        self.current = next_state
        self.steps += 1
        self.episode_reward += reward
        self.done = self.mdp.is_terminal(next_state)
        return StepResult(next_state, reward, self.done,
                          {"reward_index": ridx, "next_state_prob": next_prob})

    def sample_action(self) -> int:
        """Uniform random action from the session's own generator."""
        return min(int(self._rng.random() * self.mdp.n_actions),
                   self.mdp.n_actions - 1)

    def render_text(self) -> str:
        """One-line summary of the episode so far."""
        if self.current is None:
            raise NotResetError("render before reset")
        name = self.mdp.states[self.current].name
        done = "true" if self.done else "false"
        return (f"state={name} steps={self.steps} "
                f"return={self.episode_reward:g} done={done}")

    def render_dot(self) -> str:
        """DOT text of the MDP with the current state highlighted."""
        if self.current is None:
            raise NotResetError("render before reset")
        from . import graph

        return graph.to_dot(self.mdp.to_graph(),
                            highlight=self.mdp.states[self.current].name)


def make_env(mdp: ValidatedMdp, seed: int = 0) -> EnvSession:
    """Create a session; call :meth:`EnvSession.reset` to start stepping."""
    return EnvSession(mdp, seed)


def trajectory_line(t: int, action: int, result: StepResult) -> str:
    """One JSON-lines record for a step, stable byte-for-byte."""
    return json.dumps(
        {"t": t, "s": result.observation, "a": action,
         "r": float(result.reward), "done": result.done},
        separators=(",", ":"))
