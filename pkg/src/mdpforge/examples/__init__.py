"""Five bundled example MDPs, as constructors and as ``.mdp`` fixtures.

Four are smoke-test models in the spirit of classic debugging
environments: one- and two-round episodes with deterministic or
nondeterministic rewards (the constants here are this package's own,
chosen to keep the optimal action distinct at every state).  The fifth,
``MULTI_ROUND_NMDP``, mixes nondeterministic rewards with chancy
transitions and self-loops while still terminating under every policy.

Each constructor builds the same model as its fixture file; the fixtures
are the canonical interchange form (see :func:`fixture_path`).
"""

from __future__ import annotations

from importlib import resources
from pathlib import Path

from ..core import MdpSpec, NextState, Reward, ValidatedMdp

__all__ = [
    "one_round_dmdp", "one_round_ndmdp", "two_round_dmdp", "two_round_ndmdp",
    "multi_round_nmdp", "EXAMPLES", "fixture_path", "fixture_text",
    "ONE_ROUND_DMDP", "ONE_ROUND_NDMDP", "TWO_ROUND_DMDP", "TWO_ROUND_NDMDP",
    "MULTI_ROUND_NMDP",
]


def one_round_dmdp() -> ValidatedMdp:
    """Single decision, both actions end the episode, only a1 pays 1."""
    spec = MdpSpec(1.0)
    start = spec.state("start")
    end = spec.state("end", terminal=True)
    a0, a1 = spec.action("a0"), spec.action("a1")
    spec.transition(start, a0, NextState(end))
    spec.transition(start, a1, NextState(end))
    spec.transition(start, a1, Reward(1.0))
    return spec.validate()


def one_round_ndmdp() -> ValidatedMdp:
    """Single decision with two-point reward lotteries (means 0 and 1)."""
    spec = MdpSpec(1.0)
    start = spec.state("start")
    end = spec.state("end", terminal=True)
    a0, a1 = spec.action("a0"), spec.action("a1")
    spec.transition(start, a0, NextState(end))
    spec.transition(start, a1, NextState(end))
    spec.transition(start, a0, Reward(-1.0))
    spec.transition(start, a0, Reward(1.0))
    spec.transition(start, a1, Reward(0.0))
    spec.transition(start, a1, Reward(2.0))
    return spec.validate()


def two_round_dmdp() -> ValidatedMdp:
    """Two decisions; the best plan pays 1 in round one and 2 in round two."""
    spec = MdpSpec(1.0)
    start = spec.state("start")
    mid = spec.state("mid")
    end = spec.state("end", terminal=True)
    a0, a1 = spec.action("a0"), spec.action("a1")
    spec.transition(start, a0, NextState(mid))
    spec.transition(start, a1, NextState(mid))
    spec.transition(mid, a0, NextState(end))
    spec.transition(mid, a1, NextState(end))
    spec.transition(start, a1, Reward(1.0))
    spec.transition(mid, a0, Reward(2.0))
    return spec.validate()


def two_round_ndmdp() -> ValidatedMdp:
    """Two decisions with two-point reward lotteries at every step."""
    spec = MdpSpec(1.0)
    start = spec.state("start")
    mid = spec.state("mid")
    end = spec.state("end", terminal=True)
    a0, a1 = spec.action("a0"), spec.action("a1")
    spec.transition(start, a0, NextState(mid))
    spec.transition(start, a1, NextState(mid))
    spec.transition(mid, a0, NextState(end))
    spec.transition(mid, a1, NextState(end))
    spec.transition(start, a0, Reward(-1.0))
    spec.transition(start, a0, Reward(1.0))
    spec.transition(start, a1, Reward(0.0))
    spec.transition(start, a1, Reward(2.0))
    spec.transition(mid, a0, Reward(0.0), 3)
    spec.transition(mid, a0, Reward(4.0))
    spec.transition(mid, a1, Reward(-2.0))
    spec.transition(mid, a1, Reward(2.0))
    return spec.validate()


def multi_round_nmdp() -> ValidatedMdp:
    """Two looping rounds; progress is stochastic, rewards are lotteries.

    Every action leaves each round with probability >= 1/4, so the episode
    ends with probability 1 under any policy and the model stays solvable
    at gamma = 1.
    """
    spec = MdpSpec(1.0)
    s0 = spec.state("s0")
    s1 = spec.state("s1")
    end = spec.state("end", terminal=True)
    a0, a1 = spec.action("a0"), spec.action("a1")
    spec.transition(s0, a0, NextState(s0), 3)
    spec.transition(s0, a0, NextState(s1))
    spec.transition(s0, a1, NextState(s0))
    spec.transition(s0, a1, NextState(s1))
    spec.transition(s0, a0, Reward(-1.0))
    spec.transition(s0, a0, Reward(1.0))
    spec.transition(s0, a1, Reward(-2.0))
    spec.transition(s0, a1, Reward(0.0))
    spec.transition(s1, a0, NextState(s1), 3)
    spec.transition(s1, a0, NextState(end))
    spec.transition(s1, a0, Reward(1.0), 3)
    spec.transition(s1, a0, Reward(5.0))
    spec.transition(s1, a1, NextState(end))
    spec.transition(s1, a1, Reward(1.0))
    spec.transition(s1, a1, Reward(3.0))
    return spec.validate()


EXAMPLES = {
    "OneRoundDMDP": one_round_dmdp,
    "OneRoundNDMDP": one_round_ndmdp,
    "TwoRoundDMDP": two_round_dmdp,
    "TwoRoundNDMDP": two_round_ndmdp,
    "MultiRoundNMDP": multi_round_nmdp,
}

_FIXTURE_FILES = {
    "OneRoundDMDP": "one_round_dmdp.mdp",
    "OneRoundNDMDP": "one_round_ndmdp.mdp",
    "TwoRoundDMDP": "two_round_dmdp.mdp",
    "TwoRoundNDMDP": "two_round_ndmdp.mdp",
    "MultiRoundNMDP": "multi_round_nmdp.mdp",
}


def fixture_path(name: str) -> Path:
    """Filesystem path of the bundled ``.mdp`` document for an example."""
    if name not in _FIXTURE_FILES:
        raise KeyError(f"unknown example {name!r}; "
                       f"choose from {sorted(_FIXTURE_FILES)}")
    return Path(str(resources.files(__package__) / _FIXTURE_FILES[name]))


def fixture_text(name: str) -> str:
    return fixture_path(name).read_text(encoding="utf-8")


ONE_ROUND_DMDP = one_round_dmdp()
ONE_ROUND_NDMDP = one_round_ndmdp()
TWO_ROUND_DMDP = two_round_dmdp()
TWO_ROUND_NDMDP = two_round_ndmdp()
MULTI_ROUND_NMDP = multi_round_nmdp()
