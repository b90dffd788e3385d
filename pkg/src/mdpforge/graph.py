"""Graph view of an MDP and DOT text export.

States become labelled nodes and every (state, action) pair with outcomes
becomes a small intermediate choice node, so that action choice and chance
both stay visible: state -> choice edges carry the action name, choice ->
state edges carry the transition probability, and choice nodes are
annotated with their reward distribution when it is not the default point
mass at zero.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import ValidatedMdp


@dataclass(frozen=True)
class StateNode:
    name: str
    terminal: bool


@dataclass(frozen=True)
class ChoiceNode:
    id: str
    state: str
    action: str
    reward_label: str | None


@dataclass(frozen=True)
class GraphEdge:
    src: str
    dst: str
    label: str
    prob: float | None = None


@dataclass(frozen=True)
class MdpGraph:
    states: tuple[StateNode, ...]
    choices: tuple[ChoiceNode, ...]
    edges: tuple[GraphEdge, ...]


def _fmt(x: float) -> str:
    """Up to three decimal places, trailing zeros trimmed."""
    out = f"{x:.3f}".rstrip("0").rstrip(".")
    return out if out not in ("-0", "") else "0"


def _reward_label(dist) -> str | None:
    if dist == ((0.0, 1.0),):
        return None
    if len(dist) == 1:
        return f"r={_fmt(dist[0][0])}"
    inner = ",".join(f"{_fmt(v)}:{_fmt(p)}" for v, p in dist)
    return "r∈{" + inner + "}"


def to_graph(m: ValidatedMdp) -> MdpGraph:
    """Build the bipartite state/choice graph of a validated MDP."""
    states = tuple(StateNode(s.name, s.terminal) for s in m.states)
    choices = []
    edges = []
    covered = {(e.state, e.action) for e in m.entries}
    for s in range(m.n_states):
        for a in range(m.n_actions):
            if (s, a) not in covered:
                continue
            state = m.states[s].name
            action = m.actions[a].name
            node = ChoiceNode(f"{state}/{action}", state, action,
                              _reward_label(m.reward_dists[s][a]))
            choices.append(node)
            edges.append(GraphEdge(state, node.id, action))
            for t in np.flatnonzero(m.p[s, a]):
                prob = float(m.p[s, a, t])
                edges.append(GraphEdge(node.id, m.states[t].name,
                                       _fmt(prob), prob))
    return MdpGraph(states, tuple(choices), tuple(edges))


def _q(s: str) -> str:
    return '"' + s.replace("\\", "\\\\").replace('"', '\\"') + '"'


def to_dot(g: MdpGraph, highlight: str | None = None) -> str:
    """Emit DOT text; deterministic, ordered by declaration indices.

    ``highlight`` names a state to fill, used by environment rendering.
    """
    lines = ["digraph mdp {", "  rankdir=LR;"]
    for node in g.states:
        shape = "doublecircle" if node.terminal else "circle"
        attrs = f"shape={shape}"
        if node.name == highlight:
            attrs += ', style=filled, fillcolor="lightblue"'
        lines.append(f"  {_q(node.name)} [{attrs}];")
    for node in g.choices:
        attrs = "shape=point"
        if node.reward_label:
            attrs += f", xlabel={_q(node.reward_label)}"
        lines.append(f"  {_q(node.id)} [{attrs}];")
    for edge in g.edges:
        lines.append(f"  {_q(edge.src)} -> {_q(edge.dst)} "
                     f"[label={_q(edge.label)}];")
    lines.append("}")
    return "\n".join(lines) + "\n"
