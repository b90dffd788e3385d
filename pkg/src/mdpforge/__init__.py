"""mdpforge: small MDPs from a textual DSL, solved exactly and simulated.

Typical flow: write a ``.mdp`` document (or build an :class:`MdpSpec`
programmatically), validate it into a :class:`ValidatedMdp`, then solve it
with :func:`solve_lp`, simulate it with :func:`make_env`, or export it with
:func:`to_dot`.
"""

from .core import (
    ActionDef,
    MdpError,
    MdpSpec,
    NextState,
    Outcome,
    Reward,
    SpecError,
    StateDef,
    TransitionEntry,
    ValidatedMdp,
    ValidationError,
    new_spec,
)

__version__ = "0.1.0"

__all__ = [
    "ActionDef",
    "MdpError",
    "MdpSpec",
    "NextState",
    "Outcome",
    "Reward",
    "SpecError",
    "StateDef",
    "TransitionEntry",
    "ValidatedMdp",
    "ValidationError",
    "new_spec",
    "__version__",
]
