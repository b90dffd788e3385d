"""Textual MDP language: lexer, parser, and distributive expansion.

A document is line-oriented.  Declarations come first and introduce names:

    gamma 0.9
    state start mid
    terminal end
    action a0 a1

Every other non-empty line is a transition statement over the declared
names, built from four operators (tightest first): ``*`` attaches a weight
to the nearest atom or group, ``&`` conjoins a state with an action, ``|``
separates alternatives, and ``>`` maps the whole left-hand alternative set
onto the outcome set on the right.  Outcomes are states or ``reward(x)``.
Parentheses override precedence and may wrap partial transitions such as
``(a0 > mid) | (a1 > end)``.

Alternatives are distributive: ``(a | b) & (c | d) > (e | f)`` expands to
the full Cartesian product of eight transition entries.  ``#`` starts a
comment.  Identifiers must be declared before use.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass

from .core import (
    MdpError,
    MdpSpec,
    NextState,
    Outcome,
    Reward,
    TransitionEntry,
    ValidatedMdp,
)

KEYWORDS = frozenset({"state", "terminal", "action", "gamma", "reward"})

IDENT = "IDENT"
AMP = "AMP"
PIPE = "PIPE"
GT = "GT"
STAR = "STAR"
LPAREN = "LPAREN"
RPAREN = "RPAREN"
NUMBER = "NUMBER"
KEYWORD = "KEYWORD"
NEWLINE = "NEWLINE"
EOF = "EOF"

_PUNCT = {"&": AMP, "|": PIPE, ">": GT, "*": STAR, "(": LPAREN, ")": RPAREN}
_IDENT_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")
_NUMBER_RE = re.compile(r"-?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?")


class DslError(MdpError):
    """Error in a DSL document, positioned at a 1-based (line, col)."""

    def __init__(self, message: str, line: int, col: int):
        super().__init__(f"{message} (line {line}, col {col})")
        self.message = message
        self.line = line
        self.col = col


class LexError(DslError):
    pass


class ParseError(DslError):
    pass


class UndeclaredIdentifierError(ParseError):
    pass


class DocumentError(DslError):
    """Violated document rule (duplicate gamma, missing declarations, ...)."""


class ExpandError(DslError):
    """Statement cannot be expanded into complete transitions."""


class IncompleteTransitionError(ExpandError):
    pass


class DuplicateRoleError(ExpandError):
    pass


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    line: int
    col: int


def tokenize(text: str) -> list[Token]:
    """Split source text into tokens; ``#`` comments are skipped."""
    tokens: list[Token] = []
    line, col = 1, 1
    i = 0
    text = text.replace("\r\n", "\n")
    n = len(text)
    while i < n:
        c = text[i]
        if c == "#":
            while i < n and text[i] != "\n":
                i += 1
                col += 1
            continue
        if c == "\n":
            tokens.append(Token(NEWLINE, "\n", line, col))
            i += 1
            line += 1
            col = 1
            continue
        if c in " \t\r":
            i += 1
            col += 1
            continue
        if c in _PUNCT:
            tokens.append(Token(_PUNCT[c], c, line, col))
            i += 1
            col += 1
            continue
        m = _IDENT_RE.match(text, i)
        if m:
            word = m.group()
            kind = KEYWORD if word in KEYWORDS else IDENT
            tokens.append(Token(kind, word, line, col))
            i = m.end()
            col += len(word)
            continue
        m = _NUMBER_RE.match(text, i)
        if m:
            word = m.group()
            if not math.isfinite(float(word)):
                raise LexError(f"number out of range: {word}", line, col)
            tokens.append(Token(NUMBER, word, line, col))
            i = m.end()
            col += len(word)
            continue
        raise LexError(f"unexpected character {c!r}", line, col)
    tokens.append(Token(EOF, "", line, col))
    return tokens


# --- AST ------------------------------------------------------------------

@dataclass(frozen=True)
class StateAtom:
    index: int
    name: str
    line: int
    col: int


@dataclass(frozen=True)
class ActionAtom:
    index: int
    name: str
    line: int
    col: int


@dataclass(frozen=True)
class RewardAtom:
    value: float
    line: int
    col: int


@dataclass(frozen=True)
class Alt:
    children: tuple
    line: int
    col: int


@dataclass(frozen=True)
class Conj:
    left: object
    right: object
    line: int
    col: int


@dataclass(frozen=True)
class Map:
    lhs: object
    rhs: object
    line: int
    col: int


@dataclass(frozen=True)
class Weighted:
    node: object
    weight: float
    line: int
    col: int


AstNode = StateAtom | ActionAtom | RewardAtom | Alt | Conj | Map | Weighted


@dataclass
class DslDocument:
    """Declarations plus the parsed transition statements."""

    states: list[tuple[str, bool]]
    actions: list[str]
    gamma: float | None
    statements: list[AstNode]


class _Parser:
    def __init__(self, tokens: list[Token]):
        self.tokens = tokens
        self.pos = 0
        self.states: dict[str, tuple[int, bool]] = {}
        self.actions: dict[str, int] = {}
        self.state_order: list[tuple[str, bool]] = []
        self.action_order: list[str] = []
        self.gamma: float | None = None
        self.statements: list[AstNode] = []

    def peek(self) -> Token:
        return self.tokens[self.pos]

    def next(self) -> Token:
        tok = self.tokens[self.pos]
        if tok.kind != EOF:
            self.pos += 1
        return tok

    def expect(self, kind: str, what: str) -> Token:
        tok = self.peek()
        if tok.kind != kind:
            raise ParseError(f"expected {what}, got {tok.text or 'end of input'!r}",
                             tok.line, tok.col)
        return self.next()

    def parse_document(self) -> DslDocument:
        while True:
            while self.peek().kind == NEWLINE:
                self.next()
            tok = self.peek()
            if tok.kind == EOF:
                break
            if tok.kind == KEYWORD and tok.text in ("state", "terminal", "action", "gamma"):
                self.declaration()
            else:
                self.statements.append(self.statement())
            self.end_of_line()
        return DslDocument(self.state_order, self.action_order, self.gamma,
                           self.statements)

    def end_of_line(self):
        tok = self.peek()
        if tok.kind not in (NEWLINE, EOF):
            raise ParseError(f"expected end of line, got {tok.text!r}",
                             tok.line, tok.col)
        if tok.kind == NEWLINE:
            self.next()

    def declaration(self):
        tok = self.next()
        if tok.text == "gamma":
            num = self.expect(NUMBER, "a number after 'gamma'")
            if self.gamma is not None:
                raise DocumentError("gamma declared twice", tok.line, tok.col)
            value = float(num.text)
            if not 0.0 < value <= 1.0:
                raise DocumentError(f"gamma out of range (0, 1]: {num.text}",
                                    num.line, num.col)
            self.gamma = value
            return
        names = []
        while self.peek().kind == IDENT:
            names.append(self.next())
        if not names:
            bad = self.peek()
            raise ParseError(f"expected a name after {tok.text!r}", bad.line, bad.col)
        for name in names:
            if name.text in self.states or name.text in self.actions:
                raise DocumentError(f"{name.text!r} already declared",
                                    name.line, name.col)
            if tok.text == "action":
                self.actions[name.text] = len(self.action_order)
                self.action_order.append(name.text)
            else:
                terminal = tok.text == "terminal"
                self.states[name.text] = (len(self.state_order), terminal)
                self.state_order.append((name.text, terminal))

    def statement(self) -> AstNode:
        return self.expression()

    def expression(self) -> AstNode:
        """alternatives ('>' alternatives)?  -- '>' binds loosest."""
        lhs = self.alternatives()
        tok = self.peek()
        if tok.kind != GT:
            return lhs
        self.next()
        rhs = self.alternatives()
        after = self.peek()
        if after.kind == GT:
            raise ParseError("chained '>' is not allowed; one outcome mapping "
                             "per statement", after.line, after.col)
        return Map(lhs, rhs, tok.line, tok.col)

    def alternatives(self) -> AstNode:
        first = self.conjunction()
        children = [first]
        line, col = first.line, first.col
        while self.peek().kind == PIPE:
            self.next()
            children.append(self.conjunction())
        if len(children) == 1:
            return first
        return Alt(tuple(children), line, col)

    def conjunction(self) -> AstNode:
        node = self.weighted()
        while self.peek().kind == AMP:
            tok = self.next()
            node = Conj(node, self.weighted(), tok.line, tok.col)
        return node

    def weighted(self) -> AstNode:
        node = self.primary()
        while self.peek().kind == STAR:
            tok = self.next()
            num = self.expect(NUMBER, "a weight after '*'")
            weight = float(num.text)
            if weight <= 0.0:
                raise ParseError(f"weight must be positive, got {num.text}",
                                 num.line, num.col)
            node = Weighted(node, weight, tok.line, tok.col)
        return node

    def primary(self) -> AstNode:
        tok = self.peek()
        if tok.kind == IDENT:
            self.next()
            if tok.text in self.states:
                index, _ = self.states[tok.text]
                return StateAtom(index, tok.text, tok.line, tok.col)
            if tok.text in self.actions:
                return ActionAtom(self.actions[tok.text], tok.text,
                                  tok.line, tok.col)
            raise UndeclaredIdentifierError(f"undeclared identifier {tok.text!r}",
                                            tok.line, tok.col)
        if tok.kind == KEYWORD and tok.text == "reward":
            self.next()
            self.expect(LPAREN, "'(' after 'reward'")
            num = self.expect(NUMBER, "a number inside reward(...)")
            self.expect(RPAREN, "')'")
            return RewardAtom(float(num.text), tok.line, tok.col)
        if tok.kind == LPAREN:
            self.next()
            node = self.expression()
            self.expect(RPAREN, "')'")
            return node
        raise ParseError(f"expected a state, action, reward or '(', got "
                         f"{tok.text or 'end of input'!r}", tok.line, tok.col)


def parse(tokens: list[Token]) -> DslDocument:
    """Parse a token stream into declarations and statement ASTs."""
    return _Parser(tokens).parse_document()


def parse_document(text: str) -> DslDocument:
    return parse(tokenize(text))


# --- Expansion ------------------------------------------------------------

@dataclass
class _Partial:
    """Transition under assembly; roles fill in as the tree is walked."""

    state: int | None = None
    action: int | None = None
    outcome: Outcome | None = None
    weight: float = 1.0
    state_line: int = 0
    state_col: int = 0


def _merge(left: _Partial, right: _Partial, line: int, col: int) -> _Partial:
    for role in ("state", "action", "outcome"):
        if getattr(left, role) is not None and getattr(right, role) is not None:
            raise DuplicateRoleError(f"duplicate {role} in conjunction", line, col)
    out = _Partial(
        state=left.state if left.state is not None else right.state,
        action=left.action if left.action is not None else right.action,
        outcome=left.outcome if left.outcome is not None else right.outcome,
        weight=left.weight * right.weight,
    )
    src = left if left.state is not None else right
    out.state_line, out.state_col = src.state_line, src.state_col
    return out


def _expand_node(node: AstNode, in_outcome: bool) -> list[_Partial]:
    if isinstance(node, StateAtom):
        if in_outcome:
            return [_Partial(outcome=NextState(node.index))]
        return [_Partial(state=node.index, state_line=node.line,
                         state_col=node.col)]
    if isinstance(node, ActionAtom):
        if in_outcome:
            raise ExpandError(f"action {node.name!r} cannot be an outcome",
                              node.line, node.col)
        return [_Partial(action=node.index)]
    if isinstance(node, RewardAtom):
        return [_Partial(outcome=Reward(node.value))]
    if isinstance(node, Weighted):
        parts = _expand_node(node.node, in_outcome)
        for p in parts:
            p.weight *= node.weight
        return parts
    if isinstance(node, Alt):
        out: list[_Partial] = []
        for child in node.children:
            out.extend(_expand_node(child, in_outcome))
        return out
    if isinstance(node, Conj):
        lefts = _expand_node(node.left, in_outcome)
        rights = _expand_node(node.right, in_outcome)
        return [_merge(l, r, node.line, node.col) for l in lefts for r in rights]
    if isinstance(node, Map):
        if in_outcome:
            raise ExpandError("'>' is not allowed inside an outcome",
                              node.line, node.col)
        lefts = _expand_node(node.lhs, False)
        rights = _expand_node(node.rhs, True)
        return [_merge(l, r, node.line, node.col) for l in lefts for r in rights]
    raise AssertionError(f"unhandled node {node!r}")


def expand(doc: DslDocument) -> list[TransitionEntry]:
    """Distribute alternatives and return complete transition entries."""
    terminal_names = {i: name for i, (name, term) in enumerate(doc.states) if term}
    entries: list[TransitionEntry] = []
    for stmt in doc.statements:
        for part in _expand_node(stmt, False):
            missing = [role for role in ("state", "action", "outcome")
                       if getattr(part, role) is None]
            if missing:
                raise IncompleteTransitionError(
                    f"incomplete transition: missing {', '.join(missing)}",
                    stmt.line, stmt.col)
            if part.state in terminal_names:
                raise ExpandError(
                    f"transition out of terminal state {terminal_names[part.state]!r}",
                    part.state_line or stmt.line, part.state_col or stmt.col)
            entries.append(TransitionEntry(part.state, part.action,
                                           part.outcome, part.weight))
    return entries


# --- Assembly -------------------------------------------------------------

def build_spec(doc: DslDocument) -> MdpSpec:
    """Expand a document into an unvalidated :class:`MdpSpec`."""
    if not doc.states:
        raise DocumentError("no states declared", 1, 1)
    if not doc.actions:
        raise DocumentError("no actions declared", 1, 1)
    spec = MdpSpec(doc.gamma if doc.gamma is not None else 1.0)
    for name, terminal in doc.states:
        spec.state(name, terminal=terminal)
    for name in doc.actions:
        spec.action(name)
    for entry in expand(doc):
        spec.transition(entry.state, entry.action, entry.outcome, entry.weight)
    return spec


def parse_spec(text: str) -> MdpSpec:
    """Text to unvalidated spec (tokenize, parse, expand, build)."""
    return build_spec(parse_document(text))


def load_spec(text: str, allow_missing: bool = False) -> ValidatedMdp:
    """Text straight to a validated model; the one-call entry point."""
    return parse_spec(text).validate(allow_missing=allow_missing)
