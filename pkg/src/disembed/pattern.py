"""A small tree-pattern language over :class:`~disembed.tree.ParseTree`.

Grammar (whitespace separates elements)::

    node    := test ['*' ['<' [name] ',' [name] '>']] ['=' name] ['(' element* ')']
    test    := LABEL ('|' LABEL)*  |  '__'
    element := node | 'z:' name | '...'

A label test compares against the node category, so ``PP`` also matches
``PP-LOC``; a test that itself carries a function tag must match exactly.
A parenthesized child list is anchored at both ends; ``z:name`` is a named
gap and ``...`` an anonymous one, each absorbing zero or more siblings.

``*`` marks a chain: from the matched node, descend while there is exactly
one child of the same category and bind the deepest node reached.  The
child list is matched against that deepest node.  Siblings left off the
path at the upper levels go to the chain gaps named in ``<left,right>``;
without them they join the first/last element of the child list when
that element is a gap, and must be absent otherwise.

Matching is deterministic: candidate roots in preorder, gaps minimal and
leftmost first.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterator

from .tree import ParseTree


class PatternSyntaxError(ValueError):
    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} (offset {offset})")
        self.offset = offset


@dataclass(frozen=True)
class Gap:
    name: str | None


@dataclass(frozen=True)
class PatternNode:
    labels: frozenset[str] | None  # None is the wildcard
    capture: str | None = None
    chain: bool = False
    chain_gaps: tuple[str | None, str | None] | None = None
    children: tuple["PatternNode | Gap", ...] | None = None

    def accepts(self, t: ParseTree) -> bool:
        if t.is_leaf:
            return False
        if self.labels is None:
            return True
        return t.label in self.labels or t.category in self.labels


@dataclass(frozen=True)
class Pattern:
    source: str
    root: PatternNode
    captures: frozenset[str] = field(default_factory=frozenset)
    gaps: frozenset[str] = field(default_factory=frozenset)

    def __str__(self) -> str:
        return self.source


@dataclass
class MatchResult:
    root: ParseTree
    bindings: dict[str, ParseTree]
    gaps: dict[str, tuple[ParseTree, ...]]

    def __getitem__(self, name: str) -> ParseTree:
        return self.bindings[name]

    def gap_tokens(self, name: str) -> list[str]:
        return [tok for t in self.gaps[name] for tok in t.tokens()]

    def key(self) -> tuple:
        return (
            id(self.root),
            tuple(sorted((k, id(v)) for k, v in self.bindings.items())),
            tuple(sorted((k, tuple(id(x) for x in v)) for k, v in self.gaps.items())),
        )


# -- compiler ---------------------------------------------------------------

_TOKEN = re.compile(r"\s*(\(|\)|[^\s()]+)")
_ATOM = re.compile(
    r"^(?P<test>[^=*<>]+?)"
    r"(?P<chain>\*(?:<(?P<left>\w*),(?P<right>\w*)>)?)?"
    r"(?:=(?P<cap>\w+))?$"
)


def compile(source: str) -> Pattern:  # noqa: A001 - mirrors re.compile
    toks = [(m.group(1), m.start(1)) for m in _TOKEN.finditer(source)]
    if not toks:
        raise PatternSyntaxError("empty pattern", 0)
    captures: list[str] = []
    gaps: list[str] = []

    def note(kind: list[str], name: str, off: int) -> None:
        if name in captures or name in gaps:
            raise PatternSyntaxError(f"duplicate name {name!r}", off)
        kind.append(name)

    def parse_node(i: int) -> tuple[PatternNode, int]:
        tok, off = toks[i]
        if tok in ("(", ")") or tok == "..." or tok.startswith("z:"):
            raise PatternSyntaxError(f"expected node, got {tok!r}", off)
        m = _ATOM.match(tok)
        if not m:
            raise PatternSyntaxError(f"bad node {tok!r}", off)
        test = m.group("test")
        labels = None if test == "__" else frozenset(test.split("|"))
        if labels is not None and "" in labels:
            raise PatternSyntaxError("empty label in alternation", off)
        chain_gaps = None
        if m.group("chain") and m.group("chain") != "*":
            chain_gaps = (m.group("left") or None, m.group("right") or None)
            for name in chain_gaps:
                if name:
                    note(gaps, name, off)
        cap = m.group("cap")
        if cap:
            note(captures, cap, off)
        i += 1
        children = None
        if i < len(toks) and toks[i][0] == "(":
            i += 1
            elems: list[PatternNode | Gap] = []
            while True:
                if i >= len(toks):
                    raise PatternSyntaxError("unbalanced parentheses", len(source))
                tok2, off2 = toks[i]
                if tok2 == ")":
                    i += 1
                    break
                if tok2 == "...":
                    elems.append(Gap(None))
                    i += 1
                elif tok2.startswith("z:"):
                    name = tok2[2:]
                    if not re.fullmatch(r"\w+", name):
                        raise PatternSyntaxError(f"bad gap name {name!r}", off2)
                    note(gaps, name, off2)
                    elems.append(Gap(name))
                    i += 1
                else:
                    child, i = parse_node(i)
                    elems.append(child)
            children = tuple(elems)
        return PatternNode(labels, cap, bool(m.group("chain")), chain_gaps, children), i

    root, i = parse_node(0)
    if i != len(toks):
        raise PatternSyntaxError(f"unexpected {toks[i][0]!r}", toks[i][1])
    return Pattern(source, root, frozenset(captures), frozenset(gaps))


# -- matcher ----------------------------------------------------------------

_Env = tuple[dict, dict]


def _descend(p: PatternNode, t: ParseTree) -> tuple[ParseTree, list[ParseTree], list[ParseTree]]:
    left: list[ParseTree] = []
    right: list[ParseTree] = []
    while True:
        same = [i for i, c in enumerate(t.children) if not c.is_leaf and c.category == t.category]
        if len(same) != 1:
            return t, left, right
        i = same[0]
        left.extend(t.children[:i])
        right[:0] = t.children[i + 1:]
        t = t.children[i]


def _match_node(p: PatternNode, t: ParseTree, env: _Env) -> Iterator[_Env]:
    if not p.accepts(t):
        return
    target, up_left, up_right = (_descend(p, t) if p.chain else (t, [], []))
    bindings, gaps = env
    if p.capture:
        bindings = {**bindings, p.capture: target}
    extra_left: list[ParseTree] = []
    extra_right: list[ParseTree] = []
    if p.chain_gaps is not None:
        lname, rname = p.chain_gaps
        gaps = dict(gaps)
        if lname:
            gaps[lname] = tuple(up_left)
        if rname:
            gaps[rname] = tuple(up_right)
    elif p.chain and p.children is not None:
        elems = p.children
        if up_left:
            if not elems or not isinstance(elems[0], Gap):
                return
            extra_left = up_left
        if up_right:
            if not elems or not isinstance(elems[-1], Gap):
                return
            extra_right = up_right
    if p.children is None:
        yield bindings, gaps
        return
    yield from _match_seq(p.children, target.children, 0, 0, (bindings, gaps), extra_left, extra_right)


def _match_seq(elems, kids, i: int, j: int, env: _Env, extra_left, extra_right) -> Iterator[_Env]:
    if i == len(elems):
        if j == len(kids):
            yield env
        return
    el = elems[i]
    if isinstance(el, Gap):
        for k in range(j, len(kids) + 1):
            env2 = env
            if el.name is not None:
                run = list(kids[j:k])
                if i == 0:
                    run = list(extra_left) + run
                if i == len(elems) - 1:
                    run = run + list(extra_right)
                env2 = (env[0], {**env[1], el.name: tuple(run)})
            yield from _match_seq(elems, kids, i + 1, k, env2, extra_left, extra_right)
        return
    if j >= len(kids):
        return
    for env2 in _match_node(el, kids[j], env):
        yield from _match_seq(elems, kids, i + 1, j + 1, env2, extra_left, extra_right)


def iter_matches(pattern: Pattern, tree: ParseTree) -> Iterator[MatchResult]:
    seen = set()
    for candidate in tree.preorder():
        for bindings, gaps in _match_node(pattern.root, candidate, ({}, {})):
            m = MatchResult(candidate, bindings, gaps)
            k = m.key()
            if k not in seen:
                seen.add(k)
                yield m


def match_first(pattern: Pattern, tree: ParseTree) -> MatchResult | None:
    return next(iter_matches(pattern, tree), None)


def match_all(pattern: Pattern, tree: ParseTree) -> list[MatchResult]:
    return list(iter_matches(pattern, tree))
