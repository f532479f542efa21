"""Discourse tree construction: recursive clausal splitting, then phrasal disembedding."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from typing import Callable, Iterator, Sequence, Union

from .rhetorical import CueLexicon, Relation, default_lexicon
from .rules import (
    Constituency,
    RuleOutcome,
    RuleInvariantError,
    SimpleContext,
    TransformationRule,
    apply,
    catalog,
    phrasal_disembed,
)
from .tree import ParseTree, as_sentence, detokenize, reindex

CORE = "core"
CONTEXT = "context"
DEFAULT_MAX_DEPTH = 100


class EmptyDocumentError(ValueError):
    pass


class DepthLimitError(RuntimeError):
    """Recursion went past the configured ceiling."""


@dataclass(eq=False)
class SentenceLeaf:
    tree: ParseTree
    sentence_index: int
    simple_contexts: list[SimpleContext] = field(default_factory=list)

    @property
    def text(self) -> list[str]:
        return self.tree.tokens()

    def display(self) -> str:
        """The leaf as a stand-alone sentence: capitalized, final period."""
        toks = list(self.text)
        if toks and toks[0][:1].islower():
            toks[0] = toks[0][0].upper() + toks[0][1:]
        return detokenize(toks + ["."])


@dataclass(eq=False)
class Edge:
    label: str  # CORE or CONTEXT
    child: "Node"


@dataclass(eq=False)
class InnerNode:
    constituency: Constituency
    relation: Relation
    edges: list[Edge]
    rule: str = ""
    cue: tuple[str, ...] = ()

    @property
    def children(self) -> list["Node"]:
        return [e.child for e in self.edges]


Node = Union[InnerNode, SentenceLeaf]
Trace = Callable[[ParseTree, RuleOutcome], None]


@dataclass
class TransformStats:
    firings: Counter = field(default_factory=Counter)
    rejected: Counter = field(default_factory=Counter)
    sentences: int = 0

    def merge(self, other: "TransformStats") -> None:
        self.firings.update(other.firings)
        self.rejected.update(other.rejected)
        self.sentences += other.sentences


@dataclass(eq=False)
class DiscourseTree:
    """The root is a coordination of the input sentences, all core."""
    root: InnerNode
    stats: TransformStats = field(default_factory=TransformStats)

    def leaves(self) -> list[SentenceLeaf]:
        return [n for n, _ in self.walk() if isinstance(n, SentenceLeaf)]

    def inner_nodes(self) -> list[InnerNode]:
        return [n for n, _ in self.walk() if isinstance(n, InnerNode)]

    def walk(self) -> Iterator[tuple[Node, int]]:
        """Preorder over (node, number of context edges from the root)."""
        stack: list[tuple[Node, int]] = [(self.root, 0)]
        while stack:
            n, layer = stack.pop()
            yield n, layer
            if isinstance(n, InnerNode):
                for e in reversed(n.edges):
                    stack.append((e.child, layer + (e.label == CONTEXT)))

    def context_layer(self, leaf: SentenceLeaf) -> int:
        for n, layer in self.walk():
            if n is leaf:
                return layer
        raise KeyError("leaf does not belong to this tree")


def _rebase(tree: ParseTree) -> ParseTree:
    """Sentence-level ROOT(S ...) with spans renumbered."""
    return as_sentence(reindex(tree))


class _Builder:
    def __init__(self, rules: Sequence[TransformationRule], lexicon: CueLexicon, max_depth: int,
                 trace: Trace | None = None):
        if max_depth < 1:
            raise ValueError("max_depth must be at least 1")
        self.trace = trace
        self.rules = list(rules)
        self.lexicon = lexicon
        self.max_depth = max_depth
        self.stats = TransformStats()

    def process(self, leaf: SentenceLeaf, depth: int) -> Node:
        if depth > self.max_depth:
            raise DepthLimitError(f"transformation depth exceeded {self.max_depth}")
        for rule in self.rules:
            try:
                outcome = apply(rule, leaf.tree, self.lexicon)
            except RuleInvariantError:
                self.stats.rejected[rule.name] += 1
                continue
            if outcome is not None:
                break
        else:
            return leaf
        self.stats.firings[outcome.rule] += 1
        if self.trace is not None:
            self.trace(leaf.tree, outcome)
        inherited = list(leaf.simple_contexts) + list(outcome.simple_contexts)
        if len(outcome.sentences) == 1:
            tree, _ = outcome.sentences[0]
            return self.process(SentenceLeaf(tree, leaf.sentence_index, inherited), depth + 1)
        edges: list[Edge] = []
        for tree, is_context in outcome.sentences:
            child = SentenceLeaf(tree, leaf.sentence_index)
            if inherited and not is_context:
                child.simple_contexts, inherited = inherited, []
            edges.append(Edge(CONTEXT if is_context else CORE, self.process(child, depth + 1)))
        return InnerNode(outcome.constituency, outcome.relation, edges, outcome.rule, outcome.cue_phrase)


def transform(document: Sequence[ParseTree], rules: Sequence[TransformationRule] | None = None,
              lexicon: CueLexicon | None = None, phrasal: bool = True,
              max_depth: int = DEFAULT_MAX_DEPTH, trace: Trace | None = None) -> DiscourseTree:
    """Build the discourse tree of a document given one parse tree per sentence.

    ``trace`` is called with (input tree, outcome) for every rule firing.
    """
    if not document:
        raise EmptyDocumentError("document has no sentences")
    lexicon = lexicon or default_lexicon()
    b = _Builder(catalog() if rules is None else rules, lexicon, max_depth, trace)
    edges = [Edge(CORE, b.process(SentenceLeaf(_rebase(t), i), 1)) for i, t in enumerate(document)]
    b.stats.sentences = len(document)
    tree = DiscourseTree(InnerNode(Constituency.COORDINATE, Relation.UNKNOWN, edges, "document"), b.stats)
    if phrasal:
        for lf in tree.leaves():
            lf.tree, found = phrasal_disembed(lf.tree, lexicon)
            lf.simple_contexts.extend(found)
    return tree


def context_layer(tree: DiscourseTree, leaf: SentenceLeaf) -> int:
    return tree.context_layer(leaf)


# -- text rendering ----------------------------------------------------------

def _node_title(n: InnerNode) -> str:
    kind = "Coordination" if n.constituency is Constituency.COORDINATE else "Subordination"
    return f"{kind} ({n.relation.value})"


def render_tree(tree: DiscourseTree, indent: str = "  ") -> str:
    """Indented text form: one line per node, edge label in brackets."""
    lines = ["DOCUMENT-ROOT"]

    def visit(n: Node, label: str, depth: int) -> None:
        pad = indent * depth
        if isinstance(n, SentenceLeaf):
            line = f"{pad}[{label}] {n.display()}"
            for c in n.simple_contexts:
                line += f"  {c.relation.tag}({detokenize(c.text)})"
            lines.append(line)
            return
        lines.append(f"{pad}[{label}] {_node_title(n)}")
        for e in n.edges:
            visit(e.child, e.label, depth + 1)

    for e in tree.root.edges:
        visit(e.child, e.label, 1)
    return "\n".join(lines) + "\n"
