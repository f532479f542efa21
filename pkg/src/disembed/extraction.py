"""Relation extraction from simplified sentences, representatives and context linking."""

from __future__ import annotations

import logging
import shlex
import subprocess
from dataclasses import dataclass, field
from typing import Callable, Iterable, Protocol, Sequence

from . import pattern as pat
from .discourse import CONTEXT, CORE, DiscourseTree, InnerNode, Node, SentenceLeaf
from .rhetorical import Relation
from .rules import Constituency
from .tree import Head, ParseTree, head_verb

log = logging.getLogger(__name__)

# Relations that are kept on the tree but never rendered as L: links.
UNLINKED_RELATIONS = frozenset({Relation.UNKNOWN, Relation.LIST})

CONFIDENCE_MODES = ("layer", "uniform")


@dataclass(frozen=True)
class Triple:
    arg1: tuple[str, ...]
    rel: tuple[str, ...]
    arg2: tuple[str, ...] = ()
    rel_sources: tuple[int | None, ...] = ()


@dataclass
class Proposition:
    id: int
    context_layer: int
    arg1: tuple[str, ...]
    rel: tuple[str, ...]
    arg2: tuple[str, ...] = ()
    simple_args: list[tuple[Relation, tuple[str, ...]]] = field(default_factory=list)
    linked_args: list[tuple[Relation, int]] = field(default_factory=list)
    confidence: float = 1.0
    sentence_index: int = 0
    leaf_index: int = 0

    def link(self, relation: Relation, target: "Proposition") -> None:
        if target.id != self.id and (relation, target.id) not in self.linked_args:
            self.linked_args.append((relation, target.id))


@dataclass
class ExtractionResult:
    sentences: list[tuple[str, ...]]  # source sentence tokens, in input order
    propositions: list[Proposition] = field(default_factory=list)
    warnings: list[str] = field(default_factory=list)
    dropped_contexts: int = 0
    unmatched_leaves: int = 0

    @property
    def provenance(self) -> dict[int, tuple[int, int]]:
        return {p.id: (p.sentence_index, p.leaf_index) for p in self.propositions}

    def by_sentence(self) -> list[list[Proposition]]:
        groups: list[list[Proposition]] = [[] for _ in self.sentences]
        for p in self.propositions:
            groups[p.sentence_index].append(p)
        return groups


LeafExtractor = Callable[[SentenceLeaf], Sequence[Triple]]


# -- default extractor -------------------------------------------------------

_DEFAULT = pat.compile("ROOT (S (z:z1 NP=arg1 z:z2 VP*<z3,z6> (z:z4 NP|PP|S|SBAR=x z:z5) z:z7))")
_INTRANSITIVE = pat.compile("ROOT (S (z:z1 NP=arg1 z:z2 VP*<z3,z6>=vp z:z7))")
_CASED_TAGS = frozenset({"NNP", "NNPS"})


def _arg1_tokens(np: ParseTree) -> tuple[str, ...]:
    """Subject tokens; the first word is lowercased unless it is a proper noun or "I"."""
    toks = np.tokens()
    first = np.preterminals()[0]
    if toks[0] != "I" and first.category not in _CASED_TAGS:
        toks[0] = toks[0].lower()
    return tuple(toks)


def _flatten(seq: Iterable[ParseTree]) -> tuple[list[str], list[int | None]]:
    toks: list[str] = []
    srcs: list[int | None] = []
    for t in seq:
        toks.extend(t.tokens())
        srcs.extend(t.sources())
    return toks, srcs


def extract_default(leaf: SentenceLeaf | ParseTree) -> list[Triple]:
    """One ⟨arg1, rel, arg2⟩ per clause: subject NP, verb chain, first complement onward."""
    tree = leaf.tree if isinstance(leaf, SentenceLeaf) else leaf
    for m in pat.iter_matches(_DEFAULT, tree):
        if any(c.category == "NP" for c in m.gaps["z1"]):
            continue
        rel, srcs = _flatten(list(m.gaps["z3"]) + list(m.gaps["z4"]))
        if not rel:
            continue
        arg2, _ = _flatten([m["x"], *m.gaps["z5"], *m.gaps["z6"]])
        return [Triple(_arg1_tokens(m["arg1"]), tuple(rel), tuple(arg2), tuple(srcs))]
    for m in pat.iter_matches(_INTRANSITIVE, tree):
        if any(c.category == "NP" for c in m.gaps["z1"]):
            continue
        rel, srcs = _flatten(list(m.gaps["z3"]) + list(m["vp"].children))
        if not rel:
            continue
        arg2, _ = _flatten(m.gaps["z6"])
        return [Triple(_arg1_tokens(m["arg1"]), tuple(rel), tuple(arg2), tuple(srcs))]
    return []


# -- representative ----------------------------------------------------------

def _low(seq: Iterable[str]) -> list[str]:
    return [s.lower() for s in seq]


def find_representative(props: Sequence[Triple], head: Head | None) -> Triple | None:
    """The proposition carrying the main statement.

    First one whose rel contains the head verb, else first whose arg2 is
    exactly the head verb.  Token positions are compared when both sides
    know them, surface forms otherwise.
    """
    if head is None:
        return None
    for t in props:
        if head.source is not None and t.rel_sources and all(s is not None for s in t.rel_sources):
            if head.source in t.rel_sources:
                return t
        elif head.token.lower() in _low(t.rel):
            return t
    for t in props:
        if _low(t.arg2) == [head.token.lower()]:
            return t
    return None


# -- linking -----------------------------------------------------------------

def _confidence(layer: int, mode: str) -> float:
    if mode == "uniform":
        return 1.0
    if mode == "layer":
        return 1.0 / (1 + layer)
    raise ValueError(f"unknown confidence mode {mode!r}")


def _reps(n: Node, rep: dict[int, Proposition]) -> list[Proposition]:
    if isinstance(n, SentenceLeaf):
        r = rep.get(id(n))
        return [r] if r is not None else []
    if n.constituency is Constituency.COORDINATE:
        return [p for c in n.children for p in _reps(c, rep)]
    return [p for e in n.edges if e.label == CORE for p in _reps(e.child, rep)]


def _link_node(n: InnerNode, rep: dict[int, Proposition]) -> None:
    if n.relation in UNLINKED_RELATIONS:
        return
    if n.constituency is Constituency.COORDINATE:
        cores = [e.child for e in n.edges if e.label == CORE]
        for left, right in zip(cores, cores[1:]):
            for a in _reps(left, rep):
                for b in _reps(right, rep):
                    a.link(n.relation, b)
                    b.link(n.relation, a)
        return
    for ce in (e for e in n.edges if e.label == CORE):
        for xe in (e for e in n.edges if e.label == CONTEXT):
            for a in _reps(ce.child, rep):
                for b in _reps(xe.child, rep):
                    a.link(n.relation, b)


def link(tree: DiscourseTree, extractor: LeafExtractor = extract_default,
         sentences: Sequence[Sequence[str]] | None = None, confidence: str = "layer") -> ExtractionResult:
    """Extract from every leaf and attach simple and linked contexts to representatives."""
    if sentences is None:
        n = 1 + max((lf.sentence_index for lf in tree.leaves()), default=-1)
        sentences = [[] for _ in range(n)]
    result = ExtractionResult([tuple(s) for s in sentences])
    rep: dict[int, Proposition] = {}
    next_id = 1
    leaf_index = 0
    for node, layer in tree.walk():
        if not isinstance(node, SentenceLeaf):
            continue
        where = f"sentence {node.sentence_index + 1}, leaf {leaf_index + 1} ({node.display()!r})"
        try:
            triples = list(extractor(node))
        except Exception as exc:  # adapter failures are per leaf
            result.warnings.append(f"{where}: extractor failed: {exc}")
            triples = []
        if not triples:
            result.unmatched_leaves += 1
            result.warnings.append(f"{where}: no extraction")
        chosen = find_representative(triples, head_verb(node.tree))
        for t in triples:
            p = Proposition(next_id, layer, t.arg1, t.rel, t.arg2, confidence=_confidence(layer, confidence),
                            sentence_index=node.sentence_index, leaf_index=leaf_index)
            next_id += 1
            result.propositions.append(p)
            if t is chosen:
                rep[id(node)] = p
                p.simple_args = [(c.relation, tuple(c.text)) for c in node.simple_contexts]
        if id(node) not in rep and node.simple_contexts:
            result.dropped_contexts += len(node.simple_contexts)
            if triples:
                result.warnings.append(f"{where}: no representative, {len(node.simple_contexts)} context(s) dropped")
            else:
                result.warnings.append(f"{where}: {len(node.simple_contexts)} context(s) dropped")
        leaf_index += 1
    for node in tree.inner_nodes():
        _link_node(node, rep)
    for w in result.warnings:
        log.warning(w)
    return result


# -- external extractors -----------------------------------------------------

class StringAdapter(Protocol):
    def __call__(self, sentence: str) -> Sequence[tuple[str, str, str]]: ...


def triple_from_strings(arg1: str, rel: str, arg2: str = "") -> Triple:
    return Triple(tuple(arg1.split()), tuple(rel.split()), tuple(arg2.split()))


def parse_line_protocol(text: str) -> list[list[tuple[str, str, str]]]:
    """Blocks of ``arg1<TAB>rel<TAB>arg2`` lines, each closed by a blank line."""
    blocks: list[list[tuple[str, str, str]]] = []
    current: list[tuple[str, str, str]] = []
    for lineno, line in enumerate(text.splitlines(), 1):
        if not line.strip():
            blocks.append(current)
            current = []
            continue
        parts = line.split("\t")
        if len(parts) == 2:
            parts.append("")
        if len(parts) != 3 or not parts[0].strip() or not parts[1].strip():
            raise ValueError(f"extractor output line {lineno}: expected arg1<TAB>rel<TAB>arg2")
        current.append((parts[0], parts[1], parts[2]))
    if current:
        blocks.append(current)
    return blocks


class SubprocessAdapter:
    """Runs an external command once over all leaf sentences.

    The command reads one sentence per line on stdin and writes one block
    of tab-separated tuples per sentence, each ended by a blank line.
    """

    def __init__(self, command: str | Sequence[str], timeout: float | None = 300):
        self.argv = shlex.split(command) if isinstance(command, str) else list(command)
        self.timeout = timeout

    def batch(self, sentences: Sequence[str]) -> list[list[tuple[str, str, str]] | Exception]:
        if not sentences:
            return []
        payload = "".join(s.replace("\n", " ") + "\n" for s in sentences)
        try:
            proc = subprocess.run(self.argv, input=payload, capture_output=True, text=True,
                                  timeout=self.timeout, check=False)
        except (OSError, subprocess.SubprocessError) as exc:
            return [RuntimeError(str(exc)) for _ in sentences]
        if proc.returncode != 0:
            err = RuntimeError(f"exit status {proc.returncode}: {proc.stderr.strip()[:200]}")
            return [err for _ in sentences]
        try:
            blocks: list = parse_line_protocol(proc.stdout)
        except ValueError as exc:
            return [exc for _ in sentences]
        missing = RuntimeError("no output block for this sentence")
        return [blocks[i] if i < len(blocks) else missing for i in range(len(sentences))]

    def __call__(self, sentence: str) -> Sequence[tuple[str, str, str]]:
        out = self.batch([sentence])[0]
        if isinstance(out, Exception):
            raise out
        return out


def run_external_extractor(tree: DiscourseTree, adapter: StringAdapter | SubprocessAdapter,
                           sentences: Sequence[Sequence[str]] | None = None,
                           confidence: str = "layer") -> ExtractionResult:
    """Same linking as :func:`link`, with tuples supplied by an outside system.

    Each leaf is handed over as its display sentence.  Adapters exposing a
    ``batch`` method receive all leaves at once.
    """
    leaves = tree.leaves()
    answers: dict[int, object] = {}
    batch = getattr(adapter, "batch", None)
    if callable(batch):
        for lf, out in zip(leaves, batch([lf.display() for lf in leaves])):
            answers[id(lf)] = out

    def extractor(lf: SentenceLeaf) -> list[Triple]:
        out = answers[id(lf)] if id(lf) in answers else adapter(lf.display())
        if isinstance(out, Exception):
            raise out
        return [triple_from_strings(*t) for t in out]  # type: ignore[union-attr]

    return link(tree, extractor, sentences, confidence)
