"""Flat (tab-separated, indented contexts) and structured (JSON) output formats.

Flat layout, one block per source sentence, blocks separated by a blank line::

    <sentence text>
    #<id>\\t<layer>\\t<arg1>\\t<rel>\\t<arg2>
        S:<RELATION>\\t<text>
        L:<RELATION>\\t#<id>

Tabs inside text are replaced by single spaces when rendering.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from .extraction import ExtractionResult, Proposition
from .rhetorical import Relation
from .tree import detokenize

INDENT = "    "
STRUCTURED_VERSION = 1


class FlatFormatError(ValueError):
    def __init__(self, message: str, line: int):
        super().__init__(f"line {line}: {message}")
        self.line = line


@dataclass(frozen=True)
class FlatContext:
    kind: str  # "S" or "L"
    relation: str  # upper-case tag, e.g. TEMPORAL
    value: str  # text for S, "#<id>" for L


@dataclass(frozen=True)
class FlatProposition:
    id: int
    layer: int
    arg1: str
    rel: str
    arg2: str
    contexts: tuple[FlatContext, ...] = ()


@dataclass(frozen=True)
class FlatBlock:
    sentence: str
    propositions: tuple[FlatProposition, ...] = ()


@dataclass(frozen=True)
class FlatDocument:
    blocks: tuple[FlatBlock, ...] = field(default_factory=tuple)


def _clean(text: str) -> str:
    return text.replace("\t", " ").replace("\r", " ").replace("\n", " ")


def _text(tokens) -> str:
    return _clean(detokenize(list(tokens)))


def to_flat(result: ExtractionResult) -> FlatDocument:
    blocks = []
    for sent, props in zip(result.sentences, result.by_sentence()):
        fps = []
        for p in props:
            ctx = [FlatContext("S", r.tag, _text(t)) for r, t in p.simple_args]
            ctx += [FlatContext("L", r.tag, f"#{target}") for r, target in p.linked_args]
            fps.append(FlatProposition(p.id, p.context_layer, _text(p.arg1), _text(p.rel), _text(p.arg2), tuple(ctx)))
        blocks.append(FlatBlock(_text(sent), tuple(fps)))
    return FlatDocument(tuple(blocks))


def render_flat_document(doc: FlatDocument) -> str:
    out: list[str] = []
    for b in doc.blocks:
        lines = [_clean(b.sentence)]
        for p in b.propositions:
            lines.append("\t".join([f"#{p.id}", str(p.layer), _clean(p.arg1), _clean(p.rel), _clean(p.arg2)]))
            lines.extend(f"{INDENT}{c.kind}:{c.relation}\t{_clean(c.value)}" for c in p.contexts)
        out.append("\n".join(lines) + "\n")
    return "\n".join(out)


def render_flat(result: ExtractionResult) -> str:
    """Render a result; an empty result gives an empty string."""
    if not result.propositions and not result.sentences:
        return ""
    return render_flat_document(to_flat(result))


def parse_flat(text: str) -> FlatDocument:
    blocks: list[FlatBlock] = []
    sentence: str | None = None
    props: list[FlatProposition] = []
    ctx: list[FlatContext] = []
    current: tuple | None = None

    def close_prop() -> None:
        nonlocal current, ctx
        if current is not None:
            props.append(FlatProposition(*current, contexts=tuple(ctx)))
        current, ctx = None, []

    def close_block() -> None:
        nonlocal sentence, props
        close_prop()
        if sentence is not None:
            blocks.append(FlatBlock(sentence, tuple(props)))
        sentence, props = None, []

    for lineno, line in enumerate(text.split("\n"), 1):
        if line == "":
            close_block()
            continue
        if sentence is None:
            sentence = line
            continue
        if line.startswith(INDENT):
            if current is None:
                raise FlatFormatError("context line before any proposition", lineno)
            body = line[len(INDENT):]
            head, sep, value = body.partition("\t")
            kind, colon, rel = head.partition(":")
            if not sep or not colon or kind not in ("S", "L") or not rel:
                raise FlatFormatError(f"bad context line {line!r}", lineno)
            if kind == "L" and not (value.startswith("#") and value[1:].isdigit()):
                raise FlatFormatError(f"linked context needs #<id>, got {value!r}", lineno)
            ctx.append(FlatContext(kind, rel, value))
            continue
        parts = line.split("\t")
        if len(parts) != 5 or not parts[0].startswith("#"):
            raise FlatFormatError(f"expected 5 tab-separated fields, got {len(parts)}", lineno)
        try:
            pid, layer = int(parts[0][1:]), int(parts[1])
        except ValueError:
            raise FlatFormatError("id and layer must be integers", lineno) from None
        close_prop()
        current = (pid, layer, parts[2], parts[3], parts[4])
    close_block()
    return FlatDocument(tuple(blocks))


# -- structured --------------------------------------------------------------

def _prop_record(p: Proposition) -> dict:
    return {
        "id": p.id,
        "context_layer": p.context_layer,
        "arg1": list(p.arg1),
        "rel": list(p.rel),
        "arg2": list(p.arg2),
        "simple_args": [{"relation": r.value, "text": list(t)} for r, t in p.simple_args],
        "linked_args": [{"relation": r.value, "target": t} for r, t in p.linked_args],
        "confidence": p.confidence,
        "provenance": {"sentence": p.sentence_index, "leaf": p.leaf_index},
    }


def result_record(result: ExtractionResult) -> dict:
    return {
        "sentences": [list(s) for s in result.sentences],
        "propositions": [_prop_record(p) for p in result.propositions],
        "warnings": list(result.warnings),
        "dropped_contexts": result.dropped_contexts,
        "unmatched_leaves": result.unmatched_leaves,
    }


def render_structured(results: ExtractionResult | list[ExtractionResult]) -> str:
    """JSON document: ``{"version": 1, "documents": [...]}``, one entry per input document."""
    if isinstance(results, ExtractionResult):
        results = [results]
    payload = {"version": STRUCTURED_VERSION, "documents": [result_record(r) for r in results]}
    return json.dumps(payload, indent=2, ensure_ascii=False) + "\n"


def _prop_from(rec: dict) -> Proposition:
    return Proposition(
        id=rec["id"],
        context_layer=rec["context_layer"],
        arg1=tuple(rec["arg1"]),
        rel=tuple(rec["rel"]),
        arg2=tuple(rec["arg2"]),
        simple_args=[(Relation.parse(a["relation"]), tuple(a["text"])) for a in rec["simple_args"]],
        linked_args=[(Relation.parse(a["relation"]), a["target"]) for a in rec["linked_args"]],
        confidence=rec["confidence"],
        sentence_index=rec["provenance"]["sentence"],
        leaf_index=rec["provenance"]["leaf"],
    )


def parse_structured(text: str) -> list[ExtractionResult]:
    payload = json.loads(text)
    if payload.get("version") != STRUCTURED_VERSION:
        raise ValueError(f"unsupported structured format version {payload.get('version')!r}")
    out = []
    for doc in payload["documents"]:
        out.append(ExtractionResult(
            sentences=[tuple(s) for s in doc["sentences"]],
            propositions=[_prop_from(p) for p in doc["propositions"]],
            warnings=list(doc.get("warnings", [])),
            dropped_contexts=doc.get("dropped_contexts", 0),
            unmatched_leaves=doc.get("unmatched_leaves", 0),
        ))
    return out
