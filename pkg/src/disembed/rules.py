"""Clausal transformation rules and phrasal disembedding.

Each clausal rule pairs a tree pattern with a realizer that assembles the
simplified sentences out of matched constituents.  Output trees are built
by structural surgery on the input tree, never by re-parsing, so word
provenance (``ParseTree.source``) survives; inserted copulas carry no
source.
"""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Iterable, Sequence

from . import pattern as pat
from .rhetorical import MULTINUCLEAR, CueLexicon, Relation, classify, default_lexicon
from .tree import (
    PUNCT_TAGS,
    _rebuild,
    VERB_TAGS,
    ParseTree,
    TokenSpan,
    as_sentence,
    node,
    preterminal,
    remove,
    replace,
)


class Constituency(enum.Enum):
    COORDINATE = "coordinate"
    SUBORDINATE = "subordinate"


class RuleInvariantError(RuntimeError):
    """A realizer produced a sentence that is not shorter than its input."""


@dataclass(frozen=True)
class SimpleContext:
    relation: Relation
    text: tuple[str, ...]
    span: TokenSpan | None = None


@dataclass(frozen=True)
class RuleOutcome:
    sentences: tuple[tuple[ParseTree, bool], ...]  # (tree, is_context)
    constituency: Constituency
    cue_phrase: tuple[str, ...]
    relation: Relation
    simple_contexts: tuple[SimpleContext, ...] = ()
    rule: str = ""


@dataclass(frozen=True)
class Realization:
    """What a realizer hands back: sentences in output order plus the cue."""
    sentences: list[tuple[ParseTree, bool]]
    cue: list[str] = field(default_factory=list)
    contexts: list[SimpleContext] = field(default_factory=list)


Realizer = Callable[[pat.MatchResult, ParseTree], "Realization | None"]


@dataclass(frozen=True)
class TransformationRule:
    name: str
    pattern: pat.Pattern
    constituency: Constituency
    environment: str
    realize: Realizer
    relation: Relation | None = None  # fixed relation; skips cue classification
    description: str = ""


# -- lexical helpers ---------------------------------------------------------

REPORTING_VERBS = frozenset("""
    say says said saying state states stated note notes noted announce announces announced
    report reports reported claim claims claimed suggest suggests suggested argue argues argued
    add adds added explain explains explained tell tells told believe believes believed
    write writes wrote insist insists insisted
""".split())
BE_FINITE = {"is": "VBZ", "are": "VBP", "am": "VBP", "was": "VBD", "were": "VBD"}
COMPLEMENTIZERS = frozenset({"that", "whether", "who", "whom", "which", "what", "whose"})
MONTHS = frozenset("""january february march april may june july august september october
    november december jan feb mar apr jun jul aug sep sept oct nov dec""".split())
WEEKDAYS = frozenset("monday tuesday wednesday thursday friday saturday sunday".split())
DAY_WORDS = frozenset({"today", "yesterday", "tomorrow", "tonight"})
TEMPORAL_PREPS = frozenset({"in", "on", "at", "after", "before", "during", "since"})


def _is_punct(t: ParseTree) -> bool:
    return t.is_preterminal and t.category in PUNCT_TAGS


def _punct_only(seq: Iterable[ParseTree], quotes: bool = True) -> bool:
    for t in seq:
        if not _is_punct(t):
            return False
        if not quotes and t.category in ("``", "''"):
            return False
    return True


def _has_quote(seq: Iterable[ParseTree]) -> bool:
    return any(t.is_preterminal and t.category in ("``", "''") for t in seq)


def _finite_clause(s: ParseTree) -> bool:
    cats = [c.category for c in s.children]
    return "NP" in cats and "VP" in cats and cats.index("NP") < cats.index("VP")


def _vp_chain(vp: ParseTree) -> list[ParseTree]:
    chain = [vp]
    while True:
        vps = [c for c in chain[-1].children if c.category == "VP" and not c.is_leaf]
        if len(vps) != 1:
            return chain
        chain.append(vps[0])


def _chain_verbs(vp: ParseTree) -> list[ParseTree]:
    return [c for v in _vp_chain(vp) for c in v.children if c.is_preterminal and c.category in (VERB_TAGS | {"MD"})]


def _main_vp(clause: ParseTree) -> ParseTree | None:
    s = clause.children[0] if clause.category == "ROOT" and clause.children else clause
    return next((c for c in s.children if c.category == "VP"), None)


def copula(tree: ParseTree) -> ParseTree:
    """A synthetic finite form of *be*: the nearest one on the main verb chain, else ``was``."""
    vp = _main_vp(tree)
    if vp is not None:
        for v in reversed(_chain_verbs(vp)):
            w = v.word.lower()  # type: ignore[union-attr]
            if w in BE_FINITE:
                return preterminal(BE_FINITE[w], w)
    return preterminal("VBD", "was")


def _span_of(tokens_src: Sequence[int | None]) -> TokenSpan | None:
    if not tokens_src or any(s is None for s in tokens_src):
        return None
    lo, hi = min(tokens_src), max(tokens_src)  # type: ignore[type-var]
    return TokenSpan(lo, hi + 1)  # type: ignore[operator]


_KEEP_CASE = frozenset({"NNP", "NNPS"})


def _initial_sources(t: ParseTree) -> set[int]:
    """Source positions that may hold the sentence-initial word (after an opening quote)."""
    out = {0}
    for lf in t.leaves():
        if lf.source == 0 and lf.token in ("``", '"', "-LRB-", "'"):
            out.add(1)
    return out


def lower_initial(t: ParseTree, keep_first: bool = True) -> ParseTree:
    """Lowercase a sentence-initial word that is no longer first (or any, unless ``keep_first``).

    Proper nouns and "I" keep their case.
    """
    leaves = t.leaves()
    if not leaves:
        return t
    first = next((lf for lf in leaves if lf.token not in ("``", "'", '"')), leaves[0])
    initial = _initial_sources(t)

    def fn(n: ParseTree) -> list[ParseTree] | None:
        if not n.is_preterminal:
            return None
        w = n.children[0]
        tok = w.token or ""
        if (w.source in initial and tok[:1].isupper() and n.category not in _KEEP_CASE and tok != "I"
                and not (keep_first and w is first)):
            low = ParseTree(tok.lower(), (), tok.lower(), w.span, w.source)
            return [ParseTree(n.label, (low,), None, n.span)]
        return None

    out = _rebuild(t, fn)
    return out[0] if len(out) == 1 else t


def make_context(relation: Relation, t: ParseTree | Sequence[ParseTree]) -> SimpleContext:
    parts = [t] if isinstance(t, ParseTree) else list(t)
    parts = [lower_initial(p, keep_first=False) for p in parts]
    toks = [w for p in parts for w in p.tokens()]
    srcs = [s for p in parts for s in p.sources()]
    return SimpleContext(relation, tuple(toks), _span_of(srcs))


def _coordination(np_or_vp: ParseTree, label: str) -> list[ParseTree] | None:
    """Conjuncts of ``X -> X (, X)* CC X`` or None."""
    kids = np_or_vp.children
    conj = [c for c in kids if c.category == label and not c.is_leaf]
    if len(conj) < 2 or not any(c.category == "CC" for c in kids):
        return None
    if not all(c.category in (label, "CC", ",", ":") for c in kids):
        return None
    return conj


def _cc_tokens(t: ParseTree) -> list[str]:
    return [w for c in t.children if c.category == "CC" for w in c.tokens()]


def _s_of(tree: ParseTree) -> ParseTree:
    return tree.children[0] if tree.category == "ROOT" and len(tree.children) == 1 else tree


# -- realizers ---------------------------------------------------------------

def _split_groups(clause: ParseTree, sep_tags: set[str]) -> list[list[ParseTree]] | None:
    groups: list[list[ParseTree]] = [[]]
    for c in clause.children:
        if c.is_preterminal and c.category in sep_tags:
            groups.append([])
        else:
            groups[-1].append(c)
    groups = [g for g in groups if not _punct_only(g)]
    if len(groups) < 2 or not all(any(c.category == "S" for c in g) for g in groups):
        return None
    return groups


def _group_sentence(group: list[ParseTree]) -> ParseTree:
    core = [c for c in group if not _is_punct(c)]
    if len(core) == 1:
        return as_sentence(core[0])
    return as_sentence(node("S", group))


def r_coordination_colon(m: pat.MatchResult, tree: ParseTree) -> Realization | None:
    clause = m["clause"]
    if not all(c.category in ("S", "CC") or _is_punct(c) for c in clause.children):
        return None
    seps = [c for c in clause.children if c.is_preterminal and c.category == ":"]
    groups = _split_groups(clause, {":"})
    if groups is None:
        return None
    return Realization([(_group_sentence(g), False) for g in groups], seps[0].tokens())


def r_coordination_conjunction(m: pat.MatchResult, tree: ParseTree) -> Realization | None:
    clause = m["clause"]
    kids = clause.children
    if not all(c.category in ("S", "CC") or _is_punct(c) for c in kids) or not _punct_only(m.gaps["pre"]):
        return None
    if any(c.category == ":" for c in kids):
        return None
    conj = [c for c in kids if c.category == "S"]
    if len(conj) < 2:
        return None
    return Realization([(as_sentence(c), False) for c in conj], _cc_tokens(clause))


def _statement(stmt: ParseTree) -> ParseTree | None:
    if stmt.category == "SBAR":
        inner = [c for c in stmt.children if c.category == "S"]
        lead = [c for c in stmt.children if c.category != "S"]
        if len(inner) != 1 or not all(c.word and c.word.lower() == "that" for c in lead if c.is_preterminal):
            return None
        if any(not c.is_preterminal for c in lead):
            return None
        stmt = inner[0]
    return stmt if stmt.category == "S" and _finite_clause(stmt) else None


def r_attribution_leading(m: pat.MatchResult, tree: ParseTree) -> Realization | None:
    verbs = [c for c in m.gaps["z3"] if c.is_preterminal and c.category in VERB_TAGS]
    if not verbs or verbs[-1].word.lower() not in REPORTING_VERBS:  # type: ignore[union-attr]
        return None
    if not all(c.is_preterminal or c.category in ("ADVP", "NP") for c in m.gaps["z3"]):
        return None
    if _has_quote(list(m.gaps["z3"]) + list(m.gaps["z4"])):
        return None
    stmt = _statement(m["stmt"])
    if stmt is None or not _punct_only(m.gaps["z4"]):
        return None
    attribution = remove(tree, [m["stmt"]])
    return Realization([(as_sentence(stmt), False)], [verbs[-1].word],  # type: ignore[list-item]
                       [make_context(Relation.ATTRIBUTION, as_sentence(attribution))])


def _reporting_vp(vp: ParseTree) -> ParseTree | None:
    verbs = [c for c in vp.children if c.is_preterminal and c.category in VERB_TAGS]
    rest = [c for c in vp.children if c not in verbs]
    if len(verbs) != 1 or verbs[0].word.lower() not in REPORTING_VERBS:  # type: ignore[union-attr]
        return None
    if not all(c.category in ("ADVP", "RB") or _is_punct(c) for c in rest):
        return None
    return verbs[0]


def r_attribution_trailing(m: pat.MatchResult, tree: ParseTree) -> Realization | None:
    if not _punct_only(m.gaps["pre"], quotes=False) or not _punct_only(m.gaps["sep"], quotes=False):
        return None
    if not m.gaps["sep"] or not _punct_only(m.gaps["post"], quotes=False):
        return None
    verb = _reporting_vp(m["rvp"])
    if verb is None or not _finite_clause(m["stmt"]):
        return None
    speaker = [m["speaker"], m["rvp"]]
    return Realization([(as_sentence(m["stmt"]), False)], verb.tokens(),
                       [make_context(Relation.ATTRIBUTION, speaker)])


def r_direct_speech(m: pat.MatchResult, tree: ParseTree) -> Realization | None:
    if "rvp" in m.bindings:  # quote first:  `` S , '' NP said .
        if not (_has_quote(m.gaps["pre"]) or _has_quote(m.gaps["sep"])):
            return None
        if not (_punct_only(m.gaps["pre"]) and _punct_only(m.gaps["sep"]) and _punct_only(m.gaps["post"])):
            return None
        verb = _reporting_vp(m["rvp"])
        if verb is None or not _finite_clause(m["stmt"]):
            return None
        return Realization([(as_sentence(m["stmt"]), False)], verb.tokens(),
                           [make_context(Relation.ATTRIBUTION, [m["speaker"], m["rvp"]])])
    # speaker first:  NP said , `` S '' .
    if not _has_quote(list(m.gaps["sep"]) + list(m.gaps["post"])):
        return None
    if not (_punct_only(m.gaps["sep"]) and _punct_only(m.gaps["post"]) and _punct_only(m.gaps["z5"])):
        return None
    verb = m["verb"]
    if verb.word.lower() not in REPORTING_VERBS or not _finite_clause(m["stmt"]):  # type: ignore[union-attr]
        return None
    return Realization([(as_sentence(m["stmt"]), False)], verb.tokens(),
                       [make_context(Relation.ATTRIBUTION, [m["speaker"], verb])])


def _cue_ok(x: Sequence[ParseTree]) -> bool:
    words = [w.lower() for t in x for w in t.tokens()]
    return bool(words) and words[-1] not in COMPLEMENTIZERS


def r_subordination_pre(m: pat.MatchResult, tree: ParseTree) -> Realization | None:
    if not _cue_ok(m.gaps["x"]) or not _punct_only(m.gaps["z1"]):
        return None
    if not all(_is_punct(c) or c.category in ("ADVP", "CC") for c in m.gaps["z0"]):
        return None
    main = remove(tree, [m["sbar"]])
    return Realization([(as_sentence(m["sub"]), True), (as_sentence(main), False)], m.gap_tokens("x"))


def r_subordination_post(m: pat.MatchResult, tree: ParseTree) -> Realization | None:
    if not _cue_ok(m.gaps["x"]):
        return None
    main = remove(tree, [m["sbar"]])
    return Realization([(as_sentence(main), False), (as_sentence(m["sub"]), True)], m.gap_tokens("x"))


def _relative(m: pat.MatchResult, tree: ParseTree, extra: list[ParseTree]) -> Realization | None:
    wh = [w.lower() for w in m["wh"].tokens()]
    if wh not in (["who"], ["which"], ["that"]):
        return None
    main = remove(tree, [m["rel"], *extra])
    ctx = as_sentence(node("S", [m["head"], m["bvp"]]))
    return Realization([(as_sentence(main), False), (ctx, True)], wh)


def r_relative_nonrestrictive(m: pat.MatchResult, tree: ParseTree) -> Realization | None:
    after = m.gaps["after"]
    if not (len(after) == 0 or (len(after) == 1 and after[0].category == ",")):
        return None
    if [w.lower() for w in m["wh"].tokens()] == ["that"]:
        return None
    return _relative(m, tree, [m["c1"], *after])


def r_relative_restrictive(m: pat.MatchResult, tree: ParseTree) -> Realization | None:
    return _relative(m, tree, [])


def r_participial_trailing(m: pat.MatchResult, tree: ParseTree) -> Realization | None:
    if not _punct_only(m.gaps["z4"]):
        return None
    main = remove(tree, [m["comma"], m["part"]])
    ctx = node("S", [m["subj"], node("VP", [copula(tree), m["pvp"]])])
    return Realization([(as_sentence(main), False), (as_sentence(ctx), False)])


def r_participial_leading(m: pat.MatchResult, tree: ParseTree) -> Realization | None:
    if not _punct_only(m.gaps["z0"]):
        return None
    main = remove(tree, [m["part"], m["comma"]])
    ctx = node("S", [m["subj"], node("VP", [copula(main), m["pvp"]])])
    return Realization([(as_sentence(ctx), True), (as_sentence(main), False)])


def r_apposition(m: pat.MatchResult, tree: ParseTree) -> Realization | None:
    after = m.gaps["after"]
    if not (len(after) == 0 or (len(after) == 1 and after[0].category == ",")):
        return None
    if any(c.category == "CC" for c in m["np"].children):
        return None
    head, app = m["head"], m["app"]
    if all(c.category == "CD" for c in app.preterminals()):
        return None
    main = remove(tree, [m["c1"], app, *after])
    ctx = node("S", [head, node("VP", [copula(tree), app])])
    return Realization([(as_sentence(main), False), (as_sentence(ctx), True)])


def r_coordination_verb_phrases(m: pat.MatchResult, tree: ParseTree) -> Realization | None:
    vp = m["vp"]
    conj = _coordination(vp, "VP")
    if conj is None:
        return None
    return Realization([(as_sentence(replace(tree, vp, [c])), False) for c in conj], _cc_tokens(vp))


def r_coordination_np_subject(m: pat.MatchResult, tree: ParseTree) -> Realization | None:
    if any(c.category == "NP" for c in m.gaps["z1"]):
        return None
    subj = m["subj"]
    conj = _coordination(subj, "NP")
    if conj is None:
        return None
    return Realization([(as_sentence(replace(tree, subj, [c])), False) for c in conj], _cc_tokens(subj))


def r_coordination_np_object(m: pat.MatchResult, tree: ParseTree) -> Realization | None:
    obj = m["obj"]
    conj = _coordination(obj, "NP")
    if conj is None:
        return None
    return Realization([(as_sentence(replace(tree, obj, [c])), False) for c in conj], _cc_tokens(obj))


def r_parenthetical(m: pat.MatchResult, tree: ParseTree) -> Realization | None:
    prn = m["prn"]
    inner = [c for c in prn.children if not _is_punct(c)]
    if not inner:
        return None
    main = as_sentence(remove(tree, [prn]))
    clauses = [c for c in inner if c.category == "S" and _finite_clause(c)]
    if len(inner) == 1 and clauses:
        return Realization([(main, False), (as_sentence(clauses[0]), True)])
    return Realization([(main, False)], [], [make_context(Relation.ELABORATION, inner)])


# -- catalog -----------------------------------------------------------------

C, S = Constituency.COORDINATE, Constituency.SUBORDINATE

_SPECS: list[tuple[str, str, Constituency, str, Realizer, Relation | None, str]] = [
    ("coordination_colon",
     "ROOT (S=clause (... S ... :=sep ... S ...))",
     C, "coordination", r_coordination_colon, None,
     "Clauses joined by a semicolon or colon."),
    ("coordination_conjunction",
     "ROOT (S=clause (z:pre S ... CC=cc ... S ...))",
     C, "coordination", r_coordination_conjunction, None,
     "Clauses joined by a coordinating conjunction."),
    ("attribution_leading",
     "ROOT (S (z:z1 NP=speaker z:z2 VP*<up,down> (z:z3 SBAR|S=stmt z:z4) z:z5))",
     S, "subordination-leading", r_attribution_leading, Relation.ATTRIBUTION,
     "X said (that) S: the statement stays, the reporting clause becomes an attribution context."),
    ("attribution_trailing",
     "ROOT (S (z:pre S=stmt z:sep NP=speaker VP=rvp z:post))",
     S, "subordination-trailing", r_attribution_trailing, Relation.ATTRIBUTION,
     "S, X said."),
    ("subordination_pre",
     "ROOT (S (z:z0 SBAR=sbar (z:x S=sub (... NP ... VP ...)) z:z1 NP z:z2 VP z:z5))",
     S, "subordination-leading", r_subordination_pre, None,
     "Although X, Y."),
    ("subordination_post",
     "ROOT (S (z:z1 NP=np z:z2 VP* (z:z3 SBAR=sbar (z:x S=sub (... NP ... VP ...) ...) z:z4) z:z5))",
     S, "subordination-trailing", r_subordination_post, None,
     "Y, although X (subordinated clause closing the sentence)."),
    ("relative_nonrestrictive",
     "NP=np (NP=head ,=c1 SBAR=rel (WHNP=wh S (VP=bvp)) z:after)",
     S, "subordination-trailing", r_relative_nonrestrictive, None,
     "NP, who/which VP, ..."),
    ("relative_restrictive",
     "NP=np (NP=head SBAR=rel (WHNP=wh S (VP=bvp)))",
     S, "subordination-trailing", r_relative_restrictive, None,
     "NP who/which/that VP."),
    ("participial_trailing",
     "ROOT (S (z:z1 NP=subj z:z2 VP* (z:z3 ,=comma S=part (VP=pvp (VBG|VBN ...)) z:z4) z:z5))",
     C, "phrasal", r_participial_trailing, None,
     "X did Y, becoming Z -> X was becoming Z."),
    ("participial_leading",
     "ROOT (S (z:z0 S=part (VP=pvp (VBG|VBN ...)) ,=comma NP=subj VP z:z5))",
     S, "phrasal", r_participial_leading, None,
     "Born in Z, X did Y -> X was born in Z."),
    ("apposition_nonrestrictive",
     "NP=np (NP=head ,=c1 NP=app z:after)",
     S, "phrasal", r_apposition, Relation.NOUN_BASED,
     "NP, NP, -> NP was NP."),
    ("coordination_verb_phrases",
     "ROOT (S (z:z1 NP z:z2 VP*<up,down>=vp (... VP ... CC ... VP ...) z:z5))",
     C, "coordination", r_coordination_verb_phrases, None,
     "X did A and did B -> X did A. X did B."),
    ("coordination_np_subject",
     "ROOT (S (z:z1 NP=subj z:z2 VP z:z5))",
     C, "coordination", r_coordination_np_subject, None,
     "A and B did X -> A did X. B did X."),
    ("coordination_np_object",
     "ROOT (S (z:z1 NP z:z2 VP*<up,down> (z:z3 NP=obj z:z4) z:z5))",
     C, "coordination", r_coordination_np_object, None,
     "X did A and B -> X did A. X did B."),
    ("direct_speech",
     "ROOT (S (z:pre S=stmt z:sep NP=speaker VP=rvp z:post))",
     S, "subordination-trailing", r_direct_speech, Relation.ATTRIBUTION,
     "`` S , '' X said."),
    ("parenthetical",
     "PRN=prn",
     S, "phrasal", r_parenthetical, Relation.ELABORATION,
     "Parenthesized material becomes context."),
]

# Quote-last form of direct speech: X said , `` S '' .
_DIRECT_SPEECH_SPEAKER_FIRST = pat.compile(
    "ROOT (S (z:z1 NP=speaker VP (VBD|VBZ|VBP=verb z:sep S=stmt z:post) z:z5))")


def _build_catalog() -> list[TransformationRule]:
    return [TransformationRule(name, pat.compile(src), cons, env, fn, rel, desc)
            for name, src, cons, env, fn, rel, desc in _SPECS]


_CATALOG = _build_catalog()
RULE_NAMES = tuple(r.name for r in _CATALOG)


def catalog(names: Sequence[str] | None = None) -> list[TransformationRule]:
    """The clausal rules in execution order, optionally reordered/filtered by name."""
    if names is None:
        return list(_CATALOG)
    by_name = {r.name: r for r in _CATALOG}
    unknown = [n for n in names if n not in by_name]
    if unknown:
        raise KeyError(f"unknown rule(s): {', '.join(unknown)}")
    return [by_name[n] for n in names]


def load_rule_order(path: str | Path) -> list[str]:
    """Rule names, one per line (``#`` comments allowed), or a JSON list."""
    text = Path(path).read_text(encoding="utf-8")
    if text.lstrip().startswith("["):
        return list(json.loads(text))
    return [ln.strip() for ln in text.splitlines() if ln.strip() and not ln.strip().startswith("#")]


def _candidates(rule: TransformationRule, tree: ParseTree) -> Iterable[pat.MatchResult]:
    yield from pat.iter_matches(rule.pattern, tree)
    if rule.name == "direct_speech":
        yield from pat.iter_matches(_DIRECT_SPEECH_SPEAKER_FIRST, tree)


def apply(rule: TransformationRule, leaf: ParseTree, lexicon: CueLexicon | None = None) -> RuleOutcome | None:
    """Try ``rule`` on a sentence tree.  Returns None when it does not fire.

    A split whose relation is multinuclear (e.g. Contrast) yields core
    sentences only, so such a subordination becomes a coordination.
    """
    lexicon = lexicon or default_lexicon()
    for m in _candidates(rule, leaf):
        real = rule.realize(m, leaf)
        if real is None:
            continue
        size = len(leaf.tokens())
        for t, _ in real.sentences:
            if len(t.tokens()) >= size:
                raise RuleInvariantError(f"{rule.name}: output {t.tokens()} not shorter than input ({size} tokens)")
        relation = rule.relation or classify(real.cue, rule.environment, lexicon)
        sentences = [(lower_initial(t), c) for t, c in real.sentences]
        constituency = rule.constituency
        if constituency is Constituency.SUBORDINATE and relation in MULTINUCLEAR and len(sentences) > 1:
            constituency = Constituency.COORDINATE
        if constituency is Constituency.COORDINATE:
            sentences = [(t, False) for t, _ in sentences]
        return RuleOutcome(tuple(sentences), constituency, tuple(real.cue), relation,
                           tuple(real.contexts), rule.name)
    return None


# -- phrasal disembedding ----------------------------------------------------

@dataclass(frozen=True)
class PhrasalRule:
    name: str
    pattern: pat.Pattern
    relation: Relation
    target: str
    guard: Callable[[pat.MatchResult], bool]
    classify_cue: bool = True


def _is_copular_only(vp: ParseTree, target: ParseTree) -> bool:
    verbs = [c for c in vp.children if c.is_preterminal and c.category in VERB_TAGS]
    others = [c for c in vp.children if c not in verbs and c is not target and not _is_punct(c)]
    return bool(verbs) and verbs[-1].word.lower() in (set(BE_FINITE) | {"be", "been", "being"}) and not others  # type: ignore[union-attr]


def _purpose_guard(m: pat.MatchResult) -> bool:
    inner = m["infvp"]
    if not inner.children or inner.children[0].category != "TO":
        return False
    # an infinitive right after the verb is its complement ("fail to increase")
    return any(c.category in ("NP", "PP") or (c.is_preterminal and c.category == ",") for c in m.gaps["pre"])


def _temporal_guard(m: pat.MatchResult) -> bool:
    prep = (m["prep"].word or "").lower()
    if prep not in TEMPORAL_PREPS:
        return False
    words = {w.lower() for w in m["obj"].tokens()}
    if not words & (MONTHS | WEEKDAYS | DAY_WORDS):
        return False
    # "may" is a month only when capitalized and tagged as a proper noun
    if words & (MONTHS | WEEKDAYS | DAY_WORDS) == {"may"}:
        if not any(p.word == "May" and p.category == "NNP" for p in m["obj"].preterminals()):
            return False
    parent = m["host"]
    return not (parent.category == "VP" and _is_copular_only(parent, m["pp"]))


def _spatial_guard(m: pat.MatchResult) -> bool:
    return m["pp"].label.endswith("-LOC") or m["obj"].label.endswith("-LOC")


PHRASAL_RULES: tuple[PhrasalRule, ...] = (
    PhrasalRule("purpose_infinitive",
                pat.compile("VP=host (z:pre S=inf (VP=infvp) z:post)"),
                Relation.PURPOSE, "inf", _purpose_guard),
    PhrasalRule("temporal_pp",
                pat.compile("VP|S=host (... PP=pp (IN|TO=prep NP=obj) ...)"),
                Relation.TEMPORAL, "pp", _temporal_guard),
    PhrasalRule("spatial_pp",
                pat.compile("VP|S=host (... PP=pp (IN|TO=prep NP=obj) ...)"),
                Relation.SPATIAL, "pp", _spatial_guard, classify_cue=False),
)


def phrasal_sites(rule: PhrasalRule, tree: ParseTree) -> list[pat.MatchResult]:
    """All places where a phrasal rule would fire, in preorder."""
    return [m for m in pat.iter_matches(rule.pattern, tree) if rule.guard(m)]


def phrasal_disembed(tree: ParseTree, lexicon: CueLexicon | None = None,
                     rules: Sequence[PhrasalRule] = PHRASAL_RULES) -> tuple[ParseTree, list[SimpleContext]]:
    """Remove contextual phrases from a sentence, returning them as simple contexts.

    Rules run in order; each fires repeatedly, leftmost site first.
    """
    lexicon = lexicon or default_lexicon()
    contexts: list[SimpleContext] = []
    for rule in rules:
        while True:
            sites = phrasal_sites(rule, tree)
            if not sites:
                break
            m = sites[0]
            phrase = m[rule.target]
            relation = rule.relation
            if rule.classify_cue:
                first = phrase.leaves()[0].token or ""
                found = classify([first], "phrasal", lexicon)
                if found is not Relation.UNKNOWN:
                    relation = found
            if len(phrase.tokens()) >= len(tree.tokens()):
                break
            contexts.append(make_context(relation, phrase))
            tree = as_sentence(remove(tree, [phrase]))
    return tree, contexts
