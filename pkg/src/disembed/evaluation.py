"""Head-based matching of extractions against n-ary gold relations, with PR/AUC metrics.

File format (both gold and system), one extraction per line, tab-separated::

    <sentence id> <relation> <arg> [<arg> ...] [<confidence>]

A trailing confidence column is only read from system files: a last field
that parses as a number in (0, 1] is the confidence, otherwise it is an
argument and the confidence defaults to 1.0.  Any field may instead hold
a bracketed parse (starting with ``(``); its head is then found
structurally.  Empty fields are rejected.
"""

from __future__ import annotations

import csv
import io
import re
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

from .extraction import ExtractionResult
from .tree import PTBParseError, head_noun, head_verb, parse_ptb


class EvalFormatError(ValueError):
    def __init__(self, message: str, path: str | None, line: int):
        where = f"{path}:{line}" if path else f"line {line}"
        super().__init__(f"{where}: {message}")
        self.line = line


@dataclass(frozen=True)
class GoldExtraction:
    sentence_id: str
    relation: str
    arguments: tuple[str, ...]


@dataclass(frozen=True)
class SystemExtraction:
    sentence_id: str
    relation: str
    arguments: tuple[str, ...]
    confidence: float = 1.0


@dataclass(frozen=True)
class PRPoint:
    threshold: float
    precision: float
    recall: float


@dataclass(frozen=True)
class EvalReport:
    points: tuple[PRPoint, ...]
    auc: float
    average_precision: float
    precision: float
    recall: float
    n_system: int
    n_gold: int
    n_correct: int


# -- heads -------------------------------------------------------------------

# Words skipped when picking the head of a relation phrase from plain text.
_REL_SKIP = frozenset("""
    a an the to of in on at by for from with about as into onto over under up down out off
    through after before during since than via upon within without between against among
    not n't never also still just
""".split())
_WORD = re.compile(r"\w", re.UNICODE)


def _tokens(text: str) -> list[str]:
    return text.split()


def relation_head(text: str) -> str | None:
    """Head verb of a relation phrase (plain text or bracketed parse)."""
    if text.lstrip().startswith("("):
        try:
            h = head_verb(parse_ptb(text))
        except PTBParseError:
            h = None
        return h.token.lower() if h else None
    words = [w for w in _tokens(text) if _WORD.search(w)]
    for w in reversed(words):
        if w.lower() not in _REL_SKIP and not w.isdigit():
            return w.lower()
    return words[-1].lower() if words else None


def argument_head(text: str) -> str | None:
    """Head noun of an argument: last word token, or the structural head of a parse."""
    if text.lstrip().startswith("("):
        try:
            heads = head_noun(parse_ptb(text))
        except PTBParseError:
            heads = []
        if heads:
            return heads[0].lower()
    words = [w for w in _tokens(text) if _WORD.search(w)]
    return words[-1].lower() if words else None


def _argument_words(text: str) -> set[str]:
    if text.lstrip().startswith("("):
        try:
            return {w.lower() for w in parse_ptb(text).tokens()}
        except PTBParseError:
            pass
    return {w.lower() for w in _tokens(text)}


# -- lemmas ------------------------------------------------------------------

IRREGULAR = {
    "am": "be", "is": "be", "are": "be", "was": "be", "were": "be", "been": "be", "being": "be", "'s": "be",
    "has": "have", "had": "have", "having": "have",
    "does": "do", "did": "do", "done": "do",
    "went": "go", "gone": "go", "goes": "go",
    "said": "say", "made": "make", "took": "take", "taken": "take", "got": "get", "gotten": "get",
    "gave": "give", "given": "give", "came": "come", "saw": "see", "seen": "see", "knew": "know",
    "known": "know", "found": "find", "thought": "think", "told": "tell", "became": "become",
    "left": "leave", "felt": "feel", "brought": "bring", "began": "begin", "begun": "begin",
    "kept": "keep", "held": "hold", "wrote": "write", "written": "write", "stood": "stand",
    "heard": "hear", "meant": "mean", "met": "meet", "ran": "run", "paid": "pay", "sat": "sit",
    "spoke": "speak", "spoken": "speak", "led": "lead", "grew": "grow", "grown": "grow",
    "lost": "lose", "fell": "fall", "fallen": "fall", "sent": "send", "built": "build",
    "understood": "understand", "drew": "draw", "drawn": "draw", "broke": "break", "broken": "break",
    "spent": "spend", "rose": "rise", "risen": "rise", "drove": "drive", "driven": "drive",
    "bought": "buy", "wore": "wear", "worn": "wear", "chose": "choose", "chosen": "choose",
    "sold": "sell", "won": "win", "taught": "teach", "caught": "catch", "fought": "fight",
    "threw": "throw", "thrown": "throw", "shown": "show", "ate": "eat", "eaten": "eat",
    "flew": "fly", "flown": "fly", "forgot": "forget", "forgotten": "forget", "hid": "hide",
    "hidden": "hide", "struck": "strike", "sought": "seek", "laid": "lay", "lain": "lie",
}


def lemma_candidates(word: str) -> set[str]:
    """Possible base forms of a verb: the irregular table plus suffix stripping."""
    w = word.lower()
    if w in IRREGULAR:
        return {IRREGULAR[w]}
    out = {w}
    if w.endswith("ies") and len(w) > 4:
        out.add(w[:-3] + "y")
    if w.endswith("ied") and len(w) > 4:
        out.add(w[:-3] + "y")
    for suf in ("es", "s", "ed", "d", "ing"):
        if w.endswith(suf) and len(w) > len(suf) + 2:
            stem = w[: -len(suf)]
            out.add(stem)
            if suf == "ing":
                out.add(stem + "e")
            if suf in ("ed", "ing") and len(stem) > 2 and stem[-1] == stem[-2]:
                out.add(stem[:-1])
    return out


def heads_agree(a: str | None, b: str | None, lemma: bool = False) -> bool:
    if a is None or b is None:
        return False
    if a.lower() == b.lower():
        return True
    return lemma and bool(lemma_candidates(a) & lemma_candidates(b))


# -- matching ----------------------------------------------------------------

def _max_bipartite(adj: list[list[int]]) -> int:
    owner: dict[int, int] = {}

    def augment(i: int, seen: set[int]) -> bool:
        for j in adj[i]:
            if j in seen:
                continue
            seen.add(j)
            if j not in owner or augment(owner[j], seen):
                owner[j] = i
                return True
        return False

    return sum(augment(i, set()) for i in range(len(adj)))


def match(sys: SystemExtraction, gold: GoldExtraction, lemma: bool = False) -> bool:
    """Relation heads agree and at least two gold argument heads (one for unary gold)
    occur in distinct system arguments."""
    if sys.sentence_id != gold.sentence_id:
        return False
    if not heads_agree(relation_head(sys.relation), relation_head(gold.relation), lemma):
        return False
    sys_words = [_argument_words(a) for a in sys.arguments]
    adj = []
    for g in gold.arguments:
        h = argument_head(g)
        adj.append([j for j, ws in enumerate(sys_words) if h is not None and h in ws])
    need = min(2, len(gold.arguments))
    return _max_bipartite(adj) >= need


def assign(sys: Sequence[SystemExtraction], gold: Sequence[GoldExtraction],
           lemma: bool = False) -> list[int | None]:
    """Greedy one-to-one assignment: system extractions by descending confidence
    (ties by position) each take the first unclaimed gold item they match."""
    order = sorted(range(len(sys)), key=lambda i: (-sys[i].confidence, i))
    by_sent: dict[str, list[int]] = {}
    for gi, g in enumerate(gold):
        by_sent.setdefault(g.sentence_id, []).append(gi)
    taken: set[int] = set()
    out: list[int | None] = [None] * len(sys)
    for i in order:
        for gi in by_sent.get(sys[i].sentence_id, []):
            if gi not in taken and match(sys[i], gold[gi], lemma):
                taken.add(gi)
                out[i] = gi
                break
    return out


def _auc(points: Sequence[PRPoint]) -> float:
    if not points:
        return 0.0
    area = 0.0
    prev_r, prev_p = 0.0, points[0].precision
    for pt in points:
        area += (pt.recall - prev_r) * (pt.precision + prev_p) / 2.0
        prev_r, prev_p = pt.recall, pt.precision
    return area


def _average_precision(points: Sequence[PRPoint]) -> float:
    prev = 0.0
    picked = []
    for pt in points:
        if pt.recall > prev:
            picked.append(pt.precision)
            prev = pt.recall
    return sum(picked) / len(picked) if picked else 0.0


def pr_curve(sys: Sequence[SystemExtraction], gold: Sequence[GoldExtraction],
             lemma: bool = False) -> tuple[list[PRPoint], float]:
    """PR points at each distinct confidence (descending) and the trapezoid AUC."""
    return _curve(sys, gold, lemma)[:2]  # type: ignore[return-value]


def _curve(sys, gold, lemma):
    assigned = assign(sys, gold, lemma)
    order = sorted(range(len(sys)), key=lambda i: (-sys[i].confidence, i))
    points: list[PRPoint] = []
    emitted = correct = 0
    for k, i in enumerate(order):
        emitted += 1
        correct += assigned[i] is not None
        last_at_level = k + 1 == len(order) or sys[order[k + 1]].confidence != sys[i].confidence
        if last_at_level:
            recall = correct / len(gold) if gold else 0.0
            points.append(PRPoint(sys[i].confidence, correct / emitted, recall))
    return points, _auc(points), correct


def evaluate(sys: Sequence[SystemExtraction], gold: Sequence[GoldExtraction], lemma: bool = False) -> EvalReport:
    points, auc, correct = _curve(sys, gold, lemma)
    precision = correct / len(sys) if sys else 0.0
    recall = correct / len(gold) if gold else 0.0
    return EvalReport(tuple(points), auc, _average_precision(points), precision, recall,
                      len(sys), len(gold), correct)


# -- I/O ---------------------------------------------------------------------

def _confidence(field: str) -> float | None:
    try:
        v = float(field)
    except ValueError:
        return None
    return v if 0.0 < v <= 1.0 else None


def _rows(text: str, path: str | None, min_fields: int) -> list[tuple[int, list[str]]]:
    rows = []
    for lineno, line in enumerate(text.splitlines(), 1):
        if not line.strip() or line.startswith("#"):
            continue
        fields = line.split("\t")
        for k, f in enumerate(fields, 1):
            if not f.strip():
                raise EvalFormatError(f"empty field {k} (stray tab?)", path, lineno)
        if len(fields) < min_fields:
            raise EvalFormatError(f"expected at least {min_fields} tab-separated fields, got {len(fields)}",
                                  path, lineno)
        rows.append((lineno, [f.strip() for f in fields]))
    return rows


def parse_gold(text: str, path: str | None = None) -> list[GoldExtraction]:
    return [GoldExtraction(f[0], f[1], tuple(f[2:])) for _, f in _rows(text, path, 3)]


def parse_system(text: str, path: str | None = None) -> list[SystemExtraction]:
    out = []
    for lineno, f in _rows(text, path, 3):
        conf = 1.0
        if len(f) > 3:
            c = _confidence(f[-1])
            if c is not None:
                conf, f = c, f[:-1]
        out.append(SystemExtraction(f[0], f[1], tuple(f[2:]), conf))
    return out


def load_gold(path: str | Path) -> list[GoldExtraction]:
    return parse_gold(Path(path).read_text(encoding="utf-8"), str(path))


def load_system(path: str | Path) -> list[SystemExtraction]:
    return parse_system(Path(path).read_text(encoding="utf-8"), str(path))


def system_from_result(result: ExtractionResult, sentence_ids: Sequence[str] | None = None) -> list[SystemExtraction]:
    """Arguments are arg1, arg2 (when present) and each simple-context text."""
    from .tree import detokenize

    out = []
    for p in result.propositions:
        sid = sentence_ids[p.sentence_index] if sentence_ids else str(p.sentence_index + 1)
        args = [detokenize(p.arg1)]
        if p.arg2:
            args.append(detokenize(p.arg2))
        args += [detokenize(t) for _, t in p.simple_args]
        out.append(SystemExtraction(sid, detokenize(p.rel), tuple(args), p.confidence))
    return out


def format_system(extractions: Sequence[SystemExtraction]) -> str:
    return "".join("\t".join([e.sentence_id, e.relation, *e.arguments, repr(e.confidence)]) + "\n"
                   for e in extractions)


def curve_csv(points: Sequence[PRPoint]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["threshold", "precision", "recall"])
    for p in points:
        w.writerow([repr(p.threshold), repr(p.precision), repr(p.recall)])
    return buf.getvalue()
