"""Rhetorical relations and cue-phrase classification."""

from __future__ import annotations

import enum
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources
from pathlib import Path
from typing import Sequence


class Relation(enum.Enum):
    CONTRAST = "Contrast"
    CONDITION = "Condition"
    LIST = "List"
    TEMPORAL = "Temporal"
    PURPOSE = "Purpose"
    CAUSE = "Cause"
    RESULT = "Result"
    ATTRIBUTION = "Attribution"
    BACKGROUND = "Background"
    ELABORATION = "Elaboration"
    DISJUNCTION = "Disjunction"
    NOUN_BASED = "NounBased"
    SPATIAL = "Spatial"
    UNKNOWN = "Unknown"

    @property
    def tag(self) -> str:
        """Uppercase form used in the flat output (``NOUN_BASED``)."""
        return self.name

    @classmethod
    def parse(cls, text: str) -> "Relation":
        key = text.strip()
        for rel in cls:
            if key in (rel.name, rel.value) or key.upper() == rel.name or key.upper().replace("_", "") == rel.name.replace("_", ""):
                return rel
        raise ValueError(f"unknown relation {text!r}")


# Relations whose spans are all nuclei: a split classified this way yields
# core sentences on both sides even when the rule is a subordination rule.
MULTINUCLEAR = frozenset({Relation.CONTRAST, Relation.LIST, Relation.DISJUNCTION})

ENVIRONMENTS = ("subordination-leading", "subordination-trailing", "coordination", "phrasal")


class LexiconError(ValueError):
    def __init__(self, message: str, line: int):
        super().__init__(f"line {line}: {message}")
        self.line = line


@dataclass(frozen=True)
class CueEntry:
    words: tuple[str, ...]
    environment: str
    relation: Relation
    priority: int  # file order, 0 is highest


@dataclass(frozen=True)
class CueMatch:
    entry: CueEntry
    start: int
    end: int


@dataclass(frozen=True)
class CueLexicon:
    entries: tuple[CueEntry, ...] = ()

    def in_environment(self, environment: str) -> list[CueEntry]:
        return [e for e in self.entries if e.environment == environment]


def load_lexicon(text: str) -> CueLexicon:
    """Parse ``environment<TAB>cue phrase<TAB>RELATION`` lines.

    Blank lines and ``#`` comments are skipped.  Priority is file order.
    """
    entries: list[CueEntry] = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.rstrip("\r\n")
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        parts = line.split("\t")
        if len(parts) != 3:
            raise LexiconError(f"expected 3 tab-separated fields, got {len(parts)}", lineno)
        env, cue, rel = (p.strip() for p in parts)
        if env not in ENVIRONMENTS:
            raise LexiconError(f"unknown environment {env!r}", lineno)
        words = tuple(w.lower() for w in cue.split())
        if not words:
            raise LexiconError("empty cue phrase", lineno)
        try:
            relation = Relation.parse(rel)
        except ValueError as exc:
            raise LexiconError(str(exc), lineno) from None
        entries.append(CueEntry(words, env, relation, len(entries)))
    return CueLexicon(tuple(entries))


@lru_cache(maxsize=1)
def default_lexicon() -> CueLexicon:
    text = resources.files("disembed.data").joinpath("cues.tsv").read_text(encoding="utf-8")
    return load_lexicon(text)


def lexicon_from_path(path: str | Path) -> CueLexicon:
    return load_lexicon(Path(path).read_text(encoding="utf-8"))


def _occurrences(words: tuple[str, ...], phrase: list[str]) -> int | None:
    n = len(words)
    for i in range(len(phrase) - n + 1):
        if tuple(phrase[i:i + n]) == words:
            return i
    return None


def classify_match(cue_phrase: Sequence[str], environment: str, lexicon: CueLexicon) -> CueMatch | None:
    """Longest entry occurring in the phrase; ties go to the earlier entry."""
    phrase = [w.lower() for w in cue_phrase]
    best: CueMatch | None = None
    for entry in lexicon.in_environment(environment):
        at = _occurrences(entry.words, phrase)
        if at is None:
            continue
        if best is None or len(entry.words) > len(best.entry.words):
            best = CueMatch(entry, at, at + len(entry.words))
    return best


def classify(cue_phrase: Sequence[str], environment: str, lexicon: CueLexicon | None = None) -> Relation:
    hit = classify_match(cue_phrase, environment, lexicon or default_lexicon())
    return hit.entry.relation if hit else Relation.UNKNOWN
