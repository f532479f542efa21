"""Penn-Treebank constituency trees: parsing, serialization, surgery, heads.

Trees are immutable.  A word is a leaf node (``token`` set, no children);
a preterminal is a tag node with exactly one leaf child.  Every node
carries ``span``, its half-open token interval in the tree it belongs to,
and every leaf carries ``source``: the index of the word in the original
input sentence, or ``None`` for words synthesized during rewriting.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Callable, Iterable, Iterator, NamedTuple, Sequence

VERB_TAGS = frozenset({"VB", "VBD", "VBG", "VBN", "VBP", "VBZ"})
NOUN_TAGS = frozenset({"NN", "NNS", "NNP", "NNPS", "PRP"})
PUNCT_TAGS = frozenset({",", ".", ":", "``", "''", "-LRB-", "-RRB-"})


class PTBParseError(ValueError):
    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} (offset {offset})")
        self.offset = offset


class TokenSpan(NamedTuple):
    start: int
    end: int

    def __len__(self) -> int:  # type: ignore[override]
        return self.end - self.start


class Head(NamedTuple):
    token: str
    span: TokenSpan
    source: int | None


@dataclass(frozen=True)
class ParseTree:
    label: str
    children: tuple["ParseTree", ...] = ()
    token: str | None = None
    span: TokenSpan = TokenSpan(0, 0)
    source: int | None = field(default=None, compare=False)

    @property
    def is_leaf(self) -> bool:
        return self.token is not None

    @property
    def is_preterminal(self) -> bool:
        return len(self.children) == 1 and self.children[0].is_leaf

    @property
    def category(self) -> str:
        """Label without function tags: ``NP-SBJ`` -> ``NP``; ``-LRB-`` stays."""
        if self.label.startswith("-"):
            return self.label
        return self.label.split("-", 1)[0].split("=", 1)[0] or self.label

    @property
    def word(self) -> str | None:
        """The word of a preterminal, else None."""
        return self.children[0].token if self.is_preterminal else None

    def leaves(self) -> list["ParseTree"]:
        if self.is_leaf:
            return [self]
        out: list[ParseTree] = []
        for child in self.children:
            out.extend(child.leaves())
        return out

    def tokens(self) -> list[str]:
        return [leaf.token for leaf in self.leaves()]  # type: ignore[misc]

    def sources(self) -> list[int | None]:
        return [leaf.source for leaf in self.leaves()]

    def preterminals(self) -> list["ParseTree"]:
        return [n for n in self.preorder() if n.is_preterminal]

    def preorder(self) -> Iterator["ParseTree"]:
        yield self
        for child in self.children:
            yield from child.preorder()

    def __len__(self) -> int:
        return self.span.end - self.span.start

    def __str__(self) -> str:
        return serialize_ptb(self)


# -- construction -----------------------------------------------------------

def leaf(token: str, source: int | None = None) -> ParseTree:
    return ParseTree(token, (), token, TokenSpan(0, 1), source)


def preterminal(tag: str, token: str, source: int | None = None) -> ParseTree:
    return ParseTree(tag, (leaf(token, source),), None, TokenSpan(0, 1))


def node(label: str, children: Iterable[ParseTree]) -> ParseTree:
    """Build an inner node; spans are fixed up by :func:`reindex`."""
    kids = tuple(children)
    if not kids:
        raise ValueError(f"empty constituent {label!r}")
    return ParseTree(label, kids)


def reindex(tree: ParseTree, start: int = 0) -> ParseTree:
    """Return a copy whose spans are assigned left to right from ``start``."""
    if tree.is_leaf:
        return ParseTree(tree.label, (), tree.token, TokenSpan(start, start + 1), tree.source)
    kids = []
    pos = start
    for child in tree.children:
        child = reindex(child, pos)
        pos = child.span.end
        kids.append(child)
    return ParseTree(tree.label, tuple(kids), None, TokenSpan(start, pos))


# -- parsing ----------------------------------------------------------------

_LEX = re.compile(r"\(|\)|[^\s()]+")


def _lex(text: str) -> list[tuple[str, int]]:
    return [(m.group(), m.start()) for m in _LEX.finditer(text)]


def _parse_at(toks: list[tuple[str, int]], i: int, text: str, counter: list[int]) -> tuple[ParseTree, int]:
    tok, off = toks[i]
    assert tok == "("
    i += 1
    if i >= len(toks):
        raise PTBParseError("unbalanced brackets", len(text))
    tok, off = toks[i]
    if tok == ")":
        raise PTBParseError("empty constituent", off)
    if tok == "(":
        label = "ROOT"  # PTB files write the outer wrapper as an unlabeled bracket
    else:
        label = tok
        i += 1
    kids: list[ParseTree] = []
    word: tuple[str, int] | None = None
    while True:
        if i >= len(toks):
            raise PTBParseError("unbalanced brackets", len(text))
        tok, off = toks[i]
        if tok == ")":
            i += 1
            break
        if tok == "(":
            if word is not None:
                raise PTBParseError("token at non-preterminal", word[1])
            child, i = _parse_at(toks, i, text, counter)
            kids.append(child)
        else:
            if kids or word is not None:
                raise PTBParseError("token at non-preterminal", off)
            word = (tok, off)
            i += 1
    if word is not None:
        idx = counter[0]
        counter[0] += 1
        return ParseTree(label, (ParseTree(word[0], (), word[0], TokenSpan(idx, idx + 1), idx),), None,
                         TokenSpan(idx, idx + 1)), i
    if not kids:
        raise PTBParseError("empty constituent", off)
    return ParseTree(label, tuple(kids), None, TokenSpan(kids[0].span.start, kids[-1].span.end)), i


def parse_ptb(text: str) -> ParseTree:
    """Parse one bracketed tree.  Raises :class:`PTBParseError` with an offset."""
    toks = _lex(text)
    if not toks:
        raise PTBParseError("empty input", 0)
    if toks[0][0] != "(":
        raise PTBParseError("expected '('", toks[0][1])
    tree, i = _parse_at(toks, 0, text, [0])
    if i != len(toks):
        raise PTBParseError("trailing material after tree", toks[i][1])
    return tree


def read_documents(text: str) -> list[list[ParseTree]]:
    """Split a tree file into documents.

    Trees may span several lines; a tree ends where its brackets balance.
    Blank lines separate documents.  Offsets in errors are file offsets.
    """
    docs: list[list[ParseTree]] = []
    current: list[ParseTree] = []
    depth = 0
    start = None
    line_start = 0
    for line in text.splitlines(keepends=True):
        if depth == 0 and not line.strip():
            if current:
                docs.append(current)
                current = []
            line_start += len(line)
            continue
        for m in _LEX.finditer(line):
            tok = m.group()
            pos = line_start + m.start()
            if depth == 0:
                if tok != "(":
                    raise PTBParseError("expected '('", pos)
                start = pos
            if tok == "(":
                depth += 1
            elif tok == ")":
                depth -= 1
                if depth < 0:
                    raise PTBParseError("unbalanced brackets", pos)
                if depth == 0:
                    chunk = text[start:pos + 1]
                    try:
                        current.append(parse_ptb(chunk))
                    except PTBParseError as exc:
                        raise PTBParseError(str(exc).rsplit(" (offset", 1)[0], start + exc.offset) from None
        line_start += len(line)
    if depth != 0:
        raise PTBParseError("unbalanced brackets", len(text))
    if current:
        docs.append(current)
    return docs


# -- serialization ----------------------------------------------------------

def serialize_ptb(tree: ParseTree, root: bool = False) -> str:
    """Single-line bracketing.  ``root=True`` adds a ROOT wrapper if absent."""
    if root and tree.label != "ROOT":
        tree = ParseTree("ROOT", (tree,), None, tree.span)
    if tree.is_leaf:
        return tree.token  # type: ignore[return-value]
    return "(" + tree.label + " " + " ".join(serialize_ptb(c) for c in tree.children) + ")"


def yield_text(tree: ParseTree) -> list[str]:
    return tree.tokens()


_NO_SPACE_BEFORE = frozenset({",", ".", ";", ":", "!", "?", "%", ")", "]", "}", "''", "-RRB-", "-RSB-", "-RCB-"})
_NO_SPACE_AFTER = frozenset({"(", "[", "{", "``", "$", "-LRB-", "-LSB-", "-LCB-"})


_UNESCAPE = {"-LRB-": "(", "-RRB-": ")", "-LSB-": "[", "-RSB-": "]", "-LCB-": "{", "-RCB-": "}",
             "``": '"', "''": '"'}


def detokenize(tokens: Sequence[str]) -> str:
    """Join tokens, attaching closing punctuation to the previous word.

    Clitics such as ``'s`` keep their space, as the parser tokenized them.
    Bracket and quote escapes are turned back into plain characters.
    """
    out: list[str] = []
    glue = True
    for tok in tokens:
        if out and not glue and tok not in _NO_SPACE_BEFORE:
            out.append(" ")
        out.append(_UNESCAPE.get(tok, tok))
        glue = tok in _NO_SPACE_AFTER
    return "".join(out)


# -- navigation -------------------------------------------------------------

def clause_root(tree: ParseTree) -> ParseTree | None:
    """The topmost S-category node in preorder."""
    for n in tree.preorder():
        if not n.is_leaf and n.category == "S":
            return n
    return None


def head_verb(sentence: ParseTree) -> Head | None:
    """Last verb on the main VP chain of the topmost clause.

    Also accepts a bare VP (used when heads are taken from relation phrases).
    """
    top = sentence
    while top.category == "ROOT" and len(top.children) == 1:
        top = top.children[0]
    if top.category == "VP":
        vp: ParseTree | None = top
    else:
        s = clause_root(sentence)
        if s is None:
            return None
        vp = next((c for c in s.children if c.category == "VP"), None)
    found: ParseTree | None = None
    while vp is not None:
        for c in vp.children:
            if c.is_preterminal and c.category in VERB_TAGS:
                found = c
        vp = next((c for c in reversed(vp.children) if c.category == "VP" and not c.is_leaf), None)
    if found is None:
        return None
    w = found.children[0]
    return Head(w.token, w.span, w.source)  # type: ignore[arg-type]


def head_noun(phrase: ParseTree) -> list[str]:
    """Rightmost noun of every NP that has a noun among its own children."""
    heads: list[str] = []
    candidates = [phrase] if phrase.is_preterminal else list(phrase.preorder())
    for n in candidates:
        if n.is_preterminal and n is phrase and n.category in NOUN_TAGS:
            heads.append(n.word)  # type: ignore[arg-type]
        elif n.category == "NP" and not n.is_leaf:
            nouns = [c for c in n.children if c.is_preterminal and c.category in NOUN_TAGS]
            if nouns:
                heads.append(nouns[-1].word)  # type: ignore[arg-type]
    return heads


# -- surgery ----------------------------------------------------------------

def _rebuild(tree: ParseTree, fn: Callable[[ParseTree], list[ParseTree] | None]) -> list[ParseTree]:
    """Rewrite bottom-up.  ``fn`` returns replacements for a node or None to keep it."""
    repl = fn(tree)
    if repl is not None:
        return repl
    if tree.is_leaf:
        return [tree]
    kids: list[ParseTree] = []
    changed = False
    for child in tree.children:
        out = _rebuild(child, fn)
        if len(out) != 1 or out[0] is not child:
            changed = True
        kids.extend(out)
    if not changed:
        return [tree]
    if not kids:
        return []
    return [ParseTree(tree.label, tuple(kids), None, tree.span)]


def _is_comma(t: ParseTree) -> bool:
    return t.is_preterminal and t.category == ","


def _closes(t: ParseTree) -> bool:
    return t.is_preterminal and t.category in (",", ".", ":")


def remove(tree: ParseTree, targets: Iterable[ParseTree], absorb_commas: bool = True) -> ParseTree:
    """Delete the given subtrees (matched by identity), pruning emptied parents.

    With ``absorb_commas`` a comma left dangling by a deletion goes too:
    the comma before the removed run when it is followed by another comma,
    by closing punctuation, or ends the constituent, or the comma after it when the run started it.
    """
    doomed = {id(t) for t in targets}

    def fn(t: ParseTree) -> list[ParseTree] | None:
        if id(t) in doomed:
            return []
        if t.is_leaf or not any(id(c) in doomed for c in t.children):
            return None
        kids = list(t.children)
        gone = [id(c) in doomed for c in kids]
        if absorb_commas:
            i = 0
            while i < len(kids):
                if not gone[i]:
                    i += 1
                    continue
                j = i
                while j < len(kids) and gone[j]:
                    j += 1
                prev = next((k for k in range(i - 1, -1, -1) if not gone[k]), None)
                nxt = next((k for k in range(j, len(kids)) if not gone[k]), None)
                if prev is not None and _is_comma(kids[prev]) and (nxt is None or _closes(kids[nxt])):
                    gone[prev] = True
                elif prev is None and nxt is not None and _is_comma(kids[nxt]):
                    gone[nxt] = True
                i = j
        kept = []
        for c, g in zip(kids, gone):
            if not g:
                kept.extend(_rebuild(c, fn))
        return [ParseTree(t.label, tuple(kept), None, t.span)] if kept else []

    out = _rebuild(tree, fn)
    if not out:
        raise ValueError("removal would delete the whole tree")
    return reindex(out[0])


def replace(tree: ParseTree, target: ParseTree, replacement: Sequence[ParseTree]) -> ParseTree:
    """Substitute ``target`` (by identity) with a sequence of subtrees."""
    def fn(t: ParseTree) -> list[ParseTree] | None:
        return list(replacement) if t is target else None
    out = _rebuild(tree, fn)
    if len(out) != 1:
        raise ValueError("cannot replace the root with a sequence")
    return reindex(out[0])


def trim_punct(tree: ParseTree) -> ParseTree:
    """Drop punctuation preterminals at the left and right edges of the tree."""
    while True:
        lv = tree.preterminals()
        doomed = []
        if lv and lv[-1].category in PUNCT_TAGS:
            doomed.append(lv[-1])
        if lv and lv[0].category in PUNCT_TAGS and (not doomed or lv[0] is not lv[-1]):
            doomed.append(lv[0])
        if not doomed or len(doomed) >= len(lv):
            return tree
        tree = remove(tree, doomed, absorb_commas=False)


def as_sentence(tree: ParseTree) -> ParseTree:
    """Wrap a clause as ``ROOT(S ...)``, strip edge punctuation and reindex."""
    if tree.category != "ROOT":
        if tree.category != "S":
            tree = ParseTree("S", (tree,), None, tree.span)
        tree = ParseTree("ROOT", (tree,), None, tree.span)
    return reindex(trim_punct(reindex(tree)))
