"""Two-layer sentence disembedding and context-aware relation extraction."""

from .discourse import DiscourseTree, SentenceLeaf, render_tree, transform
from .extraction import ExtractionResult, Proposition, extract_default, find_representative, link
from .rhetorical import Relation, classify, default_lexicon
from .rules import catalog, phrasal_disembed
from .tree import ParseTree, parse_ptb, read_documents

__version__ = "0.1.0"

__all__ = [
    "DiscourseTree", "ExtractionResult", "ParseTree", "Proposition", "Relation", "SentenceLeaf",
    "catalog", "classify", "default_lexicon", "extract_default", "find_representative", "link",
    "parse_ptb", "phrasal_disembed", "read_documents", "render_tree", "transform",
]
