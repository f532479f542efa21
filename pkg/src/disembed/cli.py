"""Command-line interface: ``disembed extract | simplify | eval``.

Payload goes to stdout, statistics and warnings to stderr.  Exit codes:
0 success, 1 usage error, 2 input error, 3 internal invariant violation.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from collections import Counter
from dataclasses import dataclass, fields
from pathlib import Path
from typing import Sequence, TextIO

from . import __version__
from .discourse import DEFAULT_MAX_DEPTH, DepthLimitError, render_tree, transform
from .evaluation import EvalFormatError, curve_csv, evaluate, load_gold, load_system
from .extraction import CONFIDENCE_MODES, SubprocessAdapter, link, run_external_extractor
from .rhetorical import LexiconError, default_lexicon, lexicon_from_path
from .rules import RuleInvariantError, catalog, load_rule_order
from .serialization import render_flat, render_structured
from .tree import PTBParseError, read_documents

CONFIG_ENV = "DISEMBED_CONFIG"
EXIT_OK, EXIT_USAGE, EXIT_INPUT, EXIT_INVARIANT = 0, 1, 2, 3

log = logging.getLogger("disembed")


class InputError(Exception):
    pass


@dataclass
class PipelineConfig:
    rules: str | None = None
    cues: str | None = None
    format: str = "flat"
    phrasal: bool = True
    max_depth: int = DEFAULT_MAX_DEPTH
    extractor: str | None = None
    confidence: str = "layer"

    def validate(self) -> None:
        if self.format not in ("flat", "structured"):
            raise InputError(f"format must be flat or structured, not {self.format!r}")
        if not isinstance(self.max_depth, int) or self.max_depth < 1:
            raise InputError("max_depth must be an integer >= 1")
        if self.confidence not in CONFIDENCE_MODES:
            raise InputError(f"confidence must be one of {', '.join(CONFIDENCE_MODES)}")


def load_config(path: str | None) -> dict:
    if not path:
        return {}
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except OSError as exc:
        raise InputError(f"cannot read config {path}: {exc.strerror or exc}") from None
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: invalid JSON: {exc}") from None
    if not isinstance(data, dict):
        raise InputError(f"{path}: config must be a JSON object")
    known = {f.name for f in fields(PipelineConfig)}
    unknown = sorted(set(data) - known)
    if unknown:
        raise InputError(f"{path}: unknown config key(s): {', '.join(unknown)}")
    return data


def resolve_config(args: argparse.Namespace) -> PipelineConfig:
    """Flags override the config file, which overrides built-in defaults."""
    path = args.config or os.environ.get(CONFIG_ENV)
    cfg = PipelineConfig(**load_config(path))
    for name in ("rules", "cues", "format", "max_depth", "extractor", "confidence"):
        value = getattr(args, name, None)
        if value is not None:
            setattr(cfg, name, value)
    if getattr(args, "no_phrasal", False):
        cfg.phrasal = False
    cfg.validate()
    return cfg


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> None:  # usage errors exit 1, not argparse's 2
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="disembed", description="Sentence disembedding and context-aware relation extraction.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def pipeline_flags(sp: argparse.ArgumentParser) -> None:
        sp.add_argument("input", help="file of bracketed parse trees ('-' for stdin); "
                                      "blank lines separate documents")
        sp.add_argument("-o", "--output", help="write payload here instead of stdout")
        sp.add_argument("--config", help=f"JSON config file (default: ${CONFIG_ENV})")
        sp.add_argument("--rules", help="rule order file: one rule name per line")
        sp.add_argument("--cues", help="cue lexicon TSV replacing the built-in one")
        sp.add_argument("--no-phrasal", action="store_true", help="skip phrasal disembedding")
        sp.add_argument("--max-depth", type=int, help=f"recursion ceiling (default {DEFAULT_MAX_DEPTH})")
        sp.add_argument("-q", "--quiet", action="store_true", help="suppress statistics on stderr")

    ex = sub.add_parser("extract", help="simplify and extract propositions")
    pipeline_flags(ex)
    ex.add_argument("--format", choices=("flat", "structured"))
    ex.add_argument("--extractor", help="external extractor command (line protocol)")
    ex.add_argument("--confidence", choices=CONFIDENCE_MODES,
                    help="layer: 1/(1+context layer); uniform: always 1")

    sm = sub.add_parser("simplify", help="print the discourse tree")
    pipeline_flags(sm)

    ev = sub.add_parser("eval", help="score system extractions against gold")
    ev.add_argument("--gold", required=True)
    ev.add_argument("--system", required=True)
    ev.add_argument("--lemma", action="store_true", help="compare relation heads by lemma")
    ev.add_argument("--curve-out", help="write PR points as CSV")
    ev.add_argument("--plot-out", help="write a PR curve figure (PNG, PDF or SVG by suffix)")
    return p


def _read_input(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror or exc}") from None


def _load_documents(path: str):
    text = _read_input(path)
    try:
        return read_documents(text)
    except PTBParseError as exc:
        raise InputError(f"{path}: offset {exc.offset}: {exc}") from None


def _pipeline_parts(cfg: PipelineConfig):
    try:
        lexicon = lexicon_from_path(cfg.cues) if cfg.cues else default_lexicon()
    except OSError as exc:
        raise InputError(f"cannot read cue lexicon {cfg.cues}: {exc.strerror or exc}") from None
    except LexiconError as exc:
        raise InputError(f"{cfg.cues}: {exc}") from None
    if cfg.rules:
        try:
            rules = catalog(load_rule_order(cfg.rules))
        except OSError as exc:
            raise InputError(f"cannot read rule file {cfg.rules}: {exc.strerror or exc}") from None
        except (KeyError, ValueError) as exc:
            raise InputError(f"{cfg.rules}: {exc}") from None
    else:
        rules = catalog()
    return rules, lexicon


def _write(out: str, path: str | None, stdout: TextIO) -> None:
    if path:
        try:
            Path(path).write_text(out, encoding="utf-8")
        except OSError as exc:
            raise InputError(f"cannot write {path}: {exc.strerror or exc}") from None
    else:
        stdout.write(out)


def _stats_lines(leaves: int, firings: Counter, rejected: Counter, unmatched: int | None,
                 dropped: int | None, warnings: Sequence[str]) -> list[str]:
    lines = [f"leaves: {leaves}"]
    for name in sorted(firings):
        lines.append(f"rule {name}: {firings[name]}")
    for name in sorted(rejected):
        lines.append(f"rule {name} rejected: {rejected[name]}")
    if unmatched is not None:
        lines.append(f"unmatched leaves: {unmatched}")
    if dropped is not None:
        lines.append(f"dropped contexts: {dropped}")
    lines.extend(f"warning: {w}" for w in warnings)
    return lines


def cmd_pipeline(args: argparse.Namespace, stdout: TextIO, stderr: TextIO) -> int:
    cfg = resolve_config(args)
    rules, lexicon = _pipeline_parts(cfg)
    documents = _load_documents(args.input)
    firings: Counter = Counter()
    rejected: Counter = Counter()
    n_leaves = unmatched = dropped = 0
    warnings: list[str] = []
    chunks: list[str] = []
    results = []
    adapter = SubprocessAdapter(cfg.extractor) if args.command == "extract" and cfg.extractor else None
    for doc in documents:
        tree = transform(doc, rules, lexicon, phrasal=cfg.phrasal, max_depth=cfg.max_depth)
        firings.update(tree.stats.firings)
        rejected.update(tree.stats.rejected)
        n_leaves += len(tree.leaves())
        if args.command == "simplify":
            chunks.append(render_tree(tree))
            continue
        sentences = [t.tokens() for t in doc]
        if adapter is not None:
            result = run_external_extractor(tree, adapter, sentences, cfg.confidence)
        else:
            result = link(tree, sentences=sentences, confidence=cfg.confidence)
        unmatched += result.unmatched_leaves
        dropped += result.dropped_contexts
        warnings.extend(result.warnings)
        results.append(result)
        chunks.append(render_flat(result))
    if args.command == "extract" and cfg.format == "structured":
        payload = render_structured(results) if results else ""
    else:
        payload = "\n".join(chunks)
    _write(payload, args.output, stdout)
    if not args.quiet:
        is_extract = args.command == "extract"
        for line in _stats_lines(n_leaves, firings, rejected, unmatched if is_extract else None,
                                 dropped if is_extract else None, warnings):
            print(line, file=stderr)
    return EXIT_OK


def cmd_eval(args: argparse.Namespace, stdout: TextIO, stderr: TextIO) -> int:
    try:
        gold = load_gold(args.gold)
        system = load_system(args.system)
    except OSError as exc:
        raise InputError(f"cannot read {exc.filename}: {exc.strerror or exc}") from None
    except EvalFormatError as exc:
        raise InputError(str(exc)) from None
    report = evaluate(system, gold, lemma=args.lemma)
    stdout.write(
        f"system\t{report.n_system}\n"
        f"gold\t{report.n_gold}\n"
        f"correct\t{report.n_correct}\n"
        f"precision\t{report.precision:.6f}\n"
        f"recall\t{report.recall:.6f}\n"
        f"average_precision\t{report.average_precision:.6f}\n"
        f"auc\t{report.auc:.6f}\n"
    )
    if args.curve_out:
        _write(curve_csv(report.points), args.curve_out, stdout)
    if args.plot_out:
        from .plotting import plot_pr_curve

        try:
            plot_pr_curve(report.points, args.plot_out, label=Path(args.system).stem, auc=report.auc)
        except (OSError, ValueError) as exc:
            raise InputError(f"cannot write plot {args.plot_out}: {exc}") from None
    return EXIT_OK


def main(argv: Sequence[str] | None = None, stdout: TextIO | None = None, stderr: TextIO | None = None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    args = build_parser().parse_args(argv)
    logging.getLogger("disembed.extraction").setLevel(logging.ERROR)  # warnings are reported as stats
    try:
        if args.command == "eval":
            return cmd_eval(args, stdout, stderr)
        return cmd_pipeline(args, stdout, stderr)
    except InputError as exc:
        print(f"disembed: error: {exc}", file=stderr)
        return EXIT_INPUT
    except (RuleInvariantError, DepthLimitError) as exc:
        print(f"disembed: internal error: {exc}", file=stderr)
        return EXIT_INVARIANT


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
