"""Command-line interface: ``dsem build``, ``dsem query`` and ``dsem selftest``.

Exit codes: 0 ok, 1 usage, 2 input/parse, 3 capacity/io, 4 unknown word,
5 selftest failure.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

from . import semantics
from .correlation import SolverConfig
from .corpus import DEFAULT_D, DEFAULT_RELATIONS, DIRECTIONS, build_lexicon, corpus_hash, parse_files
from .errors import (
    CapacityError,
    DsemError,
    LexiconFormatError,
    MissingWordError,
    ParseError,
    UsageError,
    ValidationError,
)
from .lexicon import file_hash, load_lexicon, save_lexicon
from .quantum import von_neumann_entropy
from .selftest import FAULTS, run_selftest

EXIT_OK, EXIT_USAGE, EXIT_INPUT, EXIT_CAPACITY, EXIT_LOOKUP, EXIT_SELFTEST = range(6)


class _Exit(Exception):
    def __init__(self, code: int, message: str = ""):
        super().__init__(message)
        self.code = code


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _num(x):
    if isinstance(x, bool) or x is None or isinstance(x, (int, str)):
        return x
    x = float(x)
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    if math.isnan(x):
        return "nan"
    return float(f"{x:.9g}")


def _clean(v):
    if isinstance(v, dict):
        return {k: _clean(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_clean(x) for x in v]
    return _num(v)


def _text(x) -> str:
    if isinstance(x, bool):
        return "true" if x else "false"
    if x is None:
        return "none"
    if isinstance(x, float):
        return "inf" if x == math.inf else f"{x:.9g}"
    return str(x)


def _flatten(prefix: str, v, out: list) -> None:
    if isinstance(v, dict):
        for k, x in v.items():
            _flatten(f"{prefix}.{k}", x, out)
    elif isinstance(v, list) and v and isinstance(v[0], (dict, list)):
        for i, x in enumerate(v):
            _flatten(f"{prefix}[{i}]", x, out)
    elif isinstance(v, list):
        out.append(f"{prefix}: {' '.join(_text(x) for x in v)}")
    else:
        out.append(f"{prefix}: {_text(v)}")


def emit(record: dict, fmt: str, stream=None) -> None:
    stream = stream or sys.stdout
    record = _clean(record)
    if fmt == "json":
        stream.write(json.dumps(record) + "\n")
        return
    lines = []
    for key, value in record.items():
        _flatten(key, value, lines)
    stream.write("\n".join(lines) + "\n")


def _record(measure, value, args, lexicon_hash, seed) -> dict:
    return {"measure": measure, "value": value, "args": list(args),
            "lexicon_hash": lexicon_hash, "seed": seed}


def _split_list(s: str | None):
    if s is None:
        return None
    return [x.strip() for x in s.split(",") if x.strip()]


def cmd_build(opts) -> int:
    cfg = {}
    if opts.config:
        try:
            cfg = json.loads(Path(opts.config).read_text(encoding="utf-8"))
        except json.JSONDecodeError as exc:
            raise _Exit(EXIT_INPUT, f"invalid config file: {exc}") from exc
    relations = _split_list(opts.relations) or cfg.get("relations") or list(DEFAULT_RELATIONS)
    d = opts.d if opts.d is not None else int(cfg.get("d", DEFAULT_D))
    direction = opts.direction or cfg.get("direction", "both")
    targets = _split_list(opts.targets) or cfg.get("targets")
    upos = _split_list(opts.upos) or cfg.get("upos")
    min_count = opts.min_count if opts.min_count is not None else int(cfg.get("min_count", 1))

    docs = parse_files(opts.corpus)
    if not docs:
        raise _Exit(EXIT_INPUT, "no documents in corpus")
    lex = build_lexicon(docs, relations, d, direction, targets=targets, min_count=min_count,
                        upos=upos, source_hash=corpus_hash(opts.corpus))
    if not len(lex):
        raise _Exit(EXIT_INPUT, "no words with in-vocabulary context")
    save_lexicon(lex, opts.output)

    value = {
        "documents": len(docs),
        "sentences": sum(len(doc.sentences) for doc in docs),
        "words": len(lex),
        "space": {v.relation: v.dim for v in lex.vocabularies},
        "dim": lex.dim,
        "entries": [{"word": w, "rank": op.rank(), "entropy": von_neumann_entropy(op)}
                    for w, op in lex.operators.items()],
    }
    emit(_record("build", value, [str(opts.output)], file_hash(opts.output), opts.seed), opts.format)
    return EXIT_OK


def _solver_config(opts) -> SolverConfig:
    return SolverConfig(restarts=opts.restarts, max_iter=opts.max_iter, seed=opts.seed)


def _pair(opts, lex):
    pair = _split_list(opts.pair)
    if pair is None:
        if len(lex.relations) < 2:
            raise UsageError("lexicon has fewer than two relation subsystems")
        return list(lex.relations[:2])
    return [int(p) if p.isdigit() else p for p in pair]


def cmd_query(opts) -> int:
    lex = load_lexicon(opts.lexicon)
    lhash = file_hash(opts.lexicon)
    q = opts.query
    code = EXIT_OK

    if q == "entropy":
        args, value = [opts.word], semantics.ambiguity(opts.word, lex)
    elif q == "similarity":
        args, value = [opts.w1, opts.w2], semantics.similarity(opts.w1, opts.w2, lex)
    elif q == "entails":
        args, value = [opts.w1, opts.w2], semantics.entailment_score(opts.w1, opts.w2, lex)
    elif q == "disambiguate":
        res = semantics.disambiguate(opts.context, opts.target, lex)
        args = [opts.context, opts.target]
        value = {
            "senses": [{"index": i, "weight": float(res.senses.outcomes[i]),
                        "probability": float(res.senses.probs[i])} for i in range(res.rank)],
            "residual": res.residual,
            "outcome": res.outcome,
        }
    elif q == "correlate":
        pair = _pair(opts, lex)
        rep = semantics.sense_correlation(opts.word, opts.sense, pair, lex, _solver_config(opts))
        args = [opts.word, str(opts.sense), ",".join(map(str, pair))]
        value = {"total": rep.total, "quantum": rep.quantum, "classical": rep.classical,
                 "converged": rep.converged, "iterations": rep.solver_iterations}
        if rep.note:
            value["note"] = rep.note
            print(f"dsem: {rep.note}; quantum share not computed", file=sys.stderr)
            code = EXIT_CAPACITY
    elif q == "mutinfo":
        pair = _pair(opts, lex)
        args = [opts.word, ",".join(map(str, pair))]
        value = semantics.pair_mutual_information(opts.word, pair, lex)
    elif q == "topk":
        args = [opts.word, str(opts.k)]
        value = [{"word": w, "similarity": s} for w, s in semantics.topk(opts.word, lex, opts.k)]
    else:  # pragma: no cover - argparse restricts choices
        raise UsageError(f"unknown query {q!r}")

    emit(_record(q, value, args, lhash, opts.seed), opts.format)
    return code


def cmd_selftest(opts) -> int:
    faults = [opts.inject_fault] if opts.inject_fault else []
    checks = run_selftest(seed=opts.seed, faults=faults)
    for c in checks:
        print(f"{'PASS' if c.passed else 'FAIL'} {c.name} {c.detail}")
    failed = [c.name for c in checks if not c.passed]
    if failed:
        print(f"selftest failed: {', '.join(failed)}", file=sys.stderr)
        return EXIT_SELFTEST
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=argparse.SUPPRESS,
                        help="seed for stochastic components (default 0)")
    common.add_argument("--format", choices=("text", "json"), default=argparse.SUPPRESS,
                        help="output format (default text)")

    # the flags are accepted at every level; defaults are filled in by main()
    # because set_defaults would also rewrite the shared parent actions
    parser = _Parser(prog="dsem", description="Density-operator word semantics.", parents=[common])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    b = sub.add_parser("build", parents=[common], help="build a lexicon from CoNLL-U files")
    b.add_argument("corpus", nargs="+", help="CoNLL-U files; each file starts a new document")
    b.add_argument("-o", "--output", required=True, help="output .dsem file")
    b.add_argument("--relations", help=f"comma-separated relation labels (default {','.join(DEFAULT_RELATIONS)})")
    b.add_argument("--d", type=int, help=f"context words per relation (default {DEFAULT_D})")
    b.add_argument("--direction", choices=DIRECTIONS, help="which dependency neighbours count")
    b.add_argument("--targets", help="comma-separated words to include (default: all with context)")
    b.add_argument("--upos", help="restrict default targets to these UPOS tags")
    b.add_argument("--min-count", type=int, help="minimum context-bearing occurrences (default 1)")
    b.add_argument("--config", help="JSON file with any of the options above")
    b.set_defaults(func=cmd_build)

    q = sub.add_parser("query", parents=[common], help="query a lexicon")
    q.add_argument("lexicon", help=".dsem lexicon file")
    qs = q.add_subparsers(dest="query", required=True, parser_class=_Parser)

    p = qs.add_parser("entropy", parents=[common], help="ambiguity of a word in bits")
    p.add_argument("word")
    for name, text in (("similarity", "fidelity between two words"),
                       ("entails", "S(w2||w1): information w1 lacks to cover w2")):
        p = qs.add_parser(name, parents=[common], help=text)
        p.add_argument("w1")
        p.add_argument("w2")
    p = qs.add_parser("disambiguate", parents=[common], help="sense distribution of TARGET given CONTEXT")
    p.add_argument("context")
    p.add_argument("target")
    p = qs.add_parser("correlate", parents=[common], help="correlation inside one sense of a word")
    p.add_argument("word")
    p.add_argument("--sense", type=int, required=True)
    p.add_argument("--pair", help="two relation labels or subsystem indices, e.g. nsubj,obj")
    p.add_argument("--restarts", type=int, default=16)
    p.add_argument("--max-iter", type=int, default=5000)
    p = qs.add_parser("mutinfo", parents=[common], help="mutual information between two relation subsystems")
    p.add_argument("word")
    p.add_argument("--pair", help="two relation labels or subsystem indices (default: first two)")
    p = qs.add_parser("topk", parents=[common], help="most similar words")
    p.add_argument("word")
    p.add_argument("-k", type=int, default=10)
    q.set_defaults(func=cmd_query)

    s = sub.add_parser("selftest", parents=[common], help="run the embedded invariant checks")
    s.add_argument("--inject-fault", choices=FAULTS, help=argparse.SUPPRESS)
    s.set_defaults(func=cmd_selftest)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        opts = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    for name, default in (("seed", 0), ("format", "text")):
        if not hasattr(opts, name):
            setattr(opts, name, default)
    try:
        return opts.func(opts)
    except _Exit as exc:
        print(f"dsem: {exc}", file=sys.stderr)
        return exc.code
    except MissingWordError as exc:
        print(f"dsem: {exc}", file=sys.stderr)
        return EXIT_LOOKUP
    except (ParseError, LexiconFormatError, ValidationError) as exc:
        print(f"dsem: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except CapacityError as exc:
        print(f"dsem: {exc}", file=sys.stderr)
        return EXIT_CAPACITY
    except UsageError as exc:
        print(f"dsem: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"dsem: {exc}", file=sys.stderr)
        return EXIT_CAPACITY
    except DsemError as exc:
        print(f"dsem: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
