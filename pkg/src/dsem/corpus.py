"""Build lexical density operators from dependency-parsed (CoNLL-U) corpora.

Each target word gets one ket per document.  A ket is a tensor in
``V_r1 (x) ... (x) V_rn`` whose coordinates count how often the word occurs
with a given combination of neighbours, one neighbour slot per relation.
The word's operator is the trace-normalised sum of the projectors onto its
document kets.
"""

from __future__ import annotations

import hashlib
import io
from collections import Counter, defaultdict
from dataclasses import dataclass, field
from functools import reduce
from pathlib import Path
from typing import Iterable, Sequence, TextIO

import numpy as np

from .errors import CapacityError, MissingWordError, ParseError, StructuralError, UsageError
from .lexicon import Lexicon, RelationVocabulary
from .operators import DensityOperator, density_from_mixture, max_dim

DEFAULT_RELATIONS = ("nsubj", "obj", "amod")
DEFAULT_D = 9
DIRECTIONS = ("both", "dependents", "heads")


@dataclass(frozen=True)
class DependencyToken:
    index: int
    form: str
    lemma: str
    upos: str
    head: int
    deprel: str

    @property
    def relation(self) -> str:
        """Universal relation label without its subtype (``nsubj:pass`` -> ``nsubj``)."""
        return self.deprel.split(":", 1)[0]


@dataclass
class Document:
    doc_id: str
    sentences: list = field(default_factory=list)

    def tokens(self):
        for sent in self.sentences:
            yield from sent


def _finish_sentence(rows, doc: Document) -> None:
    if not rows:
        return
    n = len(rows)
    for pos, (lineno, tok) in enumerate(rows, start=1):
        if tok.index != pos:
            raise ParseError(f"token id {tok.index} out of sequence (expected {pos})", lineno)
    for lineno, tok in rows:
        if not 0 <= tok.head <= n:
            raise StructuralError(
                f"head {tok.head} of token {tok.index} outside sentence of {n} tokens", lineno
            )
        if tok.head == tok.index:
            raise StructuralError(f"token {tok.index} is its own head", lineno)
    doc.sentences.append([tok for _, tok in rows])


def parse_corpus(stream: TextIO | Iterable[str] | str, source: str = "corpus") -> list[Document]:
    """Parse CoNLL-U text into documents.

    Documents start at ``# newdoc`` comments (``# newdoc id = X`` names
    them); text before the first such comment forms an implicit document.
    Multi-word token ranges and empty nodes are skipped.
    """
    if isinstance(stream, str):
        stream = io.StringIO(stream)
    docs: list[Document] = []
    current: Document | None = None
    rows: list = []

    def new_doc(doc_id=None):
        nonlocal current
        if current is not None:
            _finish_sentence(rows, current)
        rows.clear()
        current = Document(doc_id or f"{source}#{len(docs) + 1}")
        docs.append(current)

    for lineno, raw in enumerate(stream, start=1):
        line = raw.rstrip("\r\n")
        if line.startswith("#"):
            body = line[1:].strip()
            if body.startswith("newdoc"):
                rest = body[len("newdoc"):].strip()
                doc_id = rest.split("=", 1)[1].strip() if rest.startswith("id") and "=" in rest else None
                new_doc(doc_id)
            continue
        if not line.strip():
            if current is not None:
                _finish_sentence(rows, current)
            rows.clear()
            continue

        cols = line.split("\t")
        if len(cols) != 10:
            raise ParseError(f"expected 10 tab-separated columns, got {len(cols)}", lineno)
        tid = cols[0]
        if "-" in tid or "." in tid:
            continue
        try:
            index = int(tid)
        except ValueError:
            raise ParseError(f"invalid token id {tid!r}", lineno) from None
        try:
            head = int(cols[6])
        except ValueError:
            raise ParseError(f"invalid head {cols[6]!r}", lineno) from None
        form, lemma = cols[1], cols[2]
        if lemma == "_" and form != "_":
            lemma = form.lower()
        if current is None:
            new_doc()
        rows.append((lineno, DependencyToken(index, form, lemma, cols[3], head, cols[7])))

    if current is not None:
        _finish_sentence(rows, current)
    return [d for d in docs if d.sentences]


def parse_files(paths: Sequence) -> list[Document]:
    """Parse several files; every file starts a fresh document."""
    docs = []
    for path in paths:
        p = Path(path)
        with p.open(encoding="utf-8") as fh:
            docs.extend(parse_corpus(fh, source=p.name))
    return docs


def corpus_hash(paths: Sequence) -> str:
    h = hashlib.sha256()
    for path in paths:
        h.update(Path(path).read_bytes())
    return h.hexdigest()


def _check_direction(direction: str) -> None:
    if direction not in DIRECTIONS:
        raise UsageError(f"direction must be one of {DIRECTIONS}, got {direction!r}")


def sentence_neighbourhoods(sentence, relations: Sequence[str], direction: str = "both"):
    """Per token, the lemmas directly linked to it under each relation.

    Returns a list parallel to ``sentence`` of ``{relation: [lemma, ...]}``.
    """
    _check_direction(direction)
    wanted = set(relations)
    out = [defaultdict(list) for _ in sentence]
    for tok in sentence:
        rel = tok.relation
        if tok.head == 0 or rel not in wanted:
            continue
        head = sentence[tok.head - 1]
        if direction in ("both", "dependents"):
            out[head.index - 1][rel].append(tok.lemma)
        if direction in ("both", "heads"):
            out[tok.index - 1][rel].append(head.lemma)
    return out


def build_vocabularies(docs: Iterable[Document], relations: Sequence[str], d: int,
                       direction: str = "both") -> list[RelationVocabulary]:
    """The ``d`` most frequent neighbour lemmas per relation.

    Ties go to the lexicographically smaller lemma.  Relations with fewer
    than ``d`` distinct neighbours are padded with filler slots.
    """
    if d < 1:
        raise UsageError(f"d must be positive, got {d}")
    relations = list(dict.fromkeys(relations))
    if not relations:
        raise UsageError("at least one relation is required")
    counts = {r: Counter() for r in relations}
    for doc in docs:
        for sent in doc.sentences:
            for nb in sentence_neighbourhoods(sent, relations, direction):
                for rel, lemmas in nb.items():
                    counts[rel].update(lemmas)
    vocabs = []
    for rel in relations:
        ranked = sorted(counts[rel].items(), key=lambda kv: (-kv[1], kv[0]))[:d]
        words = [w for w, _ in ranked]
        n_real = len(words)
        words += [f"<pad{i}>" for i in range(d - n_real)]
        vocabs.append(RelationVocabulary(rel, tuple(words), n_real, null_slot=True))
    return vocabs


@dataclass(frozen=True)
class DocumentKet:
    word: str
    doc_id: str
    amplitudes: np.ndarray
    count: int


def _slot_vector(vocab: RelationVocabulary, lemmas) -> np.ndarray | None:
    hits = [vocab.index[l] for l in lemmas if l in vocab.index]
    if not hits:
        return None
    return np.bincount(hits, minlength=vocab.dim).astype(float) / len(hits)


def build_document_ket(word: str, doc: Document, vocabularies: Sequence[RelationVocabulary],
                       direction: str = "both") -> DocumentKet | None:
    """Context ket of ``word`` in ``doc``, or ``None`` if the word has no usable context there.

    Each occurrence adds one unit of mass spread over the product of its
    per-relation neighbour slots (split equally when a relation has several
    neighbours; the null slot when it has none).  Occurrences without any
    in-vocabulary neighbour are skipped.
    """
    relations = [v.relation for v in vocabularies]
    total = None
    used = 0
    for sent in doc.sentences:
        nbs = None
        for tok in sent:
            if tok.lemma != word:
                continue
            if nbs is None:
                nbs = sentence_neighbourhoods(sent, relations, direction)
            nb = nbs[tok.index - 1]
            factors = []
            matched = False
            for vocab in vocabularies:
                vec = _slot_vector(vocab, nb.get(vocab.relation, ()))
                if vec is None:
                    vec = np.zeros(vocab.dim)
                    if vocab.null_slot:
                        vec[vocab.null_index] = 1.0
                else:
                    matched = True
                factors.append(vec)
            if not matched:
                continue
            contrib = reduce(np.kron, factors)
            if not contrib.any():
                continue
            total = contrib if total is None else total + contrib
            used += 1
    if total is None:
        return None
    amps = total / np.linalg.norm(total)
    amps.flags.writeable = False
    return DocumentKet(word, doc.doc_id, amps, used)


def build_lexical_density_operator(word: str, kets: Sequence[DocumentKet],
                                   subsystem_dims=None) -> DensityOperator:
    """Trace-normalised sum of the projectors onto ``word``'s document kets."""
    kets = [k for k in kets if k is not None]
    if not kets:
        raise MissingWordError(word)
    return density_from_mixture([k.amplitudes for k in kets], np.ones(len(kets)), subsystem_dims)


def candidate_words(docs: Iterable[Document], upos: Iterable[str] | None = None) -> list[str]:
    tags = None if upos is None else set(upos)
    found = set()
    for doc in docs:
        for tok in doc.tokens():
            if tags is None or tok.upos in tags:
                found.add(tok.lemma)
    return sorted(found)


def build_lexicon(docs: Sequence[Document], relations: Sequence[str] = DEFAULT_RELATIONS,
                  d: int = DEFAULT_D, direction: str = "both", targets: Iterable[str] | None = None,
                  min_count: int = 1, upos: Iterable[str] | None = None,
                  source_hash: str = "") -> Lexicon:
    """Ingest parsed documents into a :class:`~dsem.lexicon.Lexicon`.

    Without ``targets`` every lemma (optionally restricted to the given UPOS
    tags) with at least ``min_count`` context-bearing occurrences is kept.
    Explicit targets that never occur with context are silently dropped.
    """
    _check_direction(direction)
    docs = list(docs)
    vocabs = build_vocabularies(docs, relations, d, direction)
    dims = tuple(v.dim for v in vocabs)
    total_dim = int(np.prod(dims))
    cap = max_dim()
    if total_dim > cap:
        raise CapacityError(f"space dimension {total_dim} exceeds max_dim {cap}")

    words = sorted(set(targets)) if targets is not None else candidate_words(docs, upos)
    operators = {}
    for word in words:
        kets = [k for k in (build_document_ket(word, doc, vocabs, direction) for doc in docs) if k]
        if not kets or sum(k.count for k in kets) < min_count:
            continue
        operators[word] = build_lexical_density_operator(word, kets, dims)

    metadata = {
        "corpus_hash": source_hash,
        "d": str(d),
        "relations": ",".join(v.relation for v in vocabs),
        "direction": direction,
        "min_count": str(min_count),
    }
    return Lexicon(tuple(vocabs), operators, metadata)
