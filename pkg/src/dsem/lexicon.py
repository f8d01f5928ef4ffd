"""Lexicons: word density operators over a shared relation space, and the .dsem file format.

File layout (all integers little-endian u32, strings length-prefixed UTF-8)::

    b"DSEM" | version | metadata pairs | relation vocabularies
    | word entries (word, subsystem dims, dim*dim complex128 row-major)
    | CRC32 of everything before it
"""

from __future__ import annotations

import difflib
import hashlib
import math
import struct
import zlib
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import (
    BadMagicError,
    ChecksumError,
    DsemError,
    LexiconFormatError,
    MissingWordError,
    TruncatedFileError,
    UsageError,
    ValidationError,
    VersionMismatchError,
)
from .operators import DensityOperator

MAGIC = b"DSEM"
FORMAT_VERSION = 1


@dataclass(frozen=True)
class RelationVocabulary:
    """The ``d`` context words spanning one relation's factor space.

    ``words`` always has length ``d``; entries past ``n_real`` are filler
    slots that no corpus word maps to.  With ``null_slot`` the factor gets one
    extra dimension (index ``d``) for occurrences lacking that relation.
    """

    relation: str
    words: tuple[str, ...]
    n_real: int
    null_slot: bool = True
    index: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        words = tuple(self.words)
        if not 0 <= self.n_real <= len(words):
            raise ValidationError(f"n_real={self.n_real} out of range for {len(words)} words")
        real = words[: self.n_real]
        if len(set(real)) != len(real):
            raise ValidationError(f"duplicate words in vocabulary for {self.relation!r}")
        object.__setattr__(self, "words", words)
        object.__setattr__(self, "index", {w: i for i, w in enumerate(real)})

    @property
    def d(self) -> int:
        return len(self.words)

    @property
    def dim(self) -> int:
        return self.d + (1 if self.null_slot else 0)

    @property
    def null_index(self) -> int | None:
        return self.d if self.null_slot else None

    def label(self, i: int) -> str:
        if i == self.null_index:
            return "<none>"
        return self.words[i]


@dataclass
class Lexicon:
    """Word -> density operator map over ``V_1 (x) ... (x) V_n``."""

    vocabularies: tuple[RelationVocabulary, ...]
    operators: dict[str, DensityOperator]
    metadata: dict[str, str] = field(default_factory=dict)

    def __post_init__(self):
        self.vocabularies = tuple(self.vocabularies)
        self.operators = {w: self.operators[w] for w in sorted(self.operators)}
        self.metadata = {str(k): str(v) for k, v in sorted(self.metadata.items())}
        dims = self.subsystem_dims
        for word, op in self.operators.items():
            if op.subsystem_dims != dims:
                raise ValidationError(
                    f"operator for {word!r} has subsystem dims {op.subsystem_dims}, expected {dims}"
                )

    @property
    def subsystem_dims(self) -> tuple[int, ...]:
        return tuple(v.dim for v in self.vocabularies)

    @property
    def dim(self) -> int:
        return int(np.prod(self.subsystem_dims))

    @property
    def relations(self) -> tuple[str, ...]:
        return tuple(v.relation for v in self.vocabularies)

    def words(self) -> list[str]:
        return list(self.operators)

    def __contains__(self, word) -> bool:
        return word in self.operators

    def __len__(self) -> int:
        return len(self.operators)

    def __getitem__(self, word: str) -> DensityOperator:
        try:
            return self.operators[word]
        except KeyError:
            raise MissingWordError(word, difflib.get_close_matches(word, self.words(), n=3)) from None

    def relation_index(self, relation) -> int:
        if isinstance(relation, (int, np.integer)):
            if not 0 <= relation < len(self.vocabularies):
                raise UsageError(f"subsystem index {relation} out of range")
            return int(relation)
        try:
            return self.relations.index(relation)
        except ValueError:
            raise UsageError(
                f"unknown relation {relation!r}; lexicon has {', '.join(self.relations)}"
            ) from None

    def __eq__(self, other) -> bool:
        if not isinstance(other, Lexicon):
            return NotImplemented
        if (self.vocabularies, self.metadata) != (other.vocabularies, other.metadata):
            return False
        if list(self.operators) != list(other.operators):
            return False
        return all(
            a.subsystem_dims == b.subsystem_dims and np.array_equal(a.matrix, b.matrix)
            for a, b in zip(self.operators.values(), other.operators.values())
        )


def _u32(n: int) -> bytes:
    return struct.pack("<I", n)


def _str(s: str) -> bytes:
    raw = s.encode("utf-8")
    return _u32(len(raw)) + raw


def to_bytes(lex: Lexicon) -> bytes:
    parts = [MAGIC, _u32(FORMAT_VERSION), _u32(len(lex.metadata))]
    for k, v in lex.metadata.items():
        parts += [_str(k), _str(v)]
    parts.append(_u32(len(lex.vocabularies)))
    for voc in lex.vocabularies:
        parts += [_str(voc.relation), _u32(int(voc.null_slot)), _u32(voc.n_real), _u32(voc.d)]
        parts += [_str(w) for w in voc.words]
    parts.append(_u32(len(lex.operators)))
    for word, op in lex.operators.items():
        parts += [_str(word), _u32(len(op.subsystem_dims))]
        parts += [_u32(d) for d in op.subsystem_dims]
        parts.append(np.ascontiguousarray(op.matrix, dtype="<c16").tobytes())
    body = b"".join(parts)
    return body + _u32(zlib.crc32(body))


def save_lexicon(lex: Lexicon, path) -> None:
    Path(path).write_bytes(to_bytes(lex))


class _Reader:
    def __init__(self, data: bytes):
        self.data = data
        self.pos = 0

    def take(self, n: int) -> bytes:
        if self.pos + n > len(self.data):
            raise TruncatedFileError(
                f"lexicon file truncated: needed {n} bytes at offset {self.pos}, "
                f"only {len(self.data) - self.pos} left"
            )
        out = self.data[self.pos:self.pos + n]
        self.pos += n
        return out

    def u32(self) -> int:
        return struct.unpack("<I", self.take(4))[0]

    def str(self) -> str:
        raw = self.take(self.u32())
        try:
            return raw.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise LexiconFormatError(f"invalid UTF-8 string at offset {self.pos}") from exc


def _parse_body(r: _Reader) -> Lexicon:
    metadata = {}
    for _ in range(r.u32()):
        k = r.str()
        metadata[k] = r.str()
    vocabs = []
    for _ in range(r.u32()):
        relation = r.str()
        null_slot = bool(r.u32())
        n_real = r.u32()
        d = r.u32()
        words = tuple(r.str() for _ in range(d))
        vocabs.append(RelationVocabulary(relation, words, n_real, null_slot))
    ops = {}
    for _ in range(r.u32()):
        word = r.str()
        dims = tuple(r.u32() for _ in range(r.u32()))
        dim = math.prod(dims) if dims else 0
        raw = r.take(16 * dim * dim)
        m = np.frombuffer(raw, dtype="<c16").reshape(dim, dim).astype(np.complex128)
        ops[word] = DensityOperator(m, dims)
    return Lexicon(tuple(vocabs), ops, metadata)


def from_bytes(data: bytes) -> Lexicon:
    if len(data) < 4:
        raise TruncatedFileError("lexicon file truncated: missing header")
    if data[:4] != MAGIC:
        raise BadMagicError(f"not a dsem lexicon file (magic {data[:4]!r})")
    if len(data) < 8:
        raise TruncatedFileError("lexicon file truncated: missing version")
    version = struct.unpack("<I", data[4:8])[0]
    if version != FORMAT_VERSION:
        raise VersionMismatchError(version, FORMAT_VERSION)

    crc_ok = len(data) >= 12 and zlib.crc32(data[:-4]) == struct.unpack("<I", data[-4:])[0]
    if not crc_ok:
        # distinguish a cut-off file from a corrupted one
        r = _Reader(data)
        r.pos = 8
        try:
            _parse_body(r)
        except TruncatedFileError:
            raise
        except (DsemError, ValueError) as exc:
            raise ChecksumError(f"lexicon file checksum mismatch ({exc})") from exc
        if len(data) - r.pos < 4:
            raise TruncatedFileError("lexicon file truncated: missing checksum")
        raise ChecksumError("lexicon file checksum mismatch")

    r = _Reader(data[:-4])
    r.pos = 8
    try:
        lex = _parse_body(r)
    except TruncatedFileError:
        raise
    except (DsemError, ValueError) as exc:
        raise LexiconFormatError(f"invalid lexicon contents: {exc}") from exc
    if r.pos != len(r.data):
        raise LexiconFormatError(f"{len(r.data) - r.pos} unexpected trailing bytes")
    return lex


def load_lexicon(path) -> Lexicon:
    return from_bytes(Path(path).read_bytes())


def file_hash(path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()[:16]
