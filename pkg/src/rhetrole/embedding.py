"""Sentence-to-vector providers.

Two interchangeable providers sit behind the same duck-typed surface
(``provider_id``, ``dimension``, ``lookup(text)``): a deterministic hashed
bag-of-words encoder, and a read-only table of precomputed vectors produced
offline by any external encoder (loaded from the EMB v1 text format).

EMB v1 file format
------------------
Line 1: ``EMB v1 <count> <dim>``. Each following line holds one record:
the sentence key as a JSON-quoted string, a space, then ``dim``
space-separated decimal reals (integer and scientific notation both
accepted). Floats are written with shortest round-trip precision, so
write -> load -> write is byte-identical.
"""

from __future__ import annotations

import json
import unicodedata
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .errors import DimensionMismatchError, EmbeddingFormatError, InputError, MissingEmbeddingError

CASINGS = ("cased", "uncased")

# FNV-1a 64-bit constants (public-domain reference parameters).
_FNV64_OFFSET = 0xCBF29CE484222325
_FNV64_PRIME = 0x100000001B3
_U64_MASK = 0xFFFFFFFFFFFFFFFF


@dataclass(frozen=True)
class TokenizerConfig:
    casing: str
    max_len: int

    def __post_init__(self):
        if self.casing not in CASINGS:
            raise InputError(f"casing must be one of {CASINGS}, got {self.casing!r}")
        if self.max_len < 1:
            raise InputError("max_len must be >= 1")


def tokenize(text: str, config: TokenizerConfig) -> list[str]:
    """Whitespace tokenizer with edge punctuation stripping.

    Uncased mode lowercases the text up front. Tokens are split on Unicode
    whitespace, stripped of leading/trailing punctuation only (internal
    periods and hyphens in citations like "s.302" survive), dropped when
    nothing remains, and truncated to ``max_len`` tokens.
    """
    if config.casing == "uncased":
        text = text.lower()
    tokens: list[str] = []
    for raw in text.split():
        tok = _strip_edge_punctuation(raw)
        if tok:
            tokens.append(tok)
            if len(tokens) == config.max_len:
                break
    return tokens


def _strip_edge_punctuation(token: str) -> str:
    start, end = 0, len(token)
    while start < end and unicodedata.category(token[start]).startswith("P"):
        start += 1
    while end > start and unicodedata.category(token[end - 1]).startswith("P"):
        end -= 1
    return token[start:end]


def fnv1a_64(text: str) -> int:
    """FNV-1a 64-bit hash of the UTF-8 bytes. Platform-independent."""
    h = _FNV64_OFFSET
    for byte in text.encode("utf-8"):
        h ^= byte
        h = (h * _FNV64_PRIME) & _U64_MASK
    return h


def encode_hashed_bow(tokens: Sequence[str], dim: int) -> np.ndarray:
    """Signed hashed bag-of-words vector, L2-normalized unless all-zero.

    Each token adds +-1 at index ``fnv1a_64(token) % dim``; the sign comes
    from the hash's second-lowest bit (+1 when that bit is 0) to dampen
    collision bias.
    """
    if dim < 1:
        raise InputError("embedding dimension must be >= 1")
    vec = np.zeros(dim, dtype=np.float64)
    for tok in tokens:
        h = fnv1a_64(tok)
        sign = 1.0 if (h >> 1) & 1 == 0 else -1.0
        vec[h % dim] += sign
    norm = np.linalg.norm(vec)
    if norm > 0.0:
        vec /= norm
    return vec


class HashedBowProvider:
    """Self-contained deterministic encoder: tokenize then hashed BOW."""

    def __init__(self, dim: int, tokenizer_config: TokenizerConfig):
        if dim < 1:
            raise InputError("embedding dimension must be >= 1")
        self.dimension = dim
        self.tokenizer_config = tokenizer_config

    @property
    def provider_id(self) -> str:
        cfg = self.tokenizer_config
        return f"hashed:{self.dimension}:{cfg.casing}:{cfg.max_len}"

    def lookup(self, text: str) -> np.ndarray:
        return encode_hashed_bow(tokenize(text, self.tokenizer_config), self.dimension)


class PrecomputedProvider:
    """Read-only exact-key table of externally computed sentence vectors."""

    def __init__(self, vectors: dict[str, np.ndarray], dim: int, provider_id: str):
        self.dimension = dim
        self.provider_id = provider_id
        self._vectors = vectors

    def lookup(self, text: str) -> np.ndarray:
        try:
            return self._vectors[text]
        except KeyError:
            raise MissingEmbeddingError(
                f"no precomputed embedding for sentence {text!r}"
            ) from None

    def keys(self) -> Iterable[str]:
        return self._vectors.keys()

    def items(self) -> Iterable[tuple[str, np.ndarray]]:
        return self._vectors.items()


def parse_embeddings(text: str, provider_id: str = "precomputed:<memory>") -> PrecomputedProvider:
    """Parse EMB v1 text. Raises EmbeddingFormatError on any shape violation."""
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    if not lines:
        raise EmbeddingFormatError("empty embedding file")
    header = lines[0].split(" ")
    if len(header) != 4 or header[0] != "EMB" or header[1] != "v1":
        raise EmbeddingFormatError(f"bad header {lines[0]!r}; expected 'EMB v1 <count> <dim>'")
    try:
        count, dim = int(header[2]), int(header[3])
    except ValueError:
        raise EmbeddingFormatError(f"non-integer count/dim in header {lines[0]!r}") from None
    if count < 0 or dim < 1:
        raise EmbeddingFormatError("count must be >= 0 and dim >= 1")
    records = lines[1:]
    if len(records) != count:
        raise EmbeddingFormatError(
            f"header declares {count} records but file contains {len(records)}"
        )
    decoder = json.JSONDecoder()
    vectors: dict[str, np.ndarray] = {}
    for rec_no, record in enumerate(records, start=2):
        try:
            key, end = decoder.raw_decode(record)
        except json.JSONDecodeError:
            raise EmbeddingFormatError(f"line {rec_no}: key is not a JSON string") from None
        if not isinstance(key, str):
            raise EmbeddingFormatError(f"line {rec_no}: key is not a JSON string")
        if key in vectors:
            raise EmbeddingFormatError(f"line {rec_no}: duplicate key {key!r}")
        parts = record[end:].split()
        if len(parts) != dim:
            raise EmbeddingFormatError(
                f"line {rec_no}: expected {dim} values, got {len(parts)}"
            )
        try:
            vectors[key] = np.array([float(p) for p in parts], dtype=np.float64)
        except ValueError:
            raise EmbeddingFormatError(f"line {rec_no}: non-numeric value") from None
    return PrecomputedProvider(vectors, dim, provider_id)


def serialize_embeddings(entries: Iterable[tuple[str, np.ndarray]], dim: int) -> str:
    """Emit EMB v1 text for (key, vector) pairs in the given order."""
    items = list(entries)
    lines = [f"EMB v1 {len(items)} {dim}"]
    for key, vec in items:
        if len(vec) != dim:
            raise DimensionMismatchError(
                f"vector for {key!r} has length {len(vec)}, expected {dim}"
            )
        values = " ".join(repr(float(x)) for x in vec)
        lines.append(f"{json.dumps(key)} {values}")
    return "".join(line + "\n" for line in lines)


def load_precomputed(path: str | Path) -> PrecomputedProvider:
    path = Path(path)
    return parse_embeddings(
        path.read_bytes().decode("utf-8"), provider_id=f"precomputed:{path}"
    )


def save_embeddings(entries: Iterable[tuple[str, np.ndarray]], dim: int, path: str | Path) -> None:
    Path(path).write_bytes(serialize_embeddings(entries, dim).encode("utf-8"))


def embed_batch(sentences: Sequence, provider) -> np.ndarray:
    """Stack per-sentence embeddings into an (n, dim) float64 matrix.

    Accepts LabeledSentence objects or raw strings; row order follows input
    order. Missing-embedding errors from the provider propagate.
    """
    out = np.zeros((len(sentences), provider.dimension), dtype=np.float64)
    for i, s in enumerate(sentences):
        text = getattr(s, "text", s)
        vec = provider.lookup(text)
        if len(vec) != provider.dimension:
            raise DimensionMismatchError(
                f"provider returned a vector of length {len(vec)}, expected {provider.dimension}"
            )
        out[i] = vec
    return out
