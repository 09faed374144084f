"""Labeled legal-judgment sentences: TSV ingestion, class statistics,
deterministic train/validation splits, and token-length percentiles.

Corpus TSV format
-----------------
UTF-8 text. A line ``#doc<TAB><doc_id>`` opens a document; every following
non-blank line is ``<sentence text><TAB><canonical label>``. Blank lines are
ignored. `serialize_corpus` emits exactly this shape with ``\\n`` endings, so
parse/serialize round-trips are byte-identical.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Callable, Iterable

import numpy as np

from .errors import CorpusParseError, InputError, UnknownLabelError

# Canonical label order. Index 0..6 is fixed and shared by every module:
# weight vectors, classifier rows, and confusion matrices all follow it.
LABELS: tuple[str, ...] = (
    "Facts",
    "Ruling by Lower Court",
    "Argument",
    "Statute",
    "Precedent",
    "Ratio of the decision",
    "Ruling by Present Court",
)
NUM_LABELS = len(LABELS)
LABEL_TO_INDEX: dict[str, int] = {name: i for i, name in enumerate(LABELS)}

SPLIT_MODES = ("sentence_shuffled", "document_level")


def label_index(name: str) -> int:
    """Map a canonical label string to its fixed index; raise on anything else."""
    try:
        return LABEL_TO_INDEX[name]
    except KeyError:
        raise InputError(f"unknown label {name!r}; expected one of {list(LABELS)}") from None


@dataclass(frozen=True)
class LabeledSentence:
    """One sentence of a legal document plus its rhetorical-role label."""

    text: str
    label: str
    doc_id: str
    position: int

    def __post_init__(self):
        if not self.text:
            raise InputError("sentence text must be non-empty")
        if "\t" in self.text or "\n" in self.text:
            raise InputError("sentence text must not contain tabs or newlines")
        if self.label not in LABEL_TO_INDEX:
            raise InputError(f"unknown label {self.label!r}")
        if self.position < 0:
            raise InputError("position must be >= 0")

    @property
    def label_idx(self) -> int:
        return LABEL_TO_INDEX[self.label]


@dataclass
class Corpus:
    """Sentences in stable order (document ingestion order, then position)."""

    sentences: list[LabeledSentence]
    documents: list[str]

    def __len__(self) -> int:
        return len(self.sentences)


@dataclass(frozen=True)
class SplitSpec:
    """Deterministic train/validation split recipe."""

    train_fraction: float
    seed: int
    mode: str = "sentence_shuffled"

    def __post_init__(self):
        if not 0.0 < self.train_fraction < 1.0:
            raise InputError("train_fraction must lie strictly between 0 and 1")
        if self.mode not in SPLIT_MODES:
            raise InputError(f"split mode must be one of {SPLIT_MODES}, got {self.mode!r}")


def parse_corpus(text: str) -> Corpus:
    """Parse corpus TSV text into a Corpus.

    Raises CorpusParseError / UnknownLabelError with the offending 1-based
    line number on malformed lines, unknown labels, empty sentence text,
    sentences before any ``#doc`` header, or duplicate document ids.
    """
    sentences: list[LabeledSentence] = []
    documents: list[str] = []
    seen_docs: set[str] = set()
    current_doc: str | None = None
    position = 0

    for line_no, line in enumerate(text.split("\n"), start=1):
        line = line.rstrip("\r")
        if not line.strip():
            continue
        if line.startswith("#doc\t"):
            doc_id = line[len("#doc\t"):]
            if not doc_id:
                raise CorpusParseError("document header with empty doc_id", line_no)
            if doc_id in seen_docs:
                raise CorpusParseError(f"duplicate document id {doc_id!r}", line_no)
            seen_docs.add(doc_id)
            documents.append(doc_id)
            current_doc = doc_id
            position = 0
            continue
        fields = line.split("\t")
        if len(fields) != 2:
            raise CorpusParseError(
                f"expected 2 tab-separated fields, got {len(fields)}", line_no
            )
        sent_text, label = fields
        if not sent_text:
            raise CorpusParseError("empty sentence text", line_no)
        if label not in LABEL_TO_INDEX:
            raise UnknownLabelError(f"unknown label {label!r}", line_no)
        if current_doc is None:
            raise CorpusParseError("sentence line before any #doc header", line_no)
        sentences.append(
            LabeledSentence(text=sent_text, label=label, doc_id=current_doc, position=position)
        )
        position += 1

    return Corpus(sentences=sentences, documents=documents)


def serialize_corpus(corpus: Corpus) -> str:
    """Emit the canonical TSV form (inverse of parse_corpus)."""
    by_doc: dict[str, list[LabeledSentence]] = {d: [] for d in corpus.documents}
    for s in corpus.sentences:
        if s.doc_id not in by_doc:
            raise InputError(f"sentence doc_id {s.doc_id!r} missing from corpus.documents")
        by_doc[s.doc_id].append(s)
    lines: list[str] = []
    for doc_id in corpus.documents:
        lines.append(f"#doc\t{doc_id}")
        for s in sorted(by_doc[doc_id], key=lambda s: s.position):
            if s.text == "#doc":
                raise InputError("sentence text '#doc' is not representable in the TSV format")
            lines.append(f"{s.text}\t{s.label}")
    return "".join(line + "\n" for line in lines)


def load_corpus(path: str | Path) -> Corpus:
    return parse_corpus(Path(path).read_bytes().decode("utf-8"))


def save_corpus(corpus: Corpus, path: str | Path) -> None:
    Path(path).write_bytes(serialize_corpus(corpus).encode("utf-8"))


def class_distribution(corpus_or_sentences: Corpus | Iterable[LabeledSentence]) -> dict[str, int]:
    """Per-label sentence counts. Every canonical label is present, possibly 0."""
    sentences = (
        corpus_or_sentences.sentences
        if isinstance(corpus_or_sentences, Corpus)
        else corpus_or_sentences
    )
    counts = dict.fromkeys(LABELS, 0)
    for s in sentences:
        counts[s.label] += 1
    return counts


def split(corpus: Corpus, spec: SplitSpec) -> tuple[list[LabeledSentence], list[LabeledSentence]]:
    """Deterministic train/validation partition.

    ``sentence_shuffled`` permutes sentences and takes the first
    floor(train_fraction * N) for train. ``document_level`` permutes
    documents and assigns whole documents to train until that quota is met
    or exceeded; the remaining documents go to validation, so one document
    never straddles the split.
    """
    n = len(corpus.sentences)
    if n < 2:
        raise InputError("cannot split a corpus with fewer than 2 sentences")
    quota = math.floor(spec.train_fraction * n)
    rng = np.random.default_rng(spec.seed)

    if spec.mode == "sentence_shuffled":
        perm = rng.permutation(n)
        train = [corpus.sentences[i] for i in perm[:quota]]
        val = [corpus.sentences[i] for i in perm[quota:]]
        return train, val

    by_doc: dict[str, list[LabeledSentence]] = {d: [] for d in corpus.documents}
    for s in corpus.sentences:
        by_doc[s.doc_id].append(s)
    train, val = [], []
    for di in rng.permutation(len(corpus.documents)):
        doc_sentences = by_doc[corpus.documents[di]]
        if len(train) < quota:
            train.extend(doc_sentences)
        else:
            val.extend(doc_sentences)
    return train, val


def length_percentile(
    corpus: Corpus, tokenizer: Callable[[str], list[str]], q: float
) -> int:
    """Nearest-rank q-th percentile of per-sentence token counts.

    Returns the value at 1-based index ceil(q * N) of the sorted count list;
    no interpolation. The rank is computed in exact rational arithmetic so
    q values like 0.98 never overshoot from float rounding.
    """
    if not corpus.sentences:
        raise InputError("cannot take a percentile of an empty corpus")
    if not 0.0 < q <= 1.0:
        raise InputError("percentile q must lie in (0, 1]")
    counts = sorted(len(tokenizer(s.text)) for s in corpus.sentences)
    rank = math.ceil(Fraction(q) * len(counts))
    return counts[max(rank, 1) - 1]
