"""Deterministic linearly separable demonstration corpus.

Each rhetorical role gets its own vocabulary, chosen so that every word
occupies a distinct hashed-BOW bucket at the default dimension. Class
supports are therefore disjoint in feature space and a linear head can
reach perfect accuracy. Used by the test suite and handy for smoke-testing
the CLI end to end.
"""

from __future__ import annotations

import numpy as np

from .corpus import LABELS, Corpus, LabeledSentence
from .embedding import fnv1a_64

TOY_DIM = 256

_CLASS_STEMS = ("fact", "lower", "argue", "statute", "preced", "ratio", "present")
_WORDS_PER_CLASS = 12


def _collision_free_vocab(dim: int) -> dict[str, list[str]]:
    """One vocabulary per label, every word in its own hash bucket.

    FNV-1a propagates low-bit agreement, so fixed-prefix word families can
    collide wholesale at power-of-two dims; filtering candidates by bucket
    keeps the class subspaces disjoint.
    """
    used: set[int] = set()
    vocab: dict[str, list[str]] = {}
    for label, stem in zip(LABELS, _CLASS_STEMS):
        words: list[str] = []
        k = 0
        while len(words) < _WORDS_PER_CLASS:
            candidate = f"{stem}{k:02d}"
            k += 1
            bucket = fnv1a_64(candidate) % dim
            if bucket in used:
                continue
            used.add(bucket)
            words.append(candidate)
        vocab[label] = words
    return vocab


def toy_corpus(
    sentences_per_label: int = 100,
    num_docs: int = 10,
    seed: int = 7,
    min_tokens: int = 3,
    max_tokens: int = 8,
    dim: int = TOY_DIM,
) -> Corpus:
    """Balanced corpus of nonsense legal-ish sentences, one vocab per label."""
    vocab = _collision_free_vocab(dim)
    rng = np.random.default_rng(seed)
    documents = [f"toy{j:02d}" for j in range(num_docs)]
    positions = dict.fromkeys(documents, 0)
    sentences: list[LabeledSentence] = []
    for i in range(sentences_per_label * len(LABELS)):
        label = LABELS[i % len(LABELS)]
        words = vocab[label]
        k = int(rng.integers(min_tokens, max_tokens + 1))
        text = " ".join(words[w] for w in rng.integers(0, len(words), size=k))
        doc_id = documents[i % num_docs]
        sentences.append(
            LabeledSentence(text=text, label=label, doc_id=doc_id, position=positions[doc_id])
        )
        positions[doc_id] += 1
    ordered = sorted(sentences, key=lambda s: (documents.index(s.doc_id), s.position))
    return Corpus(sentences=ordered, documents=documents)
