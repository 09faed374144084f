"""Class-imbalance strategies: loss re-weighting schemes and resampling.

Weight vectors are numpy float64 arrays aligned to the canonical label
order from `rhetrole.corpus`. The inverse-frequency scheme gives rare
classes more loss mass; the direct-frequency scheme is its elementwise
reciprocal (frequent classes weigh more). Undersampling and duplication
oversampling materialize a balanced dataset before batching.
"""

from __future__ import annotations

from typing import Sequence

import numpy as np

from .corpus import LABELS, LabeledSentence
from .errors import InputError

WEIGHT_SCHEMES = ("inverse_frequency", "direct_frequency", "uniform")


def inverse_frequency_weights(counts: Sequence[int]) -> np.ndarray:
    """w[c] = N / (K * counts[c]).

    Balanced counts give exactly uniform weights, and the total effective
    mass is preserved: sum_c w[c] * counts[c] = N.
    """
    counts = np.asarray(counts, dtype=np.int64)
    if counts.size == 0:
        raise InputError("counts must be non-empty")
    if np.any(counts <= 0):
        raise InputError("inverse-frequency weight undefined for zero-count classes")
    n = int(counts.sum())
    k = counts.size
    return n / (k * counts.astype(np.float64))


def direct_frequency_weights(counts: Sequence[int]) -> np.ndarray:
    """w[c] = K * counts[c] / N, the elementwise reciprocal of the inverse scheme."""
    counts = np.asarray(counts, dtype=np.int64)
    if counts.size == 0:
        raise InputError("counts must be non-empty")
    n = int(counts.sum())
    if n <= 0:
        raise InputError("direct-frequency weights need a positive total count")
    k = counts.size
    return k * counts.astype(np.float64) / n


def uniform_weights(num_classes: int) -> np.ndarray:
    if num_classes < 1:
        raise InputError("need at least one class")
    return np.ones(num_classes, dtype=np.float64)


def weights_for_scheme(scheme: str, counts: Sequence[int]) -> np.ndarray:
    if scheme == "inverse_frequency":
        return inverse_frequency_weights(counts)
    if scheme == "direct_frequency":
        return direct_frequency_weights(counts)
    if scheme == "uniform":
        return uniform_weights(len(counts))
    raise InputError(f"unknown weight scheme {scheme!r}; expected one of {WEIGHT_SCHEMES}")


def _indices_by_label(dataset: Sequence[LabeledSentence]) -> dict[str, list[int]]:
    by_label: dict[str, list[int]] = {}
    for i, s in enumerate(dataset):
        by_label.setdefault(s.label, []).append(i)
    return by_label


def _present_in_canonical_order(by_label: dict[str, list[int]]) -> list[str]:
    return [label for label in LABELS if label in by_label]


def undersample(dataset: Sequence[LabeledSentence], seed: int) -> list[LabeledSentence]:
    """Keep exactly min-class-count samples per present label.

    Retained items are chosen uniformly without replacement (seeded) and
    returned in their original relative order.
    """
    if not dataset:
        raise InputError("cannot undersample an empty dataset")
    by_label = _indices_by_label(dataset)
    m = min(len(v) for v in by_label.values())
    rng = np.random.default_rng(seed)
    keep: list[int] = []
    for label in _present_in_canonical_order(by_label):
        idxs = by_label[label]
        chosen = rng.choice(len(idxs), size=m, replace=False)
        keep.extend(idxs[c] for c in chosen)
    keep.sort()
    return [dataset[i] for i in keep]


def oversample(dataset: Sequence[LabeledSentence], seed: int) -> list[LabeledSentence]:
    """Grow every present label to max-class-count samples.

    Output starts with all originals in order, then appends duplicates
    drawn uniformly with replacement (seeded), class by class in canonical
    label order.
    """
    if not dataset:
        raise InputError("cannot oversample an empty dataset")
    by_label = _indices_by_label(dataset)
    target = max(len(v) for v in by_label.values())
    rng = np.random.default_rng(seed)
    out = list(dataset)
    for label in _present_in_canonical_order(by_label):
        idxs = by_label[label]
        need = target - len(idxs)
        if need > 0:
            draws = rng.integers(0, len(idxs), size=need)
            out.extend(dataset[idxs[d]] for d in draws)
    return out
