from __future__ import annotations

import numpy as np
import pytest

from rhetrole.corpus import save_corpus
from rhetrole.toydata import toy_corpus

TWO_DOC_TSV = (
    "#doc\tcase-001\n"
    "The facts are not in dispute.\tFacts\n"
    "The High Court dismissed the petition.\tRuling by Lower Court\n"
    "Counsel argued for acquittal.\tArgument\n"
    "\n"
    "#doc\tcase-002\n"
    "Section 302 applies here.\tStatute\n"
    "We rely on the earlier judgment.\tPrecedent\n"
    "The appeal is allowed.\tRuling by Present Court\n"
)

# Table of per-label sentence counts for the original 11285-sentence task
# data, in canonical label order. Used as a weight-computation fixture.
TASK_COUNTS = {
    "Facts": 2622,
    "Ruling by Lower Court": 483,
    "Argument": 939,
    "Statute": 902,
    "Precedent": 1787,
    "Ratio of the decision": 4211,
    "Ruling by Present Court": 341,
}


@pytest.fixture(scope="session")
def toy():
    return toy_corpus()


@pytest.fixture(scope="session")
def toy_tsv(toy, tmp_path_factory):
    path = tmp_path_factory.mktemp("toy") / "toy_corpus.tsv"
    save_corpus(toy, path)
    return path


@pytest.fixture
def two_doc_tsv(tmp_path):
    path = tmp_path / "two_doc.tsv"
    path.write_text(TWO_DOC_TSV, encoding="utf-8")
    return path


def multiclass_perceptron_separates(X: np.ndarray, y: np.ndarray, max_passes: int = 200) -> bool:
    """Independent separability oracle: a mistake-driven perceptron reaches
    zero training errors iff a zero-error linear classifier exists (within
    the pass budget)."""
    num_classes = int(y.max()) + 1
    W = np.zeros((num_classes, X.shape[1]))
    rng = np.random.default_rng(0)
    for _ in range(max_passes):
        errors = 0
        for i in rng.permutation(len(X)):
            p = int(np.argmax(W @ X[i]))
            if p != y[i]:
                W[y[i]] += X[i]
                W[p] -= X[i]
                errors += 1
        if errors == 0:
            return True
    return False
