from __future__ import annotations

import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rhetrole.corpus import (
    LABELS,
    Corpus,
    LabeledSentence,
    SplitSpec,
    class_distribution,
    length_percentile,
    parse_corpus,
    serialize_corpus,
    split,
)
from rhetrole.errors import CorpusParseError, InputError, UnknownLabelError

from .conftest import TWO_DOC_TSV


def make_corpus(n, labels=None, docs=1):
    sentences = []
    doc_ids = [f"d{j}" for j in range(docs)]
    positions = dict.fromkeys(doc_ids, 0)
    for i in range(n):
        doc = doc_ids[i % docs]
        sentences.append(
            LabeledSentence(
                text=f"sentence number {i}",
                label=labels[i % len(labels)] if labels else LABELS[i % len(LABELS)],
                doc_id=doc,
                position=positions[doc],
            )
        )
        positions[doc] += 1
    sentences.sort(key=lambda s: (doc_ids.index(s.doc_id), s.position))
    return Corpus(sentences=sentences, documents=doc_ids)


class TestParse:
    def test_two_docs_three_lines_each(self):
        corpus = parse_corpus(TWO_DOC_TSV)
        assert len(corpus.sentences) == 6
        assert corpus.documents == ["case-001", "case-002"]

    def test_label_indices_follow_canonical_order(self):
        corpus = parse_corpus("#doc\tD\nThe appeal is allowed.\tRuling by Present Court\n")
        assert corpus.sentences[0].label_idx == 6
        assert LABELS.index("Facts") == 0

    def test_unknown_label_names_line(self):
        with pytest.raises(UnknownLabelError) as exc:
            parse_corpus("#doc\tD\nSome text\tVerdict\n")
        assert exc.value.line_no == 2
        assert "Verdict" in str(exc.value)

    def test_wrong_field_count(self):
        with pytest.raises(CorpusParseError) as exc:
            parse_corpus("#doc\tD\na\tb\tc\n")
        assert exc.value.line_no == 2

    def test_empty_sentence_text(self):
        with pytest.raises(CorpusParseError):
            parse_corpus("#doc\tD\n\tFacts\n")

    def test_sentence_before_header(self):
        with pytest.raises(CorpusParseError):
            parse_corpus("Some text\tFacts\n")

    def test_duplicate_doc_id(self):
        with pytest.raises(CorpusParseError):
            parse_corpus("#doc\tD\nx\tFacts\n#doc\tD\ny\tFacts\n")

    def test_blank_lines_ignored_and_positions_sequential(self):
        corpus = parse_corpus("#doc\tD\n\nx\tFacts\n\n\ny\tArgument\n")
        assert [s.position for s in corpus.sentences] == [0, 1]

    def test_round_trip_is_identity(self):
        corpus = parse_corpus(TWO_DOC_TSV)
        text = serialize_corpus(corpus)
        assert parse_corpus(text) == corpus
        assert serialize_corpus(parse_corpus(text)) == text


@st.composite
def corpora(draw):
    num_docs = draw(st.integers(1, 4))
    sentences = []
    documents = []
    for j in range(num_docs):
        doc = f"doc{j}"
        documents.append(doc)
        for pos in range(draw(st.integers(1, 6))):
            text = draw(
                st.text(
                    alphabet="abcdefgh XYZ.,;'()0-9§302¶",
                    min_size=1,
                    max_size=20,
                ).filter(lambda t: t.strip() and t != "#doc")
            )
            label = draw(st.sampled_from(LABELS))
            sentences.append(
                LabeledSentence(text=text, label=label, doc_id=doc, position=pos)
            )
    return Corpus(sentences=sentences, documents=documents)


@given(corpora())
@settings(max_examples=50)
def test_serialize_parse_round_trip(corpus):
    assert parse_corpus(serialize_corpus(corpus)) == corpus


class TestDistribution:
    def test_counts_sum_to_corpus_size(self):
        corpus = make_corpus(25)
        counts = class_distribution(corpus)
        assert sum(counts.values()) == 25
        assert set(counts) == set(LABELS)

    def test_empty_corpus_all_zero(self):
        counts = class_distribution(Corpus(sentences=[], documents=[]))
        assert all(v == 0 for v in counts.values())

    def test_single_label(self):
        corpus = make_corpus(3, labels=["Statute"])
        counts = class_distribution(corpus)
        assert counts["Statute"] == 3
        assert sum(counts.values()) == 3


class TestSplit:
    def test_sizes_n10(self):
        train, val = split(make_corpus(10), SplitSpec(0.8, seed=42))
        assert (len(train), len(val)) == (8, 2)

    def test_sizes_full_scale(self):
        corpus = make_corpus(11285, docs=60)
        train, val = split(corpus, SplitSpec(0.8, seed=42))
        assert (len(train), len(val)) == (9028, 2257)

    def test_deterministic(self):
        corpus = make_corpus(40, docs=3)
        spec = SplitSpec(0.8, seed=7)
        assert split(corpus, spec) == split(corpus, spec)
        other = split(corpus, SplitSpec(0.8, seed=8))
        assert other != split(corpus, spec)

    def test_partition_no_loss_no_duplicates(self):
        corpus = make_corpus(37, docs=4)
        train, val = split(corpus, SplitSpec(0.6, seed=1))
        keys = [(s.doc_id, s.position) for s in train + val]
        assert len(keys) == len(set(keys)) == 37
        assert set(keys) == {(s.doc_id, s.position) for s in corpus.sentences}

    def test_document_level_keeps_documents_whole(self):
        corpus = make_corpus(50, docs=7)
        train, val = split(corpus, SplitSpec(0.8, seed=3, mode="document_level"))
        train_docs = {s.doc_id for s in train}
        val_docs = {s.doc_id for s in val}
        assert not train_docs & val_docs
        assert len(train) >= math.floor(0.8 * 50)

    def test_too_small(self):
        with pytest.raises(InputError):
            split(make_corpus(1), SplitSpec(0.8, seed=0))

    def test_bad_fraction(self):
        with pytest.raises(InputError):
            SplitSpec(1.0, seed=0)


def whitespace_tokens(text):
    return text.split()


class TestLengthPercentile:
    def corpus_with_token_counts(self, counts):
        sentences = [
            LabeledSentence(text=" ".join(["tok"] * c), label="Facts", doc_id="d", position=i)
            for i, c in enumerate(counts)
        ]
        return Corpus(sentences=sentences, documents=["d"])

    def test_nearest_rank_1_to_100(self):
        corpus = self.corpus_with_token_counts(range(1, 101))
        assert length_percentile(corpus, whitespace_tokens, 0.98) == 98

    def test_single_sentence(self):
        corpus = self.corpus_with_token_counts([7])
        for q in (0.01, 0.5, 0.98, 1.0):
            assert length_percentile(corpus, whitespace_tokens, q) == 7

    def test_constant_counts(self):
        corpus = self.corpus_with_token_counts([5, 5, 5, 5])
        assert length_percentile(corpus, whitespace_tokens, 0.5) == 5

    @given(
        counts=st.lists(st.integers(1, 40), min_size=1, max_size=30),
        q1=st.floats(0.01, 1.0),
        q2=st.floats(0.01, 1.0),
    )
    @settings(max_examples=60)
    def test_monotone_in_q_and_bounded(self, counts, q1, q2):
        corpus = self.corpus_with_token_counts(counts)
        lo, hi = sorted((q1, q2))
        v_lo = length_percentile(corpus, whitespace_tokens, lo)
        v_hi = length_percentile(corpus, whitespace_tokens, hi)
        assert v_lo <= v_hi <= max(counts)
