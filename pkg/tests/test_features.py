"""Feature extraction: content words, key order, vocabulary, hashing."""

from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from sklearn.exceptions import NotFittedError

from compsense import (
    CONTENT_TAGS,
    DataValidationError,
    Label,
    LexicalFeaturizer,
    NliExample,
    Vocabulary,
    build_vocab,
    content_words,
    extract_keys,
    featurize,
    hashed_vocab,
    is_content_word,
)

# ---------------------------------------------------------------------------
# Content-word predicate


def test_content_tags_exact_enumeration():
    assert CONTENT_TAGS == {
        "NN", "NNS", "NNP", "NNPS",
        "VB", "VBD", "VBG", "VBN", "VBP", "VBZ",
        "JJ", "JJR", "JJS",
        "RB", "RBR", "RBS",
    }
    assert len(CONTENT_TAGS) == 16


@pytest.mark.parametrize("pos", sorted(CONTENT_TAGS))
def test_content_tags_accepted(pos):
    assert is_content_word(pos)


@pytest.mark.parametrize(
    "pos",
    # same leading letters as content families, still function tags
    ["DT", "IN", "PRP", "PRP$", "CC", "CD", "MD", "RP", "WRB", "JJSS", "N", ".", ""],
)
def test_function_tags_rejected(pos):
    assert not is_content_word(pos)


def test_content_words_lowercase_in_order():
    tokens = (
        ("The", "DT"),
        ("Big", "JJ"),
        ("Dog", "NN"),
        ("is", "VBZ"),
        ("Big", "JJ"),
    )
    assert content_words(tokens) == ["big", "dog", "is", "big"]


# ---------------------------------------------------------------------------
# Key extraction


def _ex(premise, hypothesis, gold=Label.ENTAILMENT, pair_id="t1", votes=None):
    return NliExample(
        pair_id=pair_id,
        premise_text=" ".join(t for t, _ in premise),
        hypothesis_text=" ".join(t for t, _ in hypothesis),
        premise_tokens=tuple(premise),
        hypothesis_tokens=tuple(hypothesis),
        gold=gold,
        annotator_labels=tuple(votes) if votes else ((gold,) if gold else ()),
    )


PREMISE = [("A", "DT"), ("big", "JJ"), ("dog", "NN"), ("runs", "VBZ")]
HYPOTHESIS = [("The", "DT"), ("dog", "NN"), ("sleeps", "VBZ")]


def test_extract_keys_order_and_contents():
    keys = extract_keys(_ex(PREMISE, HYPOTHESIS))
    assert keys == [
        ("pu", "big"),
        ("pu", "dog"),
        ("pu", "runs"),
        ("hu", "dog"),
        ("hu", "sleeps"),
        ("cu", "big", "dog"),
        ("cu", "big", "sleeps"),
        ("cu", "dog", "dog"),
        ("cu", "dog", "sleeps"),
        ("cu", "runs", "dog"),
        ("cu", "runs", "sleeps"),
    ]


def test_extract_keys_dedupes_repeats():
    premise = [("dog", "NN"), ("sees", "VBZ"), ("dog", "NN"), ("Dog", "NN")]
    keys = extract_keys(_ex(premise, [("cat", "NN")]))
    assert keys == [
        ("pu", "dog"),
        ("pu", "sees"),
        ("hu", "cat"),
        ("cu", "dog", "cat"),
        ("cu", "sees", "cat"),
    ]


def test_extract_keys_indicator_set_sizes():
    # n distinct premise words, m hypothesis words -> n + m + n*m keys
    premise = [(w, "NN") for w in ("a1", "a2", "a3")]
    hypothesis = [(w, "NN") for w in ("b1", "b2")]
    keys = extract_keys(_ex(premise, hypothesis))
    assert len(keys) == 3 + 2 + 6
    assert len(set(keys)) == len(keys)


# ---------------------------------------------------------------------------
# Vocabulary construction


def test_build_vocab_document_frequency():
    # "dog" appears in two examples; "cat" twice inside one example only
    e1 = _ex([("dog", "NN"), ("cat", "NN"), ("cat", "NN")], [("x", "NN")])
    e2 = _ex([("dog", "NN")], [("y", "NN")])
    vocab = build_vocab([e1, e2], min_count=2)
    kept = set(vocab.keys)
    assert ("pu", "dog") in kept
    assert ("pu", "cat") not in kept
    assert ("hu", "x") not in kept


def test_build_vocab_first_occurrence_order():
    e1 = _ex([("b", "NN"), ("a", "NN")], [("z", "NN")])
    e2 = _ex([("a", "NN"), ("b", "NN")], [("z", "NN")])
    vocab = build_vocab([e1, e2], min_count=2)
    # e1 fixes the order: premise words b then a, then hypothesis, then crosses
    assert vocab.keys == (
        ("pu", "b"),
        ("pu", "a"),
        ("hu", "z"),
        ("cu", "b", "z"),
        ("cu", "a", "z"),
    )


def test_min_count_one_keeps_everything():
    e1 = _ex(PREMISE, HYPOTHESIS)
    vocab = build_vocab([e1], min_count=1)
    assert len(vocab.keys) == len(extract_keys(e1))


def test_vocab_save_load_round_trip(tmp_path):
    vocab = build_vocab([_ex(PREMISE, HYPOTHESIS)], min_count=1)
    path = tmp_path / "v.voc"
    vocab.save(path)
    loaded = Vocabulary.load(path)
    assert loaded.keys == vocab.keys
    assert loaded.min_count == vocab.min_count
    assert loaded.fingerprint == vocab.fingerprint


def test_vocab_fingerprint_sensitive_to_keys():
    v1 = Vocabulary(keys=(("pu", "dog"),), min_count=1)
    v2 = Vocabulary(keys=(("pu", "cat"),), min_count=1)
    v3 = Vocabulary(keys=(("hu", "dog"),), min_count=1)
    prints = {v.fingerprint for v in (v1, v2, v3)}
    assert len(prints) == 3


def test_vocab_load_rejects_wrong_magic(tmp_path):
    path = tmp_path / "bad.voc"
    path.write_text("something else\n")
    with pytest.raises(DataValidationError):
        Vocabulary.load(path)


def test_vocab_load_rejects_truncated_header(tmp_path):
    path = tmp_path / "trunc.voc"
    path.write_text("compsense-vocab 1\n")
    with pytest.raises(DataValidationError):
        Vocabulary.load(path)


# ---------------------------------------------------------------------------
# Featurization


def test_featurize_sorted_unique_indices():
    e1 = _ex(PREMISE, HYPOTHESIS)
    vocab = build_vocab([e1], min_count=1)
    idx = featurize(e1, vocab)
    assert idx.dtype == np.int32
    assert list(idx) == sorted(set(idx))
    assert len(idx) == len(extract_keys(e1))


def test_featurize_drops_out_of_vocabulary():
    vocab = build_vocab([_ex(PREMISE, HYPOTHESIS)], min_count=1)
    unseen = _ex([("zebra", "NN")], [("quagga", "NN")])
    assert len(featurize(unseen, vocab)) == 0


def test_featurize_is_a_pure_function_of_one_example(corpus200):
    vocab = build_vocab(corpus200, min_count=2)
    one = corpus200[7]
    alone = featurize(one, vocab)
    again = featurize(one, vocab)
    assert np.array_equal(alone, again)


# ---------------------------------------------------------------------------
# Hashed mode


def test_hashed_vocab_indices_in_range():
    vocab = hashed_vocab(hash_bits=10)
    assert vocab.n_features == 1024
    e1 = _ex(PREMISE, HYPOTHESIS)
    idx = featurize(e1, vocab)
    assert len(idx) > 0
    assert idx.min() >= 0 and idx.max() < 1024


def test_hashed_vocab_deterministic():
    v1 = hashed_vocab(hash_bits=12)
    v2 = hashed_vocab(hash_bits=12)
    key = ("cu", "dog", "cat")
    assert v1.index_of(key) == v2.index_of(key)
    assert v1.fingerprint == v2.fingerprint


def test_hashed_vocab_never_misses():
    vocab = hashed_vocab(hash_bits=8)
    for key in [("pu", "anything"), ("hu", "at"), ("cu", "all", "ever")]:
        assert vocab.index_of(key) is not None


def test_hashed_vocab_round_trip(tmp_path):
    vocab = hashed_vocab(hash_bits=16)
    path = tmp_path / "h.voc"
    vocab.save(path)
    loaded = Vocabulary.load(path)
    assert loaded.hash_bits == 16
    assert loaded.n_features == 1 << 16
    assert loaded.fingerprint == vocab.fingerprint


def test_hashed_vocab_rejects_enumerated_keys():
    with pytest.raises(ValueError):
        Vocabulary(keys=(("pu", "dog"),), min_count=1, hash_bits=4)


@given(st.integers(min_value=1, max_value=30), st.text(min_size=1, max_size=12))
@settings(max_examples=100, deadline=None)
def test_hash_indices_cover_only_valid_range(bits, word):
    vocab = hashed_vocab(hash_bits=bits)
    idx = vocab.index_of(("pu", word))
    assert 0 <= idx < (1 << bits)


# ---------------------------------------------------------------------------
# Estimator wrapper


def test_featurizer_requires_fit_before_transform():
    with pytest.raises(NotFittedError):
        LexicalFeaturizer().transform([_ex(PREMISE, HYPOTHESIS)])


def test_featurizer_fit_transform(corpus200):
    featurizer = LexicalFeaturizer(min_count=2)
    X = featurizer.fit(corpus200).transform(corpus200)
    assert featurizer.n_features_ == featurizer.vocabulary_.n_features
    assert X.n_features == featurizer.n_features_
    assert len(X) == len(corpus200)
    assert X.pair_ids[0] == corpus200[0].pair_id
    # gold "-" rows are present, so no label vector is exposed
    assert X.y is None


def test_featurizer_labels_when_all_determined(corpus200_determined):
    featurizer = LexicalFeaturizer(min_count=2)
    X = featurizer.fit(corpus200_determined).transform(corpus200_determined)
    assert X.y is not None
    assert X.y.dtype == np.int8
    assert len(X.y) == len(corpus200_determined)
    assert set(np.unique(X.y)) <= {0, 1, 2}


def test_featurizer_get_params_round_trip():
    featurizer = LexicalFeaturizer(min_count=3, hashing=True, hash_bits=14)
    params = featurizer.get_params()
    assert params == {"min_count": 3, "hashing": True, "hash_bits": 14}
    clone = LexicalFeaturizer(**params)
    assert clone.get_params() == params
