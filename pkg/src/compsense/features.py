"""Lexical indicator features over content words.

The feature space for a premise/hypothesis pair is the union of three
key families, all built from lowercased content-word surfaces:

* ``("pu", w)``: word w occurs in the premise,
* ``("hu", w)``: word w occurs in the hypothesis,
* ``("cu", wp, wh)``: ordered co-occurrence, wp in the premise and wh in
  the hypothesis.

Features are binary indicators; repeats within a sentence do not raise
the value. Content words are those whose Penn-Treebank POS tag is in the
16-tag noun/verb/adjective/adverb set below, so whitespace-fallback
examples (POS "UNK") contribute no features at all.

A Vocabulary either enumerates keys explicitly (document frequency at
least ``min_count``, indices in first-occurrence order) or hashes keys
into 2**hash_bits buckets. Either way it exposes a fingerprint that
downstream artifacts carry so mismatched vocabulary/model pairs are
refused instead of silently misscoring.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from typing import Iterable, Iterator

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from .corpus import NliExample
from .errors import DataValidationError

CONTENT_TAGS = frozenset(
    {
        "NN", "NNS", "NNP", "NNPS",
        "VB", "VBD", "VBG", "VBN", "VBP", "VBZ",
        "JJ", "JJR", "JJS",
        "RB", "RBR", "RBS",
    }
)

FeatureKey = tuple  # ("pu", w) | ("hu", w) | ("cu", wp, wh)

MAX_HASH_BITS = 30


def is_content_word(pos: str) -> bool:
    return pos in CONTENT_TAGS


def content_words(tokens: Iterable[tuple[str, str]]) -> list[str]:
    """Lowercased surfaces of content-word tokens, in sentence order."""
    return [tok.lower() for tok, pos in tokens if pos in CONTENT_TAGS]


def extract_keys(example: NliExample) -> list[FeatureKey]:
    """Distinct feature keys for one example, in first-occurrence order.

    Order matters only for vocabulary construction: premise unigrams,
    then hypothesis unigrams, then cross pairs with the premise word
    varying slowest.
    """
    p_words = list(dict.fromkeys(content_words(example.premise_tokens)))
    h_words = list(dict.fromkeys(content_words(example.hypothesis_tokens)))
    keys: list[FeatureKey] = [("pu", w) for w in p_words]
    keys.extend(("hu", w) for w in h_words)
    keys.extend(("cu", wp, wh) for wp in p_words for wh in h_words)
    return keys


def encode_key(key: FeatureKey) -> bytes:
    return "\t".join(key).encode("utf-8")


def _hash_index(key: FeatureKey, n_buckets: int) -> int:
    digest = hashlib.blake2b(encode_key(key), digest_size=8).digest()
    return int.from_bytes(digest, "big") % n_buckets


_VOCAB_MAGIC = "compsense-vocab 1"


@dataclass(frozen=True)
class Vocabulary:
    """Mapping from feature keys to column indices.

    Exactly one of two modes: enumerated (keys listed, ``hash_bits`` 0)
    or hashed (keys empty, ``n_features == 2**hash_bits``).
    """

    keys: tuple[FeatureKey, ...]
    min_count: int
    hash_bits: int = 0
    _index: dict = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        if self.hash_bits:
            if self.keys:
                raise ValueError("hashed vocabulary does not enumerate keys")
            if not 1 <= self.hash_bits <= MAX_HASH_BITS:
                raise ValueError(f"hash_bits must be in 1..{MAX_HASH_BITS}")
        else:
            object.__setattr__(
                self, "_index", {k: i for i, k in enumerate(self.keys)}
            )

    @property
    def hashed(self) -> bool:
        return self.hash_bits > 0

    @property
    def n_features(self) -> int:
        return (1 << self.hash_bits) if self.hashed else len(self.keys)

    def index_of(self, key: FeatureKey) -> int | None:
        """Column for a key; None when an enumerated vocab lacks it."""
        if self.hashed:
            return _hash_index(key, 1 << self.hash_bits)
        return self._index.get(key)

    def _canonical_lines(self) -> Iterator[bytes]:
        yield _VOCAB_MAGIC.encode()
        yield (
            f"n_features={self.n_features} min_count={self.min_count} "
            f"hash_bits={self.hash_bits}"
        ).encode()
        for key in self.keys:
            yield encode_key(key)

    @property
    def fingerprint(self) -> str:
        h = hashlib.sha256()
        for line in self._canonical_lines():
            h.update(line)
            h.update(b"\n")
        return h.hexdigest()

    def save(self, path) -> None:
        with open(path, "wb") as fh:
            for line in self._canonical_lines():
                fh.write(line)
                fh.write(b"\n")

    @classmethod
    def load(cls, path) -> "Vocabulary":
        with open(path, encoding="utf-8") as fh:
            magic = fh.readline().rstrip("\n")
            if magic != _VOCAB_MAGIC:
                raise DataValidationError(f"{path}: not a vocabulary file")
            header = dict(
                item.split("=", 1) for item in fh.readline().split()
            )
            try:
                n_features = int(header["n_features"])
                min_count = int(header["min_count"])
                hash_bits = int(header["hash_bits"])
            except (KeyError, ValueError) as exc:
                raise DataValidationError(f"{path}: bad vocabulary header") from exc
            keys = []
            for lineno, line in enumerate(fh, start=3):
                parts = line.rstrip("\n").split("\t")
                if parts[0] not in ("pu", "hu", "cu") or len(parts) not in (2, 3):
                    raise DataValidationError(f"{path}: line {lineno}: bad key")
                keys.append(tuple(parts))
        vocab = cls(keys=tuple(keys), min_count=min_count, hash_bits=hash_bits)
        if vocab.n_features != n_features:
            raise DataValidationError(
                f"{path}: header says {n_features} features, "
                f"found {vocab.n_features}"
            )
        return vocab


def build_vocab(
    examples: Iterable[NliExample], min_count: int = 2
) -> Vocabulary:
    """Enumerate keys whose document frequency reaches min_count.

    Document frequency: each example contributes at most 1 per key.
    Index order is order of first occurrence in the stream, so the
    vocabulary is a pure function of the example sequence.
    """
    counts: dict[FeatureKey, int] = {}
    for example in examples:
        for key in extract_keys(example):
            counts[key] = counts.get(key, 0) + 1
    kept = tuple(k for k, c in counts.items() if c >= min_count)
    return Vocabulary(keys=kept, min_count=min_count)


def hashed_vocab(hash_bits: int, min_count: int = 0) -> Vocabulary:
    return Vocabulary(keys=(), min_count=min_count, hash_bits=hash_bits)


def featurize(example: NliExample, vocab: Vocabulary) -> np.ndarray:
    """Sorted distinct active column indices for one example (int32).

    Hash collisions and out-of-vocabulary keys collapse silently: the
    vector stays an indicator over known columns.
    """
    cols = {
        idx
        for key in extract_keys(example)
        if (idx := vocab.index_of(key)) is not None
    }
    return np.array(sorted(cols), dtype=np.int32)


@dataclass(frozen=True)
class FeatureMatrix:
    """A featurized batch: one sorted index array per example.

    Carries the producing vocabulary's fingerprint so a model trained on
    a different vocabulary can refuse to score it.
    """

    rows: tuple
    n_features: int
    vocab_fingerprint: str
    y: np.ndarray | None = None
    pair_ids: tuple = ()

    def __len__(self) -> int:
        return len(self.rows)


class LexicalFeaturizer(BaseEstimator, TransformerMixin):
    """Estimator wrapper: fit builds a Vocabulary, transform featurizes.

    fit(X[, y]) takes an iterable of NliExample; undetermined-gold
    examples still shape the vocabulary only if passed in, so callers
    decide the training population. transform returns a FeatureMatrix
    whose y holds gold labels when every example has one.
    """

    def __init__(self, min_count: int = 2, hashing: bool = False, hash_bits: int = 20):
        self.min_count = min_count
        self.hashing = hashing
        self.hash_bits = hash_bits

    def fit(self, X: Iterable[NliExample], y=None) -> "LexicalFeaturizer":
        if self.hashing:
            self.vocabulary_ = hashed_vocab(self.hash_bits, self.min_count)
        else:
            self.vocabulary_ = build_vocab(X, min_count=self.min_count)
        self.n_features_ = self.vocabulary_.n_features
        return self

    def transform(self, X: Iterable[NliExample]) -> FeatureMatrix:
        check_is_fitted(self, "vocabulary_")
        rows, labels, pair_ids = [], [], []
        for example in X:
            rows.append(featurize(example, self.vocabulary_))
            labels.append(-1 if example.gold is None else int(example.gold))
            pair_ids.append(example.pair_id)
        y = np.array(labels, dtype=np.int8)
        return FeatureMatrix(
            rows=tuple(rows),
            n_features=self.vocabulary_.n_features,
            vocab_fingerprint=self.vocabulary_.fingerprint,
            y=y if (y >= 0).all() else None,
            pair_ids=tuple(pair_ids),
        )
