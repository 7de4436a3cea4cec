"""Lexically-Misleading Scores and the CS_lambda subsets.

The LMS of an example is the largest probability the lexical-feature
regression assigns to any *incorrect* label. High LMS means the bag of
words alone argues for a wrong answer, so a model that still answers
correctly cannot be leaning on lexical identity. CS_lambda is the subset
of a corpus whose LMS is at least lambda; subsets nest as lambda grows.

Two arithmetic facts follow from the definition and are enforced by
tests: lms <= 1 - p_gold (the wrong labels share what gold does not
take) and lms >= (1 - p_gold) / 2 (the larger of two wrong labels is at
least half their sum).
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

import numpy as np

from .corpus import NliExample
from .errors import DataValidationError
from .features import Vocabulary, featurize
from .labels import Label, parse_gold_label
from .model import BowSoftmaxRegression


def lms_from_probs(probs: Sequence[float], gold: Label) -> float:
    """Largest probability on a label other than gold."""
    return max(p for c, p in enumerate(probs) if c != int(gold))


@dataclass(frozen=True)
class LmsRecord:
    pair_id: str
    gold: Label
    probs: tuple[float, float, float]
    lms: float

    @property
    def misleading_label(self) -> Label:
        """The non-gold label carrying the LMS (ties to the earlier label)."""
        best = None
        for c in Label:
            if c != self.gold and (best is None or self.probs[c] > self.probs[best]):
                best = c
        return best


@dataclass
class LmsStats:
    scored: int = 0
    skipped_undetermined: int = 0


def compute_lms(
    examples: Iterable[NliExample],
    vocab: Vocabulary,
    model: BowSoftmaxRegression,
    stats: LmsStats | None = None,
) -> Iterator[LmsRecord]:
    """Score a stream of examples, one record per determined-gold example.

    Undetermined-gold examples have no LMS by definition; they are
    skipped and counted in ``stats``. The vocabulary must be the one the
    model was trained on (fingerprints are compared up front).
    """
    model._check_fingerprint(vocab.fingerprint)
    if stats is None:
        stats = LmsStats()
    for example in examples:
        if example.gold is None:
            stats.skipped_undetermined += 1
            continue
        probs = model.predict_proba_one(featurize(example, vocab))
        stats.scored += 1
        yield LmsRecord(
            pair_id=example.pair_id,
            gold=example.gold,
            probs=(float(probs[0]), float(probs[1]), float(probs[2])),
            lms=lms_from_probs(probs, example.gold),
        )


# ---------------------------------------------------------------------------
# LMS file round-trip (JSONL, one record per line, corpus order)


def write_lms_jsonl(records: Iterable[LmsRecord], path) -> int:
    n = 0
    with open(path, "w", encoding="utf-8") as fh:
        for rec in records:
            fh.write(
                json.dumps(
                    {
                        "pairID": rec.pair_id,
                        "gold_label": rec.gold.to_string(),
                        "probs": list(rec.probs),
                        "lms": rec.lms,
                    },
                    ensure_ascii=False,
                )
            )
            fh.write("\n")
            n += 1
    return n


def read_lms_jsonl(path) -> Iterator[LmsRecord]:
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
                gold = parse_gold_label(obj["gold_label"])
                if gold is None:
                    raise ValueError("undetermined gold in LMS file")
                probs = tuple(float(p) for p in obj["probs"])
                if len(probs) != 3:
                    raise ValueError("probs must have 3 entries")
                rec = LmsRecord(
                    pair_id=str(obj["pairID"]),
                    gold=gold,
                    probs=probs,
                    lms=float(obj["lms"]),
                )
            except (KeyError, ValueError, json.JSONDecodeError) as exc:
                raise DataValidationError(f"{path}: line {lineno}: {exc}") from exc
            yield rec


def lms_histogram(records: Iterable[LmsRecord], bins: int = 10) -> list[int]:
    """Counts per equal-width LMS bin over [0, 1], last bin right-closed."""
    counts = [0] * bins
    for rec in records:
        counts[min(int(rec.lms * bins), bins - 1)] += 1
    return counts


# ---------------------------------------------------------------------------
# CS_lambda extraction


@dataclass(frozen=True)
class CsSubset:
    lam: float
    pair_ids: tuple[str, ...]
    source: str = "-"  # provenance: model fingerprint + corpus name
    n_scored: int = 0  # size of the scored set; informational, not persisted

    def __len__(self) -> int:
        return len(self.pair_ids)


def subset_cs(
    records: Iterable[LmsRecord], lam: float, source: str = "-"
) -> CsSubset:
    """Pair ids with lms >= lam, in scoring order."""
    if not 0.0 <= lam <= 1.0:
        raise ValueError("lambda must be in [0, 1]")
    ids = []
    n = 0
    for rec in records:
        n += 1
        if rec.lms >= lam:
            ids.append(rec.pair_id)
    return CsSubset(lam=lam, pair_ids=tuple(ids), source=source, n_scored=n)


def write_subset_ids(subset: CsSubset, path) -> None:
    """Id-list file: two header lines (lambda, source), then one id per line."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"# lambda = {subset.lam!r}\n")
        fh.write(f"# source = {subset.source}\n")
        for pair_id in subset.pair_ids:
            fh.write(pair_id + "\n")


def read_subset_ids(path) -> CsSubset:
    lam = None
    source = "-"
    ids = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.rstrip("\n")
            if line.startswith("#"):
                body = line[1:].strip()
                key, _, value = body.partition("=")
                key, value = key.strip(), value.strip()
                if key == "lambda":
                    try:
                        lam = float(value)
                    except ValueError as exc:
                        raise DataValidationError(
                            f"{path}: bad header: {line}"
                        ) from exc
                elif key == "source":
                    source = value
                continue
            if line:
                ids.append(line)
    if lam is None:
        raise DataValidationError(f"{path}: missing '# lambda =' header")
    return CsSubset(lam=lam, pair_ids=tuple(ids), source=source)


def filter_jsonl_by_ids(
    in_path, ids: Iterable[str], out_path
) -> tuple[int, list[str]]:
    """Copy corpus lines whose pairID is in ids, bytes untouched.

    Output preserves corpus order regardless of id order. Returns the
    number written and any requested ids never seen in the corpus.
    """
    wanted = set(ids)
    seen: set[str] = set()
    written = 0
    with open(in_path, encoding="utf-8") as src, open(
        out_path, "w", encoding="utf-8"
    ) as dst:
        for line in src:
            if not line.strip():
                continue
            try:
                pair_id = str(json.loads(line).get("pairID"))
            except json.JSONDecodeError:
                continue
            if pair_id in wanted:
                dst.write(line if line.endswith("\n") else line + "\n")
                seen.add(pair_id)
                written += 1
    missing = sorted(wanted - seen)
    return written, missing


def percentile_lms(records: Iterable[LmsRecord], q: float) -> float:
    """Linear-interpolated percentile of the LMS distribution."""
    values = np.sort(np.fromiter((r.lms for r in records), dtype=np.float64))
    if values.size == 0:
        raise DataValidationError("no LMS records")
    return float(np.percentile(values, q))
