"""Scoring external prediction files against gold sets.

The unit of evaluation is a list of (pair_id, gold) items and a mapping
of predicted labels. Accuracy is computed over the covered ids only;
ids without a prediction lower coverage and are reported, never
silently dropped into the denominator. A strict mode turns missing
predictions into errors for pipelines that require full coverage.

Two reference rows accompany model scores: the majority-vote baseline
(the best constant classifier for the set, ties resolved in label
order) and a human estimate from the annotator votes, either averaging
all slots or following one fixed slot.
"""

from __future__ import annotations

import csv
import json
import os
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

from .corpus import NliExample
from .errors import DataValidationError
from .labels import LABELS, Label, parse_gold_label

EvalItem = tuple[str, Label]


# ---------------------------------------------------------------------------
# Prediction files


@dataclass(frozen=True)
class PredictionSet:
    """One model's predictions: label per pair id, probabilities optional."""

    model_name: str
    labels: dict[str, Label]
    probs: dict[str, tuple[float, float, float]]

    def __len__(self) -> int:
        return len(self.labels)


def load_predictions(path, model_name: str | None = None) -> PredictionSet:
    """Read a prediction file, TSV or JSONL, sniffing by first character.

    TSV rows are "pair_id<TAB>label" or "pair_id<TAB>label<TAB>pE<TAB>
    pC<TAB>pN"; an optional header row is skipped. JSONL objects need
    "pairID", one of "label"/"prediction"/"gold_label", and may carry
    "probs". Probabilities must sum to 1 within 1e-6. Any repeated pair
    id is an error naming it, and an undetermined label ("-") is always
    an error: a prediction file must commit.
    """
    if model_name is None:
        model_name = _stem(path)
    labels: dict[str, Label] = {}
    probs: dict[str, tuple[float, float, float]] = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.rstrip("\n")
            if not line.strip():
                continue
            if line.lstrip().startswith("{"):
                pair_id, raw, triple = _pred_from_json(line, path, lineno)
            else:
                parts = [p.strip() for p in line.split("\t")]
                if len(parts) not in (2, 5):
                    raise DataValidationError(
                        f"{path}: line {lineno}: expected 2 or 5 tab-separated "
                        f"columns, got {len(parts)}"
                    )
                pair_id, raw = parts[0], parts[1]
                if lineno == 1 and _looks_like_header(pair_id, raw):
                    continue
                triple = tuple(parts[2:]) if len(parts) == 5 else None
            label = parse_gold_label(raw)
            if label is None:
                raise DataValidationError(
                    f"{path}: line {lineno}: prediction for {pair_id} is undetermined"
                )
            if pair_id in labels:
                raise DataValidationError(
                    f"{path}: line {lineno}: duplicate pairID {pair_id}"
                )
            labels[pair_id] = label
            if triple is not None:
                probs[pair_id] = _validate_probs(triple, path, lineno)
    if not labels:
        raise DataValidationError(f"{path}: no predictions found")
    return PredictionSet(model_name=model_name, labels=labels, probs=probs)


def _stem(path) -> str:
    return os.path.splitext(os.path.basename(str(path)))[0]


def _validate_probs(triple, path, lineno: int) -> tuple[float, float, float]:
    try:
        p = tuple(float(v) for v in triple)
    except (TypeError, ValueError) as exc:
        raise DataValidationError(
            f"{path}: line {lineno}: malformed probability row"
        ) from exc
    if len(p) != 3 or abs(sum(p) - 1.0) > 1e-6 or any(v < 0 for v in p):
        raise DataValidationError(
            f"{path}: line {lineno}: probabilities must be 3 nonnegatives "
            f"summing to 1 within 1e-6 (got sum {sum(p)!r})"
        )
    return p


def _pred_from_json(line: str, path, lineno: int) -> tuple[str, str, tuple | None]:
    try:
        obj = json.loads(line)
    except json.JSONDecodeError as exc:
        raise DataValidationError(f"{path}: line {lineno}: {exc}") from exc
    for key in ("label", "prediction", "gold_label"):
        if key in obj:
            return (
                str(obj.get("pairID", f"L{lineno}")),
                str(obj[key]),
                tuple(obj["probs"]) if "probs" in obj else None,
            )
    raise DataValidationError(f"{path}: line {lineno}: no label field")


def _looks_like_header(col0: str, col1: str) -> bool:
    return col0.lower() in ("pairid", "pair_id", "id") or col1.lower() in (
        "label",
        "prediction",
        "gold_label",
    )


def eval_items(examples: Iterable[NliExample]) -> list[EvalItem]:
    """(pair_id, gold) for every determined-gold example, corpus order."""
    return [(ex.pair_id, ex.gold) for ex in examples if ex.gold is not None]


# ---------------------------------------------------------------------------
# Core metrics


@dataclass(frozen=True)
class EvalResult:
    model: str
    dataset: str
    n: int
    n_covered: int
    accuracy: float
    distribution: tuple[float, float, float]  # predicted-label shares, sums to 1
    missing: tuple[str, ...] = ()

    @property
    def coverage(self) -> float:
        return self.n_covered / self.n


def evaluate(
    preds: Mapping[str, Label] | PredictionSet,
    eval_set: Sequence[EvalItem],
    model: str | None = None,
    dataset: str = "set",
    strict: bool = False,
) -> EvalResult:
    """Accuracy and predicted-label distribution over the covered ids.

    Coverage below 1 is legal (reported, and the missing ids are kept on
    the result) unless strict is set; coverage 0 is always an error
    since no accuracy exists. Permuting eval_set or the prediction rows
    never changes the metrics.
    """
    if isinstance(preds, PredictionSet):
        if model is None:
            model = preds.model_name
        preds = preds.labels
    if model is None:
        model = "model"
    if not eval_set:
        raise DataValidationError("evaluation set is empty")
    n_correct = 0
    counts = [0, 0, 0]
    missing = []
    for pair_id, gold in eval_set:
        pred = preds.get(pair_id)
        if pred is None:
            missing.append(pair_id)
            continue
        counts[int(pred)] += 1
        if pred == gold:
            n_correct += 1
    n_covered = sum(counts)
    if strict and missing:
        raise DataValidationError(
            f"{len(missing)} of {len(eval_set)} ids have no prediction "
            f"(first: {missing[0]})"
        )
    if n_covered == 0:
        raise DataValidationError("no evaluation id has a prediction")
    return EvalResult(
        model=model,
        dataset=dataset,
        n=len(eval_set),
        n_covered=n_covered,
        accuracy=n_correct / n_covered,
        distribution=tuple(c / n_covered for c in counts),
        missing=tuple(missing),
    )


def majority_vote_baseline(eval_set: Sequence[EvalItem]) -> tuple[float, Label]:
    """Best constant classifier on the set: (its accuracy, the label).

    The accuracy equals the majority label's share, so it is always at
    least 1/3 on a 3-label set. Ties go to the earlier label in
    (entailment, contradiction, neutral).
    """
    if not eval_set:
        raise DataValidationError("evaluation set is empty")
    counts = [0, 0, 0]
    for _, gold in eval_set:
        counts[int(gold)] += 1
    best = max(LABELS, key=lambda lab: counts[int(lab)])  # max is order-stable
    return counts[int(best)] / len(eval_set), best


def human_estimate(
    examples: Iterable[NliExample],
    eval_ids: set[str] | None = None,
    mode: str = "average",
    slot: int = 0,
) -> float:
    """Agreement between annotator votes and gold on an id set.

    One annotator per example plays "model": slot k means the k-th vote
    in file order. mode "single" returns slot ``slot``'s accuracy over
    the examples that have that slot; mode "average" returns the mean of
    every slot's accuracy. An abstaining vote ("-") counts as incorrect.
    Neither mode is claimed canonical; with a full determined vote set
    per example they coincide up to slot-count weighting.
    """
    if mode not in ("average", "single"):
        raise ValueError(f"unknown mode {mode!r}")
    totals: dict[int, int] = {}
    correct: dict[int, int] = {}
    for ex in examples:
        if ex.gold is None or not ex.annotator_labels:
            continue
        if eval_ids is not None and ex.pair_id not in eval_ids:
            continue
        for k, vote in enumerate(ex.annotator_labels):
            totals[k] = totals.get(k, 0) + 1
            if vote == ex.gold:
                correct[k] = correct.get(k, 0) + 1
    if not totals:
        raise DataValidationError("no annotator votes in the evaluation set")
    if mode == "single":
        if slot not in totals:
            raise DataValidationError(f"no example has annotator slot {slot}")
        return correct.get(slot, 0) / totals[slot]
    per_slot = [correct.get(k, 0) / totals[k] for k in sorted(totals)]
    return sum(per_slot) / len(per_slot)


# ---------------------------------------------------------------------------
# Report assembly

CSV_COLUMNS = ("model", "set", "n", "coverage", "accuracy", "pct_E", "pct_C", "pct_N")


@dataclass
class ReportRow:
    model: str
    dataset: str
    n: int
    coverage: float
    accuracy: float
    distribution: tuple[float, float, float]

    @classmethod
    def from_result(cls, r: EvalResult) -> "ReportRow":
        return cls(r.model, r.dataset, r.n, r.coverage, r.accuracy, r.distribution)

    def as_record(self) -> dict:
        return {
            "model": self.model,
            "set": self.dataset,
            "n": self.n,
            "coverage": self.coverage,
            "accuracy": self.accuracy,
            "pct_E": self.distribution[0],
            "pct_C": self.distribution[1],
            "pct_N": self.distribution[2],
        }


def write_report(rows: Sequence[ReportRow], fmt: str, path) -> None:
    """Serialize rows as csv, markdown, or json; row order is preserved.

    Output is a pure function of the rows: floats use repr (shortest
    round-trip form) and no environment detail or clock is recorded.
    """
    records = [row.as_record() for row in rows]
    if fmt == "csv":
        with open(path, "w", encoding="utf-8", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(CSV_COLUMNS)
            for rec in records:
                writer.writerow([_cell(rec[c]) for c in CSV_COLUMNS])
    elif fmt == "json":
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(records, fh, indent=2)
            fh.write("\n")
    elif fmt == "markdown":
        with open(path, "w", encoding="utf-8") as fh:
            fh.write("| " + " | ".join(CSV_COLUMNS) + " |\n")
            fh.write("|" + "|".join(" --- " for _ in CSV_COLUMNS) + "|\n")
            for rec in records:
                fh.write(
                    "| " + " | ".join(_cell(rec[c]) for c in CSV_COLUMNS) + " |\n"
                )
    else:
        raise DataValidationError(f"unknown report format {fmt!r}")


def _cell(value) -> str:
    if isinstance(value, float):
        return repr(value)
    return str(value)


def read_report_csv(path) -> list[ReportRow]:
    rows = []
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        if tuple(reader.fieldnames or ()) != CSV_COLUMNS:
            raise DataValidationError(f"{path}: unexpected report columns")
        for rec in reader:
            rows.append(
                ReportRow(
                    model=rec["model"],
                    dataset=rec["set"],
                    n=int(rec["n"]),
                    coverage=float(rec["coverage"]),
                    accuracy=float(rec["accuracy"]),
                    distribution=(
                        float(rec["pct_E"]),
                        float(rec["pct_C"]),
                        float(rec["pct_N"]),
                    ),
                )
            )
    return rows
