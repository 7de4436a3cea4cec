"""Prediction loading, accuracy/coverage metrics, baselines, reports."""

from __future__ import annotations

import json

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from compsense import (
    DataValidationError,
    Label,
    NliExample,
    ReportRow,
    eval_items,
    evaluate,
    human_estimate,
    load_predictions,
    majority_vote_baseline,
    read_report_csv,
    write_report,
)

E, C, N = Label.ENTAILMENT, Label.CONTRADICTION, Label.NEUTRAL


# ---------------------------------------------------------------------------
# Prediction files


def test_load_two_column_tsv(tmp_path):
    path = tmp_path / "p.tsv"
    path.write_text("a\tentailment\nb\tcontradiction\nc\tneutral\n")
    preds = load_predictions(path)
    assert preds.model_name == "p"
    assert len(preds) == 3
    assert preds.labels == {"a": E, "b": C, "c": N}
    assert preds.probs == {}


def test_header_row_skipped(tmp_path):
    path = tmp_path / "h.tsv"
    path.write_text("pairID\tlabel\na\tentailment\n")
    assert load_predictions(path).labels == {"a": E}


def test_five_column_tsv_carries_probs(tmp_path):
    path = tmp_path / "p5.tsv"
    path.write_text("a\tentailment\t0.8\t0.1\t0.1\n")
    preds = load_predictions(path)
    assert preds.probs["a"] == (0.8, 0.1, 0.1)


def test_jsonl_predictions(tmp_path):
    path = tmp_path / "p.jsonl"
    path.write_text(
        json.dumps({"pairID": "a", "label": "neutral", "probs": [0.2, 0.2, 0.6]})
        + "\n"
    )
    preds = load_predictions(path, model_name="external")
    assert preds.model_name == "external"
    assert preds.labels == {"a": N}
    assert preds.probs["a"] == (0.2, 0.2, 0.6)


def test_duplicate_pair_id_rejected(tmp_path):
    path = tmp_path / "dup.tsv"
    path.write_text("a\tentailment\na\tentailment\n")
    with pytest.raises(DataValidationError) as exc_info:
        load_predictions(path)
    assert "duplicate" in str(exc_info.value)
    assert "a" in str(exc_info.value)


def test_probs_must_sum_to_one(tmp_path):
    path = tmp_path / "bad.tsv"
    path.write_text("a\tentailment\t0.5\t0.3\t0.1\n")
    with pytest.raises(DataValidationError) as exc_info:
        load_predictions(path)
    assert "summing to 1" in str(exc_info.value)


def test_undetermined_prediction_rejected(tmp_path):
    path = tmp_path / "abstain.tsv"
    path.write_text("a\t-\n")
    with pytest.raises(DataValidationError) as exc_info:
        load_predictions(path)
    assert "undetermined" in str(exc_info.value)


def test_wrong_column_count_rejected(tmp_path):
    path = tmp_path / "cols.tsv"
    path.write_text("a\tentailment\t0.5\n")
    with pytest.raises(DataValidationError):
        load_predictions(path)


def test_empty_prediction_file_rejected(tmp_path):
    path = tmp_path / "empty.tsv"
    path.write_text("\n")
    with pytest.raises(DataValidationError):
        load_predictions(path)


def test_bundled_prediction_fixtures_load():
    from conftest import FIXTURES

    perfect = load_predictions(FIXTURES / "preds_perfect.tsv")
    constant = load_predictions(FIXTURES / "preds_constant_e.tsv")
    partial = load_predictions(FIXTURES / "preds_partial.tsv")
    probs = load_predictions(FIXTURES / "preds_probs.tsv")
    assert len(perfect) == 194
    assert len(constant) == 200
    assert len(partial) == 120
    assert set(constant.labels.values()) == {E}
    assert len(probs.probs) == 10


# ---------------------------------------------------------------------------
# Core metrics


SET_ABC = [("a", E), ("b", C), ("c", N)]


def test_accuracy_all_correct():
    result = evaluate({"a": E, "b": C, "c": N}, SET_ABC, model="m")
    assert result.accuracy == 1.0
    assert result.coverage == 1.0
    assert result.n == result.n_covered == 3
    assert result.distribution == (1 / 3, 1 / 3, 1 / 3)
    assert result.missing == ()


def test_accuracy_constant_predictor():
    result = evaluate({pid: E for pid, _ in SET_ABC}, SET_ABC)
    assert result.accuracy == pytest.approx(1 / 3)
    assert result.distribution == (1.0, 0.0, 0.0)


def test_partial_coverage_excludes_missing_from_denominator():
    result = evaluate({"a": E, "b": N}, SET_ABC)
    assert result.n_covered == 2
    assert result.coverage == pytest.approx(2 / 3)
    assert result.accuracy == 0.5  # right on a, wrong on b, c uncovered
    assert result.missing == ("c",)


def test_strict_mode_requires_full_coverage():
    with pytest.raises(DataValidationError):
        evaluate({"a": E}, SET_ABC, strict=True)


def test_zero_coverage_is_an_error():
    with pytest.raises(DataValidationError):
        evaluate({"zz": E}, SET_ABC)


def test_empty_eval_set_is_an_error():
    with pytest.raises(DataValidationError):
        evaluate({"a": E}, [])


def test_prediction_set_input_carries_model_name(tmp_path):
    path = tmp_path / "fancy.tsv"
    path.write_text("a\tentailment\n")
    result = evaluate(load_predictions(path), SET_ABC[:1])
    assert result.model == "fancy"


@given(st.permutations(list(range(6))))
@settings(max_examples=50, deadline=None)
def test_metrics_invariant_under_reordering(order):
    items = [(f"p{i}", [E, C, N][i % 3]) for i in range(6)]
    preds = {f"p{i}": [E, E, C, N, N, C][i] for i in range(6)}
    base = evaluate(preds, items)
    shuffled = evaluate(preds, [items[i] for i in order])
    assert shuffled.accuracy == base.accuracy
    assert shuffled.distribution == base.distribution
    assert shuffled.n_covered == base.n_covered


def test_eval_items_drop_undetermined(corpus200):
    items = eval_items(corpus200)
    assert len(items) == 194
    assert all(gold is not None for _, gold in items)


# ---------------------------------------------------------------------------
# Baselines


def test_majority_vote_example():
    acc, label = majority_vote_baseline([("a", E), ("b", E), ("c", C)])
    assert acc == pytest.approx(2 / 3)
    assert label == E


def test_majority_vote_tie_breaks_in_label_order():
    acc, label = majority_vote_baseline([("a", N), ("b", C)])
    assert acc == 0.5
    assert label == C  # C precedes N in the canonical order


@given(st.lists(st.sampled_from([E, C, N]), min_size=1, max_size=60))
@settings(max_examples=200, deadline=None)
def test_majority_vote_is_at_least_one_third(labels):
    items = [(f"p{i}", lab) for i, lab in enumerate(labels)]
    acc, label = majority_vote_baseline(items)
    assert acc >= 1 / 3 - 1e-12
    assert acc == pytest.approx(labels.count(label) / len(labels))


def _annotated(pair_id, gold, votes):
    return NliExample(
        pair_id=pair_id,
        premise_text="p",
        hypothesis_text="h",
        premise_tokens=(("p", "NN"),),
        hypothesis_tokens=(("h", "NN"),),
        gold=gold,
        annotator_labels=tuple(votes),
    )


def test_human_estimate_slot_average():
    # five slots: three agree with gold, two do not -> mean slot accuracy 0.6
    ex = _annotated("a", E, [E, E, E, C, N])
    assert human_estimate([ex]) == pytest.approx(0.6)


def test_human_estimate_perfect_agreement():
    examples = [_annotated(f"p{i}", C, [C, C, C, C, C]) for i in range(4)]
    assert human_estimate(examples) == 1.0


def test_human_estimate_single_slot():
    ex = _annotated("a", E, [E, E, E, C, N])
    assert human_estimate([ex], mode="single", slot=0) == 1.0
    assert human_estimate([ex], mode="single", slot=3) == 0.0


def test_human_estimate_averages_per_slot_not_per_vote():
    # slot 0: 2/2 correct; slot 1: 0/1 -> average (1.0 + 0.0) / 2, while
    # pooling the three votes would give 2/3
    examples = [
        _annotated("a", E, [E, C]),
        _annotated("b", E, [E]),
    ]
    assert human_estimate(examples) == pytest.approx(0.5)


def test_human_estimate_abstention_counts_as_incorrect():
    ex = _annotated("a", E, [E, None])
    assert human_estimate([ex]) == pytest.approx(0.5)


def test_human_estimate_restricted_to_id_set():
    examples = [
        _annotated("good", E, [E]),
        _annotated("bad", E, [C]),
    ]
    assert human_estimate(examples, eval_ids={"good"}) == 1.0
    assert human_estimate(examples, eval_ids={"bad"}) == 0.0


def test_human_estimate_without_votes_is_an_error():
    ex = _annotated("a", E, [])
    with pytest.raises(DataValidationError):
        human_estimate([ex])
    with pytest.raises(ValueError):
        human_estimate([_annotated("a", E, [E])], mode="median")


def test_human_estimate_missing_slot_is_an_error():
    with pytest.raises(DataValidationError):
        human_estimate([_annotated("a", E, [E])], mode="single", slot=4)


def test_human_estimate_on_fixture_corpus(corpus200):
    # slot accuracies pinned by an independent recount of the vote table
    assert human_estimate(corpus200) == pytest.approx(0.8762886597938143, abs=1e-15)
    assert human_estimate(corpus200, mode="single", slot=0) == 1.0


# ---------------------------------------------------------------------------
# Reports


def _rows():
    r1 = evaluate({"a": E, "b": C, "c": N}, SET_ABC, model="m1", dataset="dev")
    r2 = evaluate({pid: E for pid, _ in SET_ABC}, SET_ABC, model="m2", dataset="dev")
    return [ReportRow.from_result(r1), ReportRow.from_result(r2)]


def test_csv_report_round_trip(tmp_path):
    rows = _rows()
    path = tmp_path / "r.csv"
    write_report(rows, "csv", path)
    text = path.read_text()
    assert text.splitlines()[0] == "model,set,n,coverage,accuracy,pct_E,pct_C,pct_N"
    back = read_report_csv(path)
    assert len(back) == 2
    for orig, loaded in zip(rows, back):
        assert loaded.model == orig.model
        assert loaded.accuracy == orig.accuracy  # repr floats survive exactly
        assert loaded.distribution == orig.distribution


def test_empty_report_is_header_only(tmp_path):
    path = tmp_path / "empty.csv"
    write_report([], "csv", path)
    assert path.read_text() == "model,set,n,coverage,accuracy,pct_E,pct_C,pct_N\n"


def test_json_report(tmp_path):
    path = tmp_path / "r.json"
    write_report(_rows(), "json", path)
    records = json.loads(path.read_text())
    assert [r["model"] for r in records] == ["m1", "m2"]
    assert records[0]["accuracy"] == 1.0
    assert records[1]["pct_E"] == 1.0


def test_markdown_report_parses_back(tmp_path):
    rows = _rows()
    path = tmp_path / "r.md"
    write_report(rows, "markdown", path)
    lines = path.read_text().splitlines()
    assert lines[0].startswith("| model |")
    assert set(lines[1].replace("|", "").split()) == {"---"}
    for row, line in zip(rows, lines[2:]):
        cells = [c.strip() for c in line.strip("|").split("|")]
        assert cells[0] == row.model
        assert float(cells[4]) == row.accuracy
        assert int(cells[2]) == row.n


def test_unknown_report_format_rejected(tmp_path):
    with pytest.raises(DataValidationError):
        write_report([], "yaml", tmp_path / "r.yaml")


def test_report_csv_validates_columns(tmp_path):
    path = tmp_path / "alien.csv"
    path.write_text("foo,bar\n1,2\n")
    with pytest.raises(DataValidationError):
        read_report_csv(path)


def test_write_uses_repr_floats(tmp_path):
    # one third must print with full precision, not a rounded form
    result = evaluate({pid: E for pid, _ in SET_ABC}, SET_ABC, model="m")
    path = tmp_path / "r.csv"
    write_report([ReportRow.from_result(result)], "csv", path)
    assert repr(1 / 3) in path.read_text()
