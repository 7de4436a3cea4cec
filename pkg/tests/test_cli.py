"""End-to-end CLI behaviour through fresh subprocesses.

Each test drives `python -m compsense.cli` exactly the way a shell user
would, so argument wiring, exit codes, and artifact layout are covered
without mocking.
"""

from __future__ import annotations

import collections
import json
import os

import pytest

from compsense import load_nli_jsonl, read_manifest, read_subset_ids

from conftest import AMOD_CONLLU, CORPUS_JSONL, FIXTURES, SVO_CONLLU, SVO_JSONL, run_cli


def _ok(result):
    assert result.returncode == 0, result.stderr or result.stdout
    return result


def _stderr_json(result):
    lines = [l for l in result.stderr.splitlines() if l.startswith("{")]
    assert len(lines) == 1, result.stderr
    return json.loads(lines[0])


# ---------------------------------------------------------------------------
# Plumbing


def test_version_flag():
    result = _ok(run_cli("--version"))
    assert result.stdout.strip() == "compsense 0.1.0"


def test_unknown_subcommand_is_usage_error():
    result = run_cli("frobnicate")
    assert result.returncode == 2


def test_no_subcommand_is_usage_error():
    assert run_cli().returncode == 2


def test_missing_input_reports_machine_readable_error(tmp_path):
    result = run_cli(
        "build-vocab", "--corpus", tmp_path / "nope.jsonl", "--out", tmp_path / "v"
    )
    assert result.returncode == 3
    obj = _stderr_json(result)
    assert set(obj) == {"error", "message", "exit_code"}
    assert obj["exit_code"] == 3
    assert "nope.jsonl" in obj["message"]


def test_ingest_check_summary(tmp_path):
    result = _ok(
        run_cli(
            "ingest-check",
            "--corpus", CORPUS_JSONL,
            "--conllu", FIXTURES / "fixture200.conllu",
        )
    )
    assert "lines=200" in result.stdout
    assert "loaded=200" in result.stdout
    assert "undetermined=6" in result.stdout
    assert "matched_pair_ids=" in result.stdout


# ---------------------------------------------------------------------------
# The vocab -> train -> lms -> subset -> evaluate chain


@pytest.fixture(scope="module")
def chain(tmp_path_factory):
    """Artifacts from one full run of the individual subcommands."""
    work = tmp_path_factory.mktemp("chain")
    vocab = work / "vocab.txt"
    model = work / "model.bin"
    lms = work / "lms.jsonl"
    ids = work / "cs_0.7.ids"
    report = work / "report.csv"
    _ok(run_cli("build-vocab", "--corpus", CORPUS_JSONL, "--out", vocab))
    _ok(
        run_cli(
            "train-bow",
            "--train", CORPUS_JSONL,
            "--vocab", vocab,
            "--out", model,
            "--epochs", 2,
            "--batch", 64,
            "--seed", 5,
        )
    )
    _ok(
        run_cli(
            "score-lms",
            "--corpus", CORPUS_JSONL,
            "--vocab", vocab,
            "--model", model,
            "--out", lms,
        )
    )
    _ok(run_cli("subset", "--lms", lms, "--lambda", 0.7, "--out", ids))
    _ok(
        run_cli(
            "evaluate",
            "--preds", FIXTURES / "preds_perfect.tsv",
            "--corpus", CORPUS_JSONL,
            "--subset", ids,
            "--out", report,
        )
    )
    return work


def test_chain_artifacts_exist(chain):
    for name in ("vocab.txt", "model.bin", "lms.jsonl", "cs_0.7.ids", "report.csv"):
        assert (chain / name).exists(), name


def test_chain_writes_manifests_beside_outputs(chain):
    for name in ("vocab.txt", "model.bin", "lms.jsonl", "cs_0.7.ids", "report.csv"):
        doc = read_manifest(chain / f"{name}.manifest.json")
        assert doc["tool"] == "compsense 0.1.0"
        assert doc["command"]  # the argv that produced the artifact


def test_lms_histogram_sidecar(chain):
    hist = json.loads((chain / "lms.jsonl.hist.json").read_text())
    assert hist["bins"] == 10
    assert len(hist["counts"]) == 10
    assert sum(hist["counts"]) == hist["n"] == 194


def test_lms_lines_cover_determined_examples(chain):
    lines = (chain / "lms.jsonl").read_text().splitlines()
    assert len(lines) == 194
    first = json.loads(lines[0])
    assert set(first) == {"pairID", "gold_label", "probs", "lms"}
    assert len(first["probs"]) == 3


def test_subset_header_names_lambda(chain):
    text = (chain / "cs_0.7.ids").read_text()
    assert text.startswith("# lambda = 0.7\n")
    subset = read_subset_ids(chain / "cs_0.7.ids")
    assert subset.lam == 0.7
    assert list(subset.pair_ids) == sorted(subset.pair_ids)


def test_report_rows_cover_baselines_and_preds(chain):
    lines = (chain / "report.csv").read_text().splitlines()
    assert lines[0] == "model,set,n,coverage,accuracy,pct_E,pct_C,pct_N"
    models = [line.split(",")[0] for line in lines[1:]]
    assert models == ["majority", "human-average", "preds_perfect"]
    # the evaluate run was restricted to the subset, so n is small
    assert all(line.split(",")[1] == "cs_0.7" for line in lines[1:])


def test_scoring_rerun_is_byte_identical(chain, tmp_path):
    again = tmp_path / "lms2.jsonl"
    _ok(
        run_cli(
            "score-lms",
            "--corpus", CORPUS_JSONL,
            "--vocab", chain / "vocab.txt",
            "--model", chain / "model.bin",
            "--out", again,
        )
    )
    assert again.read_bytes() == (chain / "lms.jsonl").read_bytes()


def test_foreign_vocab_is_refused(chain, tmp_path):
    other = tmp_path / "other_vocab.txt"
    _ok(
        run_cli(
            "build-vocab", "--corpus", CORPUS_JSONL, "--out", other,
            "--min-count", 5,
        )
    )
    result = run_cli(
        "score-lms",
        "--corpus", CORPUS_JSONL,
        "--vocab", other,
        "--model", chain / "model.bin",
        "--out", tmp_path / "lms.jsonl",
    )
    assert result.returncode == 4
    assert _stderr_json(result)["error"] == "FingerprintMismatchError"


def test_subset_export_filters_corpus(chain, tmp_path):
    export = tmp_path / "filtered.jsonl"
    _ok(
        run_cli(
            "subset",
            "--lms", chain / "lms.jsonl",
            "--lambda", 0.7,
            "--out", tmp_path / "ids",
            "--corpus", CORPUS_JSONL,
            "--export", export,
        )
    )
    wanted = set(read_subset_ids(tmp_path / "ids").pair_ids)
    kept = {ex.pair_id for ex in load_nli_jsonl(export)}
    assert kept == wanted
    source = CORPUS_JSONL.read_bytes()
    for line in export.read_bytes().splitlines(keepends=True):
        assert line in source  # export copies lines verbatim


def test_subset_export_without_corpus_is_an_error(chain, tmp_path):
    result = run_cli(
        "subset",
        "--lms", chain / "lms.jsonl",
        "--lambda", 0.7,
        "--out", tmp_path / "ids",
        "--export", tmp_path / "filtered.jsonl",
    )
    assert result.returncode == 3


def test_partial_predictions_warn_about_coverage(chain, tmp_path):
    result = _ok(
        run_cli(
            "evaluate",
            "--preds", FIXTURES / "preds_partial.tsv",
            "--corpus", CORPUS_JSONL,
            "--out", tmp_path / "report.csv",
        )
    )
    assert "uncovered" in result.stderr


def test_report_merge_round_trip(chain, tmp_path):
    merged = tmp_path / "merged.csv"
    _ok(
        run_cli(
            "report",
            "--in", chain / "report.csv",
            "--in", chain / "report.csv",
            "--out", merged,
        )
    )
    original = (chain / "report.csv").read_text().splitlines()
    lines = merged.read_text().splitlines()
    assert lines[0] == original[0]
    assert lines[1:] == original[1:] + original[1:]


# ---------------------------------------------------------------------------
# Shuffle


def test_shuffle_determinism_and_token_preservation(tmp_path):
    out1 = tmp_path / "s1.jsonl"
    out2 = tmp_path / "s2.jsonl"
    out3 = tmp_path / "s3.jsonl"
    _ok(run_cli("shuffle", "--corpus", CORPUS_JSONL, "--seed", 3, "--out", out1))
    _ok(run_cli("shuffle", "--corpus", CORPUS_JSONL, "--seed", 3, "--out", out2))
    _ok(run_cli("shuffle", "--corpus", CORPUS_JSONL, "--seed", 4, "--out", out3))
    assert out1.read_bytes() == out2.read_bytes()
    assert out1.read_bytes() != out3.read_bytes()

    originals = {ex.pair_id: ex for ex in load_nli_jsonl(CORPUS_JSONL)}
    shuffled = list(load_nli_jsonl(out1))
    assert len(shuffled) == 194  # undetermined examples are dropped
    for ex in shuffled:
        src = originals[ex.pair_id]
        for side in ("premise_tokens", "hypothesis_tokens"):
            ours = [t[0] for t in getattr(ex, side)]
            theirs = [t[0] for t in getattr(src, side)]
            assert collections.Counter(ours) == collections.Counter(theirs)

    first = json.loads(out1.read_text().splitlines()[0])
    assert first["transform"] == "word_shuffle"


def test_shuffle_records_seed_in_manifest(tmp_path):
    out = tmp_path / "s.jsonl"
    _ok(run_cli("shuffle", "--corpus", CORPUS_JSONL, "--seed", 11, "--out", out))
    doc = read_manifest(str(out) + ".manifest.json")
    assert doc["seeds"] == {"shuffle_seed": 11}


# ---------------------------------------------------------------------------
# Adversary generation


def test_gen_adv_soswap(tmp_path):
    out = tmp_path / "adv.jsonl"
    result = _ok(
        run_cli(
            "gen-adv",
            "--rule", "soswap",
            "--corpus", SVO_JSONL,
            "--conllu", SVO_CONLLU,
            "--out", out,
        )
    )
    pairs = list(load_nli_jsonl(out))
    assert len(pairs) == 4
    assert all(ex.gold.to_string() == "contradiction" for ex in pairs)
    report = json.loads((tmp_path / "adv.jsonl.report.json").read_text())
    assert report["rule"] == "SOswap"
    assert report["n_generated"] == 4
    assert report["n_sources"] == 10
    assert sum(report["rejections"].values()) == 6
    assert json.loads(result.stdout) == report


def test_gen_adv_addamod_requires_map(tmp_path):
    result = run_cli(
        "gen-adv",
        "--rule", "addamod",
        "--corpus", SVO_JSONL,
        "--conllu", SVO_CONLLU,
        "--out", tmp_path / "adv.jsonl",
    )
    assert result.returncode == 3
    assert "amod-map" in _stderr_json(result)["message"]


def test_gen_adv_addamod_with_mined_map(tmp_path):
    amap = tmp_path / "amod.map"
    _ok(run_cli("mine-amod", "--conllu", AMOD_CONLLU, "--out", amap))
    out = tmp_path / "adv.jsonl"
    _ok(
        run_cli(
            "gen-adv",
            "--rule", "addamod",
            "--corpus", SVO_JSONL,
            "--conllu", SVO_CONLLU,
            "--amod-map", amap,
            "--out", out,
        )
    )
    pairs = list(load_nli_jsonl(out))
    assert len(pairs) == 3
    assert all(ex.gold.to_string() == "neutral" for ex in pairs)
    # premise and hypothesis differ only in where the adjective landed
    first = pairs[0]
    assert first.pair_id == "sv01-addamod"
    assert first.premise_text == "The big dog chased a cat ."
    assert first.hypothesis_text == "The dog chased a big cat ."
    report = json.loads((out.parent / "adv.jsonl.report.json").read_text())
    assert report["n_generated"] == 3


def test_gen_adv_limit(tmp_path):
    out = tmp_path / "adv.jsonl"
    _ok(
        run_cli(
            "gen-adv",
            "--rule", "soswap",
            "--corpus", SVO_JSONL,
            "--conllu", SVO_CONLLU,
            "--limit", 2,
            "--out", out,
        )
    )
    assert len(out.read_text().splitlines()) == 2


# ---------------------------------------------------------------------------
# Pipeline


def test_pipeline_runs_all_stages(tmp_path):
    result = _ok(
        run_cli(
            "pipeline",
            "--config", FIXTURES / "pipeline.cfg",
            "--set", f"workdir={tmp_path}",
        )
    )
    for stage in ("[1/5]", "[2/5]", "[3/5]", "[4/5]", "[5/5]"):
        assert stage in result.stdout
    for name in (
        "vocab.voc", "model.bow", "lms.jsonl",
        "cs_0.5.ids", "cs_0.6.ids", "cs_0.7.ids", "report.csv",
    ):
        assert (tmp_path / name).exists(), name
    doc = read_manifest(tmp_path / "report.csv.manifest.json")
    assert "workdir" in doc["config"]
    assert doc["seeds"] == {"train_seed": 7}


def test_pipeline_set_rejects_bare_words(tmp_path):
    result = run_cli(
        "pipeline",
        "--config", FIXTURES / "pipeline.cfg",
        "--set", "workdir",
    )
    assert result.returncode == 3
