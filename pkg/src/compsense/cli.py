"""Command-line entry point: one binary, subcommand style.

Every artifact-producing subcommand hashes its inputs and outputs into
a run manifest next to the primary output file. Exit codes: 0 ok,
1 runtime error, 2 usage, 3 data validation, 4 fingerprint mismatch.
Errors go to stderr as one JSON object per failure so wrapping scripts
can parse them; progress and summaries go to stdout as plain text.

The `pipeline` subcommand chains vocab -> train -> lms -> subset ->
evaluate from a single config file; individual subcommands expose the
same steps for piecemeal use, with flags overriding config values
wherever both exist.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from typing import Iterable, Iterator

from . import __version__
from .adversary import (
    RULE_ADDAMOD,
    RULE_SOSWAP,
    AmodMap,
    generate_adversaries,
    mine_amod_map,
    pair_to_obj,
)
from .config import config_from_pairs, parse_config_text, validate_config
from .corpus import (
    ConlluStats,
    IngestStats,
    NliExample,
    example_to_obj,
    load_conllu,
    load_nli_jsonl,
    shuffle_words,
    with_determined_gold,
)
from .errors import CompsenseError, DataValidationError
from .evaluation import (
    EvalItem,
    ReportRow,
    eval_items,
    evaluate,
    human_estimate,
    load_predictions,
    majority_vote_baseline,
    read_report_csv,
    write_report,
)
from .features import Vocabulary, build_vocab, featurize, hashed_vocab
from .labels import LABELS
from .lms import (
    LmsRecord,
    LmsStats,
    compute_lms,
    filter_jsonl_by_ids,
    read_lms_jsonl,
    read_subset_ids,
    subset_cs,
    write_subset_ids,
)
from .manifest import file_sha256, write_manifest
from .model import BowSoftmaxRegression, load_model, save_model

PROG = "compsense"


# ---------------------------------------------------------------------------
# Shared plumbing


def _err(message: str) -> None:
    print(f"warning: {message}", file=sys.stderr)


def _ensure_parent(path: str) -> None:
    parent = os.path.dirname(os.path.abspath(path))
    if parent:
        os.makedirs(parent, exist_ok=True)


def _require_inputs(paths: Iterable[str]) -> None:
    for path in paths:
        if not os.path.exists(path):
            raise DataValidationError(f"input file not found: {path}")


def _stream_examples(
    paths: Iterable[str], determined: bool = True, strict: bool = False
) -> Iterator[NliExample]:
    for path in paths:
        stream = load_nli_jsonl(path, strict=strict)
        yield from with_determined_gold(stream) if determined else stream


def _load_examples(path: str, strict: bool = False) -> list[NliExample]:
    return list(load_nli_jsonl(path, strict=strict))


# ---------------------------------------------------------------------------
# Subcommands


def _cmd_ingest_check(args) -> int:
    _require_inputs(args.corpus)
    all_ids: set[str] = set()
    for path in args.corpus:
        stats = IngestStats()
        label_counts = {lab.to_string(): 0 for lab in LABELS}
        for example in load_nli_jsonl(path, strict=args.strict, stats=stats):
            if example.gold is not None:
                label_counts[example.gold.to_string()] += 1
            if args.conllu:
                all_ids.add(example.pair_id)
        print(
            f"corpus {path}: lines={stats.lines} loaded={stats.loaded} "
            f"skipped={stats.skipped} undetermined={stats.undetermined} "
            f"missing_parse={stats.missing_parse} "
            + " ".join(f"{k}={v}" for k, v in label_counts.items())
        )
        for lineno, reason in stats.errors[:10]:
            _err(f"{path}: line {lineno}: {reason}")
    for path in args.conllu or ():
        _require_inputs([path])
        cstats = ConlluStats()
        matched = 0
        for tree in load_conllu(path, stats=cstats):
            if tree.sent_id and tree.sent_id in all_ids:
                matched += 1
        print(
            f"conllu {path}: sentences={cstats.sentences} loaded={cstats.loaded} "
            f"rejected={len(cstats.rejected)} matched_pair_ids={matched}"
        )
        for ordinal, reason in cstats.rejected[:10]:
            _err(f"{path}: sentence {ordinal}: {reason}")
    return 0


def _cmd_build_vocab(args) -> int:
    _require_inputs(args.corpus)
    if args.hashing:
        vocab = hashed_vocab(args.hash_bits, args.min_count)
    else:
        vocab = build_vocab(
            _stream_examples(args.corpus), min_count=args.min_count
        )
    _ensure_parent(args.out)
    vocab.save(args.out)
    write_manifest(
        args.out,
        sys.argv,
        inputs={f"corpus{i}": p for i, p in enumerate(args.corpus)},
        outputs={"vocab": args.out},
    )
    print(
        f"vocab: {vocab.n_features} features "
        f"(min_count={vocab.min_count}, hashed={vocab.hashed}) "
        f"fingerprint={vocab.fingerprint[:12]}"
    )
    return 0


def _cmd_train_bow(args) -> int:
    _require_inputs(args.train + [args.vocab])
    vocab = Vocabulary.load(args.vocab)
    model = BowSoftmaxRegression(
        l2=args.l2,
        epochs=args.epochs,
        batch_size=args.batch,
        learning_rate=args.lr,
        lr_decay=args.lr_decay,
        seed=args.seed,
        shuffle_block=args.shuffle_block,
        use_bias=not args.no_bias,
    )

    def stream_factory(epoch: int):
        for example in _stream_examples(args.train):
            yield featurize(example, vocab), int(example.gold)

    model.fit_stream(stream_factory, vocab.n_features, vocab.fingerprint)
    for entry in model.train_log_:
        print(
            f"epoch {entry['epoch']}: lr={entry['lr']:g} "
            f"mean_nll={entry['mean_nll']:.6f} n={entry['n']}"
        )
    _ensure_parent(args.out)
    save_model(model, args.out, text=args.text_format)
    write_manifest(
        args.out,
        sys.argv,
        inputs={
            **{f"train{i}": p for i, p in enumerate(args.train)},
            "vocab": args.vocab,
        },
        outputs={"model": args.out},
        seeds={"train_seed": args.seed},
    )
    print(f"model: {args.out} ({vocab.n_features} features)")
    return 0


def _cmd_score_lms(args) -> int:
    _require_inputs([args.corpus, args.vocab, args.model])
    vocab = Vocabulary.load(args.vocab)
    model = load_model(args.model)
    stats = LmsStats()
    hist = [0] * 10
    _ensure_parent(args.out)
    with open(args.out, "w", encoding="utf-8") as fh:
        for rec in compute_lms(
            load_nli_jsonl(args.corpus), vocab, model, stats=stats
        ):
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
            hist[min(int(rec.lms * 10), 9)] += 1
    hist_path = args.out + ".hist.json"
    with open(hist_path, "w", encoding="utf-8") as fh:
        json.dump({"bins": 10, "counts": hist, "n": stats.scored}, fh)
        fh.write("\n")
    write_manifest(
        args.out,
        sys.argv,
        inputs={"corpus": args.corpus, "vocab": args.vocab, "model": args.model},
        outputs={"lms": args.out, "histogram": hist_path},
    )
    print(f"lms: scored={stats.scored} skipped_undetermined={stats.skipped_undetermined}")
    return 0


def _cmd_subset(args) -> int:
    _require_inputs([args.lms])
    source = f"lms={os.path.basename(args.lms)}:{file_sha256(args.lms)[:12]}"
    subset = subset_cs(read_lms_jsonl(args.lms), args.lam, source=source)
    _ensure_parent(args.out)
    write_subset_ids(subset, args.out)
    outputs = {"ids": args.out}
    inputs = {"lms": args.lms}
    if args.export:
        if not args.corpus:
            raise DataValidationError("--export requires --corpus")
        _require_inputs([args.corpus])
        written, missing = filter_jsonl_by_ids(args.corpus, subset.pair_ids, args.export)
        if missing:
            _err(
                f"{len(missing)} subset ids not present in {args.corpus} "
                f"(first: {missing[0]})"
            )
        outputs["export"] = args.export
        inputs["corpus"] = args.corpus
        print(f"export: {written} lines -> {args.export}")
    write_manifest(args.out, sys.argv, inputs=inputs, outputs=outputs)
    print(f"cs_{args.lam:g}: {len(subset)} of {subset.n_scored} ids")
    return 0


def _cmd_mine_amod(args) -> int:
    _require_inputs(args.conllu)
    # one merged stream so counts accumulate across files
    amap = mine_amod_map(
        tree for path in args.conllu for tree in load_conllu(path)
    )
    _ensure_parent(args.out)
    amap.save(args.out)
    n_pairs = sum(len(v) for v in amap.counts.values())
    n_edges = sum(c for v in amap.counts.values() for c in v.values())
    write_manifest(
        args.out,
        sys.argv,
        inputs={f"conllu{i}": p for i, p in enumerate(args.conllu)},
        outputs={"amod_map": args.out},
    )
    print(f"amod map: nouns={len(amap.counts)} pairs={n_pairs} edges={n_edges}")
    return 0


def _cmd_gen_adv(args) -> int:
    rule = {"soswap": RULE_SOSWAP, "addamod": RULE_ADDAMOD}[args.rule]
    _require_inputs([args.corpus, args.conllu])
    amod_map = None
    if rule == RULE_ADDAMOD:
        if not args.amod_map:
            raise DataValidationError("--rule addamod requires --amod-map")
        _require_inputs([args.amod_map])
        amod_map = AmodMap.load(args.amod_map)
    trees_by_id = {
        tree.sent_id: tree
        for tree in load_conllu(args.conllu)
        if tree.sent_id is not None
    }
    pairs, report = generate_adversaries(
        _stream_examples([args.corpus]),
        trees_by_id,
        rule,
        amod_map=amod_map,
        limit=args.limit,
    )
    _ensure_parent(args.out)
    with open(args.out, "w", encoding="utf-8") as fh:
        for pair in pairs:
            fh.write(json.dumps(pair_to_obj(pair), ensure_ascii=False))
            fh.write("\n")
    report_path = args.out + ".report.json"
    with open(report_path, "w", encoding="utf-8") as fh:
        fh.write(report.to_json())
        fh.write("\n")
    inputs = {"corpus": args.corpus, "conllu": args.conllu}
    if args.amod_map:
        inputs["amod_map"] = args.amod_map
    write_manifest(
        args.out,
        sys.argv,
        inputs=inputs,
        outputs={"adversaries": args.out, "report": report_path},
    )
    print(report.to_json())
    return 0


def _cmd_shuffle(args) -> int:
    _require_inputs([args.corpus])
    n = 0
    dropped = 0
    _ensure_parent(args.out)
    with open(args.out, "w", encoding="utf-8") as fh:
        for example in load_nli_jsonl(args.corpus):
            if example.gold is None:
                dropped += 1
                continue
            shuffled = shuffle_words(example, args.seed)
            obj = example_to_obj(shuffled, extra={"transform": "word_shuffle"})
            fh.write(json.dumps(obj, ensure_ascii=False))
            fh.write("\n")
            n += 1
    write_manifest(
        args.out,
        sys.argv,
        inputs={"corpus": args.corpus},
        outputs={"shuffled": args.out},
        seeds={"shuffle_seed": args.seed},
    )
    print(f"shuffle: shuffled={n} dropped_undetermined={dropped}")
    return 0


def _vote_distribution(examples: list[NliExample]) -> tuple[float, float, float]:
    counts = [0, 0, 0]
    for ex in examples:
        for vote in ex.annotator_labels:
            if vote is not None:
                counts[int(vote)] += 1
    total = sum(counts)
    if total == 0:
        return (0.0, 0.0, 0.0)
    return tuple(c / total for c in counts)


def _baseline_rows(
    examples: list[NliExample],
    items: list[EvalItem],
    set_name: str,
    human_mode: str,
    human_slot: int,
) -> list[ReportRow]:
    rows = []
    acc, majority = majority_vote_baseline(items)
    dist = [0.0, 0.0, 0.0]
    dist[int(majority)] = 1.0
    rows.append(
        ReportRow(
            model="majority",
            dataset=set_name,
            n=len(items),
            coverage=1.0,
            accuracy=acc,
            distribution=tuple(dist),
        )
    )
    if human_mode != "none":
        ids = {pid for pid, _ in items}
        with_votes = [
            ex for ex in examples if ex.pair_id in ids and ex.annotator_labels
        ]
        if with_votes:
            acc = human_estimate(
                with_votes, eval_ids=None, mode=human_mode, slot=human_slot
            )
            name = (
                "human-average"
                if human_mode == "average"
                else f"human-slot{human_slot}"
            )
            rows.append(
                ReportRow(
                    model=name,
                    dataset=set_name,
                    n=len(items),
                    coverage=len(with_votes) / len(items),
                    accuracy=acc,
                    distribution=_vote_distribution(with_votes),
                )
            )
    return rows


def _cmd_evaluate(args) -> int:
    _require_inputs(args.preds + [args.corpus])
    examples = [ex for ex in _load_examples(args.corpus) if ex.gold is not None]
    items = eval_items(examples)
    set_name = os.path.splitext(os.path.basename(args.corpus))[0]
    if args.subset:
        _require_inputs([args.subset])
        subset = read_subset_ids(args.subset)
        wanted = set(subset.pair_ids)
        items = [(pid, gold) for pid, gold in items if pid in wanted]
        set_name = os.path.splitext(os.path.basename(args.subset))[0]
        if not items:
            raise DataValidationError(
                f"no corpus example matches the subset {args.subset}"
            )
    sets: list[tuple[str, list[EvalItem], list[NliExample]]] = [
        (set_name, items, examples)
    ]
    if args.adv:
        _require_inputs([args.adv])
        adv_examples = [
            ex for ex in _load_examples(args.adv) if ex.gold is not None
        ]
        adv_name = os.path.splitext(os.path.basename(args.adv))[0]
        sets.append((adv_name, eval_items(adv_examples), adv_examples))

    rows: list[ReportRow] = []
    prediction_sets = [load_predictions(p) for p in args.preds]
    for name, set_items, set_examples in sets:
        rows.extend(
            _baseline_rows(
                set_examples, set_items, name, args.human_mode, args.human_slot
            )
        )
        for preds in prediction_sets:
            result = evaluate(
                preds, set_items, dataset=name, strict=args.strict
            )
            if result.missing:
                _err(
                    f"{preds.model_name} on {name}: "
                    f"{len(result.missing)} ids uncovered"
                )
            rows.append(ReportRow.from_result(result))
    _ensure_parent(args.out)
    write_report(rows, args.format, args.out)
    inputs = {f"preds{i}": p for i, p in enumerate(args.preds)}
    inputs["corpus"] = args.corpus
    if args.subset:
        inputs["subset"] = args.subset
    if args.adv:
        inputs["adv"] = args.adv
    write_manifest(args.out, sys.argv, inputs=inputs, outputs={"report": args.out})
    print(f"report: {len(rows)} rows -> {args.out}")
    return 0


def _cmd_report(args) -> int:
    _require_inputs(args.inputs)
    rows: list[ReportRow] = []
    for path in args.inputs:
        rows.extend(read_report_csv(path))
    _ensure_parent(args.out)
    write_report(rows, args.format, args.out)
    write_manifest(
        args.out,
        sys.argv,
        inputs={f"report{i}": p for i, p in enumerate(args.inputs)},
        outputs={"report": args.out},
    )
    print(f"report: {len(rows)} rows -> {args.out}")
    return 0


def _cmd_pipeline(args) -> int:
    config = validate_config(args.config)
    if args.set:
        base = os.path.dirname(os.path.abspath(args.config))
        with open(args.config, encoding="utf-8") as fh:
            pairs = parse_config_text(fh.read())
        for override in args.set:
            if "=" not in override:
                raise DataValidationError(
                    f"--set expects key=value, got {override!r}"
                )
            key, _, value = override.partition("=")
            pairs[key.strip()] = value.strip()
        config = config_from_pairs(pairs, base)
    if not config.train:
        raise DataValidationError("config needs at least one 'train' path")
    if not config.dev:
        raise DataValidationError("config needs a 'dev' path")
    _require_inputs(list(config.train) + [config.dev] + list(config.preds))
    os.makedirs(config.workdir, exist_ok=True)

    vocab_path = config.out_path(config.vocab)
    model_path = config.out_path(config.model)
    lms_path = config.out_path(config.lms)
    report_path = config.out_path(config.report)

    # 1. vocabulary
    if config.hashing:
        vocab = hashed_vocab(config.hash_bits, config.min_count)
    else:
        vocab = build_vocab(
            _stream_examples(config.train), min_count=config.min_count
        )
    _ensure_parent(vocab_path)
    vocab.save(vocab_path)
    print(f"[1/5] vocab: {vocab.n_features} features -> {vocab_path}")

    # 2. training
    model = BowSoftmaxRegression(
        l2=config.l2,
        epochs=config.epochs,
        batch_size=config.batch_size,
        learning_rate=config.learning_rate,
        lr_decay=config.lr_decay,
        seed=config.seed,
        shuffle_block=config.shuffle_block,
        use_bias=config.use_bias,
    )

    def stream_factory(epoch: int):
        for example in _stream_examples(config.train):
            yield featurize(example, vocab), int(example.gold)

    model.fit_stream(stream_factory, vocab.n_features, vocab.fingerprint)
    save_model(model, model_path, text=config.model_format == "text")
    final_nll = model.train_log_[-1]["mean_nll"]
    print(f"[2/5] model: mean_nll={final_nll:.6f} -> {model_path}")

    # 3. LMS scoring on dev
    stats = LmsStats()
    records: list[LmsRecord] = []
    with open(lms_path, "w", encoding="utf-8") as fh:
        for rec in compute_lms(
            load_nli_jsonl(config.dev), vocab, model, stats=stats
        ):
            records.append(rec)
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
    print(f"[3/5] lms: scored={stats.scored} -> {lms_path}")

    # 4. CS_lambda subsets
    source = f"model={model.vocab_fingerprint_[:12]} corpus={os.path.basename(config.dev)}"
    subset_paths = []
    subsets = {}
    for lam in config.lambda_grid:
        subset = subset_cs(records, lam, source=source)
        path = config.out_path(f"cs_{lam:g}.ids")
        write_subset_ids(subset, path)
        subset_paths.append(path)
        subsets[lam] = subset
        print(f"[4/5] cs_{lam:g}: {len(subset)} of {subset.n_scored} ids")

    # 5. evaluation report
    dev_examples = [
        ex for ex in _load_examples(config.dev) if ex.gold is not None
    ]
    by_id = {ex.pair_id: ex for ex in dev_examples}
    dev_items = eval_items(dev_examples)
    dev_name = os.path.splitext(os.path.basename(config.dev))[0]
    prediction_sets = [load_predictions(p) for p in config.preds]
    rows: list[ReportRow] = []
    eval_sets: list[tuple[str, list[EvalItem], list[NliExample]]] = [
        (dev_name, dev_items, dev_examples)
    ]
    for lam in config.lambda_grid:
        member_ids = set(subsets[lam].pair_ids)
        set_items = [(pid, gold) for pid, gold in dev_items if pid in member_ids]
        set_examples = [by_id[pid] for pid, _ in set_items]
        if set_items:
            eval_sets.append((f"cs_{lam:g}", set_items, set_examples))
        else:
            _err(f"cs_{lam:g} is empty, skipping its report rows")
    for name, set_items, set_examples in eval_sets:
        rows.extend(
            _baseline_rows(set_examples, set_items, name, "average", 0)
        )
        for preds in prediction_sets:
            result = evaluate(
                preds, set_items, dataset=name, strict=config.strict
            )
            if result.missing:
                _err(
                    f"{preds.model_name} on {name}: "
                    f"{len(result.missing)} ids uncovered"
                )
            rows.append(ReportRow.from_result(result))
    _ensure_parent(report_path)
    write_report(rows, config.report_format, report_path)
    print(f"[5/5] report: {len(rows)} rows -> {report_path}")

    inputs = {f"train{i}": p for i, p in enumerate(config.train)}
    inputs["dev"] = config.dev
    for i, p in enumerate(config.preds):
        inputs[f"preds{i}"] = p
    outputs = {
        "vocab": vocab_path,
        "model": model_path,
        "lms": lms_path,
        "report": report_path,
    }
    for path in subset_paths:
        outputs[os.path.basename(path)] = path
    write_manifest(
        report_path,
        sys.argv,
        inputs=inputs,
        outputs=outputs,
        config_snapshot=config.normalized(),
        seeds={"train_seed": config.seed},
    )
    return 0


# ---------------------------------------------------------------------------
# Parser


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog=PROG,
        description="Corpus tools for compositionality-sensitive NLI evaluation.",
    )
    parser.add_argument(
        "--version", action="version", version=f"{PROG} {__version__}"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest-check", help="validate JSONL (and CoNLL-U) corpora")
    p.add_argument("--corpus", action="append", required=True)
    p.add_argument("--conllu", action="append", default=[])
    p.add_argument("--strict", action="store_true")
    p.set_defaults(func=_cmd_ingest_check)

    p = sub.add_parser("build-vocab", help="build the lexical feature vocabulary")
    p.add_argument("--corpus", action="append", required=True)
    p.add_argument("--min-count", type=int, default=2)
    p.add_argument("--hashing", action="store_true")
    p.add_argument("--hash-bits", type=int, default=20)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_build_vocab)

    p = sub.add_parser("train-bow", help="train the softmax regression")
    p.add_argument("--train", action="append", required=True)
    p.add_argument("--vocab", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--l2", type=float, default=1e-6)
    p.add_argument("--epochs", type=int, default=3)
    p.add_argument("--batch", type=int, default=256)
    p.add_argument("--lr", type=float, default=0.5)
    p.add_argument("--lr-decay", type=float, default=1.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--shuffle-block", type=int, default=8192)
    p.add_argument("--no-bias", action="store_true")
    p.add_argument("--text-format", action="store_true")
    p.set_defaults(func=_cmd_train_bow)

    p = sub.add_parser("score-lms", help="compute lexically-misleading scores")
    p.add_argument("--corpus", required=True)
    p.add_argument("--vocab", required=True)
    p.add_argument("--model", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_score_lms)

    p = sub.add_parser("subset", help="extract a CS_lambda subset")
    p.add_argument("--lms", required=True)
    p.add_argument("--lambda", dest="lam", type=float, required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--corpus")
    p.add_argument("--export", help="also write the filtered corpus JSONL here")
    p.set_defaults(func=_cmd_subset)

    p = sub.add_parser("mine-amod", help="mine noun->adjective counts from CoNLL-U")
    p.add_argument("--conllu", action="append", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_mine_amod)

    p = sub.add_parser("gen-adv", help="generate rule-based adversarial pairs")
    p.add_argument("--rule", choices=["soswap", "addamod"], required=True)
    p.add_argument("--corpus", required=True)
    p.add_argument("--conllu", required=True)
    p.add_argument("--amod-map")
    p.add_argument("--limit", type=int)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_gen_adv)

    p = sub.add_parser("shuffle", help="word-shuffle a corpus")
    p.add_argument("--corpus", required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_shuffle)

    p = sub.add_parser("evaluate", help="score prediction files against gold")
    p.add_argument("--preds", action="append", required=True)
    p.add_argument("--corpus", required=True)
    p.add_argument("--subset")
    p.add_argument("--adv")
    p.add_argument("--out", required=True)
    p.add_argument("--format", choices=["csv", "markdown", "json"], default="csv")
    p.add_argument("--strict", action="store_true")
    p.add_argument(
        "--human-mode", choices=["average", "single", "none"], default="average"
    )
    p.add_argument("--human-slot", type=int, default=0)
    p.set_defaults(func=_cmd_evaluate)

    p = sub.add_parser("report", help="merge and reformat report files")
    p.add_argument("--in", dest="inputs", action="append", required=True)
    p.add_argument("--format", choices=["csv", "markdown", "json"], default="csv")
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_report)

    p = sub.add_parser("pipeline", help="vocab -> train -> lms -> subset -> evaluate")
    p.add_argument("--config", required=True)
    p.add_argument("--set", action="append", default=[], metavar="KEY=VALUE")
    p.set_defaults(func=_cmd_pipeline)

    return parser


def dispatch(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse prints usage itself
        return int(exc.code or 0)
    try:
        return args.func(args)
    except CompsenseError as exc:
        _print_error(exc, exc.exit_code)
        return exc.exit_code
    except FileNotFoundError as exc:
        _print_error(exc, 3)
        return 3
    except Exception as exc:  # noqa: BLE001 - the CLI boundary
        _print_error(exc, 1)
        return 1


def _print_error(exc: BaseException, code: int) -> None:
    print(
        json.dumps(
            {"error": type(exc).__name__, "message": str(exc), "exit_code": code}
        ),
        file=sys.stderr,
    )


def main(argv=None) -> None:
    sys.exit(dispatch(argv))


if __name__ == "__main__":
    main()
