"""Corpus ingestion and transforms for SNLI/MNLI-style NLI data.

Three input formats are handled here:

* JSONL with one example per line (fields ``sentence1``, ``sentence2``,
  ``gold_label``, ``annotator_labels``, ``sentence1_parse``,
  ``sentence2_parse``, ``pairID``, optional ``genre``).
* Penn-Treebank S-expressions, as found in the ``*_parse`` fields.
* CoNLL-U dependency parses (10 tab-separated columns, blank-line
  separated sentences), used by the adversary generator.

Tokenization always comes from the constituency parse leaves so that
features stay aligned with the distributed corpora; examples whose parse
field is absent fall back to whitespace tokens tagged ``UNK`` and are
flagged, which keeps them out of adversary generation and out of the
content-word feature space.

All types here are immutable after construction and safe to share across
threads; ingestion itself is a sequential stream.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Iterator, NamedTuple

import numpy as np

from .errors import DataValidationError, PtbParseError
from .labels import Label, parse_annotator_label, parse_gold_label

MAX_ANNOTATORS = 5


# ---------------------------------------------------------------------------
# Penn-Treebank trees


@dataclass(frozen=True)
class PtbTree:
    """Constituency tree node: either an internal node or a preterminal.

    A node either holds a single leaf surface string (and then has no
    children) or holds at least one child (and then no leaf). Preterminal
    labels are POS tags.
    """

    label: str
    children: tuple["PtbTree", ...] = ()
    leaf: str | None = None

    def __post_init__(self):
        if (self.leaf is None) == (len(self.children) == 0):
            raise ValueError("a node holds a leaf xor has children")


_ATOM_STOP = set(" \t\r\n()")


def _skip_ws(s: str, pos: int) -> int:
    while pos < len(s) and s[pos] in " \t\r\n":
        pos += 1
    return pos


def _read_atom(s: str, pos: int) -> tuple[str, int]:
    start = pos
    while pos < len(s) and s[pos] not in _ATOM_STOP:
        pos += 1
    return s[start:pos], pos


def parse_ptb(s: str) -> PtbTree:
    """Parse one S-expression tree, raising PtbParseError with a byte offset.

    Unbalanced parentheses and empty nodes like ``()`` or ``(NN)`` are
    rejected. Atoms run to the next whitespace or parenthesis, so tokens
    with escaped brackets (``-LRB-``/``-RRB-``) pass through untouched.
    """
    pos = _skip_ws(s, 0)
    tree, pos = _parse_node(s, pos)
    pos = _skip_ws(s, pos)
    if pos != len(s):
        raise PtbParseError("trailing data after tree", pos)
    return tree


def _parse_node(s: str, pos: int) -> tuple[PtbTree, int]:
    if pos >= len(s) or s[pos] != "(":
        raise PtbParseError("expected '('", pos)
    pos += 1
    label, pos = _read_atom(s, pos)
    pos = _skip_ws(s, pos)
    if pos >= len(s):
        raise PtbParseError("unbalanced parentheses", pos)
    if s[pos] == "(":
        children = []
        while True:
            child, pos = _parse_node(s, pos)
            children.append(child)
            pos = _skip_ws(s, pos)
            if pos >= len(s):
                raise PtbParseError("unbalanced parentheses", pos)
            if s[pos] == ")":
                return PtbTree(label, tuple(children)), pos + 1
            if s[pos] != "(":
                raise PtbParseError("expected '(' or ')'", pos)
    if s[pos] == ")":
        raise PtbParseError("empty node", pos)
    leaf, pos = _read_atom(s, pos)
    pos = _skip_ws(s, pos)
    if pos >= len(s) or s[pos] != ")":
        raise PtbParseError("unbalanced parentheses", pos)
    return PtbTree(label, (), leaf), pos + 1


def render_ptb(tree: PtbTree) -> str:
    """Render a tree so that parse_ptb(render_ptb(t)) == t."""
    if tree.leaf is not None:
        body = tree.leaf
    else:
        body = " ".join(render_ptb(c) for c in tree.children)
    if tree.label:
        return f"({tree.label} {body})"
    return f"({body})"


def leaves_with_pos(tree: PtbTree) -> list[tuple[str, str]]:
    """In-order leaf traversal paired with the preterminal labels."""
    out: list[tuple[str, str]] = []
    _collect_leaves(tree, out)
    return out


def _collect_leaves(tree: PtbTree, out: list[tuple[str, str]]) -> None:
    if tree.leaf is not None:
        out.append((tree.leaf, tree.label))
        return
    for child in tree.children:
        _collect_leaves(child, out)


# ---------------------------------------------------------------------------
# NLI examples


@dataclass(frozen=True)
class NliExample:
    """One premise/hypothesis pair with tokens, POS tags, and labels.

    ``gold`` is None for no-consensus ("-") examples, which are excluded
    from every downstream scoring set. ``parse_missing`` marks examples
    that were tokenized by whitespace fallback (POS "UNK").
    """

    pair_id: str
    premise_text: str
    hypothesis_text: str
    premise_tokens: tuple[tuple[str, str], ...]
    hypothesis_tokens: tuple[tuple[str, str], ...]
    gold: Label | None
    annotator_labels: tuple[Label | None, ...] = ()
    genre: str | None = None
    parse_missing: bool = False


@dataclass
class IngestStats:
    """Counters accumulated by load_nli_jsonl in lenient mode."""

    lines: int = 0
    loaded: int = 0
    skipped: int = 0
    undetermined: int = 0
    missing_parse: int = 0
    errors: list = field(default_factory=list)


def _tokens_from_parse(obj: dict, key: str, text: str) -> tuple[tuple, bool]:
    parse = obj.get(key)
    if parse is None:
        toks = tuple((t, "UNK") for t in text.split())
        return toks, True
    return tuple(leaves_with_pos(parse_ptb(parse))), False


def _example_from_obj(obj: dict, lineno: int) -> NliExample:
    for required in ("sentence1", "sentence2", "gold_label"):
        if required not in obj:
            raise DataValidationError(f"missing field {required!r}")
    gold = parse_gold_label(obj["gold_label"])
    raw_annot = obj.get("annotator_labels", [])
    if len(raw_annot) > MAX_ANNOTATORS:
        raise DataValidationError(
            f"{len(raw_annot)} annotator labels (max {MAX_ANNOTATORS})"
        )
    annot = tuple(parse_annotator_label(a) for a in raw_annot)
    p_tokens, p_missing = _tokens_from_parse(obj, "sentence1_parse", obj["sentence1"])
    h_tokens, h_missing = _tokens_from_parse(obj, "sentence2_parse", obj["sentence2"])
    if not p_tokens or not h_tokens:
        raise DataValidationError("empty premise or hypothesis")
    return NliExample(
        pair_id=str(obj.get("pairID") or f"L{lineno}"),
        premise_text=obj["sentence1"],
        hypothesis_text=obj["sentence2"],
        premise_tokens=p_tokens,
        hypothesis_tokens=h_tokens,
        gold=gold,
        annotator_labels=annot,
        genre=obj.get("genre"),
        parse_missing=p_missing or h_missing,
    )


def load_nli_jsonl(
    path, strict: bool = False, stats: IngestStats | None = None
) -> Iterator[NliExample]:
    """Stream NliExamples from a JSONL file, one per well-formed line.

    strict mode aborts on the first malformed line with its line number;
    lenient mode skips it and records the error in ``stats``. A missing
    parse field is not an error: the example falls back to whitespace
    tokens with POS "UNK" and carries parse_missing=True.
    """
    if stats is None:
        stats = IngestStats()
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            stats.lines += 1
            try:
                obj = json.loads(line)
                if not isinstance(obj, dict):
                    raise DataValidationError("line is not a JSON object")
                example = _example_from_obj(obj, lineno)
            except (json.JSONDecodeError, ValueError, DataValidationError) as exc:
                if strict:
                    raise DataValidationError(f"{path}: line {lineno}: {exc}") from exc
                stats.skipped += 1
                stats.errors.append((lineno, str(exc)))
                continue
            stats.loaded += 1
            if example.gold is None:
                stats.undetermined += 1
            if example.parse_missing:
                stats.missing_parse += 1
            yield example


def with_determined_gold(examples: Iterable[NliExample]) -> Iterator[NliExample]:
    return (ex for ex in examples if ex.gold is not None)


# ---------------------------------------------------------------------------
# JSONL output

_PAREN_ESCAPES = {"(": "-LRB-", ")": "-RRB-"}


def _escape_parens(token: str) -> str:
    for raw, escaped in _PAREN_ESCAPES.items():
        token = token.replace(raw, escaped)
    return token


def flat_parse(tokens: Iterable[tuple[str, str]], pos: str = "UNK") -> str:
    """Render tokens as a flat one-level tree, e.g. "(FLAT (UNK a) (UNK dog))"."""
    inner = " ".join(f"({pos} {_escape_parens(tok)})" for tok, _ in tokens)
    return f"(FLAT {inner})"


def example_to_obj(example: NliExample, extra: dict | None = None) -> dict:
    """Serialize an example to the JSONL schema with flat parse trees."""
    obj = {
        "pairID": example.pair_id,
        "gold_label": example.gold.to_string() if example.gold is not None else "-",
        "annotator_labels": [
            a.to_string() if a is not None else "" for a in example.annotator_labels
        ],
        "sentence1": example.premise_text,
        "sentence1_parse": flat_parse(example.premise_tokens),
        "sentence2": example.hypothesis_text,
        "sentence2_parse": flat_parse(example.hypothesis_tokens),
    }
    if example.genre is not None:
        obj["genre"] = example.genre
    if extra:
        obj.update(extra)
    return obj


def write_jsonl(objs: Iterable[dict], path) -> int:
    n = 0
    with open(path, "w", encoding="utf-8") as fh:
        for obj in objs:
            fh.write(json.dumps(obj, ensure_ascii=False))
            fh.write("\n")
            n += 1
    return n


# ---------------------------------------------------------------------------
# Word shuffling

_MASK64 = (1 << 64) - 1


def _shuffle_rng(seed: int, pair_id: str, side: int) -> np.random.Generator:
    # PCG64 keyed on (seed, sha256(pair_id), side): named and splittable so
    # shuffled corpora are reproducible across releases and platforms.
    digest = hashlib.sha256(pair_id.encode("utf-8")).digest()
    pid_entropy = int.from_bytes(digest[:16], "big")
    seq = np.random.SeedSequence([seed & _MASK64, pid_entropy, side])
    return np.random.Generator(np.random.PCG64(seq))


def shuffle_words(example: NliExample, seed: int) -> NliExample:
    """Permute premise and hypothesis tokens independently, POS riding along.

    A pure function of (example, seed): the premise uses stream side=0 and
    the hypothesis side=1, both keyed on the pair id. Text fields are
    re-rendered by space-joining; gold and annotator labels are unchanged.
    """
    new_p = _permute(example.premise_tokens, seed, example.pair_id, side=0)
    new_h = _permute(example.hypothesis_tokens, seed, example.pair_id, side=1)
    return NliExample(
        pair_id=example.pair_id,
        premise_text=" ".join(tok for tok, _ in new_p),
        hypothesis_text=" ".join(tok for tok, _ in new_h),
        premise_tokens=new_p,
        hypothesis_tokens=new_h,
        gold=example.gold,
        annotator_labels=example.annotator_labels,
        genre=example.genre,
        parse_missing=example.parse_missing,
    )


def _permute(tokens: tuple, seed: int, pair_id: str, side: int) -> tuple:
    if len(tokens) < 2:
        return tokens
    rng = _shuffle_rng(seed, pair_id, side)
    order = rng.permutation(len(tokens))
    return tuple(tokens[i] for i in order)


# ---------------------------------------------------------------------------
# CoNLL-U dependency trees


class ConllToken(NamedTuple):
    index: int  # 1-based
    surface: str
    lemma: str
    upos: str
    xpos: str
    head: int  # 0 = root
    deprel: str


@dataclass(frozen=True)
class DepTree:
    """One dependency-parsed sentence with contiguous 1-based token ids."""

    tokens: tuple[ConllToken, ...]
    sent_id: str | None = None
    ordinal: int = 0

    def __len__(self) -> int:
        return len(self.tokens)

    def token(self, index: int) -> ConllToken:
        return self.tokens[index - 1]

    @cached_property
    def _children(self) -> dict[int, tuple[int, ...]]:
        by_head: dict[int, list[int]] = {}
        for tok in self.tokens:
            by_head.setdefault(tok.head, []).append(tok.index)
        return {h: tuple(ids) for h, ids in by_head.items()}

    def children(self, index: int) -> tuple[int, ...]:
        return self._children.get(index, ())

    def subtree(self, index: int) -> list[int]:
        """All token indices in the subtree rooted at ``index``, sorted."""
        out = [index]
        stack = [index]
        while stack:
            for child in self.children(stack.pop()):
                out.append(child)
                stack.append(child)
        return sorted(out)

    def surfaces(self) -> list[str]:
        return [t.surface for t in self.tokens]


@dataclass
class ConlluStats:
    sentences: int = 0
    loaded: int = 0
    rejected: list = field(default_factory=list)  # (ordinal, reason)


# Relation names are normalized to UD v2; v1 direct objects arrive as "dobj".
_DEPREL_ALIASES = {"dobj": "obj"}


def _validate_heads(rows: list[tuple]) -> str | None:
    n = len(rows)
    ids = [r[0] for r in rows]
    if ids != list(range(1, n + 1)):
        return "noncontiguous ids"
    heads = [r[5] for r in rows]
    if any(h < 0 or h > n for h in heads):
        return "head out of range"
    if heads.count(0) != 1:
        return "no root" if heads.count(0) == 0 else "multiple roots"
    # every node must reach the root; a bounded walk catches cycles
    for start in range(1, n + 1):
        node, steps = start, 0
        while node != 0:
            node = heads[node - 1]
            steps += 1
            if steps > n:
                return "cycle"
    return None


def load_conllu(path, stats: ConlluStats | None = None) -> Iterator[DepTree]:
    """Stream DepTrees from a CoNLL-U file.

    Sentences are blank-line separated; ``# pair_id = ...`` (or sent_id)
    comments provide linkage back to the JSONL corpus. Multi-word-token
    and empty-node lines (ids containing "-" or ".") are skipped. A
    sentence with malformed or cyclic heads is rejected with its ordinal
    and the stream continues.
    """
    if stats is None:
        stats = ConlluStats()
    with open(path, encoding="utf-8") as fh:
        pending: list[str] = []
        sent_id: str | None = None
        ordinal = 0
        for line in fh:
            line = line.rstrip("\n")
            if line.startswith("#"):
                body = line[1:].strip()
                if "=" in body:
                    key, _, value = body.partition("=")
                    if key.strip() in ("pair_id", "sent_id"):
                        sent_id = value.strip()
                continue
            if line.strip() == "":
                if pending:
                    tree = _finish_sentence(pending, sent_id, ordinal, stats)
                    if tree is not None:
                        yield tree
                    pending, sent_id = [], None
                    ordinal += 1
                continue
            pending.append(line)
        if pending:
            tree = _finish_sentence(pending, sent_id, ordinal, stats)
            if tree is not None:
                yield tree


def _finish_sentence(
    lines: list[str], sent_id: str | None, ordinal: int, stats: ConlluStats
) -> DepTree | None:
    stats.sentences += 1
    rows = []
    for line in lines:
        fields = line.split("\t")
        if len(fields) != 10:
            stats.rejected.append((ordinal, "wrong column count"))
            return None
        if "-" in fields[0] or "." in fields[0]:
            continue  # multi-word token range or empty node
        try:
            tok_id = int(fields[0])
            head = int(fields[6])
        except ValueError:
            stats.rejected.append((ordinal, "non-integer id or head"))
            return None
        deprel = _DEPREL_ALIASES.get(fields[7], fields[7])
        rows.append((tok_id, fields[1], fields[2], fields[3], fields[4], head, deprel))
    if not rows:
        stats.rejected.append((ordinal, "no tokens"))
        return None
    problem = _validate_heads(rows)
    if problem is not None:
        stats.rejected.append((ordinal, problem))
        return None
    tokens = tuple(
        ConllToken(i, surf, lemma, upos, xpos, head, deprel)
        for i, surf, lemma, upos, xpos, head, deprel in rows
    )
    stats.loaded += 1
    return DepTree(tokens=tokens, sent_id=sent_id, ordinal=ordinal)
