"""Rule-based adversarial pair generation from dependency parses.

Two rules, both operating on the premise of a source example:

* SOswap: exchange the subject and object subtrees of a transitive
  verb. "The dog chased a cat" / "A cat chased the dog". The swapped
  sentence uses exactly the original words, so a bag-of-words view
  cannot separate the pair; the expected label is contradiction.
* AddAmod: insert one corpus-attested adjective before each of two
  different nouns. "A [small] dog chased the cat" / "A dog chased the
  [small] cat". Neither sentence entails the other; expected neutral.

Generation is deliberately conservative: frames that would need
anything beyond a capitalization fix (SOswap) or a bare insertion
(AddAmod) are rejected with a named reason rather than repaired
aggressively. Everything here is a pure function of its inputs, with
sorted tie-breaks and no randomness, so output is byte-stable across
runs regardless of host or thread count.

Known semantic limits, accepted by design: symmetric predicates ("talks
to", "marries") make SOswap's contradiction label wrong occasionally,
and stacked adjectives can read awkwardly. The rules trade a small
error rate for scale.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Iterable, Iterator, NamedTuple

from .corpus import DepTree, NliExample, example_to_obj
from .errors import DataValidationError
from .labels import Label

RULE_SOSWAP = "SOswap"
RULE_ADDAMOD = "AddAmod"

_COMMON_NOUN_XPOS = {"NN", "NNS"}
_PROPER_NOUN_XPOS = {"NNP", "NNPS"}
_VOWELS = "aeiou"


def _is_common_noun(upos: str, xpos: str) -> bool:
    return upos == "NOUN" or xpos in _COMMON_NOUN_XPOS


def _is_proper_noun(upos: str, xpos: str) -> bool:
    return upos == "PROPN" or xpos in _PROPER_NOUN_XPOS


def _is_adjective(upos: str, xpos: str) -> bool:
    return upos == "ADJ" or xpos.startswith("JJ")


def _is_verb(upos: str, xpos: str) -> bool:
    return upos == "VERB" or xpos.startswith("VB")


def _article_for(word: str) -> str:
    # letter heuristic, not phonetic: "hour"/"unique" come out wrong and
    # such candidates simply fail the agreement filter
    return "an" if word[:1].lower() in _VOWELS else "a"


# ---------------------------------------------------------------------------
# SVO frame detection


class SvoFrame(NamedTuple):
    root: int  # 1-based token indices
    subj: int
    obj: int
    subj_span: tuple[int, int]  # 0-based half-open token spans
    obj_span: tuple[int, int]


class Rejection(NamedTuple):
    reason: str


def _contiguous_span(tree: DepTree, index: int) -> tuple[int, int] | None:
    ids = tree.subtree(index)
    if ids[-1] - ids[0] + 1 != len(ids):
        return None
    return ids[0] - 1, ids[-1]


def find_svo(tree: DepTree) -> SvoFrame | Rejection:
    """Locate a single active transitive frame with common-noun arguments.

    Returns a Rejection naming the first failed condition otherwise.
    Pronoun, proper-noun, and same-lemma argument pairs are rejected:
    caption-style proper/pronoun frames too often name symmetric
    relations for the contradiction label to be safe.
    """
    roots = tree.children(0)
    root = tree.token(roots[0])
    if not _is_verb(root.upos, root.xpos):
        return Rejection("root_not_verb")
    kids = [tree.token(i) for i in tree.children(root.index)]
    rels = [k.deprel for k in kids]
    if any(r in ("nsubj:pass", "aux:pass", "nsubjpass", "auxpass") for r in rels):
        return Rejection("passive")
    if "cop" in rels:
        return Rejection("copula")
    subjects = [k for k in kids if k.deprel == "nsubj"]
    objects = [k for k in kids if k.deprel == "obj"]
    if not subjects:
        return Rejection("no_subject")
    if len(subjects) > 1:
        return Rejection("multiple_subjects")
    if not objects:
        return Rejection("no_object")
    if len(objects) > 1:
        return Rejection("multiple_objects")
    subj, obj = subjects[0], objects[0]
    for arg in (subj, obj):
        if arg.upos == "PRON" or arg.xpos.startswith("PRP"):
            return Rejection("pronoun_argument")
        if _is_proper_noun(arg.upos, arg.xpos):
            return Rejection("proper_noun_argument")
        if not _is_common_noun(arg.upos, arg.xpos):
            return Rejection("nonnominal_argument")
    if subj.lemma.lower() == obj.lemma.lower():
        return Rejection("same_lemma")
    subj_span = _contiguous_span(tree, subj.index)
    obj_span = _contiguous_span(tree, obj.index)
    if subj_span is None or obj_span is None:
        return Rejection("noncontiguous_span")
    if not (subj_span[1] <= obj_span[0] or obj_span[1] <= subj_span[0]):
        return Rejection("overlapping_spans")
    return SvoFrame(root.index, subj.index, obj.index, subj_span, obj_span)


# ---------------------------------------------------------------------------
# Adversarial pairs


@dataclass(frozen=True)
class AdversarialPair:
    source_pair_id: str
    rule: str
    expected: Label
    premise_tokens: tuple[tuple[str, str], ...]
    hypothesis_tokens: tuple[tuple[str, str], ...]
    edits: dict
    genre: str | None = None

    @property
    def premise_text(self) -> str:
        return " ".join(tok for tok, _ in self.premise_tokens)

    @property
    def hypothesis_text(self) -> str:
        return " ".join(tok for tok, _ in self.hypothesis_tokens)

    @property
    def pair_id(self) -> str:
        return f"{self.source_pair_id}-{self.rule.lower()}"


def swap_spans(tokens: list, span_a: tuple[int, int], span_b: tuple[int, int]) -> list:
    """Exchange two disjoint half-open spans, everything else in place."""
    (a0, a1), (b0, b1) = sorted([span_a, span_b])
    if a1 > b0:
        raise ValueError("spans overlap")
    return tokens[:a0] + tokens[b0:b1] + tokens[a1:b0] + tokens[a0:a1] + tokens[b1:]


def _aligned(example: NliExample, tree: DepTree) -> bool:
    return [tok for tok, _ in example.premise_tokens] == tree.surfaces()


def _recase(tokens: list, tree: DepTree, perm: list) -> tuple[list, list]:
    """Fix sentence-initial capitalization after a swap.

    perm[i] is the original position of the token now at i. The new
    initial token is upcased; the old initial token is downcased unless
    it is a proper noun or "I". Each change is recorded as a repair.
    """
    repairs = []
    if perm[0] == 0:
        return tokens, repairs
    first, pos = tokens[0]
    if first[:1].islower():
        fixed = first[0].upper() + first[1:]
        repairs.append({"op": "capitalize", "index": 0, "before": first, "after": fixed})
        tokens[0] = (fixed, pos)
    old_at = perm.index(0)
    old, old_pos = tokens[old_at]
    old_tok = tree.token(1)
    if (
        old[:1].isupper()
        and old != "I"
        and not _is_proper_noun(old_tok.upos, old_tok.xpos)
    ):
        fixed = old[0].lower() + old[1:]
        repairs.append(
            {"op": "lowercase", "index": old_at, "before": old, "after": fixed}
        )
        tokens[old_at] = (fixed, old_pos)
    return tokens, repairs


def gen_soswap(example: NliExample, tree: DepTree) -> AdversarialPair | Rejection:
    """Swap subject and object spans of the premise; expect contradiction.

    The hypothesis is a permutation of the premise tokens up to the
    capitalization repair, so lowercased token multisets always match.
    """
    if example.parse_missing:
        return Rejection("no_constituency_parse")
    if not _aligned(example, tree):
        return Rejection("tokenization_mismatch")
    frame = find_svo(tree)
    if isinstance(frame, Rejection):
        return frame
    tagged = list(example.premise_tokens)
    positions = list(range(len(tagged)))
    swapped = swap_spans(tagged, frame.subj_span, frame.obj_span)
    perm = swap_spans(positions, frame.subj_span, frame.obj_span)
    swapped, repairs = _recase(swapped, tree, perm)
    hypothesis = tuple(swapped)
    if [t for t, _ in hypothesis] == [t for t, _ in example.premise_tokens]:
        return Rejection("swap_noop")
    edits = {
        "subj_span": list(frame.subj_span),
        "obj_span": list(frame.obj_span),
        "repairs": repairs,
    }
    return AdversarialPair(
        source_pair_id=example.pair_id,
        rule=RULE_SOSWAP,
        expected=Label.CONTRADICTION,
        premise_tokens=example.premise_tokens,
        hypothesis_tokens=hypothesis,
        edits=edits,
        genre=example.genre,
    )


# ---------------------------------------------------------------------------
# Adjective mining and AddAmod

_AMOD_MAGIC = "compsense-amod 1"


@dataclass
class AmodMap:
    """noun lemma -> adjective lemma -> occurrence count, all lowercased."""

    counts: dict = field(default_factory=dict)

    def add(self, noun_lemma: str, adj_lemma: str, n: int = 1) -> None:
        by_adj = self.counts.setdefault(noun_lemma.lower(), {})
        adj = adj_lemma.lower()
        by_adj[adj] = by_adj.get(adj, 0) + n

    def adjectives(self, noun_lemma: str) -> dict:
        return self.counts.get(noun_lemma.lower(), {})

    def shared(self, noun_a: str, noun_b: str) -> list[tuple[str, int]]:
        """Adjectives attested for both nouns, best joint support first.

        Joint support is min(count_a, count_b); ties break to the
        lexicographically smaller adjective so selection is stable.
        """
        a, b = self.adjectives(noun_a), self.adjectives(noun_b)
        pairs = [(adj, min(c, b[adj])) for adj, c in a.items() if adj in b]
        return sorted(pairs, key=lambda kv: (-kv[1], kv[0]))

    def save(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(_AMOD_MAGIC + "\n")
            for noun in sorted(self.counts):
                by_adj = self.counts[noun]
                for adj in sorted(by_adj, key=lambda a: (-by_adj[a], a)):
                    fh.write(f"{noun}\t{adj}\t{by_adj[adj]}\n")

    @classmethod
    def load(cls, path) -> "AmodMap":
        amap = cls()
        with open(path, encoding="utf-8") as fh:
            if fh.readline().rstrip("\n") != _AMOD_MAGIC:
                raise DataValidationError(f"{path}: not an adjective map file")
            for lineno, line in enumerate(fh, start=2):
                parts = line.rstrip("\n").split("\t")
                if len(parts) != 3:
                    raise DataValidationError(f"{path}: line {lineno}: bad row")
                try:
                    amap.add(parts[0], parts[1], int(parts[2]))
                except ValueError as exc:
                    raise DataValidationError(
                        f"{path}: line {lineno}: bad count"
                    ) from exc
        return amap


def mine_amod_map(trees: Iterable[DepTree]) -> AmodMap:
    """Count every amod edge whose head is a noun and child an adjective."""
    amap = AmodMap()
    for tree in trees:
        for tok in tree.tokens:
            if tok.deprel != "amod" or tok.head == 0:
                continue
            if not _is_adjective(tok.upos, tok.xpos):
                continue
            head = tree.token(tok.head)
            if _is_common_noun(head.upos, head.xpos) or _is_proper_noun(
                head.upos, head.xpos
            ):
                amap.add(head.lemma, tok.lemma)
    return amap


def _first_two_nouns(tree: DepTree) -> tuple | None:
    """First two common nouns with distinct lemmas, in token order."""
    seen: dict[str, int] = {}
    for tok in tree.tokens:
        if not _is_common_noun(tok.upos, tok.xpos):
            continue
        lemma = tok.lemma.lower()
        if lemma not in seen:
            seen[lemma] = tok.index
            if len(seen) == 2:
                (l1, i1), (l2, i2) = seen.items()
                return (l1, i1), (l2, i2)
    return None


def _article_agrees(tokens: tuple, insert_at: int, adjective: str) -> bool:
    if insert_at == 0:
        return True
    prev = tokens[insert_at - 1][0].lower()
    if prev in ("a", "an"):
        return prev == _article_for(adjective)
    return True


def gen_addamod(
    example: NliExample, tree: DepTree, amod_map: AmodMap
) -> AdversarialPair | Rejection:
    """Insert one shared adjective before each of two nouns; expect neutral.

    Both sentences extend the same source premise by exactly one token,
    so removing the insertion recovers the source verbatim: candidate
    adjectives that would force an a/an change or a capitalization fix
    are filtered out instead of repaired, and adjectives already present
    in the sentence are skipped.
    """
    if example.parse_missing:
        return Rejection("no_constituency_parse")
    if not _aligned(example, tree):
        return Rejection("tokenization_mismatch")
    nouns = _first_two_nouns(tree)
    if nouns is None:
        return Rejection("too_few_nouns")
    (lemma1, idx1), (lemma2, idx2) = nouns
    site1, site2 = idx1 - 1, idx2 - 1  # insert directly before each noun
    if site1 == 0 or site2 == 0:
        return Rejection("sentence_initial_noun")
    present = {tok.lower() for tok, _ in example.premise_tokens}
    chosen = None
    for adjective, support in amod_map.shared(lemma1, lemma2):
        if adjective in present:
            continue
        if not _article_agrees(example.premise_tokens, site1, adjective):
            continue
        if not _article_agrees(example.premise_tokens, site2, adjective):
            continue
        chosen = (adjective, support)
        break
    if chosen is None:
        return Rejection("no_shared_adjective")
    adjective, support = chosen
    source = list(example.premise_tokens)
    premise = source[:site1] + [(adjective, "JJ")] + source[site1:]
    hypothesis = source[:site2] + [(adjective, "JJ")] + source[site2:]
    edits = {
        "adjective": adjective,
        "support": support,
        "premise_insert_index": site1,
        "hypothesis_insert_index": site2,
        "premise_noun": lemma1,
        "hypothesis_noun": lemma2,
    }
    return AdversarialPair(
        source_pair_id=example.pair_id,
        rule=RULE_ADDAMOD,
        expected=Label.NEUTRAL,
        premise_tokens=tuple(premise),
        hypothesis_tokens=tuple(hypothesis),
        edits=edits,
        genre=example.genre,
    )


# ---------------------------------------------------------------------------
# Batch generation


@dataclass
class GenReport:
    rule: str
    n_sources: int = 0
    n_generated: int = 0
    rejections: dict = field(default_factory=dict)

    def reject(self, reason: str) -> None:
        self.rejections[reason] = self.rejections.get(reason, 0) + 1

    def to_json(self) -> str:
        return json.dumps(
            {
                "rule": self.rule,
                "n_sources": self.n_sources,
                "n_generated": self.n_generated,
                "rejections": dict(sorted(self.rejections.items())),
            },
            indent=2,
            sort_keys=False,
        )


def generate_adversaries(
    examples: Iterable[NliExample],
    trees_by_id: dict,
    rule: str,
    amod_map: AmodMap | None = None,
    limit: int | None = None,
) -> tuple[list[AdversarialPair], GenReport]:
    """Run one rule over a corpus, in corpus order, collecting rejects.

    trees_by_id maps pair ids to premise DepTrees; examples without one
    are rejected as "no_dependency_parse". A limit stops generation
    after that many pairs but keeps counting sources seen so far.
    """
    if rule == RULE_ADDAMOD and amod_map is None:
        raise DataValidationError("AddAmod needs an adjective map")
    report = GenReport(rule=rule)
    pairs: list[AdversarialPair] = []
    for example in examples:
        if limit is not None and len(pairs) >= limit:
            break
        report.n_sources += 1
        tree = trees_by_id.get(example.pair_id)
        if tree is None:
            report.reject("no_dependency_parse")
            continue
        if rule == RULE_SOSWAP:
            result = gen_soswap(example, tree)
        elif rule == RULE_ADDAMOD:
            result = gen_addamod(example, tree, amod_map)
        else:
            raise DataValidationError(f"unknown rule {rule!r}")
        if isinstance(result, Rejection):
            report.reject(result.reason)
            continue
        pairs.append(result)
        report.n_generated += 1
    return pairs, report


def pair_to_obj(pair: AdversarialPair) -> dict:
    """Serialize to the corpus JSONL schema plus provenance fields."""
    as_example = NliExample(
        pair_id=pair.pair_id,
        premise_text=pair.premise_text,
        hypothesis_text=pair.hypothesis_text,
        premise_tokens=pair.premise_tokens,
        hypothesis_tokens=pair.hypothesis_tokens,
        gold=pair.expected,
        annotator_labels=(),
        genre=pair.genre,
    )
    return example_to_obj(
        as_example,
        extra={
            "rule": pair.rule,
            "source_pairID": pair.source_pair_id,
            "edits": pair.edits,
        },
    )
