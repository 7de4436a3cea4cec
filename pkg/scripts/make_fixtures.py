#!/usr/bin/env python3
"""Regenerate the committed test fixtures under tests/fixtures/.

The fixtures are checked in; this script exists so they can be rebuilt
or extended deterministically. Rerunning it must be a no-op on a clean
tree (fixed RNG seed, no timestamps).

Layout produced:
  fixture200.jsonl / fixture200.conllu  synthetic 200-example NLI corpus
  svo10.jsonl / svo10.conllu            10-sentence adversary fixture
  amod.conllu                           adjective-mining corpus
  preds_*.tsv                           synthetic prediction files
  pipeline.cfg                          end-to-end config over the fixtures
"""

from __future__ import annotations

import json
import os

import numpy as np

HERE = os.path.dirname(os.path.abspath(__file__))
FIXTURES = os.path.join(HERE, "..", "tests", "fixtures")

SUBJ_NOUNS = ["dog", "cat", "girl", "boy", "woman", "man", "bird", "horse", "child", "farmer"]
OBJ_NOUNS = ["ball", "book", "stick", "apple", "kite", "drum", "rope", "wagon", "basket", "flag"]
VERBS = [("chases", "chase"), ("holds", "hold"), ("carries", "carry"),
         ("watches", "watch"), ("pulls", "pull"), ("lifts", "lift")]
C_VERBS = ["ignores", "avoids", "drops", "refuses"]
N_NOUNS = ["weather", "music", "morning", "garden"]
ADJS = ["big", "small", "red", "young", "happy", "tall"]

E, C, N = "entailment", "contradiction", "neutral"
NEXT = {E: C, C: N, N: E}


def np_parse(det: str, noun: str, adj: str | None = None) -> str:
    if adj is None:
        return f"(NP (DT {det}) (NN {noun}))"
    return f"(NP (DT {det}) (JJ {adj}) (NN {noun}))"


def premise_of(subj, verb, obj, subj_adj, obj_adj):
    tokens = ["The"]
    if subj_adj:
        tokens.append(subj_adj)
    tokens += [subj, verb, "a"]
    if obj_adj:
        tokens.append(obj_adj)
    tokens += [obj, "."]
    parse = (
        f"(ROOT (S {np_parse('The', subj, subj_adj)} "
        f"(VP (VBZ {verb}) {np_parse('a', obj, obj_adj)}) (. .)))"
    )
    return " ".join(tokens), parse


def hypothesis_of(kind, subj, verb, obj, rng):
    if kind == E:
        text = f"A {subj} {verb} something ."
        parse = (
            f"(ROOT (S (NP (DT A) (NN {subj})) "
            f"(VP (VBZ {verb}) (NP (NN something))) (. .)))"
        )
    elif kind == C:
        cv = C_VERBS[int(rng.integers(len(C_VERBS)))]
        text = f"The {subj} {cv} the {obj} ."
        parse = (
            f"(ROOT (S (NP (DT The) (NN {subj})) "
            f"(VP (VBZ {cv}) (NP (DT the) (NN {obj}))) (. .)))"
        )
    else:
        nn = N_NOUNS[int(rng.integers(len(N_NOUNS)))]
        text = f"The {subj} likes the {nn} ."
        parse = (
            f"(ROOT (S (NP (DT The) (NN {subj})) "
            f"(VP (VBZ likes) (NP (DT the) (NN {nn}))) (. .)))"
        )
    return text, parse


def premise_conllu(pair_id, subj, verb, verb_lemma, obj, subj_adj, obj_adj):
    rows = []

    def tok(form, lemma, upos, xpos, head, rel):
        rows.append((form, lemma, upos, xpos, head, rel))

    # heads are filled in after layout since adjectives shift indices
    tok("The", "the", "DET", "DT", None, "det")
    if subj_adj:
        tok(subj_adj, subj_adj, "ADJ", "JJ", None, "amod")
    tok(subj, subj, "NOUN", "NN", None, "nsubj")
    tok(verb, verb_lemma, "VERB", "VBZ", 0, "root")
    tok("a", "a", "DET", "DT", None, "det")
    if obj_adj:
        tok(obj_adj, obj_adj, "ADJ", "JJ", None, "amod")
    tok(obj, obj, "NOUN", "NN", None, "obj")
    tok(".", ".", "PUNCT", ".", None, "punct")

    subj_idx = 3 if subj_adj else 2
    verb_idx = subj_idx + 1
    obj_idx = len(rows) - 1  # 1-based: the noun before "."
    heads = []
    for i, (form, lemma, upos, xpos, head, rel) in enumerate(rows, start=1):
        if head == 0:
            h = 0
        elif rel in ("det", "amod"):
            h = subj_idx if i < verb_idx else obj_idx
        elif rel == "nsubj":
            h = verb_idx
        elif rel in ("obj", "punct"):
            h = verb_idx
        heads.append(h)
    lines = [f"# pair_id = {pair_id}"]
    for i, ((form, lemma, upos, xpos, _, rel), h) in enumerate(zip(rows, heads), start=1):
        lines.append(f"{i}\t{form}\t{lemma}\t{upos}\t{xpos}\t_\t{h}\t{rel}\t_\t_")
    return "\n".join(lines) + "\n"


def build_fixture200():
    rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence(20260819)))
    undetermined_at = {32, 65, 98, 131, 164, 197}
    missing_parse_at = {10, 55, 120, 180}
    labels = [E] * 80 + [C] * 64 + [N] * 50
    order = rng.permutation(len(labels))
    labels = [labels[i] for i in order]

    jsonl_lines = []
    conllu_blocks = []
    gold_by_id = {}
    det_j = 0
    for i in range(200):
        pair_id = f"fx{i + 1:04d}"
        subj = SUBJ_NOUNS[int(rng.integers(len(SUBJ_NOUNS)))]
        obj = OBJ_NOUNS[int(rng.integers(len(OBJ_NOUNS)))]
        verb, verb_lemma = VERBS[int(rng.integers(len(VERBS)))]
        subj_adj = ADJS[int(rng.integers(len(ADJS)))] if i % 5 == 1 else None
        obj_adj = ADJS[int(rng.integers(len(ADJS)))] if (i % 4 == 3 and not subj_adj) else None
        p_text, p_parse = premise_of(subj, verb, obj, subj_adj, obj_adj)

        if i in undetermined_at:
            gold = "-"
            votes = [E, E, C, C, N]
            h_text, h_parse = hypothesis_of(N, subj, verb, obj, rng)
        else:
            gold = labels[det_j]
            twisted = det_j % 13 == 5
            det_j += 1
            kind = gold
            if twisted:
                kind = E if gold in (C, N) else C
            h_text, h_parse = hypothesis_of(kind, subj, verb, obj, rng)
            votes = [gold] * 5
            if i % 3 == 0:
                votes[3] = NEXT[gold]
            if i % 7 == 0:
                votes[3] = NEXT[gold]
                votes[4] = NEXT[NEXT[gold]]
            if i % 31 == 0:
                votes[2] = "-"
            gold_by_id[pair_id] = gold

        obj_line = {
            "pairID": pair_id,
            "gold_label": gold,
            "annotator_labels": votes,
            "sentence1": p_text,
            "sentence1_parse": p_parse,
            "sentence2": h_text,
            "sentence2_parse": h_parse,
        }
        if i % 2 == 0:
            obj_line["genre"] = "fiction"
        if i in missing_parse_at:
            del obj_line["sentence1_parse"]
        jsonl_lines.append(json.dumps(obj_line, ensure_ascii=False))

        # two of the four parse-missing rows keep a dependency parse so both
        # rejection paths (missing constituency vs missing dependency) occur
        if i not in missing_parse_at or i in (10, 120):
            conllu_blocks.append(
                premise_conllu(pair_id, subj, verb, verb_lemma, obj, subj_adj, obj_adj)
            )

    with open(os.path.join(FIXTURES, "fixture200.jsonl"), "w") as fh:
        fh.write("\n".join(jsonl_lines) + "\n")
    with open(os.path.join(FIXTURES, "fixture200.conllu"), "w") as fh:
        fh.write("\n".join(conllu_blocks))
    return gold_by_id


SVO10_JSONL = [
    # (pair_id, premise, premise_parse)
    ("sv01", "The dog chased a cat .",
     "(ROOT (S (NP (DT The) (NN dog)) (VP (VBD chased) (NP (DT a) (NN cat))) (. .)))"),
    ("sv02", "A girl reads the book .",
     "(ROOT (S (NP (DT A) (NN girl)) (VP (VBZ reads) (NP (DT the) (NN book))) (. .)))"),
    ("sv03", "A woman holds the baby .",
     "(ROOT (S (NP (DT A) (NN woman)) (VP (VBZ holds) (NP (DT the) (NN baby))) (. .)))"),
    ("sv04", "The bird watched the fish .",
     "(ROOT (S (NP (DT The) (NN bird)) (VP (VBD watched) (NP (DT the) (NN fish))) (. .)))"),
    ("sv05", "The dog runs .",
     "(ROOT (S (NP (DT The) (NN dog)) (VP (VBZ runs)) (. .)))"),
    ("sv06", "The ball was thrown by the boy .",
     "(ROOT (S (NP (DT The) (NN ball)) (VP (VBD was) (VP (VBN thrown) "
     "(PP (IN by) (NP (DT the) (NN boy))))) (. .)))"),
    ("sv07", "She sees the star .",
     "(ROOT (S (NP (PRP She)) (VP (VBZ sees) (NP (DT the) (NN star))) (. .)))"),
    ("sv08", "John met the teacher .",
     "(ROOT (S (NP (NNP John)) (VP (VBD met) (NP (DT the) (NN teacher))) (. .)))"),
    ("sv09", "A fish follows the fish .",
     "(ROOT (S (NP (DT A) (NN fish)) (VP (VBZ follows) (NP (DT the) (NN fish))) (. .)))"),
    ("sv10", "The sky is blue .",
     "(ROOT (S (NP (DT The) (NN sky)) (VP (VBZ is) (ADJP (JJ blue))) (. .)))"),
]

SVO10_CONLLU = """\
# pair_id = sv01
1\tThe\tthe\tDET\tDT\t_\t2\tdet\t_\t_
2\tdog\tdog\tNOUN\tNN\t_\t3\tnsubj\t_\t_
3\tchased\tchase\tVERB\tVBD\t_\t0\troot\t_\t_
4\ta\ta\tDET\tDT\t_\t5\tdet\t_\t_
5\tcat\tcat\tNOUN\tNN\t_\t3\tobj\t_\t_
6\t.\t.\tPUNCT\t.\t_\t3\tpunct\t_\t_

# pair_id = sv02
1\tA\ta\tDET\tDT\t_\t2\tdet\t_\t_
2\tgirl\tgirl\tNOUN\tNN\t_\t3\tnsubj\t_\t_
3\treads\tread\tVERB\tVBZ\t_\t0\troot\t_\t_
4\tthe\tthe\tDET\tDT\t_\t5\tdet\t_\t_
5\tbook\tbook\tNOUN\tNN\t_\t3\tobj\t_\t_
6\t.\t.\tPUNCT\t.\t_\t3\tpunct\t_\t_

# pair_id = sv03
1\tA\ta\tDET\tDT\t_\t2\tdet\t_\t_
2\twoman\twoman\tNOUN\tNN\t_\t3\tnsubj\t_\t_
3\tholds\thold\tVERB\tVBZ\t_\t0\troot\t_\t_
4\tthe\tthe\tDET\tDT\t_\t5\tdet\t_\t_
5\tbaby\tbaby\tNOUN\tNN\t_\t3\tobj\t_\t_
6\t.\t.\tPUNCT\t.\t_\t3\tpunct\t_\t_

# pair_id = sv04
1\tThe\tthe\tDET\tDT\t_\t2\tdet\t_\t_
2\tbird\tbird\tNOUN\tNN\t_\t3\tnsubj\t_\t_
3\twatched\twatch\tVERB\tVBD\t_\t0\troot\t_\t_
4\tthe\tthe\tDET\tDT\t_\t5\tdet\t_\t_
5\tfish\tfish\tNOUN\tNN\t_\t3\tobj\t_\t_
6\t.\t.\tPUNCT\t.\t_\t3\tpunct\t_\t_

# pair_id = sv05
1\tThe\tthe\tDET\tDT\t_\t2\tdet\t_\t_
2\tdog\tdog\tNOUN\tNN\t_\t3\tnsubj\t_\t_
3\truns\trun\tVERB\tVBZ\t_\t0\troot\t_\t_
4\t.\t.\tPUNCT\t.\t_\t3\tpunct\t_\t_

# pair_id = sv06
1\tThe\tthe\tDET\tDT\t_\t2\tdet\t_\t_
2\tball\tball\tNOUN\tNN\t_\t4\tnsubj:pass\t_\t_
3\twas\tbe\tAUX\tVBD\t_\t4\taux:pass\t_\t_
4\tthrown\tthrow\tVERB\tVBN\t_\t0\troot\t_\t_
5\tby\tby\tADP\tIN\t_\t7\tcase\t_\t_
6\tthe\tthe\tDET\tDT\t_\t7\tdet\t_\t_
7\tboy\tboy\tNOUN\tNN\t_\t4\tobl\t_\t_
8\t.\t.\tPUNCT\t.\t_\t4\tpunct\t_\t_

# pair_id = sv07
1\tShe\tshe\tPRON\tPRP\t_\t2\tnsubj\t_\t_
2\tsees\tsee\tVERB\tVBZ\t_\t0\troot\t_\t_
3\tthe\tthe\tDET\tDT\t_\t4\tdet\t_\t_
4\tstar\tstar\tNOUN\tNN\t_\t2\tobj\t_\t_
5\t.\t.\tPUNCT\t.\t_\t2\tpunct\t_\t_

# pair_id = sv08
1\tJohn\tJohn\tPROPN\tNNP\t_\t2\tnsubj\t_\t_
2\tmet\tmeet\tVERB\tVBD\t_\t0\troot\t_\t_
3\tthe\tthe\tDET\tDT\t_\t4\tdet\t_\t_
4\tteacher\tteacher\tNOUN\tNN\t_\t2\tobj\t_\t_
5\t.\t.\tPUNCT\t.\t_\t2\tpunct\t_\t_

# pair_id = sv09
1\tA\ta\tDET\tDT\t_\t2\tdet\t_\t_
2\tfish\tfish\tNOUN\tNN\t_\t3\tnsubj\t_\t_
3\tfollows\tfollow\tVERB\tVBZ\t_\t0\troot\t_\t_
4\tthe\tthe\tDET\tDT\t_\t5\tdet\t_\t_
5\tfish\tfish\tNOUN\tNN\t_\t3\tobj\t_\t_
6\t.\t.\tPUNCT\t.\t_\t3\tpunct\t_\t_

# pair_id = sv10
1\tThe\tthe\tDET\tDT\t_\t2\tdet\t_\t_
2\tsky\tsky\tNOUN\tNN\t_\t4\tnsubj\t_\t_
3\tis\tbe\tAUX\tVBZ\t_\t4\tcop\t_\t_
4\tblue\tblue\tADJ\tJJ\t_\t0\troot\t_\t_
5\t.\t.\tPUNCT\t.\t_\t4\tpunct\t_\t_
"""

AMOD_CONLLU = """\
# sent_id = am1
1\tThe\tthe\tDET\tDT\t_\t3\tdet\t_\t_
2\tbig\tbig\tADJ\tJJ\t_\t3\tamod\t_\t_
3\tdog\tdog\tNOUN\tNN\t_\t4\tnsubj\t_\t_
4\tbarked\tbark\tVERB\tVBD\t_\t0\troot\t_\t_
5\t.\t.\tPUNCT\t.\t_\t4\tpunct\t_\t_

# sent_id = am2
1\tA\ta\tDET\tDT\t_\t3\tdet\t_\t_
2\tbig\tbig\tADJ\tJJ\t_\t3\tamod\t_\t_
3\tcat\tcat\tNOUN\tNN\t_\t4\tnsubj\t_\t_
4\tslept\tsleep\tVERB\tVBD\t_\t0\troot\t_\t_
5\t.\t.\tPUNCT\t.\t_\t4\tpunct\t_\t_

# sent_id = am3
1\tThe\tthe\tDET\tDT\t_\t3\tdet\t_\t_
2\tyoung\tyoung\tADJ\tJJ\t_\t3\tamod\t_\t_
3\tgirl\tgirl\tNOUN\tNN\t_\t4\tnsubj\t_\t_
4\tsmiled\tsmile\tVERB\tVBD\t_\t0\troot\t_\t_
5\t.\t.\tPUNCT\t.\t_\t4\tpunct\t_\t_

# sent_id = am4
1\tA\ta\tDET\tDT\t_\t3\tdet\t_\t_
2\tyoung\tyoung\tADJ\tJJ\t_\t3\tamod\t_\t_
3\tbook\tbook\tNOUN\tNN\t_\t4\tnsubj\t_\t_
4\tappeared\tappear\tVERB\tVBD\t_\t0\troot\t_\t_
5\t.\t.\tPUNCT\t.\t_\t4\tpunct\t_\t_

# sent_id = am5
1\tThe\tthe\tDET\tDT\t_\t3\tdet\t_\t_
2\tsmall\tsmall\tADJ\tJJ\t_\t3\tamod\t_\t_
3\twoman\twoman\tNOUN\tNN\t_\t4\tnsubj\t_\t_
4\twaved\twave\tVERB\tVBD\t_\t0\troot\t_\t_
5\t.\t.\tPUNCT\t.\t_\t4\tpunct\t_\t_

# sent_id = am6
1\tA\ta\tDET\tDT\t_\t3\tdet\t_\t_
2\tsmall\tsmall\tADJ\tJJ\t_\t3\tamod\t_\t_
3\tbaby\tbaby\tNOUN\tNN\t_\t4\tnsubj\t_\t_
4\tcried\tcry\tVERB\tVBD\t_\t0\troot\t_\t_
5\t.\t.\tPUNCT\t.\t_\t4\tpunct\t_\t_

# sent_id = am7
1\tThe\tthe\tDET\tDT\t_\t3\tdet\t_\t_
2\tred\tred\tADJ\tJJ\t_\t3\tamod\t_\t_
3\tball\tball\tNOUN\tNN\t_\t4\tnsubj\t_\t_
4\trolled\troll\tVERB\tVBD\t_\t0\troot\t_\t_
5\t.\t.\tPUNCT\t.\t_\t4\tpunct\t_\t_
"""

HYP_PARSE = (
    "(ROOT (S (NP (DT An) (NN animal)) (VP (VBZ is) (ADVP (RB nearby))) (. .)))"
)


def build_svo10():
    lines = []
    for pair_id, text, parse in SVO10_JSONL:
        lines.append(
            json.dumps(
                {
                    "pairID": pair_id,
                    "gold_label": E,
                    "annotator_labels": [E] * 5,
                    "sentence1": text,
                    "sentence1_parse": parse,
                    "sentence2": "An animal is nearby .",
                    "sentence2_parse": HYP_PARSE,
                },
                ensure_ascii=False,
            )
        )
    with open(os.path.join(FIXTURES, "svo10.jsonl"), "w") as fh:
        fh.write("\n".join(lines) + "\n")
    with open(os.path.join(FIXTURES, "svo10.conllu"), "w") as fh:
        fh.write(SVO10_CONLLU)
    with open(os.path.join(FIXTURES, "amod.conllu"), "w") as fh:
        fh.write(AMOD_CONLLU)


def build_preds(gold_by_id):
    ids = sorted(gold_by_id)  # fx0001.. ordering == numeric ordering
    with open(os.path.join(FIXTURES, "preds_perfect.tsv"), "w") as fh:
        for pid in ids:
            fh.write(f"{pid}\t{gold_by_id[pid]}\n")
    with open(os.path.join(FIXTURES, "preds_constant_e.tsv"), "w") as fh:
        fh.write("pairID\tlabel\n")
        for i in range(200):
            fh.write(f"fx{i + 1:04d}\t{E}\n")
    with open(os.path.join(FIXTURES, "preds_partial.tsv"), "w") as fh:
        for pid in ids[:120]:
            fh.write(f"{pid}\t{gold_by_id[pid]}\n")
    probs = {E: (0.8, 0.1, 0.1), C: (0.1, 0.8, 0.1), N: (0.1, 0.1, 0.8)}
    with open(os.path.join(FIXTURES, "preds_probs.tsv"), "w") as fh:
        for pid in ids[:10]:
            g = gold_by_id[pid]
            pe, pc, pn = probs[g]
            fh.write(f"{pid}\t{g}\t{pe}\t{pc}\t{pn}\n")


PIPELINE_CFG = """\
# end-to-end fixture run: train and score on the 200-example corpus
train = fixture200.jsonl
dev = fixture200.jsonl
preds = preds_perfect.tsv preds_constant_e.tsv

workdir = out
lambda_grid = 0.5 0.6 0.7
min_count = 2
epochs = 3
batch_size = 32
seed = 7
"""


def main():
    os.makedirs(FIXTURES, exist_ok=True)
    gold_by_id = build_fixture200()
    build_svo10()
    build_preds(gold_by_id)
    with open(os.path.join(FIXTURES, "pipeline.cfg"), "w") as fh:
        fh.write(PIPELINE_CFG)
    print(f"fixtures written to {os.path.normpath(FIXTURES)}")
    print(f"determined examples: {len(gold_by_id)}")


if __name__ == "__main__":
    main()
