#!/usr/bin/env python3
"""Regenerate data/toy50.mrg, the bundled 50-sentence overfitting corpus.

The corpus is tiny but exercises every structural feature the models train
on: n-ary nodes that need intermediate labels, unary chains over both leaves
and internal nodes, PP attachment, and sentence lengths from 2 to 8.
"""

import itertools
import pathlib

OUT = pathlib.Path(__file__).resolve().parent.parent / "data" / "toy50.mrg"

DT = ["the", "a"]
NN = ["dog", "cat", "bird", "tree", "price", "stock", "man", "car"]
JJ = ["big", "small", "old", "green"]
NNP = ["Mary", "John"]
VBZ = ["sees", "likes", "hears", "keeps"]
VBD = ["saw", "liked"]
VBG = ["falling", "rising", "running"]
IN = ["on", "under", "near"]


def np_det(d, n):
    return f"(NP (DT {d}) (NN {n}))"


def sentences():
    out = []
    # transitive: (S NP (VP V NP))
    for (d1, n1), v, (d2, n2) in zip(
        itertools.cycle([("the", "dog"), ("a", "cat"), ("the", "man"), ("a", "bird")]),
        itertools.cycle(["sees", "likes", "hears"]),
        [(d, n) for d in DT for n in NN],
    ):
        out.append(f"(S {np_det(d1, n1)} (VP (VBZ {v}) {np_det(d2, n2)}))")
    out = out[:12]
    # transitive with PP: 3-child VP, 8 words
    for (d1, n1), (d2, n2), p in zip(
        [("the", "dog"), ("a", "cat"), ("the", "bird"), ("a", "man")],
        [("a", "tree"), ("the", "car"), ("a", "stock"), ("the", "price")],
        itertools.cycle(IN),
    ):
        out.append(
            f"(S {np_det(d1, n1)} (VP (VBZ sees) {np_det(d2, n2)} (PP (IN {p}) {np_det('the', 'tree')})))"
        )
    # 3-child NP subject, intransitive VP with a unary chain over the verb
    for j, n, g in zip(itertools.cycle(JJ), NN, itertools.cycle(VBG)):
        out.append(f"(S (NP (DT the) (JJ {j}) (NN {n})) (VP (VBG {g})))")
    # PP attachment under VP
    for name, p, (d, n) in zip(
        itertools.cycle(NNP), itertools.cycle(IN), [(d, n) for d in DT for n in NN[:4]]
    ):
        out.append(f"(S (NP (NNP {name})) (VP (VBD saw) (PP (IN {p}) {np_det(d, n)})))")
    # unary chain [VP, S] over a single word, figure-style
    for (d, n), g in zip([(d, n) for d in DT for n in NN[:4]], itertools.cycle(VBG)):
        out.append(f"(S {np_det(d, n)} (VP (VBZ keeps) (S (VP (VBG {g})))))")
    # 4-child NP: two intermediate nodes after binarization
    for (j1, j2), n, v in zip(
        itertools.cycle([("big", "old"), ("small", "green")]), NN[:4], itertools.cycle(VBD)
    ):
        out.append(f"(S (NP (DT a) (JJ {j1}) (JJ {j2}) (NN {n})) (VP (VBD {v})))")
    # copular with ADJP complement
    for n, j in zip(NN[4:], itertools.cycle(JJ)):
        out.append(f"(S {np_det('the', n)} (VP (VBZ is) (ADJP (JJ {j}))))")
    # unary chain over a branching node: FRAG above NP
    out.append("(FRAG (NP (DT the) (NN tree)))")
    out.append("(FRAG (NP (DT a) (NN stock)))")
    seen = set()
    uniq = []
    for s in out:
        if s not in seen:
            seen.add(s)
            uniq.append(s)
    return uniq[:50]


def main():
    sents = sentences()
    assert len(sents) == 50, len(sents)
    OUT.parent.mkdir(parents=True, exist_ok=True)
    OUT.write_text("\n".join(sents) + "\n", encoding="utf-8")
    print(f"wrote {len(sents)} trees to {OUT}")


if __name__ == "__main__":
    main()
