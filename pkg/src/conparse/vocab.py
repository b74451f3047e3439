"""Vocabularies, unknown-word classes, and the stochastic replacement rule."""

from __future__ import annotations

from typing import Optional, Sequence

import numpy as np

from .errors import EmptyCorpus, LabelNotInVocab, UnknownPOS
from .trees import CollapsedNode

BOS = "<s>"
EOS = "</s>"
UNK = "<unk>"
UNK_CHAR = "<unk-char>"
STOP_LABEL = "</L>"
START_LABEL = "<L>"


def unk_class(word: str, sentence_initial: bool = False, mode: str = "english") -> str:
    """Map a word to its surface-feature unknown class.

    English classes are a product of capitalization (all-caps, initial cap,
    sentence-initial cap, other), a digit flag, a hyphen flag and a
    two-letter suffix bucket. Chinese mode uses the single class <unk>.
    """
    if mode == "chinese":
        return UNK
    if word.isupper() and len(word) > 1:
        cap = "ac"
    elif word[:1].isupper():
        cap = "sc" if sentence_initial else "ic"
    else:
        cap = "lc"
    digit = "-d" if any(c.isdigit() for c in word) else ""
    hyphen = "-h" if "-" in word else ""
    suffix = ""
    if len(word) >= 2 and word[-2:].isalpha():
        suffix = "-" + word[-2:].lower()
    return f"<unk-{cap}{digit}{hyphen}{suffix}>"


class Vocab:
    """Index maps for words, characters, POS tags and constituent labels.

    Label ids double as the output classes of the multi-class span head and
    the label decoder: id 0 is the stop symbol </L>, real labels follow.
    The designated start-of-chain symbol only exists as an embedding row
    (id == n_labels) and never as an output class.
    """

    def __init__(
        self,
        words: list[str],
        chars: list[str],
        pos: list[str],
        labels: list[str],
        freq: dict[str, int],
        mode: str = "english",
        root_label: str = "S",
        min_count: int = 1,
    ):
        self.words = list(words)
        self.chars = list(chars)
        self.pos = list(pos)
        self.labels = list(labels)
        self.freq = dict(freq)
        self.mode = mode
        self.root_label = root_label
        self.min_count = min_count
        self._word_to_id = {w: i for i, w in enumerate(self.words)}
        self._char_to_id = {c: i for i, c in enumerate(self.chars)}
        self._pos_to_id = {p: i for i, p in enumerate(self.pos)}
        self._label_to_id = {l: i for i, l in enumerate(self.labels)}
        assert self.labels[0] == STOP_LABEL

    # -- sizes ------------------------------------------------------------
    @property
    def n_words(self) -> int:
        return len(self.words)

    @property
    def n_chars(self) -> int:
        return len(self.chars)

    @property
    def n_pos(self) -> int:
        return len(self.pos)

    @property
    def n_labels(self) -> int:
        """Number of output label classes, </L> included."""
        return len(self.labels)

    @property
    def stop_label_id(self) -> int:
        return 0

    @property
    def start_label_id(self) -> int:
        return len(self.labels)

    # -- lookups ----------------------------------------------------------
    def exact_word_id(self, word: str) -> Optional[int]:
        """Id of the word itself, or None if it has no id of its own."""
        return self._word_to_id.get(word)

    def word_id(self, word: str, sentence_initial: bool = False) -> int:
        wid = self._word_to_id.get(word)
        if wid is not None:
            return wid
        cls = unk_class(word, sentence_initial, self.mode)
        return self._word_to_id.get(cls, self._word_to_id[UNK])

    def char_ids(self, word: str) -> list[int]:
        unk = self._char_to_id[UNK_CHAR]
        if word in (BOS, EOS):
            return [self._char_to_id[word]]
        return [self._char_to_id.get(c, unk) for c in word]

    def pos_id(self, tag: str) -> int:
        pid = self._pos_to_id.get(tag)
        if pid is None:
            raise UnknownPOS(tag)
        return pid

    def label_id(self, label: str) -> int:
        lid = self._label_to_id.get(label)
        if lid is None:
            raise LabelNotInVocab(label)
        return lid

    def has_label(self, label: str) -> bool:
        return label in self._label_to_id

    # -- serialization ----------------------------------------------------
    def to_dict(self) -> dict:
        return {
            "words": self.words,
            "chars": self.chars,
            "pos": self.pos,
            "labels": self.labels,
            "freq": self.freq,
            "mode": self.mode,
            "root_label": self.root_label,
            "min_count": self.min_count,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "Vocab":
        return cls(
            words=d["words"],
            chars=d["chars"],
            pos=d["pos"],
            labels=d["labels"],
            freq=d["freq"],
            mode=d["mode"],
            root_label=d["root_label"],
            min_count=d["min_count"],
        )


def build_vocab(
    corpus: Sequence[CollapsedNode], min_count: int = 1, mode: str = "english"
) -> Vocab:
    """Collect vocabularies and word frequencies from collapsed gold trees.

    Words below min_count keep their frequency entry but get no id of their
    own; lookups resolve them through their unknown class. Intermediate
    ``X*`` labels are registered for every category that will need one
    during binarization.
    """
    if not corpus:
        raise EmptyCorpus("cannot build a vocabulary from an empty corpus")
    freq: dict[str, int] = {}
    word_order: list[str] = []
    char_set: set[str] = set()
    pos_order: list[str] = []
    pos_seen: set[str] = set()
    label_order: list[str] = []
    label_seen: set[str] = set()
    root_counts: dict[str, int] = {}

    def add_label(lab: str) -> None:
        if lab not in label_seen:
            label_seen.add(lab)
            label_order.append(lab)

    def walk(node: CollapsedNode) -> None:
        for lab in node.chain:
            add_label(lab)
        if node.is_leaf:
            assert node.word is not None and node.pos is not None
            if node.word not in freq:
                word_order.append(node.word)
            freq[node.word] = freq.get(node.word, 0) + 1
            char_set.update(node.word)
            if node.pos not in pos_seen:
                pos_seen.add(node.pos)
                pos_order.append(node.pos)
            return
        if len(node.children) > 2:
            add_label(node.chain[0] + "*")
        for ch in node.children:
            walk(ch)

    for tree in corpus:
        walk(tree)
        if tree.chain:
            top = tree.chain[-1]
            root_counts[top] = root_counts.get(top, 0) + 1

    words = [BOS, EOS, UNK]
    if mode == "chinese":
        unk_classes = [unk_class("x", mode="chinese")]
    else:
        seen_cls: set[str] = set()
        unk_classes = []
        for w in word_order:
            for initial in (False, True):
                c = unk_class(w, initial, mode)
                if c not in seen_cls:
                    seen_cls.add(c)
                    unk_classes.append(c)
    words.extend(c for c in unk_classes if c != UNK)
    words.extend(w for w in word_order if freq[w] >= min_count)

    chars = [BOS, EOS, UNK_CHAR] + sorted(char_set)
    pos = [BOS, EOS] + pos_order
    labels = [STOP_LABEL] + label_order
    if root_counts:
        root_label = max(root_counts, key=lambda k: (root_counts[k], -label_order.index(k)))
    else:
        root_label = label_order[0] if label_order else STOP_LABEL
    return Vocab(
        words=words,
        chars=chars,
        pos=pos,
        labels=labels,
        freq=freq,
        mode=mode,
        root_label=root_label,
        min_count=min_count,
    )


def replace_probability(freq: int, gamma: float, mode: str = "english") -> float:
    """Probability that a training token with the given count is replaced."""
    if mode == "chinese":
        if freq == 0:
            return 1.0
        return 0.5 if freq == 1 else 0.0
    return gamma / (gamma + freq)


def stochastic_unk(
    tokens: Sequence[str],
    vocab: Vocab,
    gamma: float,
    rng: np.random.Generator,
    mode: Optional[str] = None,
) -> list[str]:
    """Stochastically replace training tokens by their unknown classes.

    Each token w is replaced independently with probability
    gamma / (gamma + count(w)); unseen words are always replaced. Chinese
    mode instead replaces singletons with probability 0.5.
    """
    if gamma <= 0:
        raise ValueError("gamma must be positive")
    mode = mode or vocab.mode
    out: list[str] = []
    for t, w in enumerate(tokens):
        p = replace_probability(vocab.freq.get(w, 0), gamma, mode)
        if p > 0 and rng.random() < p:
            out.append(unk_class(w, t == 0, mode))
        else:
            out.append(w)
    return out
