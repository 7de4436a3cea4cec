"""Three-way NLI labels with a fixed canonical order."""

from __future__ import annotations

import enum


class Label(enum.IntEnum):
    """Entailment / contradiction / neutral, in the canonical (E, C, N) order.

    The integer values index probability triples and weight rows everywhere
    in this package, and the order doubles as the deterministic tie-break.
    """

    ENTAILMENT = 0
    CONTRADICTION = 1
    NEUTRAL = 2

    def to_string(self) -> str:
        return _NAMES[self]

    @classmethod
    def from_string(cls, s: str) -> "Label":
        try:
            return _BY_NAME[s]
        except KeyError:
            raise ValueError(f"unknown label string: {s!r}") from None


_NAMES = {
    Label.ENTAILMENT: "entailment",
    Label.CONTRADICTION: "contradiction",
    Label.NEUTRAL: "neutral",
}
_BY_NAME = {v: k for k, v in _NAMES.items()}

#: All labels in canonical order.
LABELS = (Label.ENTAILMENT, Label.CONTRADICTION, Label.NEUTRAL)

#: Strings used in JSONL/TSV files, aligned with LABELS.
LABEL_NAMES = ("entailment", "contradiction", "neutral")


def parse_gold_label(s: str) -> Label | None:
    """Map a gold_label field to a Label, or None for the no-consensus "-"."""
    if s == "-":
        return None
    return Label.from_string(s)


def parse_annotator_label(s: str) -> Label | None:
    """Map one annotator vote; empty or "-" votes are undetermined (None)."""
    if s in ("", "-"):
        return None
    return Label.from_string(s)


def as_label(value) -> Label:
    """Coerce a Label, its integer code, or its string name to a Label."""
    if isinstance(value, Label):
        return value
    if isinstance(value, str):
        return Label.from_string(value)
    return Label(int(value))
