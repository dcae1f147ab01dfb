"""Reference-free gender detection on English translations.

A translation is labelled by the gendered pronouns it contains: Male if only
male pronouns occur, Female if only female ones, Neutral if none, Ambiguous if
both. Matching is case-insensitive over word-boundary tokens, so punctuation
("him,") is harmless and substrings ("here", "shed") never match.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from pathlib import Path
from typing import Mapping, Sequence

from .backends import TranslationRecord, TranslationStatus
from .corpus import GenderLabel, SourceSentence

_WORD = re.compile(r"\w+")

DEFAULT_MALE_PRONOUNS = frozenset({"he", "him", "his"})
# "hers" is an artifact addition for symmetry with "his"; strict mode drops it.
DEFAULT_FEMALE_PRONOUNS = frozenset({"she", "her", "hers"})
STRICT_FEMALE_PRONOUNS = frozenset({"she", "her"})


class ClassifyError(ValueError):
    """Raised when a batch references an unknown source id or a bad lexicon."""


@dataclass(frozen=True)
class PronounLexicon:
    """Gendered token sets used for detection; overridable per target language."""

    male_tokens: frozenset[str]
    female_tokens: frozenset[str]

    def __post_init__(self) -> None:
        overlap = self.male_tokens & self.female_tokens
        if overlap:
            raise ClassifyError("pronoun sets overlap: " + ", ".join(sorted(overlap)))

    @classmethod
    def default(cls) -> "PronounLexicon":
        return cls(DEFAULT_MALE_PRONOUNS, DEFAULT_FEMALE_PRONOUNS)

    @classmethod
    def strict(cls) -> "PronounLexicon":
        """Exactly the published detection sets: he/him/his vs she/her."""
        return cls(DEFAULT_MALE_PRONOUNS, STRICT_FEMALE_PRONOUNS)

    @classmethod
    def from_file(cls, path: str | Path) -> "PronounLexicon":
        raw = json.loads(Path(path).read_text(encoding="utf-8"))
        try:
            return cls(
                male_tokens=frozenset(t.lower() for t in raw["male_tokens"]),
                female_tokens=frozenset(t.lower() for t in raw["female_tokens"]),
            )
        except KeyError as exc:
            raise ClassifyError(f"{path}: missing token list {exc.args[0]!r}") from None


@dataclass(frozen=True)
class ClassifiedRecord:
    source: SourceSentence
    target_text: str
    predicted: GenderLabel
    matched_tokens: tuple[str, ...]


def classify_gender(
    target_text: str, lexicon: PronounLexicon | None = None
) -> tuple[GenderLabel, tuple[str, ...]]:
    """Label a translation by pronoun presence; returns matches in text order."""
    lexicon = lexicon or PronounLexicon.default()
    matched: list[str] = []
    saw_male = saw_female = False
    for match in _WORD.finditer(target_text.lower()):
        token = match.group(0)
        if token in lexicon.male_tokens:
            saw_male = True
            matched.append(token)
        elif token in lexicon.female_tokens:
            saw_female = True
            matched.append(token)
    if saw_male and saw_female:
        label = GenderLabel.AMBIGUOUS
    elif saw_male:
        label = GenderLabel.MALE
    elif saw_female:
        label = GenderLabel.FEMALE
    else:
        label = GenderLabel.NEUTRAL
    return label, tuple(matched)


def classify_batch(
    translations: Sequence[TranslationRecord],
    sources: Mapping[str, SourceSentence],
    lexicon: PronounLexicon | None = None,
) -> tuple[list[ClassifiedRecord], list[TranslationRecord]]:
    """Classify every Ok translation; Failed ones are returned as exclusions.

    Raises ClassifyError if an Ok translation's source_id does not resolve.
    """
    lexicon = lexicon or PronounLexicon.default()
    classified: list[ClassifiedRecord] = []
    excluded: list[TranslationRecord] = []
    for translation in translations:
        if translation.status is not TranslationStatus.OK:
            excluded.append(translation)
            continue
        source = sources.get(translation.source_id)
        if source is None:
            raise ClassifyError(f"translation references unknown source id {translation.source_id!r}")
        label, tokens = classify_gender(translation.target_text, lexicon)
        classified.append(
            ClassifiedRecord(
                source=source,
                target_text=translation.target_text,
                predicted=label,
                matched_tokens=tokens,
            )
        )
    return classified, excluded
