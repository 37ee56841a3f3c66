"""
S/C tag codec: syllable boundaries <-> per-letter tags
"""

from typing import List

from app.core.alphabet import HYPHEN
from app.core.errors import TaggingError
from app.schemas.schemas import SyllabifiedWord, TagSequence

START = "S"
CONTINUE = "C"


def taggable_letters(surface: str) -> str:
    """Surface with hyphens removed."""
    return surface.replace(HYPHEN, "")


def encode_tags(word: SyllabifiedWord) -> TagSequence:
    """S on the first non-hyphen letter of each syllable, C on the rest."""
    tags: List[str] = []
    for syllable in word.syllables:
        letters = taggable_letters(syllable)
        if not letters:
            raise TaggingError(f"syllable {syllable!r} has no letters to tag")
        tags.append(START + CONTINUE * (len(letters) - 1))
    return TagSequence(tags="".join(tags))


def decode_tags(surface: str, tags: TagSequence) -> SyllabifiedWord:
    """Open a syllable at every S; hyphens attach to the next letter's syllable."""
    tag_str = str(tags)
    letter_count = len(taggable_letters(surface))
    if len(tag_str) != letter_count:
        raise TaggingError(f"{len(tag_str)} tags for {letter_count} letters in {surface!r}")
    if tag_str and tag_str[0] != START:
        raise TaggingError("first tag must be S")

    syllables: List[str] = []
    pending = ""
    tag_iter = iter(tag_str)
    for ch in surface:
        if ch == HYPHEN:
            pending += ch
            continue
        tag = next(tag_iter)
        if tag == START or not syllables:
            syllables.append(pending + ch)
        else:
            syllables[-1] += pending + ch
        pending = ""
    if pending:
        raise TaggingError(f"{surface!r} ends in a hyphen")
    return SyllabifiedWord(syllables=tuple(syllables))


def fit_tags(raw: str, length: int) -> TagSequence:
    """
    Coerce a free-form emitted tag string to a valid sequence of `length` tags.

    Truncates, pads with C, drops anything outside {S, C} and forces S first.
    """
    cleaned = "".join(t for t in raw if t in (START, CONTINUE))[:length]
    cleaned = cleaned.ljust(length, CONTINUE)
    if cleaned:
        cleaned = START + cleaned[1:]
    return TagSequence(tags=cleaned)
