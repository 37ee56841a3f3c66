"""
Parser for the syllabified corpus format (one word per line, syllables space-separated)
"""

import logging
import unicodedata
from pathlib import Path
from typing import Iterable, List, Union

from app.core.alphabet import HYPHEN, TENYIDIE
from app.core.errors import CorpusValidationError
from app.schemas.schemas import SyllabifiedWord, SyllableInventory

logger = logging.getLogger(__name__)


def normalize_text(text: str) -> str:
    """Strip BOM, compose "ü" and lowercase."""
    text = text.replace("\ufeff", "")
    text = unicodedata.normalize("NFC", text)
    return text.lower()


def parse_line(line: str, line_no: int) -> SyllabifiedWord:
    """Parse one normalized, non-empty corpus line."""
    for ch in line:
        if ch != " " and not TENYIDIE.is_valid(ch):
            raise CorpusValidationError(f"invalid character {ch!r}", line=line_no, character=ch)

    syllables = line.split(" ")
    for syllable in syllables:
        if not syllable:
            raise CorpusValidationError("empty syllable (leading, trailing or double space)", line=line_no)
        if syllable.endswith(HYPHEN):
            raise CorpusValidationError(f"syllable {syllable!r} ends in a hyphen", line=line_no, character=HYPHEN)
    return SyllabifiedWord(syllables=tuple(syllables))


def parse_corpus(text: str) -> List[SyllabifiedWord]:
    """
    Parse a corpus document into syllabified words.

    Args:
        text: Whole document, one word per line

    Returns:
        List of words in input order
    """
    words = []
    for line_no, raw in enumerate(normalize_text(text).split("\n"), start=1):
        line = raw.rstrip("\r")
        if not line.strip():
            continue
        words.append(parse_line(line, line_no))
    logger.debug("Parsed %d words", len(words))
    return words


def format_corpus(words: Iterable[SyllabifiedWord]) -> str:
    """Render words back into the corpus format."""
    return "".join(word.to_line() + "\n" for word in words)


def read_corpus(path: Union[str, Path]) -> List[SyllabifiedWord]:
    """Read and parse a UTF-8 corpus file."""
    text = Path(path).read_text(encoding="utf-8")
    words = parse_corpus(text)
    logger.info("Loaded %d words from %s", len(words), path)
    return words


def write_corpus(words: Iterable[SyllabifiedWord], path: Union[str, Path]) -> Path:
    """Write words to a UTF-8 corpus file."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(format_corpus(words), encoding="utf-8")
    return path


def read_word_list(text: str) -> List[str]:
    """Normalize plain (unsyllabified) words, one per line; blank lines dropped."""
    return [line.strip() for line in normalize_text(text).split("\n") if line.strip()]


def format_inventory(inventory: SyllableInventory) -> str:
    """One syllable per line, sorted."""
    return "".join(s + "\n" for s in sorted(inventory.syllables))


def parse_inventory(text: str) -> SyllableInventory:
    entries = frozenset(read_word_list(text))
    if not entries:
        raise CorpusValidationError("syllable inventory is empty")
    try:
        return SyllableInventory(syllables=entries)
    except ValueError as e:
        raise CorpusValidationError(f"bad inventory entry: {e}") from e
