"""
Character vocabulary: 0 = padding, 1 = hyphen, 2.. = letters
"""

from typing import List, Sequence

from app.core.alphabet import HYPHEN, TENYIDIE
from app.core.errors import VocabularyMismatchError

PAD_SYMBOL = "<pad>"


class Vocabulary:
    """Bijective map between characters and ids."""

    PAD_ID = 0
    HYPHEN_ID = 1

    def __init__(self, symbols: Sequence[str]):
        symbols = list(symbols)
        if len(symbols) < 2 or symbols[0] != PAD_SYMBOL or symbols[1] != HYPHEN:
            raise VocabularyMismatchError("vocabulary must start with padding and hyphen")
        if len(set(symbols)) != len(symbols):
            raise VocabularyMismatchError("vocabulary symbols must be unique")
        self.symbols = symbols
        self.index = {ch: i for i, ch in enumerate(symbols)}

    @classmethod
    def default(cls) -> "Vocabulary":
        """27 entries: padding, hyphen and the 25 Tenyidie letters."""
        return cls([PAD_SYMBOL, HYPHEN, *TENYIDIE.letters])

    def __len__(self) -> int:
        return len(self.symbols)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Vocabulary) and self.symbols == other.symbols

    def encode(self, surface: str, keep_hyphens: bool = False) -> List[int]:
        ids = []
        for ch in surface:
            if ch == HYPHEN and not keep_hyphens:
                continue
            try:
                ids.append(self.index[ch])
            except KeyError:
                raise VocabularyMismatchError(f"character {ch!r} in {surface!r} is not in the vocabulary") from None
        return ids

    def decode(self, ids: Sequence[int]) -> str:
        return "".join(self.symbols[i] for i in ids if i != self.PAD_ID)

    def to_list(self) -> List[str]:
        return list(self.symbols)
