"""
Tenyidie alphabet: 6 vowels, 19 consonants and the hyphen marker
"""

from typing import Optional, Tuple

from pydantic import BaseModel, ConfigDict, model_validator

HYPHEN = "-"
VOWEL = "V"
CONSONANT = "C"


class Alphabet(BaseModel):
    """Ordered letter inventory of the orthography."""

    model_config = ConfigDict(frozen=True)

    vowels: Tuple[str, ...]
    consonants: Tuple[str, ...]
    hyphen: str = HYPHEN

    @model_validator(mode="after")
    def check_disjoint(self) -> "Alphabet":
        if set(self.vowels) & set(self.consonants):
            raise ValueError("vowels and consonants must be disjoint")
        if self.hyphen in self.vowels or self.hyphen in self.consonants:
            raise ValueError("hyphen cannot be a letter")
        return self

    @property
    def letters(self) -> Tuple[str, ...]:
        """All letters in alphabetical order, ü last."""
        return tuple(sorted(self.vowels + self.consonants, key=lambda ch: (ch == "ü", ch)))

    def is_vowel(self, ch: str) -> bool:
        return ch in self.vowels

    def is_consonant(self, ch: str) -> bool:
        return ch in self.consonants

    def is_letter(self, ch: str) -> bool:
        return ch in self.vowels or ch in self.consonants

    def is_valid(self, ch: str) -> bool:
        return self.is_letter(ch) or ch == self.hyphen

    def classify(self, ch: str) -> Optional[str]:
        """V for vowels, C for consonants, None for the hyphen."""
        if self.is_vowel(ch):
            return VOWEL
        if self.is_consonant(ch):
            return CONSONANT
        return None


TENYIDIE = Alphabet(
    vowels=("a", "e", "i", "o", "u", "ü"),
    consonants=("b", "c", "d", "f", "g", "h", "j", "k", "l", "m",
                "n", "p", "r", "s", "t", "v", "w", "y", "z"),
)
