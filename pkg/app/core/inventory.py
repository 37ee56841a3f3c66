"""
Published syllable inventory (top 50 syllables of the annotated corpus)
"""

from typing import List, Tuple

TOP_SYLLABLES: List[Tuple[str, int]] = [
    ("ke", 5625), ("lie", 1639), ("ta", 1372), ("shü", 1269), ("pe", 1039),
    ("tuo", 994), ("cü", 908), ("u", 862), ("ko", 835), ("ya", 784),
    ("me", 737), ("wa", 737), ("mia", 556), ("rü", 512), ("chü", 491),
    ("zhü", 467), ("the", 459), ("mha", 416), ("te", 395), ("zha", 342),
    ("se", 287), ("tho", 280), ("ki", 243), ("pfü", 230), ("pie", 220),
    ("si", 197), ("vi", 192), ("le", 185), ("la", 185), ("thor", 185),
    ("tha", 179), ("zhie", 178), ("va", 174), ("ba", 172), ("sie", 168),
    ("nuo", 167), ("suo", 167), ("puo", 166), ("mo", 165), ("-u", 163),
    ("sa", 161), ("cha", 159), ("tsa", 157), ("kha", 149), ("pu", 142),
    ("die", 139), ("ze", 139), ("di", 129), ("kra", 129), ("jü", 127),
]

# Bound morphemes written with a leading hyphen.
MARKERS = {
    "-u": "definite",
    "-e": "exclusive",
    "-ko": "plural",
    "-mia": "nominal base",
}


def syllable_table() -> List[Tuple[str, int]]:
    """Published syllables without hyphen-initial markers."""
    return [(syl, freq) for syl, freq in TOP_SYLLABLES if not syl.startswith("-")]


def marker_table() -> List[Tuple[str, int]]:
    """Published hyphen-initial markers with their frequencies."""
    return [(syl, freq) for syl, freq in TOP_SYLLABLES if syl.startswith("-")]
