"""
CV-pattern classification, syllable-type statistics and onset-cluster checks
"""

from collections import Counter
from typing import Dict, Iterable, List, Optional, Tuple

from app.core.alphabet import HYPHEN, TENYIDIE
from app.core.inventory import MARKERS
from app.schemas.schemas import ClusterRule, CvPattern, PositionalStats, SyllabifiedWord

CLUSTER_RULE = ClusterRule()

# Multi-letter onset graphemes written in the orthography ("shü", "pfhe", "tsa", ...).
DIGRAPH_ONSETS = frozenset({
    "ch", "dz", "kh", "lh", "mh", "nh", "ny", "ng", "pf", "pfh", "ph",
    "rh", "sh", "th", "ts", "vh", "yh", "zh",
})


def syllable_template(syllable: str) -> str:
    """C/V template of one syllable; hyphens contribute nothing."""
    return "".join(TENYIDIE.classify(ch) or "" for ch in syllable)


def cv_pattern(word: SyllabifiedWord) -> CvPattern:
    return CvPattern(templates=tuple(syllable_template(s) for s in word.syllables))


def onset(syllable: str) -> str:
    """Consonant run before the first vowel (hyphens skipped)."""
    letters = syllable.replace(HYPHEN, "")
    for i, ch in enumerate(letters):
        if TENYIDIE.is_vowel(ch):
            return letters[:i]
    return letters


def validate_onset_cluster(syllable: str, rule: ClusterRule = CLUSTER_RULE) -> bool:
    """
    True when the onset is a single consonant, a known multi-letter grapheme,
    or a plosive(+h) + r cluster from the rule. QA helper, not a corpus filter.
    """
    run = onset(syllable)
    if len(run) <= 1:
        return True
    return run in rule.clusters or run in DIGRAPH_ONSETS


def is_plosive_trill_cluster(syllable: str, rule: ClusterRule = CLUSTER_RULE) -> bool:
    """Strict check: onset is exactly one of the permitted plosive + trill clusters."""
    return onset(syllable) in rule.clusters


def marker_kind(syllable: str) -> Optional[str]:
    """Grammatical name of a hyphen-initial marker syllable, if known."""
    return MARKERS.get(syllable)


class PhonotacticsService:
    """Aggregations over syllabified corpora."""

    @staticmethod
    def syllable_type_histogram(corpus: Iterable[SyllabifiedWord]) -> Dict[str, int]:
        """Template counts over all syllable occurrences, most frequent first."""
        counts = Counter(syllable_template(s) for word in corpus for s in word.syllables)
        return dict(_ranked(counts))

    @staticmethod
    def positional_histogram(corpus: Iterable[SyllabifiedWord]) -> PositionalStats:
        """
        First syllable -> beginning, last syllable of a multi-syllable word -> end,
        everything between -> middle. Monosyllables count as beginning only.
        """
        beginning: Counter = Counter()
        middle: Counter = Counter()
        end: Counter = Counter()
        for word in corpus:
            templates = cv_pattern(word).templates
            beginning[templates[0]] += 1
            if len(templates) >= 2:
                end[templates[-1]] += 1
                middle.update(templates[1:-1])
        return PositionalStats(
            beginning=dict(_ranked(beginning)),
            middle=dict(_ranked(middle)),
            end=dict(_ranked(end)),
        )

    @staticmethod
    def top_syllables(corpus: Iterable[SyllabifiedWord], n: int) -> List[Tuple[str, int]]:
        """Most frequent syllables; ties broken lexicographically. "-u" and "u" are distinct."""
        if n < 1:
            raise ValueError("n must be at least 1")
        counts = Counter(s for word in corpus for s in word.syllables)
        return _ranked(counts)[:n]

    @staticmethod
    def onset_violations(corpus: Iterable[SyllabifiedWord]) -> List[Tuple[str, int]]:
        """Syllables whose onset fails validate_onset_cluster, with counts."""
        counts = Counter(
            s for word in corpus for s in word.syllables if not validate_onset_cluster(s)
        )
        return _ranked(counts)

    @staticmethod
    def marker_counts(corpus: Iterable[SyllabifiedWord]) -> Dict[str, int]:
        """Occurrences of every hyphen-initial syllable."""
        counts = Counter(s for word in corpus for s in word.syllables if s.startswith(HYPHEN))
        return dict(_ranked(counts))


def _ranked(counts: Counter) -> List[Tuple[str, int]]:
    return sorted(counts.items(), key=lambda kv: (-kv[1], kv[0]))
