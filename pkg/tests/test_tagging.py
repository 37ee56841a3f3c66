import pytest

from app.core.errors import TaggingError
from app.schemas.schemas import SyllabifiedWord, TagSequence
from app.services.corpus_service import CorpusService, default_synthesis_config
from app.services.tagging import decode_tags, encode_tags, fit_tags, taggable_letters


def word(line):
    return SyllabifiedWord(syllables=tuple(line.split(" ")))


@pytest.mark.parametrize(
    "line, tags",
    [
        ("te nyi die", "SCSCCSCC"),
        ("chü ü mo -u", "SCCSSCS"),
        ("tsei ü", "SCCCS"),
        ("she so u", "SCCSCS"),
        ("ba", "SC"),
        ("a", "S"),
    ],
)
def test_encode_published_examples(line, tags):
    assert encode_tags(word(line)).tags == tags


def test_hyphen_is_not_tagged():
    w = word("chü ü mo -u")
    assert len(w.surface) == 8
    assert encode_tags(w).aligned_length == 7


def test_hyphen_only_syllable_rejected():
    w = SyllabifiedWord.model_construct(syllables=("ke", "-"))
    with pytest.raises(TaggingError):
        encode_tags(w)


@pytest.mark.parametrize(
    "surface, tags, syllables",
    [
        ("tenyidie", "SCSCCSCC", ("te", "nyi", "die")),
        ("chüümo-u", "SCCSSCS", ("chü", "ü", "mo", "-u")),
        ("a", "S", ("a",)),
        ("-u", "S", ("-u",)),
    ],
)
def test_decode(surface, tags, syllables):
    assert decode_tags(surface, TagSequence(tags=tags)).syllables == syllables


def test_decode_length_mismatch():
    with pytest.raises(TaggingError):
        decode_tags("tenyidie", TagSequence(tags="SCSC"))


def test_decode_trailing_hyphen():
    with pytest.raises(TaggingError):
        decode_tags("ke-", TagSequence(tags="SC"))


def test_tag_sequence_must_start_with_s():
    with pytest.raises(ValueError):
        TagSequence(tags="CS")
    with pytest.raises(ValueError):
        TagSequence(tags="SX")


def test_round_trip_over_synthetic_words():
    words = CorpusService.synthesize_corpus(default_synthesis_config(word_count=10_000, seed=5))
    assert any("-" in w.surface for w in words)
    for w in words:
        assert decode_tags(w.surface, encode_tags(w)) == w


def test_s_count_equals_syllable_count(toy_words):
    for w in toy_words:
        assert encode_tags(w).tags.count("S") == len(w.syllables)


@pytest.mark.parametrize(
    "raw, length, expected",
    [
        ("SCS", 3, "SCS"),
        ("SCSCC", 3, "SCS"),
        ("S", 3, "SCC"),
        ("", 2, "SC"),
        ("CCS", 3, "SCS"),
        ("S<eos>C", 2, "SC"),
    ],
)
def test_fit_tags(raw, length, expected):
    assert fit_tags(raw, length).tags == expected


def test_taggable_letters():
    assert taggable_letters("kilonser-ko") == "kilonserko"
