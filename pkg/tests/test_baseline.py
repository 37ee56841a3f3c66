import pytest

from app.core.inventory import marker_table, syllable_table
from app.schemas.schemas import SyllabifiedWord, SyllableInventory
from app.services.baseline import (
    build_inventory,
    count_segmentations,
    enumerate_segmentations,
    is_ambiguous,
    segment,
)
from app.services.corpus_service import CorpusService, default_synthesis_config


def inventory(*syllables):
    return SyllableInventory(syllables=frozenset(syllables))


def test_build_inventory():
    inv = build_inventory([SyllabifiedWord(syllables=("te", "nyi", "die"))])
    assert inv.syllables == frozenset({"te", "nyi", "die"})
    with pytest.raises(ValueError):
        build_inventory([])


def test_synthetic_inventory_is_subset_of_generator_tables():
    words = CorpusService.synthesize_corpus(default_synthesis_config(word_count=2_000, seed=8))
    allowed = {s for s, _ in syllable_table()} | {m for m, _ in marker_table()}
    assert build_inventory(words).syllables <= allowed


def test_backtracks_off_longest_match():
    parsed = segment("tenyidie", inventory("te", "nyi", "die", "ten"))
    assert parsed.syllables == ("te", "nyi", "die")


def test_prefers_longest_when_it_completes():
    assert segment("kra", inventory("k", "ra", "kra")).syllables == ("kra",)


def test_trivial_and_failure():
    assert segment("ba", inventory("ba")).syllables == ("ba",)
    assert segment("xyz", inventory("ke", "u", "ba")) is None


def test_marker_segment():
    assert segment("chüümo-u", inventory("chü", "ü", "mo", "-u")).syllables == ("chü", "ü", "mo", "-u")


def test_empty_surface():
    with pytest.raises(ValueError):
        segment("", inventory("a"))


def test_segmentation_concatenates_to_surface():
    inv = inventory("ke", "ken", "nyü", "yü", "u")
    for surface in ("kenyü", "keu", "kenyüke"):
        parsed = segment(surface, inv)
        assert parsed is not None
        assert parsed.surface == surface
        assert set(parsed.syllables) <= inv.syllables


def test_enumeration_and_ambiguity():
    inv = inventory("ke", "ken", "nyü", "yü")
    found = enumerate_segmentations("kenyü", inv)
    assert set(found) == {("ke", "nyü"), ("ken", "yü")}
    # longest-first: "ken" is tried before "ke"
    assert found[0] == ("ken", "yü")
    assert is_ambiguous("kenyü", inv)
    assert not is_ambiguous("ke", inv)
    assert enumerate_segmentations("kenyü", inv, limit=1) == [("ken", "yü")]


def test_segment_agrees_with_first_enumerated():
    inv = inventory("te", "nyi", "die", "ten", "yi", "di", "e")
    assert segment("tenyidie", inv).syllables == enumerate_segmentations("tenyidie", inv)[0]


def test_long_surfaces_do_not_exhaust_the_stack():
    inv = inventory("a", "ke")
    parsed = segment("a" * 1500, inv)
    assert parsed.syllables == ("a",) * 1500
    assert segment("a" * 1500 + "x", inv) is None
    assert not is_ambiguous("a" * 1500, inv)
    assert enumerate_segmentations("ke" * 1200, inv) == [("ke",) * 1200]


def test_long_surface_keeps_longest_first_choice():
    inv = inventory("ke", "ken", "nyü", "yü")
    parsed = segment("kenyü" * 400, inv)
    assert parsed.syllables == ("ken", "yü") * 400
    assert is_ambiguous("kenyü" * 400, inv)


def test_count_segmentations():
    inv = inventory("ke", "ken", "nyü", "yü")
    assert count_segmentations("kenyü", inv) == 2
    assert count_segmentations("kenyükenyü", inv) == 4
    assert count_segmentations("kenyü" * 10, inv, cap=2) == 2
    assert count_segmentations("xyz", inv) == 0
    assert count_segmentations("", inv) == 0
