"""
Shared fixtures
"""

import numpy as np
import pytest

from app.parsers.corpus_parser import parse_corpus
from app.schemas.schemas import SynthesisConfig
from app.services.corpus_service import CorpusService


def pytest_addoption(parser):
    parser.addoption("--run-slow", action="store_true", default=False, help="run tests marked slow")


def pytest_collection_modifyitems(config, items):
    if config.getoption("--run-slow"):
        return
    skip_slow = pytest.mark.skip(reason="needs --run-slow")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip_slow)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture
def small_corpus():
    return parse_corpus("te nyi die\nshe so u\nchü ü mo -u\ntse i ü\nke\nkhrie\n")


@pytest.fixture
def toy_words():
    """Fifty short synthetic words over a handful of syllables."""
    cfg = SynthesisConfig(
        syllable_table=[("ke", 20), ("u", 12), ("mia", 8), ("khrie", 5), ("tho", 6), ("a", 9)],
        marker_table=[("-u", 3)],
        target_mean_len=6.0,
        word_count=50,
        seed=7,
        marker_probability=0.2,
        max_word_len=12,
    )
    return CorpusService.synthesize_corpus(cfg)


@pytest.fixture
def isolated_ledger(tmp_path, monkeypatch):
    """Point the run ledger and data dir at a temporary location."""
    from app.core.config import settings
    from app.db.database import get_engine

    monkeypatch.setattr(settings, "database_url", f"sqlite:///{tmp_path / 'runs.db'}")
    monkeypatch.setattr(settings, "data_dir", tmp_path / "data")
    get_engine.cache_clear()
    yield tmp_path
    get_engine.cache_clear()
