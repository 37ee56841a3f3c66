"""
Core configuration and settings for the Tenyidie syllabification toolkit
"""

from pathlib import Path

from pydantic_settings import BaseSettings, SettingsConfigDict

from app import __version__


class Settings(BaseSettings):
    """Toolkit settings."""

    model_config = SettingsConfigDict(env_file=".env", env_prefix="TENYIDIE_", extra="ignore")

    # App settings
    app_name: str = "Tenyidie Syllabification Toolkit"
    app_version: str = __version__
    debug: bool = False
    log_level: str = "INFO"

    # Storage settings
    data_dir: Path = Path("data")
    database_url: str = "sqlite:///data/runs.db"

    # Randomness
    seed: int = 42

    # Tagger training defaults
    epochs: int = 40
    batch_size: int = 128
    learning_rate: float = 0.001
    embedding_dim: int = 128
    hidden_dim: int = 256

    # Encoder-decoder defaults
    seq2seq_batch_size: int = 16
    seq2seq_units: int = 512

    # Synthetic corpus defaults
    synth_word_count: int = 10_000
    synth_target_mean_len: float = 8.58
    marker_probability: float = 0.15

    # Reporting
    top_n: int = 50
    attention_trace_k: int = 5


settings = Settings()
