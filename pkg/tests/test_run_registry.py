import json

from app.db.database import db_session
from app.schemas.reports import RunManifest
from app.services.run_registry import RunRegistry, record_manifest


def manifest(command, seed=None):
    return RunManifest(command=command, seed=seed, toolkit_version="1.0.0", config={"k": 1})


def test_record_and_list(isolated_ledger):
    first = record_manifest(manifest("synth", seed=3), isolated_ledger / "a")
    second = record_manifest(manifest("train", seed=4), isolated_ledger / "b")
    assert first is not None and second > first

    with db_session() as db:
        runs = RunRegistry.list_runs(db)
        assert [r.command for r in runs] == ["train", "synth"]
        assert runs[1].seed == 3
        assert json.loads(runs[1].manifest_json)["config"] == {"k": 1}
        assert [r.command for r in RunRegistry.list_runs(db, command="synth")] == ["synth"]
        assert len(RunRegistry.list_runs(db, limit=1)) == 1


def test_explicit_database_url(tmp_path):
    url = f"sqlite:///{tmp_path / 'nested' / 'ledger.db'}"
    assert record_manifest(manifest("stats"), database_url=url) == 1
    assert (tmp_path / "nested" / "ledger.db").exists()


def test_unavailable_ledger_is_not_fatal(tmp_path):
    blocker = tmp_path / "file"
    blocker.write_text("", encoding="utf-8")
    url = f"sqlite:///{blocker / 'sub' / 'ledger.db'}"
    assert record_manifest(manifest("stats"), database_url=url) is None
