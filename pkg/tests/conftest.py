import pytest

from support import D4_CSV, D4_JSONL, d4_dataset


@pytest.fixture
def d4():
    return d4_dataset()


@pytest.fixture
def d4_jsonl(tmp_path):
    path = tmp_path / "d4.jsonl"
    path.write_text(D4_JSONL, encoding="utf-8")
    return path


@pytest.fixture
def d4_csv(tmp_path):
    path = tmp_path / "d4.csv"
    path.write_text(D4_CSV, encoding="utf-8")
    return path
