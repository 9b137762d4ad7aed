import pytest

from app.utils.errors import Mismatch, UsageError
from app.utils.vectors import (
    VECTOR_TABLES,
    add_digit_strings,
    discrete_h,
    discrete_index,
    emit_test_vectors,
)


def test_oracle_helpers():
    assert [discrete_index(x) for x in (0, 1, -1, 2, -2)] == [0, 1, 2, 3, 4]
    assert discrete_h(-1) * 16 == 1
    assert add_digit_strings("1", "1") == "01"
    assert add_digit_strings("11", "1") == "001"


@pytest.mark.parametrize("module", sorted(VECTOR_TABLES))
def test_every_vector_agrees(module):
    entries = emit_test_vectors(module)
    assert entries
    assert all(e.agree for e in entries)
    assert len({e.name for e in entries}) == len(entries)


def test_unknown_module():
    with pytest.raises(UsageError):
        emit_test_vectors("topology")


def test_diverging_vectors_are_reported(monkeypatch):
    monkeypatch.setitem(VECTOR_TABLES, "broken", lambda: [("one", lambda: 1, lambda: 1), ("two", lambda: 2, lambda: 3)])
    with pytest.raises(Mismatch) as e:
        emit_test_vectors("broken")
    assert e.value.details["entries"] == ["two"]
