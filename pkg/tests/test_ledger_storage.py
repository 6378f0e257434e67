"""
Tests for JSON Lines persistence of ledger chains.
"""

import json

import pytest

from triple_entry_audit.ledger import (
    LedgerChain,
    LedgerFileInvalid,
    build_chain,
    load_chain,
    read_records,
    save_chain,
    verify_chain,
)


class TestLedgerStorage:
    """Test suite for save_chain / load_chain."""

    @pytest.fixture
    def chain(self, make_record):
        return build_chain(
            [make_record(f"T{i}", 100 + i, item_description="café") for i in range(4)],
            owner="A",
        )

    def test_save_and_load(self, chain, temp_dir):
        """Test that a saved chain loads back equal and verified."""
        path = save_chain(chain, temp_dir / "nested" / "ledger.jsonl")
        loaded = load_chain(path, owner="A")
        assert loaded == chain
        assert verify_chain(loaded).ok

    def test_file_format(self, chain, temp_dir):
        """Test one canonical UTF-8 object per LF-terminated line."""
        path = save_chain(chain, temp_dir / "ledger.jsonl")
        raw = path.read_bytes()
        assert raw.endswith(b"\n")
        assert b"\r" not in raw
        assert "café".encode("utf-8") in raw
        lines = raw.decode("utf-8").split("\n")[:-1]
        assert len(lines) == 4
        first = json.loads(lines[0])
        assert first["third"]["record_hash"] == chain[0].record_hash
        assert lines[0] == json.dumps(first, sort_keys=True, separators=(",", ":"), ensure_ascii=False)

    def test_empty_chain_file(self, temp_dir):
        """Test that an empty ledger is an empty file."""
        path = save_chain(LedgerChain(owner="A"), temp_dir / "empty.jsonl")
        assert path.read_bytes() == b""
        assert len(load_chain(path)) == 0

    def test_tampered_file_rejected_on_load(self, chain, temp_dir):
        """Test that replay reports the line of an edited record."""
        path = save_chain(chain, temp_dir / "ledger.jsonl")
        lines = path.read_text(encoding="utf-8").split("\n")
        lines[2] = lines[2].replace('"minor_units":102', '"minor_units":103')
        path.write_text("\n".join(lines), encoding="utf-8")

        with pytest.raises(LedgerFileInvalid) as exc_info:
            load_chain(path)
        assert exc_info.value.line == 3

    def test_unverified_load_allows_inspection(self, chain, temp_dir):
        """Test that verify=False loads a tampered file for verify_chain."""
        path = save_chain(chain, temp_dir / "ledger.jsonl")
        text = path.read_text(encoding="utf-8").replace('"location":null', '"location":"LA"', 1)
        path.write_text(text, encoding="utf-8")

        loaded = load_chain(path, verify=False)
        result = verify_chain(loaded)
        assert not result.ok
        assert result.failing_index == 0

    def test_malformed_line(self, temp_dir):
        """Test that a line that is not JSON is reported with its number."""
        path = temp_dir / "bad.jsonl"
        path.write_text('{"debits": []}\nnot json\n', encoding="utf-8")
        with pytest.raises(LedgerFileInvalid) as exc_info:
            read_records(path)
        assert exc_info.value.line == 1

    def test_non_canonical_line_rejected(self, chain, temp_dir):
        """Test that an edit normalized away on parse is still caught."""
        path = save_chain(chain, temp_dir / "ledger.jsonl")
        lines = path.read_text(encoding="utf-8").split("\n")
        lines[1] = lines[1].replace("2024-03-01T12:00:00Z", "2024-03-01A12:00:00Z")
        path.write_text("\n".join(lines), encoding="utf-8")

        with pytest.raises(LedgerFileInvalid) as exc_info:
            load_chain(path, verify=False)
        assert exc_info.value.line == 2
