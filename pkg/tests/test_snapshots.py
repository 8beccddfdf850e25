"""Snapshot binary format: bit-exact round trips and corruption handling."""

import struct

import numpy as np
import pytest

from hallmhd.grid import GridSpec
from hallmhd.sampling import random_field
from hallmhd.snapshots import (
    SnapshotFormatError,
    inspect_snapshot,
    read_snapshot,
    write_snapshot,
)


@pytest.fixture
def state_fields(g3):
    return [random_field(g3, 1, 5, seed=s) for s in (1, 2, 3)]


class TestRoundTrip:
    def test_bit_exact(self, g3, state_fields, tmp_path):
        path = tmp_path / "s.hmhd"
        write_snapshot(path, 0.375, state_fields)
        t, back = read_snapshot(path)
        assert t == 0.375
        assert len(back) == 3
        for a, b in zip(state_fields, back):
            assert np.array_equal(a.c, b.c)

    def test_write_read_with_expected_grid(self, g3, state_fields, tmp_path):
        path = tmp_path / "s.hmhd"
        write_snapshot(path, 1.0, state_fields[:2])
        t, back = read_snapshot(path, grid=g3)
        assert back[0].grid is g3

    def test_2d_state(self, g2, tmp_path):
        fields = [random_field(g2, 1, 5, seed=7)]
        path = tmp_path / "s2.hmhd"
        write_snapshot(path, 2.5, fields)
        t, back = read_snapshot(path)
        assert t == 2.5 and back[0].grid.dim == 2
        assert np.array_equal(back[0].c, fields[0].c)


class TestRejection:
    def test_cross_resolution_read(self, g3, state_fields, tmp_path):
        path = tmp_path / "s.hmhd"
        write_snapshot(path, 0.0, state_fields)
        other = GridSpec.create(3, 32)
        with pytest.raises(SnapshotFormatError):
            read_snapshot(path, grid=other)

    def test_corrupt_payload_detected(self, g3, state_fields, tmp_path):
        path = tmp_path / "s.hmhd"
        write_snapshot(path, 0.0, state_fields)
        raw = bytearray(path.read_bytes())
        raw[60] ^= 0x41  # fuzz one payload byte
        path.write_bytes(bytes(raw))
        with pytest.raises(SnapshotFormatError, match="CRC"):
            read_snapshot(path)
        assert inspect_snapshot(path)["crc_ok"] is False

    def test_bad_magic(self, g3, state_fields, tmp_path):
        path = tmp_path / "s.hmhd"
        write_snapshot(path, 0.0, state_fields)
        raw = bytearray(path.read_bytes())
        raw[0:4] = b"NOPE"
        path.write_bytes(bytes(raw))
        with pytest.raises(SnapshotFormatError, match="magic"):
            read_snapshot(path)

    def test_truncated(self, g3, state_fields, tmp_path):
        path = tmp_path / "s.hmhd"
        write_snapshot(path, 0.0, state_fields)
        path.write_bytes(path.read_bytes()[:100])
        with pytest.raises(SnapshotFormatError):
            read_snapshot(path)
        short = tmp_path / "tiny.hmhd"
        short.write_bytes(b"HM")
        with pytest.raises(SnapshotFormatError, match="truncated"):
            read_snapshot(short)

    def test_header_layout(self, g3, state_fields, tmp_path):
        path = tmp_path / "s.hmhd"
        write_snapshot(path, 0.25, state_fields)
        raw = path.read_bytes()
        magic, version, dim, n, ncomp, t = struct.unpack_from("<4sIIIId", raw)
        assert magic == b"HMHD" and version == 1
        assert (dim, n, ncomp, t) == (3, g3.n, 9, 0.25)

    def test_inspect_summary(self, g3, state_fields, tmp_path):
        path = tmp_path / "s.hmhd"
        write_snapshot(path, 0.5, state_fields)
        info = inspect_snapshot(path)
        assert info["size_ok"] and info["crc_ok"]
        assert info["components"] == 9 and info["time"] == 0.5
