import json

import numpy as np
import pytest

from specdep.bands import EpochTensor, segment_epochs
from specdep.io import (
    read_recording_binary,
    read_recording_csv,
    sidecar_path,
    write_recording_binary,
    write_recording_csv,
)


class TestCsvFormat:
    def test_round_trip_bit_exact(self, tmp_path):
        rng = np.random.default_rng(0)
        streams = rng.standard_normal((3, 400))
        path = tmp_path / "rec.csv"
        write_recording_csv(path, streams, ["a", "b", "c"])
        back, names = read_recording_csv(path)
        assert names == ["a", "b", "c"]
        np.testing.assert_array_equal(back, streams)

    def test_default_channel_names(self, tmp_path):
        path = tmp_path / "rec.csv"
        write_recording_csv(path, np.zeros((2, 10)))
        _, names = read_recording_csv(path)
        assert names == ["ch0", "ch1"]

    def test_header_column_mismatch(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("a,b,c\n1.0,2.0\n")
        with pytest.raises(ValueError, match="columns"):
            read_recording_csv(path)

    def test_name_count_validation(self, tmp_path):
        with pytest.raises(ValueError):
            write_recording_csv(tmp_path / "x.csv", np.zeros((2, 5)), ["only-one"])


class TestBinaryFormat:
    def test_round_trip(self, tmp_path):
        rng = np.random.default_rng(1)
        tensor = segment_epochs(rng.standard_normal((2, 800)), 200, 500.0)
        path = tmp_path / "rec.bin"
        write_recording_binary(path, tensor)
        meta = json.loads(sidecar_path(path).read_text())
        assert meta == {"d": 2, "R": 4, "T": 200, "sampling_rate_hz": 500.0, "layout": "channel-major"}
        back = read_recording_binary(path)
        np.testing.assert_array_equal(back.samples, tensor.samples)
        assert back.sampling_rate_hz == 500.0

    def test_missing_sidecar(self, tmp_path):
        path = tmp_path / "rec.bin"
        path.write_bytes(b"\x00" * 80)
        with pytest.raises(FileNotFoundError, match="sidecar"):
            read_recording_binary(path)

    def test_size_mismatch(self, tmp_path):
        tensor = EpochTensor(np.zeros((1, 2, 10)), 100.0)
        path = tmp_path / "rec.bin"
        write_recording_binary(path, tensor)
        path.write_bytes(path.read_bytes()[:-8])
        with pytest.raises(ValueError, match="float64"):
            read_recording_binary(path)

    def test_unknown_layout(self, tmp_path):
        tensor = EpochTensor(np.zeros((1, 2, 10)), 100.0)
        path = tmp_path / "rec.bin"
        write_recording_binary(path, tensor)
        meta = json.loads(sidecar_path(path).read_text())
        meta["layout"] = "time-major"
        sidecar_path(path).write_text(json.dumps(meta))
        with pytest.raises(ValueError, match="layout"):
            read_recording_binary(path)
