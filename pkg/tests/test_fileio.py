import struct

import numpy as np
import pytest

from spikeid.exceptions import DataQualityError
from spikeid.fileio import dump_json, emit, format_report, format_value, ingest, read_csv, write_table


def test_csv_round_trip_is_exact(tmp_path):
    rng = np.random.default_rng(0)
    y = rng.standard_normal((3, 7)) * 1e-14
    p = emit(tmp_path / "y.csv", y)
    assert np.array_equal(ingest(p).values, y)


def test_raw_round_trip_and_header(tmp_path):
    y = np.arange(12.0).reshape(3, 4)
    p = emit(tmp_path / "y.f64", y, "raw-f64")
    blob = p.read_bytes()
    assert struct.unpack_from("<4sII", blob) == (b"SPKC", 3, 4)
    assert np.array_equal(ingest(p, "raw-f64").values, y)


def test_raw_truncation_names_expected_count(tmp_path):
    p = emit(tmp_path / "y.f64", np.ones((2, 5)), "raw-f64")
    p.write_bytes(p.read_bytes()[:-16])
    with pytest.raises(DataQualityError, match="expected 10 values"):
        ingest(p, "raw-f64")


def test_csv_header_and_errors(tmp_path):
    p = tmp_path / "h.csv"
    p.write_text("a,b,c\n1,2,3\n4,5,6\n")
    assert read_csv(p).values.shape == (2, 3)
    p.write_text("1,2,3\n4,x,6\n")
    with pytest.raises(DataQualityError, match="row 2, column 2"):
        read_csv(p)
    p.write_text("1,2,3\n4,5\n")
    with pytest.raises(DataQualityError, match="row 2 has 2 columns"):
        read_csv(p)
    with pytest.raises(DataQualityError, match="not found"):
        ingest(tmp_path / "missing.csv")


def test_formatting_is_stable(tmp_path):
    assert format_value(0.1) == "0.1"
    assert format_report({"L": 3, "x": 0.5}) == "L = 3\nx = 0.5\n"
    assert dump_json({"b": np.float64(1.5), "a": np.int64(2)}) == '{\n  "a": 2,\n  "b": 1.5\n}\n'
    p = write_table(tmp_path / "t.csv", ["k", "v"], [(1, 0.25), (2, float("inf"))])
    assert p.read_text().splitlines()[0] == "k,v"
