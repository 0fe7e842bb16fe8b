import math

import numpy as np
import pytest

from impulsivenoise.error import InvalidArgument, IngestionError
from impulsivenoise.trace import Trace


def test_csv_preserves_every_bit(tmp_path, rng):
    samples = rng.standard_normal(1000) * 1e-3
    samples[0] = math.pi
    samples[1] = -1e300
    filename = str(tmp_path / "trace.csv")
    Trace(samples).to_csv(filename)
    loaded = Trace.from_csv(filename, sample_rate=8000.0, seed=3)
    assert np.array_equal(loaded.samples, samples)
    assert loaded.sample_rate == 8000.0
    assert loaded.seed == 3


def test_csv_layout(tmp_path):
    filename = str(tmp_path / "trace.csv")
    Trace([0.5, -2.0]).to_csv(filename)
    with open(filename) as fp:
        assert fp.read() == "index,value\n0,0.5\n1,-2\n"


@pytest.mark.parametrize(
    "content, row",
    [
        ("i,v\n0,1.0\n", 1),
        ("index,value\n0,1.0\n1,nan\n", 3),
        ("index,value\n0,1.0\n1,inf\n", 3),
        ("index,value\n0,1.0\n\n2,3.0\n", 3),
        ("index,value\n0,1.0\n1,2.0,3.0\n", 3),
        ("index,value\n0,abc\n", 2),
        ("", 1),
    ],
)
def test_malformed_rows_are_located(write_file, content, row):
    filename = write_file("bad.csv", content)
    with pytest.raises(IngestionError) as e:
        Trace.from_csv(filename)
    assert e.value.row == row
    assert f"row {row}" in str(e.value)


def test_header_only(write_file):
    with pytest.raises(IngestionError):
        Trace.from_csv(write_file("empty.csv", "index,value\n"))


def test_missing_file(tmp_path):
    with pytest.raises(OSError):
        Trace.from_csv(str(tmp_path / "missing.csv"))


def test_invalid_trace():
    with pytest.raises(InvalidArgument):
        Trace([1.0, math.nan])
    with pytest.raises(InvalidArgument):
        Trace([1.0], sample_rate=0.0)


def test_with_samples_keeps_meta():
    t = Trace([1.0, 2.0], sample_rate=2.0, seed=5, meta={"arrivals": [0]})
    u = t.with_samples([3.0, 4.0], sigma_n_sq=0.5)
    assert u.meta == {"arrivals": [0], "sigma_n_sq": 0.5}
    assert u.seed == 5 and u.sample_rate == 2.0
    assert t.meta == {"arrivals": [0]}
    assert u.mean_power() == pytest.approx(12.5)
    assert Trace([]).mean_power() == 0.0
