import numpy as np
import pytest
from hypothesis import given, strategies as st

from fuzzywave.data import (
    DataFormatError, Dataset, builtin_g0, format_xy, interpolated_g0, read_dataset, read_xy, simulate, simulate_seasonal,
)


def test_simulate_noise_level():
    ds = simulate(20, 0.1, 1)
    assert ds.n == 20 and np.all((ds.x >= 0) & (ds.x <= 1))
    resid = ds.y - np.cos(2 * np.pi * ds.x)
    assert 0.02 < np.var(resid, ddof=1) < 0.4


def test_simulate_noiseless_and_deterministic():
    ds = simulate(15, 0.0, 4)
    np.testing.assert_array_equal(ds.y, np.cos(2 * np.pi * ds.x))
    a, b = simulate(15, 0.1, 9), simulate(15, 0.1, 9)
    assert np.array_equal(a.x, b.x) and np.array_equal(a.y, b.y)
    assert not np.array_equal(a.y, simulate(15, 0.1, 10).y)


def test_builtins():
    vee = builtin_g0("vee")
    assert vee(0.5) == -1.0 and vee(0.0) == 1.0 and vee(1.0) == 1.0
    x = np.linspace(-1, 2, 9)
    np.testing.assert_array_equal(builtin_g0("zero")(x), 0.0)
    assert builtin_g0("seasonal")(0.0) == pytest.approx(22.5 * np.cos(np.pi) + 62.5)
    with pytest.raises(ValueError):
        builtin_g0("sine")


def test_seasonal_stand_in():
    ds = simulate_seasonal(seed=2)
    assert ds.n == 185
    resid = ds.y - builtin_g0("seasonal")(ds.x)
    assert 8 < np.var(resid) < 32


def test_dataset_validation():
    with pytest.raises(ValueError):
        Dataset([0.1, 0.2], [1.0])
    with pytest.raises(ValueError):
        Dataset([0.1, np.nan], [1.0, 2.0])
    with pytest.raises(ValueError):
        Dataset([0.1, 1.5], [1.0, 2.0]).check_domain((0, 1))


def test_interpolated_guess():
    g = interpolated_g0([0.0, 1.0, 0.5], [0.0, 0.0, 1.0])
    assert g(0.25) == pytest.approx(0.5)
    assert g(2.0) == 0.0
    with pytest.raises(ValueError):
        interpolated_g0([0.0], [1.0])


@given(st.lists(st.tuples(st.floats(0, 1), st.floats(-1e6, 1e6)), min_size=1, max_size=30))
def test_csv_round_trip(tmp_path_factory, rows):
    x, y = np.array(rows).T
    path = tmp_path_factory.mktemp("csv") / "d.csv"
    path.write_text(format_xy(x, y), encoding="utf-8")
    ds = read_dataset(path)
    np.testing.assert_array_equal(ds.x, x)
    np.testing.assert_array_equal(ds.y, y)


@pytest.mark.parametrize("text", [
    "", "a,b\n0.1,2\n", "x,y\n0.1\n", "x,y\n0.1,abc\n", "x,y\n0.1,inf\n", "x,y\n",
])
def test_malformed_files(tmp_path, text):
    path = tmp_path / "bad.csv"
    path.write_text(text, encoding="utf-8")
    with pytest.raises(DataFormatError):
        read_xy(path)


def test_missing_file(tmp_path):
    with pytest.raises(FileNotFoundError):
        read_xy(tmp_path / "absent.csv")
