import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays
from oracles import eq1_ccc

from emofuse.metrics import DegenerateWarning, ccc, mse, pearson


def test_ccc_examples():
    assert ccc([1, 2, 3], [1, 2, 3]) == 1.0
    assert ccc([-1, 0, 1], [1, 0, -1]) == -1.0
    y, yh = [0, 1, 2, 3], [0.5, 1.5, 2.0, 3.5]
    assert abs(ccc(y, yh) - 0.9268) <= 1e-4
    assert abs(ccc(y, yh) - eq1_ccc(y, yh)) <= 1e-12


def test_ccc_degenerate_and_errors():
    assert ccc([2, 2, 2], [2, 2, 2]) == 1.0
    assert ccc([2, 2, 2], [1, 1, 1]) == 0.0
    with pytest.raises(ValueError):
        ccc([1, 2], [1, 2, 3])
    with pytest.raises(ValueError):
        ccc([1], [1])
    with pytest.raises(ValueError):
        ccc([1, np.nan], [1, 2])


def test_ccc_matches_correlation_form(rng):
    for _ in range(50):
        y, yh = rng.standard_normal(30), rng.standard_normal(30) * 2 + 0.5
        assert ccc(y, yh) == pytest.approx(eq1_ccc(y, yh), abs=1e-12)


def test_pearson_examples():
    y = np.array([0.3, 1.0, -2.0, 4.0])
    assert pearson(y, y) == pytest.approx(1.0)
    assert pearson(y, -y + 7) == pytest.approx(-1.0)
    with pytest.warns(DegenerateWarning):
        assert pearson(y, np.full(4, 3.0)) == 0.0
    with pytest.raises(ValueError):
        pearson([1, 2], [1])


def test_mse_examples():
    assert mse([1, 2], [1, 2]) == 0.0
    assert mse([0, 0], [1, 1]) == 1.0
    assert mse([0, 2], [1, 1]) == 1.0
    with pytest.raises(ValueError):
        mse([0, 2], [1])


# values on a 1/64 grid so that adding an integer shift is exact in floating point
grid = st.integers(-64000, 64000).map(lambda v: v / 64)
pairs = st.integers(2, 40).flatmap(
    lambda n: st.tuples(arrays(np.float64, n, elements=grid), arrays(np.float64, n, elements=grid))
)


@settings(max_examples=1000, deadline=None)
@given(pair=pairs, shift=st.integers(-100, 100))
def test_ccc_properties(pair, shift):
    y, yh = pair
    c = ccc(y, yh)
    assert -1.0 <= c <= 1.0
    assert ccc(yh, y) == pytest.approx(c, abs=1e-9)
    # CCC is invariant to a common shift of both series
    assert ccc(y + shift, yh + shift) == pytest.approx(c, abs=1e-6)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", DegenerateWarning)
        assert -1.0 <= pearson(y, yh) <= 1.0
    assert mse(y, yh) >= 0
