import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from avgshadow import _core_py

try:
    from avgshadow import _core

    BACKENDS = [("compiled", _core), ("pure", _core_py)]
except ImportError:
    BACKENDS = [("pure", _core_py)]


values_arrays = st.lists(
    st.floats(min_value=0.0, max_value=1.0, allow_nan=False), min_size=1, max_size=120
).map(lambda xs: np.array(xs, dtype=np.float64))


@pytest.mark.parametrize("name,impl", BACKENDS)
@given(v=values_arrays)
@settings(max_examples=60, deadline=None)
def test_running_averages_match_reference(name, impl, v):
    got = impl.running_averages(v)
    expected = np.cumsum(v) / np.arange(1, len(v) + 1)
    assert np.allclose(got, expected, atol=1e-12)


@pytest.mark.parametrize("name,impl", BACKENDS)
@given(v=values_arrays)
@settings(max_examples=60, deadline=None)
def test_window_max_sums_match_bruteforce(name, impl, v):
    got = impl.window_max_sums(v)
    L = len(v)
    assert got.shape == (L + 1,)
    for n in range(1, L + 1):
        brute = max(v[k : k + n].sum() for k in range(L - n + 1))
        assert got[n] == pytest.approx(brute, abs=1e-10)


@pytest.mark.skipif(len(BACKENDS) < 2, reason="compiled backend not built")
def test_backends_agree_on_large_input():
    rng = np.random.default_rng(42)
    v = rng.random(3000)
    a = BACKENDS[0][1]
    b = BACKENDS[1][1]
    assert np.allclose(a.running_averages(v), b.running_averages(v), atol=1e-12)
    assert np.allclose(a.window_max_sums(v), b.window_max_sums(v), atol=1e-9)


@pytest.mark.parametrize("name,impl", BACKENDS)
def test_long_horizon_accumulation_keeps_digits(name, impl):
    # constant input: every running average must be exactly the constant
    v = np.full(300_000, 0.1)
    out = impl.running_averages(v)
    assert np.abs(out - 0.1).max() < 1e-12
