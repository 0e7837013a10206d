import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from avgshadow.systems import (
    ShiftPoint,
    full_shift,
    shift_metric,
    stair_subshift,
    symbol_depth,
)

words = st.lists(st.integers(0, 1), max_size=6).map(bytes)
periods = st.lists(st.integers(0, 1), min_size=1, max_size=5).map(bytes)
points = st.builds(ShiftPoint, pre=words, per=periods)


def test_canonical_representation():
    assert ShiftPoint(b"\x00\x00\x00\x01", b"\x01") == ShiftPoint(b"\x00" * 3, b"\x01")
    assert ShiftPoint(b"", b"\x00\x01\x00\x01") == ShiftPoint(b"", b"\x00\x01")
    assert ShiftPoint(b"\x00\x00", b"\x00") == ShiftPoint(b"", b"\x00")


def test_symbols_and_shift():
    p = ShiftPoint(b"\x00\x00\x00", b"\x01")  # 0^3 1^inf
    assert [p.symbol(i) for i in range(6)] == [0, 0, 0, 1, 1, 1]
    assert p.prefix(5) == b"\x00\x00\x00\x01\x01"
    assert p.shift(1) == ShiftPoint(b"\x00\x00", b"\x01")
    assert p.shift(4) == ShiftPoint(b"", b"\x01")
    assert ShiftPoint(b"", b"\x00\x01").shift(1) == ShiftPoint(b"", b"\x01\x00")


def test_empty_period_rejected():
    with pytest.raises(ValueError):
        ShiftPoint(b"\x00", b"")


def test_metric_examples():
    zero = ShiftPoint(b"", b"\x00")
    one = ShiftPoint(b"", b"\x01")
    assert shift_metric(zero, zero) == 0.0
    assert shift_metric(zero, one) == 1.0
    a = ShiftPoint(b"\x00" * 3, b"\x01")
    b = ShiftPoint(b"\x00" * 5, b"\x01")
    assert shift_metric(a, b) == 2.0**-3


@given(x=points, y=points)
@settings(max_examples=100, deadline=None)
def test_metric_symmetry_and_identity(x, y):
    assert shift_metric(x, y) == shift_metric(y, x)
    assert (shift_metric(x, y) == 0.0) == (x == y)


@given(x=points, y=points, z=points)
@settings(max_examples=100, deadline=None)
def test_metric_is_ultrametric(x, y, z):
    assert shift_metric(x, z) <= max(shift_metric(x, y), shift_metric(y, z)) + 1e-15


@given(p=points)
@settings(max_examples=60, deadline=None)
def test_text_round_trip(p):
    assert ShiftPoint.from_text(p.to_text()) == p


def test_text_examples():
    assert ShiftPoint(b"\x00" * 3, b"\x01").to_text() == "0^3(1)"
    assert ShiftPoint(b"", b"\x00").to_text() == "(0)"


def test_symbol_depth():
    assert symbol_depth(1.0) == 0
    assert symbol_depth(0.25) == 2
    assert symbol_depth(0.3) == 2
    assert symbol_depth(2.0**-4) == 4


class TestFullShift:
    def test_step_drops_leading_symbol(self):
        fs = full_shift(2)
        p = fs.point(b"\x00\x01", b"\x00")
        assert fs.step(p) == fs.point(b"\x01", b"\x00")

    def test_diameter_and_bounds(self):
        fs = full_shift(2)
        assert fs.diameter == 1.0
        rng = random.Random(1)
        for _ in range(50):
            assert fs.metric(fs.sample(rng), fs.sample(rng)) <= 1.0

    def test_sampler_reproducible(self):
        fs = full_shift(2)
        a = [fs.sample(random.Random(7)) for _ in range(5)]
        b = [fs.sample(random.Random(7)) for _ in range(5)]
        assert a == b

    def test_preimage_and_delay(self):
        fs = full_shift(2)
        p = fs.point(b"\x01", b"\x00\x01")
        assert fs.step(fs.preimage(p)) == p
        assert fs.delay(p, 5).shift(5) == p

    def test_perturb_stays_within_radius(self):
        fs = full_shift(2)
        rng = random.Random(3)
        for _ in range(50):
            p = fs.sample(rng)
            q = fs.perturb(p, 0.1, rng)
            assert fs.metric(p, q) < 0.1

    def test_nearest_orbit_accepts_true_orbit(self):
        fs = full_shift(2)
        rng = random.Random(5)
        p = fs.sample(rng)
        window = fs.orbit(p, 8)
        found, witness = fs.nearest_orbit(window, 0.01)
        assert found and fs.metric(witness, p) < 0.01

    def test_nearest_orbit_rejects_contradiction(self):
        # two adjacent entries demanding incompatible symbols at depth
        fs = full_shift(2)
        zero = fs.point(b"", b"\x00")
        one = fs.point(b"", b"\x01")
        window = [zero] * 4 + [one] * 4
        found, _ = fs.nearest_orbit(window, 0.1)
        assert not found

    def test_alphabet_validation(self):
        with pytest.raises(ValueError):
            full_shift(1)
        fs = full_shift(2)
        with pytest.raises(ValueError):
            fs.point(b"\x05", b"\x00")


class TestStairSubshift:
    def test_points_and_step(self):
        stair = stair_subshift()
        p = stair.point(3)
        assert stair.step(p) == stair.point(2)  # 0^3 1^inf -> 0^2 1^inf
        z = stair.zero_point()
        assert stair.step(z) == z

    def test_membership_enforced(self):
        stair = stair_subshift()
        outsider = ShiftPoint(b"\x01", b"\x00")  # 1 0^inf is not in the family
        assert not stair.contains(outsider)
        with pytest.raises(ValueError):
            stair.step(outsider)

    def test_exact_orbit_enumerator(self):
        stair = stair_subshift(max_preperiod=8)
        pts = stair.exact_orbit_points()
        assert stair.zero_point() in pts
        assert len(pts) == 10  # 0^inf plus 0^n 1^inf for n = 0..8

    def test_nearest_orbit(self):
        stair = stair_subshift(8)
        window = stair.orbit(stair.point(6), 4)
        found, _ = stair.nearest_orbit(window, 0.05)
        assert found


def test_system_descriptors_json():
    import json

    from avgshadow.systems import TwoFixedPoints, cylinder_system

    for system in (full_shift(3), stair_subshift(16), cylinder_system(), TwoFixedPoints()):
        payload = system.descriptor()
        json.dumps(payload)
        assert "kind" in payload and "diameter" in payload
