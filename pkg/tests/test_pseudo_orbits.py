import math
import random
from fractions import Fraction

import pytest

from avgshadow.pseudo_orbits import (
    check_asymptotic_average,
    check_delta_average,
    check_delta_chain,
    check_delta_partial,
    check_delta_po,
    check_vague_po,
    corrupt_orbit,
    find_average_threshold,
    transition_gaps,
)
from avgshadow.seq_core import SeqWindow
from avgshadow.systems import (
    TwoFixedPoints,
    UnsupportedSystemError,
    cylinder_system,
    full_shift,
    stair_subshift,
)


def spliced_orbit(fs, segments):
    """Concatenation of true orbit pieces; every splice is one unit gap."""
    pts = []
    for start, length in segments:
        pts.extend(fs.orbit(start, length))
    return SeqWindow(fs, pts)


def brute_force_average_holds(window, delta, n_min):
    gaps = transition_gaps(window)
    top = len(gaps)
    for n in range(n_min, top + 1):
        for k in range(top - n + 1):
            if not gaps[k : k + n].sum() / n < delta:
                return False
    return True


@pytest.fixture(scope="module")
def fs():
    return full_shift(2)


@pytest.fixture(scope="module")
def fixed_points(fs):
    return fs.point(b"", b"\x00"), fs.point(b"", b"\x01")


class TestDeltaPseudoOrbit:
    def test_true_orbit_holds(self, fs):
        w = SeqWindow.orbit(fs, fs.point(b"\x00\x01", b"\x01\x00"), 50)
        v = check_delta_po(w, 1e-9)
        assert v.holds and v.violations == []

    def test_single_splice(self, fs, fixed_points):
        zero, one = fixed_points
        w = spliced_orbit(fs, [(zero, 10), (one, 10)])
        v = check_delta_po(w, 0.5)
        assert not v.holds
        assert v.violations == [9]

    def test_alternating_fails_everywhere(self, fs, fixed_points):
        zero, one = fixed_points
        w = SeqWindow(fs, [zero, one] * 5)
        v = check_delta_po(w, 0.5)
        assert not v.holds
        assert v.violations == list(range(9))

    def test_chain_reading_same_result(self, fs, fixed_points):
        zero, one = fixed_points
        w = spliced_orbit(fs, [(zero, 5), (one, 5)])
        po = check_delta_po(w, 0.5)
        chain = check_delta_chain(w, 0.5)
        assert chain.kind == "delta_chain"
        assert chain.holds == po.holds and chain.violations == po.violations

    def test_nonpositive_delta_rejected(self, fs, fixed_points):
        w = SeqWindow.orbit(fs, fixed_points[0], 4)
        with pytest.raises(ValueError):
            check_delta_po(w, 0.0)


class TestDeltaAverage:
    def test_true_orbit_holds(self, fs):
        w = SeqWindow.orbit(fs, fs.point(b"\x01", b"\x00\x01\x01"), 60)
        assert check_delta_average(w, 0.1, 10).holds

    def test_three_gaps_in_one_window_fail(self, fs, fixed_points):
        zero, one = fixed_points
        # three unit gaps packed inside one length-20 window
        w = spliced_orbit(fs, [(zero, 50), (one, 5), (zero, 5), (one, 5), (zero, 135)])
        v = check_delta_average(w, 0.1, 20)
        assert not v.holds
        assert v.violations  # (n, k) pairs reported
        assert not brute_force_average_holds(w, 0.1, 20)

    def test_single_gap_passes_at_tenth(self, fs, fixed_points):
        zero, one = fixed_points
        w = spliced_orbit(fs, [(zero, 100), (one, 100)])
        v = check_delta_average(w, 0.1, 20)
        assert v.holds
        assert brute_force_average_holds(w, 0.1, 20)

    def test_sparse_gaps_hold(self, fs, fixed_points):
        zero, one = fixed_points
        # unit gaps every 100 steps: windows of length >= 100 average <= 2/100
        segments = [(zero if i % 2 == 0 else one, 100) for i in range(10)]
        w = spliced_orbit(fs, segments)
        v = check_delta_average(w, 0.1, 100)
        assert v.holds
        assert brute_force_average_holds(w, 0.1, 100)

    def test_brute_force_agreement_on_random_inputs(self, fs):
        rng = random.Random(10)
        for _ in range(10):
            c = corrupt_orbit(fs, fs.sample(rng), 120, 0.08, seed=rng.randrange(10**6))
            for delta in (0.05, 0.15, 0.4):
                for n_min in (4, 16):
                    got = check_delta_average(c.window, delta, n_min).holds
                    assert got == brute_force_average_holds(c.window, delta, n_min)

    def test_window_too_short(self, fs, fixed_points):
        w = SeqWindow.orbit(fs, fixed_points[0], 5)
        with pytest.raises(ValueError):
            check_delta_average(w, 0.1, 5)

    def test_threshold_search(self, fs, fixed_points):
        zero, one = fixed_points
        w = spliced_orbit(fs, [(zero, 64), (one, 64)])
        n = find_average_threshold(w, 0.1)
        assert n is not None and n & (n - 1) == 0  # a power of two
        assert check_delta_average(w, 0.1, n).holds
        # alternating sequence has average 1 in every window
        bad = SeqWindow(fs, [zero, one] * 32)
        assert find_average_threshold(bad, 0.5) is None


class TestAsymptoticAverage:
    def test_true_orbit(self, fs):
        w = SeqWindow.orbit(fs, fs.point(b"", b"\x00\x01"), 32)
        rep = check_asymptotic_average(w, 1e-6)
        assert rep.holds and rep.curve.max() == 0.0

    def test_doubling_blocks_decay(self, fs, fixed_points):
        zero, one = fixed_points
        length = 2**14
        entries = []
        g = 0
        boundaries = 0
        while len(entries) < length:
            entries.extend([zero] * 2**g)
            entries.extend([one] * 2**g)
            g += 1
        entries = entries[:length]
        w = SeqWindow(fs, entries)
        rep = check_asymptotic_average(w, 0.01)
        assert rep.holds
        gaps = transition_gaps(w)
        boundaries = int(gaps.sum())
        assert rep.curve[-1] <= 2 * boundaries / length

    def test_constant_gap_fails(self, fs, fixed_points):
        zero, one = fixed_points
        w = SeqWindow(fs, [zero, one] * 16)
        rep = check_asymptotic_average(w, 0.5)
        assert not rep.holds
        assert rep.curve.max() == 1.0

    def test_short_window_rejected(self, fs, fixed_points):
        w = SeqWindow.orbit(fs, fixed_points[0], 8)
        with pytest.raises(ValueError):
            check_asymptotic_average(w, 0.1)


class TestDeltaPartial:
    def test_true_orbit_fraction_one(self, fs):
        w = SeqWindow.orbit(fs, fs.point(b"\x00", b"\x01"), 12)
        v = check_delta_partial(w, 0.2)
        assert v.holds and v.witness["good_fraction"] == 1

    def test_one_bad_of_ten_passes(self, fs, fixed_points):
        zero, one = fixed_points
        w = spliced_orbit(fs, [(zero, 10), (one, 1)])  # r = 10, one unit gap
        v = check_delta_partial(w, 0.2)
        assert v.holds
        assert v.witness["good_fraction"] == Fraction(9, 10)

    def test_three_bad_of_ten_fail(self, fs, fixed_points):
        zero, one = fixed_points
        w = spliced_orbit(fs, [(zero, 5), (one, 3), (zero, 2), (one, 1)])
        v = check_delta_partial(w, 0.2)
        assert v.witness["good_fraction"] == Fraction(7, 10)
        assert not v.holds

    def test_exact_threshold_semantics(self, fs, fixed_points):
        # 8 good of 10 against delta = 1/5: the fraction equals 1 - delta,
        # so the strict inequality fails under the exact rational reading
        zero, one = fixed_points
        w = spliced_orbit(fs, [(zero, 5), (one, 3), (zero, 3)])
        v = check_delta_partial(w, Fraction(1, 5))
        assert v.witness["good_fraction"] == Fraction(8, 10)
        assert not v.holds

    def test_monotone_in_delta_on_unit_gap_corpus(self, fs, fixed_points):
        zero, one = fixed_points
        w = spliced_orbit(fs, [(zero, 8), (one, 4), (zero, 4)])
        verdicts = [check_delta_partial(w, d).holds for d in (0.05, 0.1, 0.2, 0.3, 0.5)]
        assert verdicts == sorted(verdicts)  # once it holds, it keeps holding


class TestImplications:
    def test_po_implies_partial_and_average(self, fs):
        rng = random.Random(11)
        for _ in range(10):
            c = corrupt_orbit(fs, fs.sample(rng), 80, 0.05, seed=rng.randrange(10**6))
            for delta in (0.25, 0.6):
                if check_delta_po(c.window, delta).holds:
                    assert check_delta_partial(c.window, delta).holds
                    for n_min in (1, 2, 5):
                        assert check_delta_average(c.window, delta, n_min).holds


class TestVaguePseudoOrbit:
    def test_true_orbit_full_density(self, fs):
        w = SeqWindow.orbit(fs, fs.point(b"\x00\x01\x01", b"\x01\x00"), 64)
        rep = check_vague_po(w, 0.1, 8)
        assert rep.good_fraction == 1

    def test_doubling_blocks_mostly_vague(self):
        stair = stair_subshift()
        zero, one = stair.zero_point(), stair.point(0)
        length = 2**14
        entries = []
        g = 0
        while len(entries) < length:
            entries.extend([zero] * 2**g)
            entries.extend([one] * 2**g)
            g += 1
        w = SeqWindow(stair, entries[:length])
        rep = check_vague_po(w, 0.1, 8)
        assert rep.good_fraction >= Fraction(99, 100)

    def test_alternating_never_vague(self):
        two = TwoFixedPoints()
        w = SeqWindow(two, [0, 1] * 8)
        rep = check_vague_po(w, 0.1, 2)
        assert rep.good_fraction == 0

    def test_unsupported_system(self):
        cyl = cylinder_system()
        from avgshadow.systems import OrbitPoint

        w = SeqWindow.orbit(cyl, OrbitPoint(2, 1), 16)
        with pytest.raises(UnsupportedSystemError):
            check_vague_po(w, 0.1, 4)

    def test_depth_bound(self, fs):
        w = SeqWindow.orbit(fs, fs.point(b"", b"\x00"), 10)
        with pytest.raises(ValueError):
            check_vague_po(w, 0.1, 6)


class TestCorruptOrbit:
    def test_zero_density_is_true_orbit(self, fs):
        p = fs.point(b"\x01\x00", b"\x01")
        c = corrupt_orbit(fs, p, 20, 0.0, seed=3)
        assert c.window.points == fs.orbit(p, 20)
        assert c.jumps == ()

    def test_deterministic(self, fs):
        p = fs.point(b"", b"\x01")
        a = corrupt_orbit(fs, p, 50, 0.5, seed=9)
        b = corrupt_orbit(fs, p, 50, 0.5, seed=9)
        assert a.window.points == b.window.points and a.jumps == b.jumps
        c = corrupt_orbit(fs, p, 50, 0.5, seed=10)
        assert c.window.points != a.window.points

    def test_nonjump_transitions_exact(self, fs):
        p = fs.point(b"", b"\x00\x01")
        c = corrupt_orbit(fs, p, 60, 0.3, seed=1)
        pts = c.window.points
        for i in range(1, 60):
            if i not in c.jumps:
                assert fs.metric(fs.step(pts[i - 1]), pts[i]) == 0.0

    def test_density_validation(self, fs):
        with pytest.raises(ValueError):
            corrupt_orbit(fs, fs.point(b"", b"\x00"), 10, 1.0, seed=0)

    def test_average_property_frequency_over_seeds(self, fs):
        # frozen Monte-Carlo: at delta = 0.3, jump density delta^2/2 and
        # L = 178, the delta^2-average check at N = ceil(8/delta^2) holds on
        # 199 of the first 200 seeds (990/1000 over the wider sweep)
        delta = 0.3
        d2 = delta * delta
        length = 178
        n_min = math.ceil(8 / d2)
        held = sum(
            check_delta_average(
                corrupt_orbit(fs, fs.point(b"", b"\x00"), length, d2 / 2, seed=s).window,
                d2,
                n_min,
            ).holds
            for s in range(200)
        )
        assert held == 199
        assert held / 200 >= 0.99


def test_verdict_json_serializable(fs):
    import json

    w = SeqWindow.orbit(fs, fs.point(b"", b"\x01"), 8)
    v = check_delta_partial(w, 0.5)
    text = json.dumps(v.to_json_dict())
    assert "good_fraction" in text
