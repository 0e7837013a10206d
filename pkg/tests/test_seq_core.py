import random
from fractions import Fraction

import numpy as np
import pytest

from avgshadow.seq_core import (
    BesicovitchEstimate,
    IndexSet,
    SeqWindow,
    besicovitch_estimate,
    cauchy_profile,
    density_bounds,
    dynamical_besicovitch,
    product_besicovitch,
    product_metric,
    tail_start,
)
from avgshadow.systems import (
    OrbitPoint,
    TwoFixedPoints,
    cylinder_system,
    full_shift,
    stair_subshift,
)


def brute_density_bounds(members, horizon):
    """Independent oracle: direct count over every tail prefix."""
    member_set = set(members)
    ratios = []
    for n in range(tail_start(horizon), horizon + 1):
        count = sum(1 for i in range(n) if i in member_set)
        ratios.append(Fraction(count, n))
    return min(ratios), max(ratios)


class TestDensityBounds:
    def test_multiples_of_three(self):
        a = IndexSet.from_predicate(lambda i: i % 3 == 0, 9)
        lower, upper = density_bounds(a)
        assert (lower, upper) == brute_density_bounds(a.members, 9)
        # the periodic set has density 1/3 but the tail prefixes wobble
        assert lower == Fraction(1, 3)
        assert upper == Fraction(3, 7)

    def test_all_indices(self):
        for horizon in (1, 5, 64):
            a = IndexSet.from_predicate(lambda i: True, horizon)
            assert density_bounds(a) == (Fraction(1), Fraction(1))

    def test_dyadic_block_union(self):
        horizon = 2**20
        members = []
        k = 0
        while 2 ** (2 * k) < horizon:
            members.extend(range(2 ** (2 * k), min(2 ** (2 * k + 1), horizon)))
            k += 1
        a = IndexSet.from_members(members, horizon)
        lower, upper = density_bounds(a)
        assert abs(float(lower) - 1 / 3) <= 0.01
        assert abs(float(upper) - 2 / 3) <= 0.01
        # spot-check against the direct count at the tail endpoints
        count = len([m for m in members if m < horizon])
        assert lower == Fraction(count, horizon)

    def test_oracle_agreement_on_random_sets(self):
        rng = random.Random(0)
        for _ in range(20):
            horizon = rng.randint(1, 60)
            members = sorted(
                {rng.randrange(horizon) for _ in range(rng.randint(0, horizon))}
            )
            a = IndexSet.from_members(members, horizon)
            assert density_bounds(a) == brute_density_bounds(members, horizon)

    def test_zero_horizon_rejected(self):
        with pytest.raises(ValueError):
            IndexSet((), 0)

    def test_invalid_members_rejected(self):
        with pytest.raises(ValueError):
            IndexSet((3, 3), 5)
        with pytest.raises(ValueError):
            IndexSet((5,), 5)


class TestProductMetric:
    def setup_method(self):
        self.fs = full_shift(2)
        self.zero = self.fs.point(b"", b"\x00")
        self.one = self.fs.point(b"", b"\x01")

    def test_identical_windows(self):
        rng = random.Random(2)
        pts = [self.fs.sample(rng) for _ in range(10)]
        w = SeqWindow(self.fs, pts)
        assert product_metric(w, w) == 0.0

    def test_difference_at_origin_dominates(self):
        x = SeqWindow(self.fs, [self.zero, self.zero, self.zero])
        z = SeqWindow(self.fs, [self.one, self.zero, self.zero])
        assert product_metric(x, z) == 1.0

    def test_all_far_attained_at_origin(self):
        x = SeqWindow(self.fs, [self.zero] * 4)
        z = SeqWindow(self.fs, [self.one] * 4)
        assert product_metric(x, z) == 1.0

    def test_cap_decay(self):
        # difference only at j = 3 is capped at 1/4
        x = SeqWindow(self.fs, [self.zero] * 4)
        z = SeqWindow(self.fs, [self.zero] * 3 + [self.one])
        assert product_metric(x, z) == 0.25

    def test_length_mismatch(self):
        x = SeqWindow(self.fs, [self.zero] * 3)
        z = SeqWindow(self.fs, [self.zero] * 4)
        with pytest.raises(ValueError):
            product_metric(x, z)


class TestBesicovitchEstimate:
    def setup_method(self):
        self.fs = full_shift(2)
        self.zero = self.fs.point(b"", b"\x00")
        self.one = self.fs.point(b"", b"\x01")

    def test_identical(self):
        w = SeqWindow.orbit(self.fs, self.fs.point(b"\x00\x01", b"\x01\x00"), 64)
        assert besicovitch_estimate(w, w).estimate == 0.0

    def test_opposite_fixed_points(self):
        x = SeqWindow.orbit(self.fs, self.zero, 1000)
        z = SeqWindow.orbit(self.fs, self.one, 1000)
        assert besicovitch_estimate(x, z).estimate == 1.0

    def test_shared_tail_small_residue(self):
        x = SeqWindow.orbit(self.fs, self.fs.point(b"\x00" * 5, b"\x01"), 1000)
        z = SeqWindow.orbit(self.fs, self.fs.point(b"\x00" * 9, b"\x01"), 1000)
        assert besicovitch_estimate(x, z).estimate <= 9 / 500

    def test_running_average_shape_and_tail(self):
        d = np.linspace(0, 1, 100)
        est = BesicovitchEstimate.from_distances(d)
        assert len(est.running_averages) == 100
        assert est.estimate == pytest.approx(est.running_averages[49:].max())
        assert est.estimate >= est.running_averages[-1]

    def test_triangle_and_symmetry_pointwise(self):
        rng = random.Random(4)
        pts = lambda: [self.fs.sample(rng) for _ in range(64)]
        x, y, z = SeqWindow(self.fs, pts()), SeqWindow(self.fs, pts()), SeqWindow(self.fs, pts())
        bxz = besicovitch_estimate(x, z).running_averages
        bxy = besicovitch_estimate(x, y).running_averages
        byz = besicovitch_estimate(y, z).running_averages
        assert np.all(bxz <= bxy + byz + 1e-12)
        assert np.allclose(bxz, besicovitch_estimate(z, x).running_averages)

    def test_bounded_by_diameter(self):
        rng = random.Random(5)
        for _ in range(10):
            x = SeqWindow(self.fs, [self.fs.sample(rng) for _ in range(32)])
            z = SeqWindow(self.fs, [self.fs.sample(rng) for _ in range(32)])
            est = besicovitch_estimate(x, z)
            assert 0.0 <= est.estimate <= self.fs.diameter

    def test_length_mismatch(self):
        with pytest.raises(ValueError):
            besicovitch_estimate(
                SeqWindow(self.fs, [self.zero] * 4), SeqWindow(self.fs, [self.zero] * 5)
            )

    def test_json_round_trip_fields(self):
        d = np.linspace(0, 1, 1000)
        payload = BesicovitchEstimate.from_distances(d).to_json_dict()
        assert set(payload) == {"horizon", "estimate", "running_averages_downsampled"}
        assert len(payload["running_averages_downsampled"]["n"]) <= 256


class TestDynamicalBesicovitch:
    def test_same_point_is_zero(self):
        fs = full_shift(2)
        p = fs.point(b"\x01", b"\x00\x01")
        assert dynamical_besicovitch(fs, p, p, 64).estimate == 0.0

    def test_cylinder_settled_offsets(self):
        cyl = cylinder_system()
        est = dynamical_besicovitch(cyl, OrbitPoint(2, 1), OrbitPoint(3, 1), 10_000)
        assert abs(est.estimate - 0.25) <= 0.01

    def test_two_fixed_points_at_full_distance(self):
        two = TwoFixedPoints()
        assert dynamical_besicovitch(two, 0, 1, 64).estimate == 1.0

    def test_agrees_with_window_route(self):
        cyl = cylinder_system()
        x, z = OrbitPoint(2, 1), OrbitPoint(4, 3)
        fast = dynamical_besicovitch(cyl, x, z, 500).estimate
        via_windows = besicovitch_estimate(
            SeqWindow.orbit(cyl, x, 500), SeqWindow.orbit(cyl, z, 500)
        ).estimate
        assert fast == pytest.approx(via_windows, abs=1e-12)

    def test_short_horizon_rejected(self):
        fs = full_shift(2)
        with pytest.raises(ValueError):
            dynamical_besicovitch(fs, fs.point(b"", b"\x00"), fs.point(b"", b"\x00"), 1)


class TestProductBesicovitch:
    def setup_method(self):
        self.fs = full_shift(2)

    def test_identical(self):
        w = SeqWindow.orbit(self.fs, self.fs.point(b"\x00", b"\x01"), 64)
        assert product_besicovitch(w, w).estimate == 0.0

    def test_opposite_fixed_points_saturate(self):
        x = SeqWindow.orbit(self.fs, self.fs.point(b"", b"\x00"), 512)
        z = SeqWindow.orbit(self.fs, self.fs.point(b"", b"\x01"), 512)
        assert product_besicovitch(x, z).estimate == 1.0

    def test_dominates_plain_estimate(self):
        # the j = 0 coordinate of every shifted comparison is uncapped, so
        # each Cesaro term dominates the plain distance term
        rng = random.Random(6)
        for _ in range(5):
            pts = [self.fs.sample(rng) for _ in range(128)]
            qts = [self.fs.sample(rng) for _ in range(128)]
            x, z = SeqWindow(self.fs, pts), SeqWindow(self.fs, qts)
            assert (
                product_besicovitch(x, z).estimate
                >= besicovitch_estimate(x, z).estimate - 1e-12
            )


def _corpus_pair(fs, rng, length, kind):
    base = [fs.sample(rng) for _ in range(length)]
    if kind == "deep":
        other = [fs.perturb(p, 2.0**-10, rng) for p in base]
    elif kind == "spike":
        other = [
            fs.sample(rng) if rng.random() < 0.01 else p for p in base
        ]
    else:
        other = [fs.sample(rng) for _ in range(length)]
    return SeqWindow(fs, base), SeqWindow(fs, other)


def test_uniform_equivalence_corpus():
    """Corpus-level sanity for the two pseudo-metric estimators: tiny values
    of one force small values of the other (100 pairs at L = 512)."""
    fs = full_shift(2)
    rng = random.Random(99)
    kinds = ["deep"] * 40 + ["spike"] * 30 + ["independent"] * 30
    rho_small = 0
    pi_small = 0
    for kind in kinds:
        x, z = _corpus_pair(fs, rng, 512, kind)
        rho = besicovitch_estimate(x, z).estimate
        pi = product_besicovitch(x, z).estimate
        if rho <= 0.01:
            rho_small += 1
            assert pi <= 0.2, f"{kind}: rho={rho} but pi={pi}"
        if pi <= 0.01:
            pi_small += 1
            assert rho <= 0.2, f"{kind}: pi={pi} but rho={rho}"
    # the thresholds must actually fire on this corpus
    assert rho_small >= 30
    assert pi_small >= 30


class TestCauchyProfile:
    def test_identical_family_all_zero(self):
        fs = full_shift(2)
        p = fs.point(b"", b"\x01")
        prof = cauchy_profile(fs, [p, p, p], 64)
        assert prof.matrix.max() == 0.0
        assert prof.tail_sup.max() == 0.0

    def test_cylinder_family_tracks_settled_offsets(self):
        cyl = cylinder_system()
        family = [OrbitPoint(k, 1) for k in range(1, 9)]
        prof = cauchy_profile(cyl, family, 10_000)
        for k0, value in enumerate(prof.tail_sup):
            assert abs(float(value) - 2.0 ** (-k0)) <= 0.02
        diffs = np.diff(prof.tail_sup)
        assert np.all(diffs <= 1e-15)  # non-increasing in K

    def test_stair_family_degenerates(self):
        stair = stair_subshift()
        family = [stair.point(n) for n in range(1, 9)]
        prof = cauchy_profile(stair, family, 10_000)
        assert float(prof.tail_sup.max()) <= 0.01

    def test_small_family_rejected(self):
        fs = full_shift(2)
        with pytest.raises(ValueError):
            cauchy_profile(fs, [fs.point(b"", b"\x00")], 64)

    def test_csv_export(self, tmp_path):
        fs = full_shift(2)
        prof = cauchy_profile(
            fs, [fs.point(b"", b"\x00"), fs.point(b"", b"\x01"), fs.point(b"\x00", b"\x01")], 64
        )
        path = tmp_path / "tail.csv"
        prof.write_tail_sup_csv(path)
        lines = path.read_text().strip().splitlines()
        assert lines[0] == "K,tail_sup"
        assert len(lines) == 3
