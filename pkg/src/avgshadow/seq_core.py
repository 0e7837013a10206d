"""Densities of index sets, the product-topology metric on finite windows,
and finite-horizon estimators of the Besicovitch pseudo-metrics.

All limsup-style quantities are estimated by the maximum of the running
Cesaro averages over the tail n in [ceil(L/2), L]: robust to transients of
length o(L) while still using half the data.  No attempt is made to compute
true limits.
"""

import csv
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import backend
from .systems.base import SystemHandle


def tail_start(horizon: int) -> int:
    """First n of the tail window [ceil(L/2), L]."""
    return -(-horizon // 2)


@dataclass(frozen=True)
class IndexSet:
    """A set of natural numbers materialized below a horizon."""

    members: tuple
    horizon: int

    def __post_init__(self):
        if self.horizon < 1:
            raise ValueError("horizon must be >= 1")
        m = self.members
        if any(m[i] >= m[i + 1] for i in range(len(m) - 1)):
            raise ValueError("members must be strictly increasing")
        if m and (m[0] < 0 or m[-1] >= self.horizon):
            raise ValueError("members must lie in [0, horizon)")

    @classmethod
    def from_predicate(cls, pred, horizon: int) -> "IndexSet":
        return cls(tuple(i for i in range(horizon) if pred(i)), horizon)

    @classmethod
    def from_members(cls, members, horizon: int) -> "IndexSet":
        return cls(tuple(sorted(set(members))), horizon)


def density_bounds(a: IndexSet):
    """Finite surrogates of lower/upper asymptotic density.

    Returns (lower, upper) as exact rationals: the min and max over
    n in [ceil(L/2), L] of |A intersect [0, n)| / n.
    """
    lo = tail_start(a.horizon)
    ns = np.arange(lo, a.horizon + 1, dtype=np.int64)
    counts = np.searchsorted(np.asarray(a.members, dtype=np.int64), ns, side="left")
    ratios = counts / ns
    i_min = int(np.argmin(ratios))
    i_max = int(np.argmax(ratios))
    lower = Fraction(int(counts[i_min]), int(ns[i_min]))
    upper = Fraction(int(counts[i_max]), int(ns[i_max]))
    return lower, upper


class SeqWindow:
    """A finite prefix of an X-valued sequence within a given system."""

    __slots__ = ("system", "points")

    def __init__(self, system: SystemHandle, points):
        points = list(points)
        if len(points) < 1:
            raise ValueError("window must contain at least one point")
        for p in points:
            if not system.contains(p):
                raise ValueError(f"point not valid in system {system.name}: {p!r}")
        self.system = system
        self.points = points

    def __len__(self):
        return len(self.points)

    @classmethod
    def orbit(cls, system: SystemHandle, x, length: int) -> "SeqWindow":
        return cls(system, system.orbit(x, length))

    def distances_to(self, other: "SeqWindow") -> np.ndarray:
        if self.system is not other.system:
            raise ValueError("windows belong to different systems")
        if len(self) != len(other):
            raise ValueError("window length mismatch")
        metric = self.system.metric
        return np.array(
            [metric(p, q) for p, q in zip(self.points, other.points)], dtype=np.float64
        )


@dataclass
class BesicovitchEstimate:
    """Tail-max of running Cesaro averages of pointwise distances.

    running_averages[n-1] holds (1/n) * sum of the first n distances; the
    estimate is max over the tail n in [ceil(L/2), L].
    """

    horizon: int
    running_averages: np.ndarray
    estimate: float

    @classmethod
    def from_distances(cls, dists: np.ndarray) -> "BesicovitchEstimate":
        horizon = len(dists)
        if horizon < 2:
            raise ValueError("need at least two terms")
        running = backend.running_averages(np.asarray(dists, dtype=np.float64))
        est = float(running[tail_start(horizon) - 1 :].max())
        return cls(horizon=horizon, running_averages=running, estimate=est)

    def to_json_dict(self, max_samples: int = 256) -> dict:
        n = len(self.running_averages)
        idx = np.unique(np.linspace(0, n - 1, min(max_samples, n)).astype(int))
        return {
            "horizon": self.horizon,
            "estimate": self.estimate,
            "running_averages_downsampled": {
                "n": [int(i) + 1 for i in idx],
                "value": [float(self.running_averages[i]) for i in idx],
            },
        }


def besicovitch_estimate(x: SeqWindow, z: SeqWindow) -> BesicovitchEstimate:
    """Finite-horizon Besicovitch pseudo-distance between two windows."""
    return BesicovitchEstimate.from_distances(x.distances_to(z))


def dynamical_besicovitch(system: SystemHandle, x, z, horizon: int) -> BesicovitchEstimate:
    """Besicovitch estimate between the orbits of two points.

    Equal to besicovitch_estimate on the two orbit windows; systems may
    provide a vectorized orbit_distances, which is used here.
    """
    if horizon < 2:
        raise ValueError("horizon must be >= 2")
    d = system.orbit_distances(x, z, horizon)
    return BesicovitchEstimate.from_distances(d)


def product_metric(x: SeqWindow, z: SeqWindow) -> float:
    """sup_j min(rho(x_j, z_j), 1/(j+1)) over the window.

    Truncation at L is exact whenever the sup is attained at some j < L with
    value >= 1/(L+1).
    """
    d = x.distances_to(z)
    caps = 1.0 / np.arange(1, len(d) + 1)
    return float(np.minimum(d, caps).max())


def product_besicovitch(x: SeqWindow, z: SeqWindow) -> BesicovitchEstimate:
    """Cesaro tail-max of the product metric over shifted windows.

    The j-th term compares the shifted windows on the remaining indices
    [j, L) only; the truncation bias is O(log L / L) because the product
    metric caps coordinate j at 1/(j+1).  Quadratic in L.
    """
    d = x.distances_to(z)
    L = len(d)
    if L < 2:
        raise ValueError("need at least two terms")
    terms = np.empty(L)
    for j in range(L):
        caps = 1.0 / np.arange(1, L - j + 1)
        terms[j] = np.minimum(d[j:], caps).max()
    return BesicovitchEstimate.from_distances(terms)


@dataclass
class CauchyProfile:
    """Pairwise orbit estimates for a family plus the tail-sup curve.

    tail_sup[K] = max over pairs with both (0-based) indices >= K; it is
    non-increasing in K by construction.
    """

    horizon: int
    point_ids: list
    matrix: np.ndarray
    tail_sup: np.ndarray

    def to_json_dict(self) -> dict:
        return {
            "horizon": self.horizon,
            "points": self.point_ids,
            "matrix": [[float(v) for v in row] for row in self.matrix],
            "tail_sup": [float(v) for v in self.tail_sup],
        }

    def write_tail_sup_csv(self, path):
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["K", "tail_sup"])
            for k, v in enumerate(self.tail_sup):
                w.writerow([k, float(v)])


def cauchy_profile(system: SystemHandle, family, horizon: int) -> CauchyProfile:
    """Pairwise dynamical Besicovitch estimates over a family of points."""
    family = list(family)
    m = len(family)
    if m < 2:
        raise ValueError("family must contain at least two points")
    mat = np.zeros((m, m))
    for i in range(m):
        for j in range(i + 1, m):
            est = dynamical_besicovitch(system, family[i], family[j], horizon).estimate
            mat[i, j] = mat[j, i] = est
    tail = np.empty(m - 1)
    for k in range(m - 1):
        tail[k] = mat[k:, k:].max()
    return CauchyProfile(
        horizon=horizon,
        point_ids=[system.point_id(p) for p in family],
        matrix=mat,
        tail_sup=tail,
    )
