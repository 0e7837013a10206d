"""A compact cylinder system: a circle of fixed points at height 0 and a
countable family of orbits descending along unit-length arcs.

Geometry.  On the unit cylinder, S_0 is the base circle (height 0, all fixed
points).  For n >= 1, A_n is the arc of length 1 at height 1/n whose left end
sits at angle 2*pi*dyadic_fraction(n); arc length is identified with angle in
radians and "right" means increasing angle.  The k-th orbit point at time n,
Orbit(k, n), lives:

* for n >= k, on A_n at settled offset 1 - 2^(1-k) from the left end (the
  cumulative spacings 1/2, 1/4, ..., 1/2^(k-1) summed in closed form), and
* for n < k (only when k > 1), on A_k, sliding from the right end (time 1) to
  the settled offset (time k) at even intervals.

The step map fixes the base circle and advances orbit time by one.  The
metric is the geodesic metric on the cylinder surface; its diameter,
sqrt(pi^2 + 1), exceeds 1 and is declared as such - estimates over this
system are reported raw, never rescaled.
"""

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .base import SystemHandle

TWO_PI = 2.0 * math.pi


def dyadic_fraction(n: int) -> Fraction:
    """n-th term of 0, 1/2, 0, 1/4, 2/4, 3/4, 0, 1/8, ...: generation g >= 1
    lists j/2^g for j = 0..2^g-1 in increasing order."""
    if n < 1:
        raise ValueError("index must be >= 1")
    g = (n + 1).bit_length() - 1
    j = n - (2**g - 2)  # 1-based position within generation g
    return Fraction(j - 1, 2**g)


def dyadic_generation(n: int) -> int:
    """Generation of the n-th term; generation g occupies [2^g - 1, 2^(g+1) - 2]."""
    if n < 1:
        raise ValueError("index must be >= 1")
    return (n + 1).bit_length() - 1


def generation_horizon(g: int) -> int:
    """Largest time index that completes generation g, i.e. 2^(g+1) - 2."""
    return 2 ** (g + 1) - 2


@dataclass(frozen=True)
class BasePoint:
    """Fixed point on the base circle at the given angle (radians)."""

    theta: float

    def __post_init__(self):
        object.__setattr__(self, "theta", self.theta % TWO_PI)


@dataclass(frozen=True)
class OrbitPoint:
    """Point of the k-th orbit at time n (k >= 1, n >= 1)."""

    k: int
    n: int

    def __post_init__(self):
        if self.k < 1 or self.n < 1:
            raise ValueError("orbit and time indices must be >= 1")


def settled_offset(k: int) -> float:
    """Arc offset 1 - 2^(1-k) of the k-th orbit once settled (time >= k)."""
    return 1.0 - 2.0 ** (1 - k)


def cyl_position(p):
    """(angle, height) of a cylinder point.

    Orbit(k, n) with n >= k: on A_n at the settled offset.  With n < k
    (requires k > 1): on A_k, offset interpolated evenly from 1 at time 1 down
    to the settled offset at time k.
    """
    if isinstance(p, BasePoint):
        return p.theta, 0.0
    k, n = p.k, p.n
    if n >= k:
        angle = TWO_PI * float(dyadic_fraction(n)) + settled_offset(k)
        return angle % TWO_PI, 1.0 / n
    offset = 1.0 - (n - 1) * 2.0 ** (1 - k) / (k - 1)
    angle = TWO_PI * float(dyadic_fraction(k)) + offset
    return angle % TWO_PI, 1.0 / k


def _circular(a: float, b: float) -> float:
    d = abs(a - b) % TWO_PI
    return min(d, TWO_PI - d)


def cyl_metric(p, q) -> float:
    """Geodesic distance on the cylinder surface (unit radius)."""
    a1, h1 = cyl_position(p)
    a2, h2 = cyl_position(q)
    return math.hypot(_circular(a1, a2), h1 - h2)


def cyl_step(p):
    """Base points are fixed; orbit points advance in time."""
    if isinstance(p, BasePoint):
        return p
    return OrbitPoint(p.k, p.n + 1)


def _dyadic_fraction_array(times):
    """float64 dyadic_fraction over an int64 array of time indices (exact:
    all values are dyadics with exponent <= 52)."""
    t = np.asarray(times, dtype=np.int64)
    g = np.frexp((t + 1).astype(np.float64))[1] - 1
    j = t - (2**g.astype(np.int64) - 2)
    return (j - 1).astype(np.float64) / np.exp2(g.astype(np.float64))


class CylinderSystem(SystemHandle):
    name = "cylinder"
    diameter = math.sqrt(math.pi**2 + 1.0)

    def step(self, p):
        return cyl_step(p)

    def metric(self, p, q):
        return cyl_metric(p, q)

    def sample(self, rng):
        if rng.random() < 0.5:
            return BasePoint(rng.uniform(0.0, TWO_PI))
        k = rng.randint(1, 8)
        return OrbitPoint(k, rng.randint(1, 64))

    def contains(self, p):
        return isinstance(p, (BasePoint, OrbitPoint))

    def point_id(self, p):
        if isinstance(p, BasePoint):
            return f"B:{p.theta:.6f}"
        return f"O:{p.k}:{p.n}"

    def _angles_heights(self, p, length):
        """Vectorized (angle, height) arrays along the orbit of p."""
        if isinstance(p, BasePoint):
            a = np.full(length, p.theta)
            return a, np.zeros(length)
        times = p.n + np.arange(length, dtype=np.int64)
        angles = np.empty(length)
        heights = np.empty(length)
        settled = times >= p.k
        ts = times[settled]
        angles[settled] = TWO_PI * _dyadic_fraction_array(ts) + settled_offset(p.k)
        heights[settled] = 1.0 / ts
        for i in np.nonzero(~settled)[0]:
            angles[i], heights[i] = cyl_position(OrbitPoint(p.k, int(times[i])))
        return angles % TWO_PI, heights

    def orbit_distances(self, x, z, length):
        ax, hx = self._angles_heights(x, length)
        az, hz = self._angles_heights(z, length)
        d = np.abs(ax - az) % TWO_PI
        circ = np.minimum(d, TWO_PI - d)
        return np.hypot(circ, hx - hz)

    def descriptor(self):
        return {"kind": "cylinder", "diameter": self.diameter}


def cylinder_system() -> CylinderSystem:
    return CylinderSystem()
