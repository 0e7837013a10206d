"""Abstract dynamical-system handle and the small concrete toy systems."""


class UnsupportedSystemError(ValueError):
    """The system lacks an optional capability (oracle, tracer, ...)."""


class SystemHandle:
    """A dynamical system: step map, metric of declared diameter, point sampler.

    ``step`` and ``metric`` are pure; samplers take an explicit ``random.Random``
    so nothing here owns hidden state.  Optional capabilities are advertised by
    the ``has_*`` flags; calling an unsupported one raises
    :class:`UnsupportedSystemError`.
    """

    name = "abstract"
    diameter = 1.0

    has_nearest_orbit = False
    has_exact_orbits = False
    has_tracer = False
    has_preimage = False
    has_perturb = False

    def step(self, p):
        raise NotImplementedError

    def metric(self, p, q):
        raise NotImplementedError

    def sample(self, rng):
        raise NotImplementedError

    def contains(self, p) -> bool:
        return True

    def point_id(self, p) -> str:
        return str(p)

    def orbit(self, p, length):
        """The first ``length`` points of the orbit of ``p``."""
        pts = [p]
        for _ in range(length - 1):
            pts.append(self.step(pts[-1]))
        return pts

    def orbit_distances(self, x, z, length):
        """Pointwise distances along the two orbits; subclasses may vectorize."""
        import numpy as np

        out = np.empty(length, dtype=np.float64)
        px, pz = x, z
        for j in range(length):
            out[j] = self.metric(px, pz)
            if j + 1 < length:
                px = self.step(px)
                pz = self.step(pz)
        return out

    # -- optional capabilities ------------------------------------------------

    def nearest_orbit(self, points, radius):
        """Whether some true orbit is within ``radius`` of the window ``points``
        in the product metric over the first ``len(points)`` coordinates.
        Returns ``(found, witness_or_None)``."""
        raise UnsupportedSystemError(f"{self.name}: no nearest-orbit oracle")

    def exact_orbit_points(self):
        """Finite list of points whose orbits enumerate the system (small systems)."""
        raise UnsupportedSystemError(f"{self.name}: no exact-orbit enumerator")

    def preimage(self, p):
        raise UnsupportedSystemError(f"{self.name}: no preimage oracle")

    def perturb(self, p, radius, rng):
        """A point within ``radius`` of ``p``; used by modulus estimation."""
        raise UnsupportedSystemError(f"{self.name}: no perturbation sampler")

    def descriptor(self) -> dict:
        return {"kind": self.name, "diameter": self.diameter}


def window_product_metric(system, points_a, points_b):
    """sup_j min(rho(a_j, b_j), 1/(j+1)) over two equal-length point lists."""
    best = 0.0
    for j, (a, b) in enumerate(zip(points_a, points_b)):
        cap = 1.0 / (j + 1)
        if cap <= best:
            break
        v = system.metric(a, b)
        if v > cap:
            v = cap
        if v > best:
            best = v
    return best


class TwoFixedPoints(SystemHandle):
    """Identity map on two points at distance 1."""

    name = "two_fixed_points"
    diameter = 1.0
    has_nearest_orbit = True
    has_exact_orbits = True

    POINTS = (0, 1)

    def step(self, p):
        return p

    def metric(self, p, q):
        return 0.0 if p == q else 1.0

    def sample(self, rng):
        return rng.choice(self.POINTS)

    def contains(self, p):
        return p in self.POINTS

    def point_id(self, p):
        return f"P{p}"

    def exact_orbit_points(self):
        return list(self.POINTS)

    def nearest_orbit(self, points, radius):
        for cand in self.POINTS:
            if window_product_metric(self, points, [cand] * len(points)) < radius:
                return True, cand
        return False, None


class ProductSystem(SystemHandle):
    """Coordinatewise product of two systems under the max metric."""

    has_nearest_orbit = False

    def __init__(self, left, right, name=None):
        self.left = left
        self.right = right
        self.name = name or f"product({left.name},{right.name})"
        self.diameter = max(left.diameter, right.diameter)

    def step(self, p):
        return (self.left.step(p[0]), self.right.step(p[1]))

    def metric(self, p, q):
        return max(self.left.metric(p[0], q[0]), self.right.metric(p[1], q[1]))

    def sample(self, rng):
        return (self.left.sample(rng), self.right.sample(rng))

    def contains(self, p):
        return self.left.contains(p[0]) and self.right.contains(p[1])

    def point_id(self, p):
        return f"({self.left.point_id(p[0])},{self.right.point_id(p[1])})"

    def descriptor(self):
        return {
            "kind": "product",
            "left": self.left.descriptor(),
            "right": self.right.descriptor(),
            "diameter": self.diameter,
        }


def estimate_continuity_modulus(system, delta, samples=10_000, rng=None, start=None):
    """Sampling estimate of a uniform-continuity modulus gamma for ``delta``.

    Halves the candidate until ``samples`` perturbed pairs at distance < gamma
    all map within ``delta``.  This is an estimate, not a proof; the returned
    value is also forced strictly below min(delta, 1/4).
    """
    import random

    if rng is None:
        rng = random.Random(0)
    if not system.has_perturb:
        raise UnsupportedSystemError(f"{system.name}: no perturbation sampler")
    gamma = start if start is not None else min(delta, 0.25) / 2.0
    while True:
        ok = True
        for _ in range(samples):
            p = system.sample(rng)
            q = system.perturb(p, gamma, rng)
            if system.metric(p, q) >= gamma:
                continue
            if system.metric(system.step(p), system.step(q)) >= delta:
                ok = False
                break
        if ok:
            return gamma
        gamma /= 2.0
        if gamma < 1e-12:
            raise UnsupportedSystemError(
                f"{system.name}: continuity modulus search collapsed below 1e-12"
            )
