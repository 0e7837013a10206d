"""Validators and generators for pseudo-orbit classes.

Verdicts carry exact rational witnesses where a strict inequality is at
stake; metric sums stay floating with the margin reported.
"""

import random
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import backend
from .rationals import exact_threshold
from .seq_core import SeqWindow, tail_start
from .systems.base import SystemHandle

VIOLATION_CAP = 32


@dataclass
class PseudoOrbitVerdict:
    kind: str
    holds: bool
    witness: dict
    violations: list = field(default_factory=list)

    def to_json_dict(self) -> dict:
        witness = {
            k: (str(v) if isinstance(v, Fraction) else v) for k, v in self.witness.items()
        }
        return {
            "kind": self.kind,
            "holds": self.holds,
            "witness": witness,
            "violations": self.violations,
        }


def transition_gaps(x: SeqWindow) -> np.ndarray:
    """rho(T(x_i), x_{i+1}) for i = 0..L-2."""
    sys_ = x.system
    pts = x.points
    return np.array(
        [sys_.metric(sys_.step(pts[i]), pts[i + 1]) for i in range(len(pts) - 1)],
        dtype=np.float64,
    )


def check_delta_po(x: SeqWindow, delta: float) -> PseudoOrbitVerdict:
    """Every single transition error < delta."""
    if delta <= 0:
        raise ValueError("delta must be positive")
    if len(x) < 2:
        raise ValueError("window too short")
    gaps = transition_gaps(x)
    bad = [int(i) for i in np.nonzero(~(gaps < delta))[0]]
    return PseudoOrbitVerdict(
        kind="delta_po",
        holds=not bad,
        witness={"delta": delta, "max_gap": float(gaps.max())},
        violations=bad[:VIOLATION_CAP],
    )


def check_delta_chain(x: SeqWindow, delta: float) -> PseudoOrbitVerdict:
    """Finite-sequence reading of check_delta_po (indices 0..n-2)."""
    v = check_delta_po(x, delta)
    v.kind = "delta_chain"
    return v


def check_delta_average(x: SeqWindow, delta: float, n_min: int) -> PseudoOrbitVerdict:
    """Windowed average errors: (1/n) sum of gaps over every window of length
    n >= n_min must stay < delta."""
    if delta <= 0:
        raise ValueError("delta must be positive")
    if n_min < 1:
        raise ValueError("n_min must be >= 1")
    if len(x) < n_min + 1:
        raise ValueError("window too short to test any (n, k)")
    gaps = transition_gaps(x)
    sums = backend.window_max_sums(gaps)
    n_top = len(gaps)
    worst = 0.0
    violations = []
    holds = True
    prefix = np.concatenate(([0.0], np.cumsum(gaps)))
    for n in range(n_min, n_top + 1):
        avg = sums[n] / n
        if avg > worst:
            worst = avg
        if not sums[n] < delta * n:
            holds = False
            if len(violations) < VIOLATION_CAP:
                window_sums = prefix[n:] - prefix[: n_top + 1 - n]
                for k in np.nonzero(~(window_sums < delta * n))[0]:
                    violations.append([int(n), int(k)])
                    if len(violations) >= VIOLATION_CAP:
                        break
    return PseudoOrbitVerdict(
        kind="delta_average",
        holds=holds,
        witness={"delta": delta, "N": n_min, "worst_window_average": float(worst)},
        violations=violations,
    )


def find_average_threshold(x: SeqWindow, delta: float):
    """Least power-of-two N <= L/2 making x a delta-average pseudo-orbit,
    or None when the scan exhausts.  The existence quantifier made explicit."""
    gaps = transition_gaps(x)
    sums = backend.window_max_sums(gaps)
    n_top = len(gaps)
    ok = np.ones(n_top + 1, dtype=bool)
    for n in range(1, n_top + 1):
        ok[n] = sums[n] < delta * n
    suffix_ok = np.ones(n_top + 2, dtype=bool)
    for n in range(n_top, 0, -1):
        suffix_ok[n] = ok[n] and suffix_ok[n + 1]
    n_cand = 1
    while n_cand <= len(x) // 2:
        if n_cand <= n_top and suffix_ok[n_cand]:
            return n_cand
        n_cand *= 2
    return None


@dataclass
class AsymptoticAverageReport:
    curve: np.ndarray  # curve[n-1] = average gap over the first n transitions
    tolerance: float
    tail_max: float
    holds: bool

    def to_json_dict(self, max_samples: int = 256) -> dict:
        n = len(self.curve)
        idx = np.unique(np.linspace(0, n - 1, min(max_samples, n)).astype(int))
        return {
            "tolerance": self.tolerance,
            "tail_max": self.tail_max,
            "holds": self.holds,
            "curve_downsampled": {
                "n": [int(i) + 1 for i in idx],
                "value": [float(self.curve[i]) for i in idx],
            },
        }


def check_asymptotic_average(x: SeqWindow, tolerance: float) -> AsymptoticAverageReport:
    """Decay curve g(n) of windowed-from-zero average errors; holds iff the
    tail max of g over [ceil(L/2), L-1] is < tolerance."""
    if len(x) < 16:
        raise ValueError("window too short (need L >= 16)")
    gaps = transition_gaps(x)
    curve = backend.running_averages(gaps)
    lo = tail_start(len(x))
    tail = float(curve[lo - 1 :].max())
    return AsymptoticAverageReport(
        curve=curve, tolerance=tolerance, tail_max=tail, holds=tail < tolerance
    )


def check_delta_partial(x: SeqWindow, delta: float) -> PseudoOrbitVerdict:
    """More than a (1-delta)-fraction of the r transitions have error < delta.

    The window is read as (x_0..x_r) with r = L-1; the fraction is compared
    strictly in exact rational arithmetic (see rationals.exact_threshold for
    how float thresholds are interpreted).
    """
    if delta <= 0:
        raise ValueError("delta must be positive")
    r = len(x) - 1
    if r < 1:
        raise ValueError("need at least two points (r >= 1)")
    gaps = transition_gaps(x)
    good = int((gaps < delta).sum())
    fraction = Fraction(good, r)
    holds = fraction > 1 - exact_threshold(delta)
    bad = [int(i) for i in np.nonzero(~(gaps < delta))[0]][:VIOLATION_CAP]
    return PseudoOrbitVerdict(
        kind="delta_partial",
        holds=bool(holds),
        witness={"delta": delta, "good_fraction": fraction, "r": r},
        violations=[] if holds else bad,
    )


@dataclass
class VagueOrbitReport:
    """One-neighborhood finite surrogate of the vague pseudo-orbit test."""

    good_fraction: Fraction
    good_count: int
    total_shifts: int
    radius: float
    depth: int
    note: str = "finite surrogate: single neighborhood (radius, depth), not all of them"

    def to_json_dict(self) -> dict:
        return {
            "good_fraction": str(self.good_fraction),
            "good_count": self.good_count,
            "total_shifts": self.total_shifts,
            "radius": self.radius,
            "depth": self.depth,
            "note": self.note,
        }


def check_vague_po(x: SeqWindow, radius: float, depth: int) -> VagueOrbitReport:
    """Fraction of shifts n whose depth-window sits within ``radius`` (in the
    product metric over the first ``depth`` coordinates) of some true orbit.

    Requires the system's nearest-orbit oracle.
    """
    if depth > len(x) // 2:
        raise ValueError("depth must be at most L/2")
    system = x.system
    if not system.has_nearest_orbit:
        system.nearest_orbit([], radius)  # raises UnsupportedSystemError
    total = len(x) - depth + 1
    good = 0
    memo = {}
    for n in range(total):
        window = x.points[n : n + depth]
        try:
            key = tuple(window)
        except TypeError:
            key = None
        if key is not None and key in memo:
            found = memo[key]
        else:
            found, _ = system.nearest_orbit(window, radius)
            if key is not None:
                memo[key] = found
        good += found
    return VagueOrbitReport(
        good_fraction=Fraction(good, total),
        good_count=good,
        total_shifts=total,
        radius=radius,
        depth=depth,
    )


@dataclass
class CorruptedOrbit:
    window: SeqWindow
    jumps: tuple
    seed: int
    jump_density: float

    def to_json_dict(self) -> dict:
        return {
            "seed": self.seed,
            "jump_density": self.jump_density,
            "jumps": list(self.jumps),
            "length": len(self.window),
        }


def corrupt_orbit(
    system: SystemHandle, x, length: int, jump_density: float, seed: int
) -> CorruptedOrbit:
    """Orbit of x with a Bernoulli(jump_density) subset of indices re-seeded
    at sampled points (the orbit continues from the new point).  Deterministic
    given the seed; the realized jump set is returned alongside."""
    if not 0 <= jump_density < 1:
        raise ValueError("jump_density must be in [0, 1)")
    rng = random.Random(seed)
    pts = [x]
    jumps = []
    for i in range(1, length):
        if rng.random() < jump_density:
            pts.append(system.sample(rng))
            jumps.append(i)
        else:
            pts.append(system.step(pts[-1]))
    return CorruptedOrbit(
        window=SeqWindow(system, pts),
        jumps=tuple(jumps),
        seed=seed,
        jump_density=jump_density,
    )
