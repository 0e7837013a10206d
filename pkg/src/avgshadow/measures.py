"""Empirical cylinder measures on symbolic systems and a constructive
demonstration that periodic-orbit (hence ergodic) measures come arbitrarily
close to finite mixtures of them at marginal level.

The comparison metric is depth-weighted total variation on cylinder
marginals: a strictly weaker surrogate of the weak-* topology, which every
output states.
"""

from dataclasses import dataclass
from fractions import Fraction

from .rationals import exact_threshold
from .systems.shift import ShiftPoint


def _word_text(w: bytes) -> str:
    return "".join(str(s) for s in w)


@dataclass
class CylinderMeasure:
    """Weights on words of length 1..depth, exact rationals.

    For a true invariant measure the weights are Kolmogorov-consistent:
    weight(w) = sum_s weight(ws).  Windowed empirical estimates satisfy this
    only up to a boundary correction, exposed by consistency_defect().
    """

    depth: int
    alphabet: int
    weights: dict  # bytes -> Fraction

    def weight(self, word: bytes) -> Fraction:
        return self.weights.get(bytes(word), Fraction(0))

    def level_sum(self, d: int) -> Fraction:
        return sum(
            (w for k, w in self.weights.items() if len(k) == d), start=Fraction(0)
        )

    def consistency_defect(self) -> Fraction:
        worst = Fraction(0)
        for word, w in self.weights.items():
            if len(word) >= self.depth:
                continue
            children = sum(
                (self.weight(word + bytes([s])) for s in range(self.alphabet)),
                start=Fraction(0),
            )
            worst = max(worst, abs(w - children))
        return worst

    def to_json_dict(self) -> dict:
        return {
            "depth": self.depth,
            "alphabet": self.alphabet,
            "weights": {
                _word_text(k): str(v)
                for k, v in sorted(self.weights.items(), key=lambda kv: (len(kv[0]), kv[0]))
            },
            "note": "depth-limited marginals; weak-* statements are surrogate only",
        }


def empirical_measure(point: ShiftPoint, horizon: int, depth: int) -> CylinderMeasure:
    """Sliding-window word frequencies over the first ``horizon`` symbols.

    weight(w) counts positions j in [0, horizon - |w|] and divides by
    horizon - |w| + 1, so each level sums to one exactly.
    """
    if depth < 1 or horizon < depth:
        raise ValueError("need horizon >= depth >= 1")
    symbols = point.prefix(horizon)
    weights = {}
    for d in range(1, depth + 1):
        denom = horizon - d + 1
        counts = {}
        for j in range(denom):
            w = symbols[j : j + d]
            counts[w] = counts.get(w, 0) + 1
        for w, c in counts.items():
            weights[w] = Fraction(c, denom)
    return CylinderMeasure(depth=depth, alphabet=point.alphabet, weights=weights)


def periodic_orbit_measure(period_word, depth: int, alphabet: int = 2) -> CylinderMeasure:
    """Exact cylinder marginals of the unique invariant measure carried by a
    periodic orbit: cyclic word frequencies.  Always ergodic, exactly
    Kolmogorov-consistent."""
    word = bytes(period_word)
    if not word:
        raise ValueError("period word must be nonempty")
    p = len(word)
    doubled = word * (1 + -(-depth // p))
    weights = {}
    for d in range(1, depth + 1):
        counts = {}
        for j in range(p):
            w = doubled[j : j + d]
            counts[w] = counts.get(w, 0) + 1
        for w, c in counts.items():
            weights[w] = Fraction(c, p)
    return CylinderMeasure(depth=depth, alphabet=alphabet, weights=weights)


def mixture_measure(components, depth: int, alphabet: int = 2) -> CylinderMeasure:
    """Convex combination of periodic-orbit measures.

    ``components`` is a list of (weight, period_word) with rational weights
    summing to one.
    """
    components = [(Fraction(lam), bytes(w)) for lam, w in components]
    total = sum((lam for lam, _ in components), start=Fraction(0))
    if total != 1:
        raise ValueError(f"component weights must sum to 1, got {total}")
    weights = {}
    for lam, word in components:
        part = periodic_orbit_measure(word, depth, alphabet)
        for w, v in part.weights.items():
            weights[w] = weights.get(w, Fraction(0)) + lam * v
    return CylinderMeasure(depth=depth, alphabet=alphabet, weights=weights)


def measure_distance(mu: CylinderMeasure, nu: CylinderMeasure) -> Fraction:
    """Depth-weighted total variation: sum_d 2^-d * (1/2) * sum_|w|=d |mu - nu|.

    A metric on depth-D marginals with values in [0, 1]; exact rationals.
    """
    if mu.depth != nu.depth:
        raise ValueError("measures have different depths")
    total = Fraction(0)
    for d in range(1, mu.depth + 1):
        words = {w for w in mu.weights if len(w) == d} | {
            w for w in nu.weights if len(w) == d
        }
        level = sum((abs(mu.weight(w) - nu.weight(w)) for w in words), start=Fraction(0))
        total += Fraction(1, 2**d) * level / 2
    return total


@dataclass
class ErgodicApproxResult:
    point: ShiftPoint
    period_word: bytes
    scale: int
    distance: Fraction
    epsilon: float
    depth: int

    def to_json_dict(self) -> dict:
        return {
            "point": self.point.to_text(),
            "period_word": _word_text(self.period_word),
            "scale": self.scale,
            "distance": str(self.distance),
            "distance_float": float(self.distance),
            "epsilon": self.epsilon,
            "depth": self.depth,
        }


def ergodic_approx(
    components, eps: float, depth: int, s_max: int = 1000, alphabet: int = 2
) -> ErgodicApproxResult:
    """A single periodic point whose orbit measure approximates a finite
    mixture of periodic-orbit measures within ``eps`` at marginal depth.

    The candidate at scale s repeats each component word in blocks of length
    proportional to its weight; the least feasible s <= s_max is returned.
    The output's orbit measure is ergodic (a periodic-orbit measure).
    """
    components = [(Fraction(lam), bytes(w)) for lam, w in components]
    if not components:
        raise ValueError("need at least one component")
    target = mixture_measure(components, depth, alphabet)
    # least common scale making every block a whole number of word repeats
    base = 1
    for lam, word in components:
        per_rep = lam / len(word)
        base = base * per_rep.denominator // _gcd(base, per_rep.denominator)
    for s in range(1, s_max + 1):
        word = b"".join(
            w * int(lam * base * s / len(w)) for lam, w in components
        )
        candidate = periodic_orbit_measure(word, depth, alphabet)
        dist = measure_distance(candidate, target)
        if dist < exact_threshold(eps):
            return ErgodicApproxResult(
                point=ShiftPoint(b"", word, alphabet),
                period_word=word,
                scale=s,
                distance=dist,
                epsilon=eps,
                depth=depth,
            )
    raise ValueError(f"no scale s <= {s_max} reaches distance < {eps}")


def _gcd(a: int, b: int) -> int:
    while b:
        a, b = b, a % b
    return a
