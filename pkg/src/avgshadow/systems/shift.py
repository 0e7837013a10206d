"""Symbolic systems: eventually periodic points, the full shift, and the
stair subshift {0^n 1^inf} U {0^inf}."""

import re

import numpy as np

from .base import SystemHandle, window_product_metric


def _gcd(a, b):
    while b:
        a, b = b, a % b
    return a


def _primitive_period(per: bytes) -> bytes:
    n = len(per)
    for d in range(1, n + 1):
        if n % d == 0 and per == per[:d] * (n // d):
            return per[:d]
    return per


class ShiftPoint:
    """An eventually periodic symbol sequence: preperiod word + period word.

    The representation is canonical (primitive period, minimal preperiod), so
    equality, hashing and the metric are exact.  Symbols are bytes values,
    alphabet {0, ..., q-1} with q <= 256.
    """

    __slots__ = ("pre", "per", "alphabet")

    def __init__(self, pre, per, alphabet=2):
        pre = bytes(pre)
        per = bytes(per)
        if not per:
            raise ValueError("period word must be nonempty")
        if alphabet < 2 or alphabet > 256:
            raise ValueError("alphabet size must be in [2, 256]")
        if any(s >= alphabet for s in pre) or any(s >= alphabet for s in per):
            raise ValueError("symbol outside alphabet")
        per = _primitive_period(per)
        # absorb preperiod tail into the cycle: ...a(bca with a==last) rotates
        while pre and pre[-1] == per[-1]:
            pre = pre[:-1]
            per = per[-1:] + per[:-1]
        self.pre = pre
        self.per = per
        self.alphabet = alphabet

    def __eq__(self, other):
        return (
            isinstance(other, ShiftPoint)
            and self.pre == other.pre
            and self.per == other.per
            and self.alphabet == other.alphabet
        )

    def __hash__(self):
        return hash((self.pre, self.per, self.alphabet))

    def __repr__(self):
        return f"ShiftPoint({self.to_text()!r}, q={self.alphabet})"

    def symbol(self, i: int) -> int:
        if i < len(self.pre):
            return self.pre[i]
        return self.per[(i - len(self.pre)) % len(self.per)]

    def prefix(self, n: int) -> bytes:
        """The first n symbols as bytes."""
        if n <= len(self.pre):
            return self.pre[:n]
        need = n - len(self.pre)
        reps = -(-need // len(self.per))
        return self.pre + (self.per * reps)[:need]

    def shift(self, j: int = 1) -> "ShiftPoint":
        """Drop the first j symbols."""
        if j < 0:
            raise ValueError("shift amount must be >= 0")
        if j == 0:
            return self
        if j < len(self.pre):
            return ShiftPoint(self.pre[j:], self.per, self.alphabet)
        k = (j - len(self.pre)) % len(self.per)
        return ShiftPoint(b"", self.per[k:] + self.per[:k], self.alphabet)

    def prepend(self, word) -> "ShiftPoint":
        return ShiftPoint(bytes(word) + self.pre, self.per, self.alphabet)

    def first_difference(self, other: "ShiftPoint"):
        """Index of the first disagreeing coordinate, or None when equal.

        Comparing up to max preperiod + lcm of the (primitive) periods is
        exact: agreement there forces agreement everywhere.
        """
        p = len(self.per) * len(other.per) // _gcd(len(self.per), len(other.per))
        bound = max(len(self.pre), len(other.pre)) + p
        a = self.prefix(bound)
        b = other.prefix(bound)
        if a == b:
            return None
        neq = np.frombuffer(a, dtype=np.uint8) != np.frombuffer(b, dtype=np.uint8)
        return int(np.argmax(neq))

    def to_text(self) -> str:
        """Canonical text form, e.g. '0^3(1)' for 0001111... (q <= 10 only)."""
        if self.alphabet > 10:
            raise ValueError("text form defined for alphabets up to 10 symbols")

        def encode(word):
            out = []
            i = 0
            while i < len(word):
                j = i
                while j < len(word) and word[j] == word[i]:
                    j += 1
                run = j - i
                out.append(f"{word[i]}^{run}" if run > 1 else f"{word[i]}")
                i = j
            return " ".join(out)

        head = encode(self.pre)
        return f"{head}({encode(self.per)})"

    @classmethod
    def from_text(cls, text: str, alphabet=2) -> "ShiftPoint":
        m = re.fullmatch(r"\s*([^()]*)\(([^()]+)\)\s*", text)
        if not m:
            raise ValueError(f"malformed point text: {text!r}")

        def decode(chunk):
            word = []
            for tok in chunk.split():
                if "^" in tok:
                    sym, run = tok.split("^")
                    word.extend([int(sym)] * int(run))
                else:
                    word.append(int(tok))
            return bytes(word)

        return cls(decode(m.group(1)), decode(m.group(2)), alphabet)


def shift_metric(x: ShiftPoint, y: ShiftPoint) -> float:
    """2^-j at the first disagreement coordinate j; 0 for equal sequences."""
    if x.alphabet != y.alphabet:
        raise ValueError("points over different alphabets")
    j = x.first_difference(y)
    if j is None:
        return 0.0
    if j > 1074:  # below float resolution
        return 0.0
    return 2.0 ** (-j)


def symbol_depth(eps: float) -> int:
    """Least L with 2^-L <= eps (agreement depth that certifies eps-closeness)."""
    if not 0 < eps:
        raise ValueError("eps must be positive")
    depth = 0
    while 2.0 ** (-depth) > eps:
        depth += 1
    return depth


class FullShift(SystemHandle):
    """The full shift on eventually periodic points over a q-symbol alphabet.

    This is the tracer-equipped workhorse: the specification and partial
    shadowing moduli are computed from symbol depth, and all tracing is
    constructive.
    """

    has_nearest_orbit = True
    has_tracer = True
    has_preimage = True
    has_perturb = True

    def __init__(self, alphabet=2):
        if alphabet < 2:
            raise ValueError("alphabet size must be >= 2")
        self.alphabet = alphabet
        self.name = f"full_shift(q={alphabet})"
        self.diameter = 1.0

    def point(self, pre, per=b"\x00") -> ShiftPoint:
        return ShiftPoint(pre, per, self.alphabet)

    def step(self, p: ShiftPoint) -> ShiftPoint:
        return p.shift(1)

    def metric(self, p, q) -> float:
        return shift_metric(p, q)

    def sample(self, rng) -> ShiftPoint:
        pre = bytes(rng.randrange(self.alphabet) for _ in range(rng.randint(0, 6)))
        per = bytes(rng.randrange(self.alphabet) for _ in range(rng.randint(1, 6)))
        return ShiftPoint(pre, per, self.alphabet)

    def contains(self, p) -> bool:
        return isinstance(p, ShiftPoint) and p.alphabet == self.alphabet

    def point_id(self, p) -> str:
        return p.to_text() if self.alphabet <= 10 else repr((p.pre, p.per))

    def preimage(self, p: ShiftPoint, symbol=0) -> ShiftPoint:
        return p.prepend([symbol])

    def delay(self, p: ShiftPoint, n: int, symbol=0) -> ShiftPoint:
        """A point y with step^n(y) = p (prepends n filler symbols)."""
        return p.prepend([symbol] * n)

    def perturb(self, p: ShiftPoint, radius, rng) -> ShiftPoint:
        depth = symbol_depth(radius) + 1
        tail = bytes(rng.randrange(self.alphabet) for _ in range(4))
        per = bytes(rng.randrange(self.alphabet) for _ in range(rng.randint(1, 4)))
        return ShiftPoint(p.prefix(depth) + tail, per, self.alphabet)

    def nearest_orbit(self, points, radius):
        """Exact oracle: the diagonal word (first symbols of the window,
        extended by the tail of the last entry) is within ``radius`` iff any
        orbit is."""
        diag = bytes(p.symbol(0) for p in points[:-1])
        cand = points[-1].prepend(diag)
        orbit_window = [cand.shift(j) for j in range(len(points))]
        if window_product_metric(self, points, orbit_window) < radius:
            return True, cand
        return False, None

    # -- constructive tracing -------------------------------------------------

    def spec_gap_modulus(self, eps: float) -> int:
        """Gap M such that M-spaced specifications are eps-partially traceable."""
        return max(1, symbol_depth(eps))

    def partial_shadowing_modulus(self, eps: float) -> float:
        """delta such that delta-partial pseudo-orbits are eps-partially traced
        by the diagonal construction of :meth:`partial_trace`."""
        m = max(1, symbol_depth(eps))
        return min(2.0 ** (-m), eps / (16.0 * m))

    def partial_trace(self, points, eps: float) -> ShiftPoint:
        """Diagonal tracer: z reads off the leading symbols of the window.

        If the window is a delta-partial pseudo-orbit at
        delta = partial_shadowing_modulus(eps), z eps-partially traces it:
        around each good stretch of transitions the diagonal agrees with the
        window entry to depth > symbol_depth(eps).
        """
        if not points:
            raise ValueError("empty window")
        diag = bytes(p.symbol(0) for p in points[:-1])
        return points[-1].prepend(diag)

    def descriptor(self):
        return {"kind": "full_shift", "alphabet": self.alphabet, "diameter": self.diameter}


class StairSubshift(SystemHandle):
    """Subshift on {0^n 1^inf : n >= 0} plus the fixed point 0^inf.

    The family is countable; the exact-orbit enumerator truncates preperiods
    at ``max_preperiod``.
    """

    has_nearest_orbit = True
    has_exact_orbits = True

    def __init__(self, max_preperiod=64):
        self.max_preperiod = max_preperiod
        self.name = f"stair_subshift(n<={max_preperiod})"
        self.diameter = 1.0
        self.alphabet = 2

    def point(self, n=None) -> ShiftPoint:
        """0^n 1^inf, or the fixed point 0^inf when n is None."""
        if n is None:
            return ShiftPoint(b"", b"\x00")
        if n < 0:
            raise ValueError("preperiod length must be >= 0")
        return ShiftPoint(b"\x00" * n, b"\x01")

    def zero_point(self) -> ShiftPoint:
        return self.point(None)

    def contains(self, p) -> bool:
        if not isinstance(p, ShiftPoint) or p.alphabet != 2:
            return False
        if p.per == b"\x00" and not p.pre:
            return True
        return p.per == b"\x01" and all(s == 0 for s in p.pre)

    def _require_member(self, p):
        if not self.contains(p):
            raise ValueError(f"point outside the stair subshift: {p!r}")

    def step(self, p: ShiftPoint) -> ShiftPoint:
        self._require_member(p)
        return p.shift(1)

    def metric(self, p, q) -> float:
        return shift_metric(p, q)

    def sample(self, rng) -> ShiftPoint:
        if rng.random() < 1.0 / (self.max_preperiod + 2):
            return self.zero_point()
        return self.point(rng.randint(0, self.max_preperiod))

    def point_id(self, p) -> str:
        return p.to_text()

    def exact_orbit_points(self):
        pts = [self.zero_point()]
        pts.extend(self.point(n) for n in range(self.max_preperiod + 1))
        return pts

    def nearest_orbit(self, points, radius):
        for cand in self.exact_orbit_points():
            window = [cand.shift(j) for j in range(len(points))]
            if window_product_metric(self, points, window) < radius:
                return True, cand
        return False, None

    def descriptor(self):
        return {
            "kind": "stair_subshift",
            "max_preperiod": self.max_preperiod,
            "diameter": self.diameter,
        }


def full_shift(alphabet=2) -> FullShift:
    return FullShift(alphabet)


def stair_subshift(max_preperiod=64) -> StairSubshift:
    return StairSubshift(max_preperiod)
