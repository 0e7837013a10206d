"""Orbit segments, spaced specifications, and the tracing verifiers.

Both segment conventions are first-class: closed segments [a, b] for full
tracing, half-open [a, b) for partial tracing.  Conversion is explicit,
never implicit.  Density comparisons are exact rationals; the metric side is
floating with the minimal margin |rho - eps| reported.
"""

from dataclasses import dataclass
from fractions import Fraction

from .rationals import exact_threshold

CLOSED = "closed"
HALF_OPEN = "half_open"


@dataclass(frozen=True)
class Segment:
    """Orbit segment of ``base`` over [a, b] or [a, b)."""

    a: int
    b: int
    base: object
    convention: str = HALF_OPEN

    def __post_init__(self):
        if self.a < 0 or self.a >= self.b:
            raise ValueError("need 0 <= a < b")
        if self.convention not in (CLOSED, HALF_OPEN):
            raise ValueError(f"unknown convention {self.convention!r}")

    @property
    def length(self) -> int:
        return self.b - self.a + 1 if self.convention == CLOSED else self.b - self.a

    def indices(self) -> range:
        return range(self.a, self.b + 1 if self.convention == CLOSED else self.b)

    def reread(self, convention: str) -> "Segment":
        return Segment(self.a, self.b, self.base, convention)


class Specification:
    """Ordered orbit segments with spacing metadata.

    ``gap`` is either a constant int M or a mapping segment-length -> minimal
    gap (a gap function tabulated up to the largest length present; no
    extrapolation).  An optional required period constrains tracing points;
    generic tracers reject it.
    """

    def __init__(self, segments, gap, required_period=None):
        segments = tuple(segments)
        if not segments:
            raise ValueError("specification needs at least one segment")
        conventions = {s.convention for s in segments}
        if len(conventions) != 1:
            raise ValueError("mixed segment conventions")
        self.segments = segments
        self.gap = gap
        self.required_period = required_period

    @property
    def convention(self) -> str:
        return self.segments[0].convention

    def min_gap_for(self, length: int) -> int:
        if isinstance(self.gap, int):
            return self.gap
        try:
            return self.gap[length]
        except KeyError:
            raise ValueError(
                f"gap function not tabulated for segment length {length}"
            ) from None

    def to_json_list(self, system) -> list:
        return [
            {
                "a": s.a,
                "b": s.b,
                "base_point_id": system.point_id(s.base),
                "convention": s.convention,
            }
            for s in self.segments
        ]


def validate_spacing(spec: Specification):
    """Check a_1 < b_1 < a_2 < ... and the gap constraints.

    Returns (ok, first_violation_or_None); the violation is a dict naming the
    failing segment index and constraint.
    """
    segs = spec.segments
    prev_b = None
    for i, s in enumerate(segs):
        if prev_b is not None and s.a <= prev_b:
            return False, {"index": i + 1, "constraint": "ordering", "a": s.a, "prev_b": prev_b}
        prev_b = s.b
    for i in range(1, len(segs)):
        s = segs[i]
        need = spec.min_gap_for(s.length)
        have = s.a - segs[i - 1].b
        if have < need:
            return False, {
                "index": i + 1,
                "constraint": "gap",
                "gap": have,
                "required": need,
            }
    return True, None


@dataclass
class SegmentTrace:
    segment: Segment
    good_indices: tuple
    density: Fraction

    def good_runs(self) -> list:
        """Run-length encoding of the good set: list of [start, length]."""
        runs = []
        for i in self.good_indices:
            if runs and runs[-1][0] + runs[-1][1] == i:
                runs[-1][1] += 1
            else:
                runs.append([i, 1])
        return runs


@dataclass
class TraceReport:
    """Per-segment good sets with exact densities for a candidate point."""

    epsilon: float
    candidate_id: str
    segments: list  # of SegmentTrace
    passed: bool
    margin: float  # min |rho - eps| over all tested indices

    def to_json_dict(self) -> dict:
        return {
            "epsilon": self.epsilon,
            "candidate": self.candidate_id,
            "passed": self.passed,
            "margin": self.margin,
            "segments": [
                {
                    "a": st.segment.a,
                    "b": st.segment.b,
                    "density": str(st.density),
                    "good_runs": st.good_runs(),
                }
                for st in self.segments
            ],
        }


def _orbit_upto(system, point, top: int):
    """Orbit points of ``point`` for times 0..top inclusive."""
    return system.orbit(point, top + 1)


def check_full_tracing(system, spec: Specification, y, eps: float):
    """Exact tracing of a closed-convention specification:
    rho(T^j(x_i), T^j(y)) < eps for every i and a_i <= j <= b_i.

    Returns (ok, violations) with violations a list of (segment_index, j, rho).
    """
    if spec.convention != CLOSED:
        raise ValueError("full tracing is defined for the closed convention")
    top = max(s.b for s in spec.segments)
    y_orbit = _orbit_upto(system, y, top)
    violations = []
    for i, s in enumerate(spec.segments, start=1):
        base_orbit = _orbit_upto(system, s.base, s.b)
        for j in s.indices():
            rho = system.metric(base_orbit[j], y_orbit[j])
            if not rho < eps:
                violations.append((i, j, float(rho)))
    return not violations, violations


def check_partial_tracing_spec(system, spec: Specification, z, eps: float) -> TraceReport:
    """Partial tracing of a half-open specification: for each segment, the
    set of indices where T^n(z) is eps-close to T^n(x_i) must have density
    strictly greater than 1 - eps."""
    if spec.convention != HALF_OPEN:
        raise ValueError("partial tracing is defined for the half-open convention")
    top = max(s.b for s in spec.segments)
    z_orbit = _orbit_upto(system, z, top)
    eps_exact = exact_threshold(eps)
    margin = float("inf")
    seg_traces = []
    passed = True
    for s in spec.segments:
        base_orbit = _orbit_upto(system, s.base, s.b)
        good = []
        for n in s.indices():
            rho = system.metric(z_orbit[n], base_orbit[n])
            margin = min(margin, abs(rho - eps))
            if rho < eps:
                good.append(n)
        density = Fraction(len(good), s.length)
        if not density > 1 - eps_exact:
            passed = False
        seg_traces.append(SegmentTrace(segment=s, good_indices=tuple(good), density=density))
    return TraceReport(
        epsilon=eps,
        candidate_id=system.point_id(z),
        segments=seg_traces,
        passed=passed,
        margin=margin,
    )


def check_partial_tracing_sequence(x, z, eps: float) -> TraceReport:
    """Partial tracing of a whole window: the good set over 0..r (denominator
    r + 1) must have density strictly greater than 1 - eps."""
    system = x.system
    r = len(x) - 1
    z_orbit = _orbit_upto(system, z, r)
    margin = float("inf")
    good = []
    for i in range(r + 1):
        rho = system.metric(z_orbit[i], x.points[i])
        margin = min(margin, abs(rho - eps))
        if rho < eps:
            good.append(i)
    density = Fraction(len(good), r + 1)
    passed = density > 1 - exact_threshold(eps)
    pseudo_segment = Segment(0, r + 1, z, HALF_OPEN)  # [0, r] read half-open
    return TraceReport(
        epsilon=eps,
        candidate_id=system.point_id(z),
        segments=[SegmentTrace(pseudo_segment, tuple(good), density)],
        passed=bool(passed),
        margin=margin,
    )
