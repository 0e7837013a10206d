"""Constructive tracing algorithms: average-to-partial window conversion,
the full-shift specification tracer, the average-shadowing pipeline, stream
tracing of long specifications, chain construction through partial tracing,
and product-system tracing."""

import math
import random
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import backend
from .rationals import exact_threshold
from .pseudo_orbits import (
    check_delta_chain,
    check_delta_partial,
    find_average_threshold,
    transition_gaps,
)
from .seq_core import BesicovitchEstimate, SeqWindow
from .specification import (
    HALF_OPEN,
    Segment,
    Specification,
    check_partial_tracing_sequence,
    check_partial_tracing_spec,
    validate_spacing,
)
from .systems.base import UnsupportedSystemError, estimate_continuity_modulus
from .systems.shift import FullShift, ShiftPoint, symbol_depth


class TracerError(RuntimeError):
    """A constructive tracer could not meet its guarantee."""


def _require_tracer(system):
    if not getattr(system, "has_tracer", False):
        raise UnsupportedSystemError(f"{system.name}: no constructive tracer")


# ---------------------------------------------------------------------------
# average -> partial window conversion
# ---------------------------------------------------------------------------


def avg_to_partial_threshold(x: SeqWindow, delta: float):
    """From a delta^2-average pseudo-orbit, a window length N such that every
    sub-window (x_k..x_{k+n}) with n >= N is a delta-partial pseudo-orbit.

    The counting argument guarantees N equals the delta^2-average threshold;
    this routine verifies that directly by an exhaustive scan over all (n, k)
    and returns the scan as the certificate.
    """
    threshold = find_average_threshold(x, delta * delta)
    if threshold is None:
        raise ValueError(
            f"input is not a {delta * delta:g}-average pseudo-orbit at any N <= L/2"
        )
    gaps = transition_gaps(x)
    bad = (~(gaps < delta)).astype(np.float64)
    max_bad = backend.window_max_sums(bad)
    frac = exact_threshold(delta)
    num, den = frac.numerator, frac.denominator
    windows_checked = 0
    for n in range(threshold, len(gaps) + 1):
        windows_checked += len(gaps) - n + 1
        # strict rational comparison: worst bad count must satisfy bad/n < delta
        if not int(max_bad[n]) * den < num * n:
            raise ValueError(
                f"window scan found a delta-partial violation at n={n} "
                f"(bad count {int(max_bad[n])} of {n})"
            )
    ns = np.arange(threshold, len(gaps) + 1)
    worst = float((max_bad[threshold:] / ns).max()) if len(ns) else 0.0
    certificate = {
        "N": threshold,
        "delta": delta,
        "windows_checked": windows_checked,
        "worst_bad_fraction": worst,
    }
    return threshold, certificate


# ---------------------------------------------------------------------------
# full-shift specification tracer
# ---------------------------------------------------------------------------


def shift_trace_specification(
    system: FullShift, spec: Specification, eps: float, period=None
) -> ShiftPoint:
    """Constructive tracer on the full shift.

    Copies the symbols of each base point on [a_i, b_i + L) where
    L = symbol_depth(eps), fills 0 elsewhere, and optionally wraps the first
    ``period`` symbols into an exactly periodic point.  The output fully
    traces the specification: every traced index is eps-close strictly.
    """
    _require_tracer(system)
    if spec.convention != HALF_OPEN:
        raise ValueError("the tracer expects half-open segments")
    ok, violation = validate_spacing(spec)
    if not ok:
        raise ValueError(f"invalid spacing: {violation}")
    depth = symbol_depth(eps)
    segs = spec.segments
    for s in segs:
        if not isinstance(s.base, ShiftPoint) or s.base.alphabet != system.alphabet:
            raise ValueError("base points must belong to this full shift")
    for prev, cur in zip(segs, segs[1:]):
        if cur.a - prev.b < depth:
            raise ValueError(
                f"gap {cur.a - prev.b} too small for eps={eps} (needs >= {depth})"
            )
    top = segs[-1].b + depth
    buf = bytearray(top)
    for s in segs:
        buf[s.a : s.b + depth] = s.base.prefix(s.b + depth)[s.a : s.b + depth]
    if period is None and spec.required_period is not None:
        period = spec.required_period
    if period is not None:
        if period < top:
            raise ValueError(f"period {period} shorter than copy range {top}")
        word = bytes(buf) + b"\x00" * (period - top)
        return ShiftPoint(b"", word, system.alphabet)
    return ShiftPoint(bytes(buf), b"\x00", system.alphabet)


# ---------------------------------------------------------------------------
# the average-shadowing pipeline
# ---------------------------------------------------------------------------


@dataclass
class BlockEntry:
    index: int
    start: int
    end: int  # half-open block [start, end)
    distance_sum: float
    average: float
    bound: float
    within_bound: bool
    tracked_by_final: int  # |A|: indices where z follows the block tracer
    tracked_by_block: int  # |B|: indices where the block tracer follows x
    jointly_tracked_floor: int  # required |A ∩ B| >= r(1 - eps/4)

    def to_json_dict(self):
        return {
            "k": self.index,
            "start": self.start,
            "end": self.end,
            "sum": self.distance_sum,
            "average": self.average,
            "bound": self.bound,
            "within_bound": self.within_bound,
            "A_count": self.tracked_by_final,
            "B_count": self.tracked_by_block,
            "joint_floor": self.jointly_tracked_floor,
        }


@dataclass
class PipelineResult:
    epsilon: float
    delta: float
    delta1: float
    gap: int  # M
    n1: int
    block_core: int  # r
    tracing_point: ShiftPoint
    blocks: list
    final_estimate: BesicovitchEstimate
    all_blocks_within_bound: bool

    def to_json_dict(self):
        return {
            "eps": self.epsilon,
            "delta": self.delta,
            "delta1": self.delta1,
            "M": self.gap,
            "N1": self.n1,
            "r": self.block_core,
            "blocks": [b.to_json_dict() for b in self.blocks],
            "final_estimate": self.final_estimate.estimate,
            "all_blocks_within_bound": self.all_blocks_within_bound,
        }


def _minimal_block_core(gap: int, eps: float, at_least: int) -> int:
    # smallest r >= at_least with (M + r*eps/2)/(M + r) < 3*eps/4; the left
    # side is strictly decreasing in r, so the first hit is minimal
    r = max(at_least, 1)
    while not (gap + r * eps / 2.0) / (gap + r) < 0.75 * eps:
        r += 1
        if r > 10_000_000:
            raise ValueError("no block length satisfies the bound (eps too small?)")
    return r


def average_shadowing_pipeline(system, x: SeqWindow, eps: float) -> PipelineResult:
    """Shadow a delta-average pseudo-orbit window in the Besicovitch sense.

    Executes the constructive argument end to end: (1) specification gap M
    for eps/8-tracing; (2) partial-shadowing modulus delta1 for eps/8;
    (3) window bound N1 converting the average property to partial windows;
    (4) block length r >= N1 with (M + r*eps/2)/(M + r) < 3*eps/4 and blocks
    [j(M+r), j(M+r)+r); (5) trace each block, assemble the M-spaced
    specification of the block tracers, trace it to get z; (6) verify the
    per-block bound and return z with the Besicovitch estimate and ledger.
    Incomplete trailing blocks are excluded from the ledger but included in
    the final estimate.
    """
    _require_tracer(system)
    if eps <= 0:
        raise ValueError("eps must be positive")
    horizon = len(x)
    gap = system.spec_gap_modulus(eps / 8.0)
    delta1 = system.partial_shadowing_modulus(eps / 8.0)
    delta = delta1 * delta1 / 2.0
    if find_average_threshold(x, delta) is None:
        raise ValueError(
            f"input fails the {delta:g}-average pseudo-orbit condition; no tracing claimed"
        )
    n1, _cert = avg_to_partial_threshold(x, delta1)
    r = _minimal_block_core(gap, eps, n1)
    block_len = gap + r
    if block_len > horizon:
        raise ValueError(
            f"horizon {horizon} shorter than one block (M + r = {block_len})"
        )
    n_blocks = horizon // block_len

    segments = []
    block_tracers = []
    for j in range(n_blocks):
        a_j = j * block_len
        b_j = a_j + r
        z_j = system.partial_trace(x.points[a_j : a_j + r + 1], eps / 8.0)
        block_tracers.append(z_j)
        segments.append(Segment(a_j, b_j, system.delay(z_j, a_j), HALF_OPEN))
    spec = Specification(segments, gap=gap)
    z = shift_trace_specification(system, spec, eps / 8.0)

    d = np.array(
        [system.metric(z.shift(n), x.points[n]) for n in range(horizon)],
        dtype=np.float64,
    )
    bound = 0.75 * eps
    blocks = []
    all_ok = True
    for j in range(n_blocks):
        a_j = j * block_len
        b_j = a_j + r
        s = float(d[a_j : a_j + block_len].sum())
        avg = s / block_len
        ok = avg < bound
        all_ok = all_ok and ok
        z_j = block_tracers[j]
        a_count = 0
        b_count = 0
        for n in range(a_j, b_j):
            if system.metric(z.shift(n), z_j.shift(n - a_j)) < eps / 8.0:
                a_count += 1
            if system.metric(z_j.shift(n - a_j), x.points[n]) < eps / 8.0:
                b_count += 1
        blocks.append(
            BlockEntry(
                index=j,
                start=a_j,
                end=a_j + block_len,
                distance_sum=s,
                average=avg,
                bound=bound,
                within_bound=ok,
                tracked_by_final=a_count,
                tracked_by_block=b_count,
                jointly_tracked_floor=math.ceil(r * (1.0 - eps / 4.0)),
            )
        )
    return PipelineResult(
        epsilon=eps,
        delta=delta,
        delta1=delta1,
        gap=gap,
        n1=n1,
        block_core=r,
        tracing_point=z,
        blocks=blocks,
        final_estimate=BesicovitchEstimate.from_distances(d),
        all_blocks_within_bound=all_ok,
    )


# ---------------------------------------------------------------------------
# stream tracing (long/infinite specifications, truncated diagonally)
# ---------------------------------------------------------------------------


@dataclass
class StreamStage:
    index: int
    chosen_good_set: tuple
    pool_size: int


@dataclass
class StreamTraceResult:
    tracing_point: ShiftPoint
    prefix_reports: list
    stages: list
    epsilon: float

    @property
    def all_prefixes_traced(self):
        return all(rep.passed for rep in self.prefix_reports)


def trace_specification_stream(system, segment_stream, eps: float, horizon: int):
    """Trace the first ``horizon`` segments of an M-spaced stream.

    For r = 1..horizon a tracer z_r handles the first r segments at eps/2.
    The candidate pool is then filtered stage by stage: at stage i only
    finitely many good sets on segment i are possible, so the largest group
    sharing one exact set is kept.  Returns the last tracer together with the
    verified per-prefix reports and the stabilized good-set pattern.
    """
    _require_tracer(system)
    gap = system.spec_gap_modulus(eps / 2.0)
    segments = []
    for idx, seg in enumerate(segment_stream, start=1):
        if seg.convention != HALF_OPEN:
            raise ValueError(f"segment {idx}: expected half-open convention")
        if segments:
            have = seg.a - segments[-1].b
            if have < gap:
                raise ValueError(
                    f"spacing violation at segment {idx}: gap {have} < required {gap}"
                )
        segments.append(seg)
        if len(segments) == horizon:
            break
    if len(segments) < horizon:
        raise ValueError(f"stream ended after {len(segments)} segments, needed {horizon}")

    candidates = []
    for r in range(1, horizon + 1):
        spec_r = Specification(segments[:r], gap=gap)
        candidates.append((r, shift_trace_specification(system, spec_r, eps / 2.0)))

    eps_exact = exact_threshold(eps)
    stages = []
    pool = candidates
    for i in range(1, horizon + 1):
        seg = segments[i - 1]
        pool = [(r, z) for r, z in pool if r >= i]
        groups = {}
        for r, z in pool:
            good = []
            for n in seg.indices():
                if system.metric(z.shift(n), seg.base.shift(n)) < eps:
                    good.append(n)
            if not Fraction(len(good), seg.length) > 1 - eps_exact:
                continue
            groups.setdefault(tuple(good), []).append((r, z))
        if not groups:
            raise TracerError(f"no candidate traces segment {i} at eps={eps}")
        best = max(groups.items(), key=lambda kv: (len(kv[1]), tuple(-g for g in kv[0])))
        stages.append(StreamStage(index=i, chosen_good_set=best[0], pool_size=len(best[1])))
        pool = best[1]

    z_final = candidates[-1][1]
    reports = [
        check_partial_tracing_spec(system, Specification(segments[:r], gap=gap), z_final, eps)
        for r in range(1, horizon + 1)
    ]
    result = StreamTraceResult(
        tracing_point=z_final, prefix_reports=reports, stages=stages, epsilon=eps
    )
    if not result.all_prefixes_traced:
        raise TracerError("final tracer fails a prefix verification")
    return result


# ---------------------------------------------------------------------------
# chains from partial tracing
# ---------------------------------------------------------------------------


@dataclass
class ChainResult:
    chain: SeqWindow
    delta: float
    gamma: float
    beta: float
    half_length: int  # l: the chain has 2l points
    switch_in: int  # i: first index following the traced point
    switch_out: int  # j: last index following the traced point
    case: int
    verdict: object

    def to_json_dict(self):
        return {
            "delta": self.delta,
            "gamma": self.gamma,
            "beta": self.beta,
            "l": self.half_length,
            "i": self.switch_in,
            "j": self.switch_out,
            "case": self.case,
            "holds": self.verdict.holds,
        }


def chain_via_partial_tracing(system, x, y, delta: float, rng=None) -> ChainResult:
    """A verified delta-chain from x to y built through one traced splice.

    Needs a preimage oracle and a partial tracer.  The spliced 2l-point
    sequence (orbit of x, then a preimage orbit ending at y) has a single bad
    transition, so it is a beta-partial pseudo-orbit; its tracer supplies the
    middle of the chain, entered at the first gamma-good index and left at
    the last one.  The four endpoint cases only change which transitions rely
    on the continuity modulus.  The returned chain always passes
    check_delta_chain at delta; failure raises, never returns silently.
    """
    _require_tracer(system)
    if not system.has_preimage:
        raise UnsupportedSystemError(f"{system.name}: no preimage oracle")
    if rng is None:
        rng = random.Random(0)
    gamma = estimate_continuity_modulus(system, delta, rng=rng)
    beta = system.partial_shadowing_modulus(gamma)
    if not beta < gamma:
        raise TracerError("partial-shadowing modulus is not below the continuity modulus")
    half = max(2, int(1.0 / beta) // 2 + 1)
    while not beta > 1.0 / (2 * half - 1):
        half += 1

    y0 = system.delay(y, half - 1)
    seq = system.orbit(x, half) + system.orbit(y0, half)
    z = system.partial_trace(seq, gamma)
    z_orbit = system.orbit(z, 2 * half)
    good = [i for i in range(2 * half) if system.metric(z_orbit[i], seq[i]) < gamma]
    first_half = [i for i in good if i < half]
    second_half = [i for i in good if i >= half]
    if 4 * len(first_half) < 3 * half or 4 * len(second_half) < 3 * half:
        raise TracerError(
            f"insufficient tracing density: halves {len(first_half)}/{half}, "
            f"{len(second_half)}/{half}"
        )
    inner = [i for i in first_half if i >= 1]
    i_switch = min(inner) if inner else 0
    outer = [j for j in second_half if j <= 2 * half - 2]
    j_switch = max(outer) if outer else 2 * half - 1
    case = {(False, False): 1, (True, False): 2, (False, True): 3, (True, True): 4}[
        (i_switch == 0, j_switch == 2 * half - 1)
    ]

    x_orbit = system.orbit(x, half)
    y0_orbit = system.orbit(y0, half)
    chain = [x]
    for p in range(1, 2 * half - 1):
        if p < i_switch:
            chain.append(x_orbit[p])
        elif p < j_switch:
            chain.append(z_orbit[p])
        else:
            chain.append(y0_orbit[p - half])
    chain.append(y0_orbit[half - 1])  # equals y exactly
    window = SeqWindow(system, chain)
    verdict = check_delta_chain(window, delta)
    if not verdict.holds:
        raise TracerError(f"constructed chain fails at delta={delta}: {verdict.violations}")
    return ChainResult(
        chain=window,
        delta=delta,
        gamma=gamma,
        beta=beta,
        half_length=half,
        switch_in=i_switch,
        switch_out=j_switch,
        case=case,
        verdict=verdict,
    )


# ---------------------------------------------------------------------------
# mixing witnesses on the full shift
# ---------------------------------------------------------------------------


@dataclass
class MixingWitness:
    source_word: bytes
    target_word: bytes
    steps: int
    point: object
    available: bool
    reason: str = ""


def mixing_witness(system: FullShift, u, v, n: int) -> MixingWitness:
    """A point of the cylinder [u] whose n-step image lies in [v].

    Constructed as u 0^(n-|u|) v 0^inf; for n >= |u| this always succeeds on
    the full shift.  For n < |u| the construction is unavailable (no search
    is attempted) and that is reported.
    """
    u = bytes(u)
    v = bytes(v)
    if not u or not v:
        raise ValueError("cylinder words must be nonempty")
    if any(s >= system.alphabet for s in u + v):
        raise ValueError("symbol outside alphabet")
    if n < len(u):
        return MixingWitness(
            source_word=u,
            target_word=v,
            steps=n,
            point=None,
            available=False,
            reason=f"construction requires n >= |u| = {len(u)}",
        )
    z = ShiftPoint(u + b"\x00" * (n - len(u)) + v, b"\x00", system.alphabet)
    assert z.prefix(len(u)) == u and z.shift(n).prefix(len(v)) == v
    return MixingWitness(source_word=u, target_word=v, steps=n, point=z, available=True)


# ---------------------------------------------------------------------------
# product-system tracing
# ---------------------------------------------------------------------------


@dataclass
class ProductTraceResult:
    left_tracer: object
    right_tracer: object
    left_report: object
    right_report: object
    combined_report: object
    left_partial: object
    right_partial: object

    @property
    def passed(self):
        return self.combined_report.passed


def product_partial_trace(
    left_system, right_system, left_window: SeqWindow, right_window: SeqWindow,
    delta: float, eps: float,
) -> ProductTraceResult:
    """Trace a delta-partial pseudo-orbit of the product system under the max
    metric by splitting it into its coordinates.

    Each coordinate window inherits the delta-partial property and is traced
    at eps/3; the pair then eps-partially traces the product window because a
    max-metric miss requires a miss in some coordinate.
    """
    from .systems.base import ProductSystem

    if len(left_window) != len(right_window):
        raise ValueError("mismatched window lengths")
    _require_tracer(left_system)
    _require_tracer(right_system)
    left_partial = check_delta_partial(left_window, delta)
    right_partial = check_delta_partial(right_window, delta)
    zl = left_system.partial_trace(left_window.points, eps / 3.0)
    zr = right_system.partial_trace(right_window.points, eps / 3.0)
    left_report = check_partial_tracing_sequence(left_window, zl, eps / 3.0)
    right_report = check_partial_tracing_sequence(right_window, zr, eps / 3.0)
    product = ProductSystem(left_system, right_system)
    pair_window = SeqWindow(product, list(zip(left_window.points, right_window.points)))
    combined = check_partial_tracing_sequence(pair_window, (zl, zr), eps)
    return ProductTraceResult(
        left_tracer=zl,
        right_tracer=zr,
        left_report=left_report,
        right_report=right_report,
        combined_report=combined,
        left_partial=left_partial,
        right_partial=right_partial,
    )
