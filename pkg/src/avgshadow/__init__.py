"""avgshadow: finite-horizon estimators and constructive tracers for
Besicovitch pseudo-metrics, pseudo-orbit classes, spaced specifications,
average shadowing, chain dynamics, and empirical cylinder measures."""

from .backend import BACKEND
from .chain_graph import (
    ChainGraph,
    build_chain_graph,
    chain_graph_from_points,
    is_chain_mixing,
    is_chain_transitive,
    topological_mixing_probe,
)
from .measures import (
    CylinderMeasure,
    empirical_measure,
    ergodic_approx,
    measure_distance,
    mixture_measure,
    periodic_orbit_measure,
)
from .rationals import exact_threshold
from .pseudo_orbits import (
    CorruptedOrbit,
    PseudoOrbitVerdict,
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
from .seq_core import (
    BesicovitchEstimate,
    CauchyProfile,
    IndexSet,
    SeqWindow,
    besicovitch_estimate,
    cauchy_profile,
    density_bounds,
    dynamical_besicovitch,
    product_besicovitch,
    product_metric,
)
from .specification import (
    CLOSED,
    HALF_OPEN,
    Segment,
    Specification,
    TraceReport,
    check_full_tracing,
    check_partial_tracing_sequence,
    check_partial_tracing_spec,
    validate_spacing,
)
from .systems import (
    BasePoint,
    CylinderSystem,
    FullShift,
    OrbitPoint,
    ProductSystem,
    ShiftPoint,
    StairSubshift,
    SystemHandle,
    TwoFixedPoints,
    UnsupportedSystemError,
    cyl_metric,
    cyl_position,
    cyl_step,
    cylinder_system,
    dyadic_fraction,
    full_shift,
    shift_metric,
    stair_subshift,
)
from .tracing import (
    ChainResult,
    MixingWitness,
    PipelineResult,
    TracerError,
    avg_to_partial_threshold,
    average_shadowing_pipeline,
    chain_via_partial_tracing,
    mixing_witness,
    product_partial_trace,
    shift_trace_specification,
    trace_specification_stream,
)

__version__ = "0.1.0"
