from .base import (
    ProductSystem,
    SystemHandle,
    TwoFixedPoints,
    UnsupportedSystemError,
    estimate_continuity_modulus,
    window_product_metric,
)
from .cylinder import (
    BasePoint,
    CylinderSystem,
    OrbitPoint,
    cyl_metric,
    cyl_position,
    cyl_step,
    cylinder_system,
    dyadic_fraction,
    dyadic_generation,
    generation_horizon,
    settled_offset,
)
from .shift import (
    FullShift,
    ShiftPoint,
    StairSubshift,
    full_shift,
    shift_metric,
    stair_subshift,
    symbol_depth,
)

__all__ = [
    "BasePoint",
    "CylinderSystem",
    "FullShift",
    "OrbitPoint",
    "ProductSystem",
    "ShiftPoint",
    "StairSubshift",
    "SystemHandle",
    "TwoFixedPoints",
    "UnsupportedSystemError",
    "cyl_metric",
    "cyl_position",
    "cyl_step",
    "cylinder_system",
    "dyadic_fraction",
    "dyadic_generation",
    "estimate_continuity_modulus",
    "full_shift",
    "generation_horizon",
    "settled_offset",
    "shift_metric",
    "stair_subshift",
    "symbol_depth",
    "window_product_metric",
]
