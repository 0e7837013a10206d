"""Kernel backend selection.

The compiled extension is preferred when importable; otherwise the numpy
implementation is used.  ``AVGSHADOW_BACKEND=pure|compiled`` forces a choice
(``compiled`` raises if the extension was not built).
"""

import os

_forced = os.environ.get("AVGSHADOW_BACKEND")

if _forced == "pure":
    from . import _core_py as _impl

    BACKEND = "pure"
elif _forced == "compiled":
    from . import _core as _impl  # type: ignore[attr-defined]

    BACKEND = "compiled"
else:
    try:
        from . import _core as _impl  # type: ignore[attr-defined]

        BACKEND = "compiled"
    except ImportError:
        from . import _core_py as _impl

        BACKEND = "pure"

running_averages = _impl.running_averages
window_max_sums = _impl.window_max_sums
