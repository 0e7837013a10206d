"""Pure numpy fallback for the compiled kernels in ``_core.pyx``.

Same signatures and semantics; prefix sums are taken in extended precision
(longdouble) so long horizons keep their digits without hand-rolled
compensation.
"""

import numpy as np


def running_averages(values):
    v = np.ascontiguousarray(values, dtype=np.float64)
    n = v.shape[0]
    csum = np.cumsum(v, dtype=np.longdouble)
    return np.asarray(csum / np.arange(1, n + 1, dtype=np.longdouble), dtype=np.float64)


def window_max_sums(values):
    v = np.ascontiguousarray(values, dtype=np.float64)
    length = v.shape[0]
    prefix = np.zeros(length + 1, dtype=np.longdouble)
    np.cumsum(v, dtype=np.longdouble, out=prefix[1:])
    prefix = np.asarray(prefix, dtype=np.float64)
    out = np.zeros(length + 1, dtype=np.float64)
    for n in range(1, length + 1):
        out[n] = (prefix[n:] - prefix[: length + 1 - n]).max()
    return out
