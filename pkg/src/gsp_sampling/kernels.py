"""Backend selection for the hot kernels.

The compiled extension is used when importable, unless the environment
variable ``GSP_SAMPLING_PURE_PYTHON`` is set to a non-empty value other
than ``0``.
"""

import os

import numpy as np

from . import _kernels_py

_force_python = os.environ.get("GSP_SAMPLING_PURE_PYTHON", "") not in ("", "0")

try:
    if _force_python:
        raise ImportError("pure Python backend requested")
    from . import _kernels as _compiled
except ImportError:
    _compiled = None

BACKENDS = {"python": _kernels_py}
if _compiled is not None:
    BACKENDS["compiled"] = _compiled

BACKEND = "compiled" if _compiled is not None else "python"


def candidate_spectra(u_k, selected, candidates, rtol, backend=None):
    """Dispatch to the active (or requested) backend; see ``_kernels_py``."""
    impl = BACKENDS[backend or BACKEND]
    return impl.candidate_spectra(
        np.ascontiguousarray(u_k, dtype=np.float64),
        np.ascontiguousarray(selected, dtype=np.intp),
        np.ascontiguousarray(candidates, dtype=np.intp),
        float(rtol),
    )
