"""Pure NumPy implementation of the hot kernels.

Used when the compiled extension is unavailable or when
``GSP_SAMPLING_PURE_PYTHON=1`` is set. Must stay output-compatible with
``_kernels.pyx``.
"""

import numpy as np


def candidate_spectra(u_k, selected, candidates, rtol):
    """Spectral summaries of ``U_k[selected + [v]]`` for every candidate ``v``.

    Parameters
    ----------
    u_k : ndarray, shape (N, k)
    selected : ndarray of intp, shape (m,)
    candidates : ndarray of intp, shape (c,)
    rtol : float
        Relative singular value cutoff.

    Returns
    -------
    rank : ndarray of int64, shape (c,)
    recip_sum : ndarray, shape (c,)
        Sum of ``1 / s**2`` over nonzero singular values.
    logdet : ndarray, shape (c,)
        Sum of ``log(s**2)`` over nonzero singular values (0 if none).
    min_sq : ndarray, shape (c,)
        Smallest nonzero ``s**2`` (0 if none).
    """
    c = candidates.shape[0]
    m = selected.shape[0]
    rows = np.empty((c, m + 1), dtype=np.intp)
    rows[:, :m] = selected
    rows[:, m] = candidates
    sv = np.linalg.svd(u_k[rows], compute_uv=False)
    smax = sv[:, :1]
    nz = sv > rtol * smax
    rank = nz.sum(axis=1).astype(np.int64)
    sq = sv * sv
    safe = np.where(nz, sq, 1.0)
    recip_sum = np.where(nz, 1.0 / safe, 0.0).sum(axis=1)
    logdet = np.where(nz, np.log(safe), 0.0).sum(axis=1)
    last = np.maximum(rank - 1, 0)
    min_sq = np.where(rank > 0, sq[np.arange(c), last], 0.0)
    return rank, recip_sum, logdet, min_sq
