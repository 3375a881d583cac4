"""Eigendecomposition of shift operators and bandlimited bases."""

from __future__ import annotations

import json
import struct
import warnings
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import ContractError, ParameterError
from .graph import ShiftKind

EPS = np.finfo(np.float64).eps
DEGENERACY_TOL = 1e-10


class DegenerateBandWarning(UserWarning):
    """The band edge falls inside a repeated eigenvalue, so U_k is not unique."""


def zero_cutoff(s_max, n, k, rtol=None):
    """Threshold below which a singular value counts as zero.

    The default relative tolerance is ``max(n, k) * eps``. The same rule is
    used for ranks, pseudoinverses and greedy criteria so that all of them
    agree on which singular values vanish.
    """
    if rtol is None:
        rtol = max(n, k) * EPS
    return rtol * s_max


def numerical_rank(sv, n, k, rtol=None):
    if sv.size == 0:
        return 0
    return int(np.count_nonzero(sv > zero_cutoff(sv.max(), n, k, rtol)))


@dataclass(frozen=True, eq=False)
class SpectralBasis:
    """Eigenpairs of a shift operator, eigenvalues ascending."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    source_kind: ShiftKind = ShiftKind.COMBINATORIAL

    @property
    def n(self):
        return self.eigenvalues.shape[0]


@dataclass(frozen=True, eq=False)
class BandBasis:
    """First ``k`` eigenvectors of a shift operator.

    Attributes
    ----------
    k : int
        Bandwidth.
    u_k : ndarray, shape (N, k)
        Orthonormal columns spanning the k lowest graph frequencies.
    spectral_gap : float
        ``lambda_{k+1} - lambda_k``; 0 when ``k == N``.
    degenerate : bool
        True when the gap is at most ``DEGENERACY_TOL`` (and ``k < N``).
    rtol : float or None
        Relative singular value cutoff override, see :func:`zero_cutoff`.
    """

    k: int
    u_k: np.ndarray
    spectral_gap: float
    degenerate: bool = False
    rtol: float = None

    @property
    def n(self):
        return self.u_k.shape[0]


def _fix_signs(vecs):
    out = vecs.copy()
    for j in range(out.shape[1]):
        col = out[:, j]
        idx = np.flatnonzero(np.abs(col) > 1e-8)
        if idx.size and col[idx[0]] < 0:
            out[:, j] = -col
    return out


def eigendecompose(lap, kind=ShiftKind.COMBINATORIAL):
    """Symmetric eigendecomposition with a deterministic sign convention.

    Each eigenvector is flipped so that its first entry of magnitude above
    1e-8 is positive.
    """
    lap = np.asarray(lap, dtype=np.float64)
    if lap.ndim != 2 or lap.shape[0] != lap.shape[1]:
        raise ContractError(f"expected a square matrix, got shape {lap.shape}")
    asym = np.max(np.abs(lap - lap.T)) if lap.size else 0.0
    if asym > 1e-12:
        raise ContractError(f"matrix is not symmetric (max asymmetry {asym:.3e})")
    vals, vecs = np.linalg.eigh(lap)
    return SpectralBasis(vals, _fix_signs(vecs), ShiftKind(kind))


def band(basis, k, rtol=None):
    """Select the bandlimited basis of width ``k``.

    Emits :class:`DegenerateBandWarning` when ``lambda_{k+1} - lambda_k``
    does not exceed ``DEGENERACY_TOL``; in that case only the projector
    ``U_k U_k^T`` is well defined.
    """
    n = basis.n
    if not 1 <= k <= n:
        raise ParameterError(f"bandwidth must be in [1, {n}], got {k}")
    if k == n:
        gap = 0.0
        degenerate = False
    else:
        gap = float(basis.eigenvalues[k] - basis.eigenvalues[k - 1])
        degenerate = gap <= DEGENERACY_TOL
        if degenerate:
            warnings.warn(
                f"repeated eigenvalue at band edge k={k} (gap {gap:.2e}); U_k is not unique",
                DegenerateBandWarning,
                stacklevel=2,
            )
    u_k = np.ascontiguousarray(basis.eigenvectors[:, :k])
    return BandBasis(k, u_k, max(gap, 0.0), degenerate, rtol)


def band_projector(b):
    return b.u_k @ b.u_k.T


def leverage_scores(b):
    """Squared row norms of ``U_k``; they sum to ``k``."""
    return np.einsum("ij,ij->i", b.u_k, b.u_k)


def save_basis(path, basis, graph_hash, k_max=None):
    """Write a basis to a binary cache file.

    Layout: 4-byte little-endian header length, UTF-8 JSON header
    ``{n, k_max, kind, hash}``, then ``n`` eigenvalues and the ``n x k_max``
    eigenvector block, all little-endian float64, row-major.
    """
    n = basis.n
    k_max = n if k_max is None else int(k_max)
    header = json.dumps(
        {"n": n, "k_max": k_max, "kind": basis.source_kind.value, "hash": graph_hash}
    ).encode()
    with open(path, "wb") as fh:
        fh.write(struct.pack("<I", len(header)))
        fh.write(header)
        fh.write(np.ascontiguousarray(basis.eigenvalues, dtype="<f8").tobytes())
        fh.write(np.ascontiguousarray(basis.eigenvectors[:, :k_max], dtype="<f8").tobytes())


def load_basis(path, expected_hash=None):
    """Read a cached basis; returns ``(basis, header)``.

    Only the stored ``k_max`` eigenvector columns are available, so the
    result is suitable for :func:`band` with ``k <= k_max`` (``k < k_max``
    if the spectral gap matters).
    """
    raw = Path(path).read_bytes()
    (hlen,) = struct.unpack("<I", raw[:4])
    header = json.loads(raw[4 : 4 + hlen].decode())
    if expected_hash is not None and header["hash"] != expected_hash:
        raise ContractError("cached basis belongs to a different graph")
    n, k_max = header["n"], header["k_max"]
    body = np.frombuffer(raw[4 + hlen :], dtype="<f8")
    if body.size != n + n * k_max:
        raise ContractError("truncated basis cache file")
    vals = body[:n].astype(np.float64)
    vecs = body[n:].reshape(n, k_max).astype(np.float64)
    return SpectralBasis(vals, vecs, ShiftKind(header["kind"])), header
