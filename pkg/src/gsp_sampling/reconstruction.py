"""Linear reconstruction operators: minimal-norm LS and graph-Laplacian regularized."""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import ContractError, SingularSystemError
from .sampling import SampleSet, restrict_rows, resolve_rtol

DEFAULT_GLR_MU = 1e-2


class Method(str, enum.Enum):
    LS = "LS"
    GLR = "GLR"


@dataclass(frozen=True, eq=False)
class ReconstructionOperator:
    """Dense ``N x |S|`` matrix mapping observations on ``S`` to a full signal."""

    matrix: np.ndarray
    method: Method
    sample_set: SampleSet
    k: int = None
    mu: float = None
    rank: int = None

    def __post_init__(self):
        if self.matrix.shape[1] != len(self.sample_set):
            raise ContractError("operator column count must equal the sample size")


@dataclass(frozen=True, eq=False)
class Observation:
    values: np.ndarray
    sample_set: SampleSet

    def __post_init__(self):
        if np.shape(self.values)[0] != len(self.sample_set):
            raise ContractError("observation length does not match the sample set")

    @classmethod
    def from_signal(cls, signal, s):
        s = SampleSet(s)
        return cls(restrict_rows(signal, s), s)


def ls_pinv(b, s):
    """Minimal-norm pseudoinverse of ``M_S U_k`` and its numerical rank.

    Singular values at or below :func:`spectral.zero_cutoff` are treated as
    zero, matching the rank used everywhere else.
    """
    rows = restrict_rows(b.u_k, s)
    if rows.shape[0] == 0:
        return np.zeros((b.k, 0)), 0
    w, sv, vt = np.linalg.svd(rows, full_matrices=False)
    nz = sv > resolve_rtol(b) * sv[0]
    pinv = (vt[nz].T / sv[nz]) @ w[:, nz].T
    return pinv, int(nz.sum())


def ls_operator(b, s):
    """``R_S = U_k (M_S U_k)^+``; defined for any ``S``, including empty."""
    s = SampleSet(s, b.n)
    pinv, rank = ls_pinv(b, s)
    return ReconstructionOperator(b.u_k @ pinv, Method.LS, s, k=b.k, rank=rank)


def glr_operator(lap, s, mu=DEFAULT_GLR_MU):
    """``R_S = (M_S^T M_S + mu L)^{-1} M_S^T`` by a dense solve.

    Raises
    ------
    ContractError
        For an empty sample set or non-positive ``mu``.
    SingularSystemError
        If the system cannot be solved to a residual of 1e-8.
    """
    lap = np.asarray(lap, dtype=np.float64)
    n = lap.shape[0]
    s = SampleSet(s, n)
    if len(s) == 0:
        raise ContractError("GLR reconstruction needs at least one sample")
    if not mu > 0:
        raise ContractError(f"GLR needs mu > 0, got {mu}")
    idx = np.asarray(s, dtype=np.intp)
    system = mu * lap
    system[idx, idx] += 1.0
    rhs = np.zeros((n, len(s)))
    rhs[idx, np.arange(len(s))] = 1.0
    try:
        x = scipy.linalg.solve(system, rhs, assume_a="pos")
    except np.linalg.LinAlgError as exc:
        cond = np.linalg.cond(system)
        raise SingularSystemError(
            f"GLR system is singular (condition estimate {cond:.3e})", condition=cond
        ) from exc
    resid = np.max(np.abs(system @ x - rhs))
    if resid > 1e-8:
        cond = np.linalg.cond(system)
        raise SingularSystemError(
            f"GLR solve residual {resid:.3e} exceeds 1e-8 (condition estimate {cond:.3e})",
            condition=cond,
        )
    return ReconstructionOperator(x, Method.GLR, s, mu=float(mu))


def reconstruct(r, obs):
    """Apply ``r`` to observations; returns the length-N estimate (or N x B for batches)."""
    if tuple(obs.sample_set) != tuple(r.sample_set):
        raise ContractError("observation and operator use different sample sets")
    return r.matrix @ np.asarray(obs.values)
