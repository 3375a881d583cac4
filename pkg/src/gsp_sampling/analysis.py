"""Expected reconstruction error and the effect of removing one sample.

For a linear reconstruction ``R`` and the signal model
``x ~ N(0, U_k U_k^T)``, ``y = x + sigma * eps``, the expected squared
error splits into a noiseless part and a noise-sensitivity part::

    E[MSE] = xi1 + sigma^2 * xi2
    xi1 = ||U_k - R M_S U_k||_F^2,    xi2 = ||R||_F^2

Under LS reconstruction ``xi1 = k - rank(M_S U_k)``, and removing vertex
``v`` from ``S`` improves the expected error iff ``SNR < tau(S, v)`` with
``tau = (k / N) * (xi2(S) - xi2(S minus v))``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ContractError, NumericalError, ParameterError
from .reconstruction import Method, Observation, ls_operator, reconstruct
from .sampling import SampleSet, restrict_rows, resolve_rtol
from .spectral import numerical_rank

XI1_INT_TOL = 1e-6
DELTA2_ZERO_RTOL = 1e-9
MC_CHUNK = 2000


@dataclass(frozen=True)
class NoiseModel:
    """Observation noise level, given as a ratio-form SNR."""

    snr: float
    k: int
    n: int

    def __post_init__(self):
        if not self.snr > 0:
            raise ParameterError(f"SNR must be positive, got {self.snr}")

    @property
    def sigma_sq(self):
        return self.k / (self.n * self.snr)


@dataclass(frozen=True)
class MseReport:
    xi1: float
    xi2: float
    sigma_sq: float
    expected_mse: float
    method: Method


@dataclass(frozen=True)
class RemovalEffect:
    """Change in ``xi1``, ``xi2`` when ``vertex`` is dropped, and the SNR threshold."""

    vertex: int
    delta1: float
    delta2: float
    tau: float


def xi1(b, r, snap=True):
    """Noiseless error ``||U_k - R M_S U_k||_F^2``.

    For LS the value is snapped to the nearest integer; a distance above
    1e-6 raises :class:`NumericalError` since it can only mean an
    inconsistent rank tolerance. ``snap=False`` returns the raw value.
    """
    resid = b.u_k - r.matrix @ restrict_rows(b.u_k, r.sample_set)
    val = float(np.einsum("ij,ij->", resid, resid))
    if snap and r.method is Method.LS:
        nearest = round(val)
        if abs(val - nearest) > XI1_INT_TOL:
            raise NumericalError(f"LS xi1 = {val!r} is not within {XI1_INT_TOL} of an integer")
        return float(nearest)
    return val


def xi2(r):
    """Noise sensitivity ``||R||_F^2``."""
    return float(np.einsum("ij,ij->", r.matrix, r.matrix))


def expected_mse(b, r, nm):
    if nm.n != b.n or nm.k != b.k:
        raise ContractError("noise model dimensions do not match the basis")
    a, c = xi1(b, r), xi2(r)
    return MseReport(a, c, nm.sigma_sq, a + nm.sigma_sq * c, r.method)


def _snap_delta2(d2, x2_full, x2_reduced):
    # Delta2 vanishes exactly when the removed row adds nothing (e.g. a zero
    # row); round-off there must not masquerade as a positive threshold.
    scale = max(1.0, abs(x2_full), abs(x2_reduced))
    return 0.0 if abs(d2) <= DELTA2_ZERO_RTOL * scale else d2


def removal_effect(b, s, v):
    """Effect of removing ``v`` from ``s`` under LS reconstruction."""
    s = SampleSet(s, b.n)
    if v not in s:
        raise ContractError(f"vertex {v} is not in the sample set")
    full = ls_operator(b, s)
    reduced = ls_operator(b, s.without(v))
    d1 = xi1(b, full) - xi1(b, reduced)
    x2f, x2r = xi2(full), xi2(reduced)
    d2 = _snap_delta2(x2f - x2r, x2f, x2r)
    return RemovalEffect(int(v), d1, d2, b.k / b.n * d2)


def removal_improves(effect, snr):
    """True iff dropping the vertex strictly lowers the expected LS error."""
    return snr < effect.tau


def mse_change_on_removal(b, s, v, snr):
    """``E[MSE_S] - E[MSE_{S minus v}]`` evaluated directly; positive means removal helps."""
    s = SampleSet(s, b.n)
    nm = NoiseModel(snr, b.k, b.n)
    before = expected_mse(b, ls_operator(b, s), nm).expected_mse
    after = expected_mse(b, ls_operator(b, s.without(v)), nm).expected_mse
    return before - after


def _check_ordering(ordering, n):
    try:
        return SampleSet(ordering, n)
    except ContractError as exc:
        raise ContractError(f"ordering must not repeat vertices: {exc}") from None


def tau_along_ordering(b, ordering):
    """``tau(S_i, v_i)`` for every prefix ``S_i`` of ``ordering`` (i = 1..len)."""
    order = _check_ordering(ordering, b.n)
    taus = np.empty(len(order))
    prev = 0.0
    for i in range(1, len(order) + 1):
        cur = xi2(ls_operator(b, order[:i]))
        taus[i - 1] = b.k / b.n * _snap_delta2(cur - prev, cur, prev)
        prev = cur
    return taus


def improving_indices(b, ordering):
    """1-based positions ``i`` where removing ``v_i`` from ``S_i`` helps at some SNR.

    Over a full permutation of the vertices there are exactly ``k`` of them.
    """
    taus = tau_along_ordering(b, ordering)
    return [int(i) + 1 for i in np.flatnonzero(taus > 0)]


def monte_carlo_mse(b, r, nm, n_signals, seed):
    """Empirical mean and standard error of ``||x - R M_S y||^2``.

    Signals follow ``x = U_k g``, ``y = x + sigma * eps`` with standard
    normal ``g`` and ``eps``. Draws are generated in fixed-size chunks, each
    with its own seed stream, so results do not depend on chunking of work.
    """
    if n_signals < 2:
        raise ParameterError("monte carlo estimate needs at least two signals")
    sigma = np.sqrt(nm.sigma_sq)
    errs = np.empty(n_signals)
    for chunk, start in enumerate(range(0, n_signals, MC_CHUNK)):
        count = min(MC_CHUNK, n_signals - start)
        rng = np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(chunk,)))
        g = rng.standard_normal((b.k, count))
        eps = rng.standard_normal((b.n, count))
        x = b.u_k @ g
        y = x + sigma * eps
        xhat = reconstruct(r, Observation.from_signal(y, r.sample_set))
        errs[start : start + count] = np.sum((x - xhat) ** 2, axis=0)
    return float(errs.mean()), float(errs.std(ddof=1) / np.sqrt(n_signals))


def verify_noiseless_optimal_prefix(b, s):
    """True iff every prefix of length ``m <= min(|S|, k)`` has ``rank(M_{S_m} U_k) = m``."""
    s = SampleSet(s, b.n)
    rtol = resolve_rtol(b)
    for m in range(1, min(len(s), b.k) + 1):
        sv = np.linalg.svd(restrict_rows(b.u_k, s[:m]), compute_uv=False)
        if numerical_rank(sv, b.n, b.k, rtol) != m:
            return False
    return True
