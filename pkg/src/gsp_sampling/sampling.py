"""Vertex sample sets and A/D/E-optimal and weighted random selection."""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import ContractError, ParameterError
from .spectral import EPS, leverage_scores

TIE_RTOL = 1e-12


class SampleSet(tuple):
    """Ordered tuple of distinct vertex indices; order is selection order."""

    def __new__(cls, vertices=(), n=None):
        verts = tuple(int(v) for v in vertices)
        if len(set(verts)) != len(verts):
            raise ContractError(f"sample set has repeated vertices: {verts}")
        if n is not None and any(not 0 <= v < n for v in verts):
            raise ContractError(f"sample set has indices outside [0, {n})")
        return super().__new__(cls, verts)

    def prefix(self, m):
        return SampleSet(self[:m])

    def without(self, v):
        if v not in self:
            raise ContractError(f"vertex {v} is not in the sample set")
        return SampleSet(u for u in self if u != v)

    def to_json(self):
        return list(self)


class Criterion(str, enum.Enum):
    """Pointwise optimality criteria on the sampled gram matrix."""

    A = "A"
    D = "D"
    E = "E"


@dataclass(frozen=True)
class WeightedRandom:
    """Leverage-score weighted random selection, without replacement."""

    seed: int = 0


def parse_scheme(name):
    """``"A"``/``"D"``/``"E"`` or ``"WR"``/``"WR:<seed>"`` to a scheme object."""
    name = str(name).strip()
    upper = name.upper()
    if upper in ("A", "D", "E"):
        return Criterion(upper)
    if upper == "WR":
        return WeightedRandom()
    if upper.startswith("WR:"):
        return WeightedRandom(int(name[3:]))
    raise ParameterError(f"unknown sampling scheme {name!r}")


def scheme_name(scheme):
    if isinstance(scheme, WeightedRandom):
        return "WR"
    return Criterion(scheme).value


def _index_array(s):
    return np.fromiter((int(v) for v in s), dtype=np.intp, count=len(s))


def restrict_rows(mat, s):
    """Rows of ``mat`` at the sampled vertices, in sample order (``M_S @ mat``)."""
    mat = np.asarray(mat)
    return mat[_index_array(s)]


def gram(b, s):
    """``(M_S U_k)(M_S U_k)^T``."""
    rows = restrict_rows(b.u_k, s)
    return rows @ rows.T


def resolve_rtol(b):
    return b.rtol if b.rtol is not None else max(b.n, b.k) * EPS


def criterion_value(b, s, c):
    """Value of an optimality criterion on the gram matrix of ``s``.

    Returns ``det`` for D, ``lambda_min`` for E (both 0 when the gram is
    singular), and for A the pair ``(rank, sum of 1/lambda over nonzero
    eigenvalues)``, which is ordered lexicographically: higher rank first,
    then smaller sum. On full-rank grams the sum is ``tr(gram^{-1})``.
    """
    if isinstance(c, WeightedRandom):
        raise ContractError("weighted random selection has no pointwise criterion value")
    c = Criterion(c)
    if len(s) == 0:
        raise ContractError("criterion is undefined on the empty sample set")
    idx = _index_array(s)
    rank, recip, logdet, min_sq = kernels.candidate_spectra(
        b.u_k, idx[:-1], idx[-1:], resolve_rtol(b)
    )
    rank, recip, logdet, min_sq = int(rank[0]), recip[0], logdet[0], min_sq[0]
    full = rank == len(s)
    if c is Criterion.A:
        return rank, float(recip)
    if c is Criterion.D:
        return float(np.exp(logdet)) if full else 0.0
    return float(min_sq) if full else 0.0


def _select(values, candidates, larger_is_better):
    v = values if larger_is_better else -values
    best = v.max()
    tol = TIE_RTOL * max(1.0, abs(best))
    return int(candidates[np.flatnonzero(v >= best - tol)[0]])


def greedy_step(b, selected, c, candidates=None, backend=None):
    """Best single-vertex extension of ``selected`` under criterion ``c``.

    Candidates are ranked first by the rank of the extended ``M_S U_k``
    and then by the criterion over its nonzero spectrum. While the set
    can stay full rank this is the plain A/D/E criterion; past ``k``
    samples it keeps D and E informative instead of collapsing to 0.
    Ties within a relative 1e-12 go to the lowest vertex index.
    """
    c = Criterion(c)
    n = b.n
    sel = _index_array(selected)
    if candidates is None:
        mask = np.ones(n, dtype=bool)
        mask[sel] = False
        candidates = np.flatnonzero(mask)
    candidates = np.asarray(candidates, dtype=np.intp)
    if candidates.size == 0:
        raise ParameterError("no candidate vertices left")
    rank, recip, logdet, min_sq = kernels.candidate_spectra(
        b.u_k, sel, candidates, resolve_rtol(b), backend=backend
    )
    top = rank == rank.max()
    cands = candidates[top]
    if c is Criterion.A:
        return _select(recip[top], cands, larger_is_better=False)
    if c is Criterion.D:
        return _select(logdet[top], cands, larger_is_better=True)
    return _select(min_sq[top], cands, larger_is_better=True)


def greedy_select(b, c, m, backend=None):
    """Nested greedy selection of ``m`` vertices under criterion ``c``."""
    if isinstance(c, WeightedRandom):
        raise ContractError("use weighted_random_select for the weighted random scheme")
    if not 0 <= m <= b.n:
        raise ParameterError(f"sample size must be in [0, {b.n}], got {m}")
    selected = []
    for _ in range(m):
        selected.append(greedy_step(b, selected, c, backend=backend))
    return SampleSet(selected)


def weighted_random_select(b, m, seed):
    """Draw ``m`` distinct vertices, each draw proportional to leverage score.

    Probabilities are renormalized over the unsampled vertices after every
    draw. If the remaining scores are all zero the draw is uniform.
    """
    n = b.n
    if not 0 <= m <= n:
        raise ParameterError(f"sample size must be in [0, {n}], got {m}")
    rng = np.random.default_rng(seed)
    scores = np.clip(leverage_scores(b), 0.0, None)
    remaining = np.ones(n, dtype=bool)
    out = []
    for _ in range(m):
        w = np.where(remaining, scores, 0.0)
        total = w.sum()
        if total <= 0:
            w = remaining.astype(float)
            total = w.sum()
        cdf = np.cumsum(w / total)
        v = int(np.searchsorted(cdf, rng.random() * cdf[-1], side="right"))
        if v >= n or w[v] <= 0:
            # Round-off at the right edge of the CDF.
            v = int(np.flatnonzero(w > 0)[-1])
        remaining[v] = False
        out.append(v)
    return SampleSet(out)


def select(b, scheme, m, backend=None):
    """Run any scheme (criterion or :class:`WeightedRandom`) for ``m`` steps."""
    if isinstance(scheme, WeightedRandom):
        return weighted_random_select(b, m, scheme.seed)
    return greedy_select(b, scheme, m, backend=backend)
