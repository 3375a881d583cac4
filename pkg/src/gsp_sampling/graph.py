"""Undirected weighted graphs, random graph models and shift operators.

Graphs are stored as an immutable edge list with ``u < v``. Dense matrices
are built on demand; the sizes this package targets (N up to a few thousand)
make dense storage the simplest choice.
"""

from __future__ import annotations

import enum
import hashlib
import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

from .errors import ContractError, GraphGenerationError, ParameterError

MAX_ATTEMPTS = 100


class ShiftKind(str, enum.Enum):
    """Which Laplacian variant serves as the graph shift operator."""

    COMBINATORIAL = "combinatorial"
    NORMALIZED = "normalized"


@dataclass(frozen=True)
class Graph:
    """Connected undirected graph on vertices ``0..n_vertices-1``.

    Attributes
    ----------
    n_vertices : int
        Number of vertices.
    edges : tuple of (int, int, float)
        Sorted edge list, each entry ``(u, v, w)`` with ``u < v`` and ``w > 0``.
    """

    n_vertices: int
    edges: tuple

    def __post_init__(self):
        if self.n_vertices < 1:
            raise ContractError("graph needs at least one vertex")
        seen = set()
        clean = []
        for u, v, w in self.edges:
            u, v, w = int(u), int(v), float(w)
            if u == v:
                raise ContractError(f"self-loop at vertex {u}")
            if u > v:
                u, v = v, u
            if not (0 <= u and v < self.n_vertices):
                raise ContractError(f"edge ({u}, {v}) out of range")
            if not w > 0:
                raise ContractError(f"edge ({u}, {v}) has non-positive weight {w}")
            if (u, v) in seen:
                raise ContractError(f"duplicate edge ({u}, {v})")
            seen.add((u, v))
            clean.append((u, v, w))
        clean.sort()
        object.__setattr__(self, "edges", tuple(clean))

    @property
    def n_edges(self):
        return len(self.edges)

    def adjacency(self):
        """Dense symmetric weight matrix."""
        w = np.zeros((self.n_vertices, self.n_vertices))
        if self.edges:
            e = np.asarray(self.edges)
            u = e[:, 0].astype(np.intp)
            v = e[:, 1].astype(np.intp)
            w[u, v] = e[:, 2]
            w[v, u] = e[:, 2]
        return w

    def degrees(self):
        return self.adjacency().sum(axis=1)

    def is_connected(self):
        return _is_connected(self.n_vertices, self.edges)

    def to_json(self):
        return {"n": self.n_vertices, "edges": [[u, v, w] for u, v, w in self.edges]}

    @classmethod
    def from_json(cls, doc):
        return cls(int(doc["n"]), tuple((e[0], e[1], e[2]) for e in doc["edges"]))

    def digest(self):
        """Stable SHA-256 of the canonical JSON form."""
        payload = json.dumps(self.to_json(), separators=(",", ":"), sort_keys=True)
        return hashlib.sha256(payload.encode()).hexdigest()


def save_graph(graph, path):
    Path(path).write_text(json.dumps(graph.to_json()))


def load_graph(path):
    return Graph.from_json(json.loads(Path(path).read_text()))


def _is_connected(n, edges):
    if n == 1:
        return True
    if not edges:
        return False
    e = np.asarray(edges)
    mat = coo_matrix((np.ones(len(e)), (e[:, 0].astype(int), e[:, 1].astype(int))), shape=(n, n))
    n_comp, _ = connected_components(mat, directed=False)
    return n_comp == 1


def _attempt_rng(seed, attempt):
    # Each retry gets its own child stream so attempt t never depends on t-1.
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(attempt,)))


def _pairs_from_mask(mask):
    iu, ju = np.nonzero(mask)
    return tuple((int(a), int(b), 1.0) for a, b in zip(iu, ju))


def generate_er(n, p, seed):
    """Erdős–Rényi graph G(n, p), resampled until connected.

    Raises
    ------
    GraphGenerationError
        If no connected sample is found within ``MAX_ATTEMPTS`` tries.
    """
    if n < 2:
        raise ParameterError(f"ER graph needs n >= 2, got {n}")
    if not 0 < p <= 1:
        raise ParameterError(f"edge probability must be in (0, 1], got {p}")
    upper = np.triu(np.ones((n, n), dtype=bool), k=1)
    for attempt in range(MAX_ATTEMPTS):
        rng = _attempt_rng(seed, attempt)
        mask = (rng.random((n, n)) < p) & upper
        edges = _pairs_from_mask(mask)
        if _is_connected(n, edges):
            return Graph(n, edges)
    raise GraphGenerationError(
        f"no connected ER graph after {MAX_ATTEMPTS} attempts (n={n}, p={p})"
    )


def generate_ba(n, m, seed):
    """Barabási–Albert preferential attachment graph.

    Starts from a clique on ``m`` vertices; each later vertex links to ``m``
    distinct existing vertices drawn with probability proportional to degree.
    """
    if m < 1 or n <= m:
        raise ParameterError(f"BA graph needs n > m >= 1, got n={n}, m={m}")
    rng = np.random.default_rng(seed)
    deg = np.zeros(n)
    edges = []
    for u in range(m):
        for v in range(u + 1, m):
            edges.append((u, v, 1.0))
            deg[u] += 1
            deg[v] += 1
    for new in range(m, n):
        weights = deg[:new]
        total = weights.sum()
        # A single-vertex seed clique has zero degree everywhere.
        prob = weights / total if total > 0 else np.full(new, 1.0 / new)
        targets = rng.choice(new, size=m, replace=False, p=prob)
        for t in sorted(int(t) for t in targets):
            edges.append((t, new, 1.0))
            deg[t] += 1
        deg[new] += m
    return Graph(n, tuple(edges))


def block_labels(n, blocks):
    """Block index per vertex; block sizes differ by at most one."""
    return np.concatenate(
        [np.full(len(chunk), b) for b, chunk in enumerate(np.array_split(np.arange(n), blocks))]
    )


def generate_sbm(n, blocks, p_in, p_out, seed):
    """Stochastic block model with near-equal blocks, resampled until connected."""
    if not 1 <= blocks <= n:
        raise ParameterError(f"need 1 <= blocks <= n, got blocks={blocks}, n={n}")
    for name, val in (("p_in", p_in), ("p_out", p_out)):
        if not 0 <= val <= 1:
            raise ParameterError(f"{name} must be in [0, 1], got {val}")
    if p_in == 0 and p_out == 0:
        raise ParameterError("p_in and p_out cannot both be 0")
    labels = block_labels(n, blocks)
    prob = np.where(labels[:, None] == labels[None, :], p_in, p_out)
    upper = np.triu(np.ones((n, n), dtype=bool), k=1)
    for attempt in range(MAX_ATTEMPTS):
        rng = _attempt_rng(seed, attempt)
        mask = (rng.random((n, n)) < prob) & upper
        edges = _pairs_from_mask(mask)
        if _is_connected(n, edges):
            return Graph(n, edges)
    raise GraphGenerationError(
        f"no connected SBM graph after {MAX_ATTEMPTS} attempts "
        f"(n={n}, blocks={blocks}, p_in={p_in}, p_out={p_out})"
    )


def path_graph(n):
    return Graph(n, tuple((i, i + 1, 1.0) for i in range(n - 1)))


def complete_graph(n):
    return Graph(n, tuple((i, j, 1.0) for i in range(n) for j in range(i + 1, n)))


def shift_operator(graph, kind=ShiftKind.COMBINATORIAL):
    """Dense Laplacian of ``graph``.

    ``COMBINATORIAL`` gives ``D - W``; ``NORMALIZED`` gives
    ``I - D^{-1/2} W D^{-1/2}``. The result is symmetrized exactly.
    """
    kind = ShiftKind(kind)
    w = graph.adjacency()
    deg = w.sum(axis=1)
    if kind is ShiftKind.COMBINATORIAL:
        lap = np.diag(deg) - w
    else:
        if np.any(deg <= 0):
            raise ContractError("normalized Laplacian needs every vertex to have an edge")
        d = 1.0 / np.sqrt(deg)
        lap = np.eye(graph.n_vertices) - d[:, None] * w * d[None, :]
    return 0.5 * (lap + lap.T)
