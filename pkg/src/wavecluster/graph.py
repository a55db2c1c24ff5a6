"""Graph representation and the derived spectral operators.

A :class:`Graph` is a validated, immutable, connected, weighted undirected
graph.  :func:`build_operators` derives every matrix the rest of the
pipeline consumes: the random-walk and symmetric normalized Laplacians,
the degree-scaled signed incidence matrix B (satisfying B Bt = L_sym),
and the block Hamiltonian used by the Schrodinger backend.
"""

from __future__ import annotations

import logging
from collections import deque
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import (
    DisconnectedGraphError,
    GraphFormatError,
    NumericalError,
    ValidationError,
)

logger = logging.getLogger(__name__)

WAVE_SPEED_MAX = float(np.sqrt(2.0))


@dataclass(frozen=True)
class Graph:
    """Connected weighted undirected graph.

    Edges are stored once per unordered pair as (i, j, w) with i < j and
    w > 0.  Construct through :func:`load_graph`, :func:`graph_from_edges`,
    or :func:`graph_from_json`; they enforce the invariants.
    """

    n_nodes: int
    edges: tuple[tuple[int, int, float], ...]

    @property
    def n_edges(self) -> int:
        return len(self.edges)


def _check_connected(n_nodes: int, edges) -> None:
    # Breadth-first traversal from node 0; every node must be reached.
    adj: list[list[int]] = [[] for _ in range(n_nodes)]
    for i, j, _w in edges:
        adj[i].append(j)
        adj[j].append(i)
    seen = [False] * n_nodes
    seen[0] = True
    queue = deque([0])
    count = 1
    while queue:
        u = queue.popleft()
        for v in adj[u]:
            if not seen[v]:
                seen[v] = True
                count += 1
                queue.append(v)
    if count != n_nodes:
        missing = [i for i, s in enumerate(seen) if not s]
        raise DisconnectedGraphError(
            f"graph is disconnected: {n_nodes - count} of {n_nodes} nodes "
            f"unreachable from node 0 (first few: {missing[:5]})"
        )


def graph_from_edges(n_nodes: int, edges) -> Graph:
    """Validate and canonicalize an edge collection into a Graph.

    Accepts (i, j) pairs or (i, j, w) triples; missing weights default
    to 1.0.  Raises GraphFormatError for structural violations and
    DisconnectedGraphError if any node is unreachable.
    """
    if n_nodes < 2:
        raise GraphFormatError(f"graph needs at least 2 nodes, got {n_nodes}")
    canon: dict[tuple[int, int], float] = {}
    for edge in edges:
        if len(edge) == 2:
            i, j = edge
            w = 1.0
        elif len(edge) == 3:
            i, j, w = edge
        else:
            raise GraphFormatError(f"edge must have 2 or 3 entries, got {edge!r}")
        i, j, w = int(i), int(j), float(w)
        if i == j:
            raise GraphFormatError(f"self-loop on node {i} is not allowed")
        if not (0 <= i < n_nodes and 0 <= j < n_nodes):
            raise GraphFormatError(
                f"edge ({i}, {j}) has a node index outside [0, {n_nodes})"
            )
        if not (np.isfinite(w) and w > 0.0):
            raise GraphFormatError(f"edge ({i}, {j}) has non-positive weight {w}")
        key = (min(i, j), max(i, j))
        if key in canon:
            if canon[key] != w:
                raise GraphFormatError(
                    f"duplicate edge {key} with conflicting weights "
                    f"{canon[key]} and {w}"
                )
            continue
        canon[key] = w
    if not canon:
        raise GraphFormatError("graph has no edges")
    edge_tuple = tuple((i, j, w) for (i, j), w in sorted(canon.items()))
    _check_connected(n_nodes, edge_tuple)
    return Graph(n_nodes=n_nodes, edges=edge_tuple)


def load_graph(text: str) -> Graph:
    """Parse an edge-list document into a Graph.

    Each non-comment line reads "i j" or "i j w" with integer node indices
    and an optional positive weight (default 1.0).  A '#' starts a comment
    that runs to the end of the line.  Duplicate (i, j)/(j, i) lines are
    merged; conflicting weights for the same pair are an error.
    """
    raw_edges: list[tuple[int, int, float]] = []
    max_index = -1
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tokens = line.split()
        if len(tokens) not in (2, 3):
            raise GraphFormatError(
                f"line {lineno}: expected 'i j [w]', got {raw.strip()!r}"
            )
        try:
            i = int(tokens[0])
            j = int(tokens[1])
            w = float(tokens[2]) if len(tokens) == 3 else 1.0
        except ValueError as exc:
            raise GraphFormatError(f"line {lineno}: {exc}") from exc
        if i < 0 or j < 0:
            raise GraphFormatError(f"line {lineno}: negative node index")
        if i == j:
            raise GraphFormatError(f"line {lineno}: self-loop on node {i}")
        if not (np.isfinite(w) and w > 0.0):
            raise GraphFormatError(f"line {lineno}: non-positive weight {w}")
        raw_edges.append((i, j, w))
        max_index = max(max_index, i, j)
    if not raw_edges:
        raise GraphFormatError("empty graph: no edges found")
    return graph_from_edges(max_index + 1, raw_edges)


def graph_to_json(g: Graph) -> dict:
    """Serialize to the document form {"n": int, "edges": [[i, j, w], ...]}."""
    return {"n": g.n_nodes, "edges": [[i, j, w] for i, j, w in g.edges]}


def graph_from_json(doc: dict) -> Graph:
    """Inverse of :func:`graph_to_json`, with full validation."""
    try:
        n = int(doc["n"])
        edges = doc["edges"]
    except (KeyError, TypeError) as exc:
        raise GraphFormatError(f"bad graph document: {exc}") from exc
    return graph_from_edges(n, edges)


def adjacency(g: Graph) -> np.ndarray:
    """Dense symmetric weight matrix W."""
    w = np.zeros((g.n_nodes, g.n_nodes))
    for i, j, wt in g.edges:
        w[i, j] = wt
        w[j, i] = wt
    return w


@dataclass(frozen=True)
class GraphOperators:
    """All derived matrices for one graph at one wave speed.

    degree      row sums of W
    l_rw        I - D^-1 W          (rows sum to 0, unit diagonal)
    l_sym       I - D^-1/2 W D^-1/2 (symmetric PSD, spectrum in [0, 2])
    incidence_b D^-1/2-scaled signed incidence, B Bt = l_sym
    hamiltonian c * [[0, B], [Bt, 0]], symmetric (n+m) x (n+m)
    """

    degree: np.ndarray
    l_rw: np.ndarray
    l_sym: np.ndarray
    incidence_b: np.ndarray
    hamiltonian: np.ndarray
    wave_speed_c: float

    @property
    def n_nodes(self) -> int:
        return self.l_sym.shape[0]


def check_wave_speed(c: float) -> float:
    c = float(c)
    if not (0.0 < c < WAVE_SPEED_MAX):
        raise ValidationError(
            f"wave speed must satisfy 0 < c < sqrt(2), got {c}"
        )
    return c


def build_operators(g: Graph, c: float = 1.0) -> GraphOperators:
    """Construct degree vector, Laplacians, incidence B, and Hamiltonian.

    Edge orientation for the incidence matrix is deterministic: the lower
    node index is the source (+sqrt(w)) and the higher the sink (-sqrt(w)).
    Each column is scaled so that B Bt reproduces l_sym exactly on weighted
    graphs as well.
    """
    c = check_wave_speed(c)
    _check_connected(g.n_nodes, g.edges)
    n = g.n_nodes
    m = g.n_edges
    w = adjacency(g)
    degree = w.sum(axis=1)
    d_inv = 1.0 / degree
    d_isqrt = 1.0 / np.sqrt(degree)
    eye = np.eye(n)
    l_rw = eye - d_inv[:, None] * w
    l_sym = eye - d_isqrt[:, None] * w * d_isqrt[None, :]
    # Exact symmetry; the elementwise construction above is symmetric only
    # up to rounding in the two scalings.
    l_sym = 0.5 * (l_sym + l_sym.T)

    iota = np.zeros((n, m))
    for e, (i, j, wt) in enumerate(g.edges):
        root = np.sqrt(wt)
        iota[i, e] = root
        iota[j, e] = -root
    incidence_b = d_isqrt[:, None] * iota

    ham = np.zeros((n + m, n + m))
    ham[:n, n:] = c * incidence_b
    ham[n:, :n] = c * incidence_b.T

    return GraphOperators(
        degree=degree,
        l_rw=l_rw,
        l_sym=l_sym,
        incidence_b=incidence_b,
        hamiltonian=ham,
        wave_speed_c=c,
    )


def classical_spectrum(ops: GraphOperators, k: int) -> tuple[np.ndarray, np.ndarray]:
    """First k eigenpairs of l_sym from a dense symmetric eigensolver.

    Returns eigenvalues in ascending order and the matching unit-norm
    eigenvectors as columns.  Serves as the verification oracle for the
    wave/DMD route.
    """
    n = ops.n_nodes
    if not (1 <= k <= n):
        raise ValidationError(f"k must be in [1, {n}], got {k}")
    vals, vecs = scipy.linalg.eigh(ops.l_sym)
    if abs(vals[0]) > 1e-10:
        raise NumericalError(
            f"smallest l_sym eigenvalue should be 0, got {vals[0]:.3e}"
        )
    return vals[:k].copy(), vecs[:, :k].copy()
