"""Directed graph loading, validation, and per-node statistics.

The Graph type is an immutable directed graph with adjacency indexed in both
directions, optional per-edge propagation probabilities, and a CSR view of the
out-adjacency that the cascade simulator consumes. NodeStats carries the
precomputed per-node quantities the feature extractor needs: closeness
centrality over forward hop distances, a directed clustering coefficient, and
degree counts.

Conventions
-----------
* Node ids are contiguous integers in [0, n). Loading compacts arbitrary
  non-negative ids by sorting the distinct ids that appear.
* Distances are unweighted directed hop counts.
* Closeness of node i is L / sum(d(i, v)) over the L nodes reachable from i
  (i itself excluded), and 0 when nothing is reachable.
* Clustering of node i is T / (2 * deg_tot * (deg_tot - 1) - 2 * deg_rec)
  where T is half the number of closed length-3 walks through i in the
  symmetrized adjacency (reciprocal edges count with weight 2), deg_tot is
  in-degree + out-degree, and deg_rec is the number of reciprocal partners.
  A zero denominator gives clustering 0.
"""

import hashlib
import io
import os
import warnings
from collections import deque
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
from scipy.sparse import csgraph

from .errors import FingerprintMismatchError, ModelFormatError, ParseError
from .ioutil import atomic_write_text, dumps_deterministic

# Above this node count the CLI precompute command switches to sampled
# closeness unless told otherwise.
AUTO_SAMPLED_THRESHOLD = 50_000

STATS_FORMAT_VERSION = 1


@dataclass
class Graph:
    """Immutable directed graph. Build via load_edge_list or from_edges."""

    node_count: int
    edges: tuple  # tuple of (u, v), sorted ascending
    out_adj: tuple  # tuple of tuples of successors, each sorted
    in_adj: tuple  # tuple of tuples of predecessors, each sorted
    edge_prob: dict  # (u, v) -> float in (0, 1]; may be incomplete after load
    self_loops_dropped: int = 0
    duplicates_dropped: int = 0

    # CSR view over `edges` order grouped by source, for the simulator.
    csr_indptr: np.ndarray = field(init=False, repr=False)
    csr_dst: np.ndarray = field(init=False, repr=False)
    _fingerprint: str | None = field(init=False, repr=False, default=None)

    def __post_init__(self):
        n = self.node_count
        if n < 1:
            raise ValueError("graph must have at least one node")
        indptr = np.zeros(n + 1, dtype=np.int64)
        for u, _ in self.edges:
            indptr[u + 1] += 1
        np.cumsum(indptr, out=indptr)
        self.csr_indptr = indptr
        self.csr_dst = np.fromiter(
            (v for _, v in self.edges), dtype=np.int32, count=len(self.edges)
        )

    @property
    def edge_count(self) -> int:
        return len(self.edges)

    def has_all_probabilities(self) -> bool:
        return len(self.edge_prob) == len(self.edges)

    def require_probabilities(self) -> None:
        if not self.has_all_probabilities():
            raise ValueError(
                "graph has edges without propagation probabilities; "
                "run assign_degree_probabilities or load a file with a "
                "probability column"
            )

    def csr_probabilities(self) -> np.ndarray:
        """Edge probabilities aligned with the CSR edge order."""
        self.require_probabilities()
        return np.fromiter(
            (self.edge_prob[e] for e in self.edges),
            dtype=np.float64,
            count=len(self.edges),
        )

    def validate_node(self, v: int) -> None:
        if not (0 <= v < self.node_count):
            raise ValueError(f"node id {v} out of range [0, {self.node_count})")

    def in_degree_array(self) -> np.ndarray:
        return np.fromiter(
            (len(l) for l in self.in_adj), dtype=np.int64, count=self.node_count
        )

    def out_degree_array(self) -> np.ndarray:
        return np.fromiter(
            (len(l) for l in self.out_adj), dtype=np.int64, count=self.node_count
        )

    @property
    def fingerprint(self) -> str:
        """Content hash of the canonical edge list, probabilities included.

        Artifacts derived from a graph (stats caches, datasets, models)
        carry this hash and refuse to combine with a different graph.
        """
        if self._fingerprint is not None:
            return self._fingerprint
        h = hashlib.sha256()
        h.update(f"nieblock-graph-v1\n{self.node_count}\n".encode())
        for u, v in self.edges:
            p = self.edge_prob.get((u, v))
            tag = "-" if p is None else repr(p)
            h.update(f"{u} {v} {tag}\n".encode())
        self._fingerprint = h.hexdigest()
        return self._fingerprint


def from_edges(node_count, edges, edge_prob=None, self_loops_dropped=0, duplicates_dropped=0) -> Graph:
    """Build a validated Graph from an edge iterable with ids already in [0, n)."""
    uniq = sorted(set((int(u), int(v)) for u, v in edges))
    prob = dict(edge_prob) if edge_prob else {}
    out_lists = [[] for _ in range(node_count)]
    in_lists = [[] for _ in range(node_count)]
    for u, v in uniq:
        if u == v:
            raise ValueError(f"self-loop at node {u}")
        if not (0 <= u < node_count and 0 <= v < node_count):
            raise ValueError(f"edge ({u}, {v}) out of range [0, {node_count})")
        out_lists[u].append(v)
        in_lists[v].append(u)
    edge_set = set(uniq)
    for e, p in prob.items():
        if e not in edge_set:
            raise ValueError(f"probability given for non-edge {e}")
        if not (0.0 < p <= 1.0):
            raise ValueError(f"probability {p} for edge {e} outside (0, 1]")
    return Graph(
        node_count=node_count,
        edges=tuple(uniq),
        out_adj=tuple(tuple(l) for l in out_lists),
        in_adj=tuple(tuple(l) for l in in_lists),
        edge_prob=prob,
        self_loops_dropped=self_loops_dropped,
        duplicates_dropped=duplicates_dropped,
    )


def load_edge_list(source, header_mode: str = "auto") -> Graph:
    """Parse a whitespace-separated edge list into a Graph.

    source may be a path or a text file object. Lines are "u v" or "u v p"
    with non-negative integer ids and an optional probability in (0, 1].
    With header_mode="auto", lines starting with '#' are comments; with
    "none" they are data and fail to parse. Node ids are compacted to
    [0, n) preserving ascending order. Self-loops are dropped and counted;
    on duplicate edges the first occurrence (and its probability) wins.
    """
    if header_mode not in ("auto", "none"):
        raise ValueError(f"header_mode must be 'auto' or 'none', got {header_mode!r}")
    if isinstance(source, (str, os.PathLike)):
        with open(source, "r", encoding="utf-8") as fh:
            return load_edge_list(fh, header_mode)
    if not isinstance(source, io.TextIOBase) and not hasattr(source, "readline"):
        raise TypeError("source must be a path or a text file object")

    raw_edges = {}  # (u, v) original ids -> prob or None, first wins
    self_loops = 0
    duplicates = 0
    for line_no, line in enumerate(source, start=1):
        line = line.strip()
        if not line:
            continue
        if line.startswith("#"):
            if header_mode == "auto":
                continue
            raise ParseError(line_no, "comment line not allowed with header_mode='none'")
        parts = line.split()
        if len(parts) not in (2, 3):
            raise ParseError(line_no, f"expected 'u v' or 'u v p', got {line!r}")
        try:
            u, v = int(parts[0]), int(parts[1])
        except ValueError:
            raise ParseError(line_no, f"node ids must be integers, got {line!r}") from None
        if u < 0 or v < 0:
            raise ParseError(line_no, "node ids must be non-negative")
        p = None
        if len(parts) == 3:
            try:
                p = float(parts[2])
            except ValueError:
                raise ParseError(line_no, f"bad probability {parts[2]!r}") from None
            if not (0.0 < p <= 1.0):
                raise ParseError(line_no, f"probability {p} outside (0, 1]")
        if u == v:
            self_loops += 1
            continue
        if (u, v) in raw_edges:
            duplicates += 1
            continue
        raw_edges[(u, v)] = p

    if not raw_edges:
        raise ValueError("empty graph: no edges in input")

    ids = sorted({u for u, _ in raw_edges} | {v for _, v in raw_edges})
    remap = {orig: i for i, orig in enumerate(ids)}
    edges = {}
    probs = {}
    for (u, v), p in raw_edges.items():
        e = (remap[u], remap[v])
        edges[e] = None
        if p is not None:
            probs[e] = p
    return from_edges(
        len(ids),
        edges.keys(),
        edge_prob=probs,
        self_loops_dropped=self_loops,
        duplicates_dropped=duplicates,
    )


def assign_degree_probabilities(graph: Graph) -> Graph:
    """Return a copy of graph where every edge (u, v) has probability 1/in_degree(v).

    This is the standard weighted-cascade assignment. Any probabilities
    already present are replaced so the whole graph uses one convention.
    """
    prob = {}
    for u, v in graph.edges:
        prob[(u, v)] = 1.0 / len(graph.in_adj[v])
    return from_edges(
        graph.node_count,
        graph.edges,
        edge_prob=prob,
        self_loops_dropped=graph.self_loops_dropped,
        duplicates_dropped=graph.duplicates_dropped,
    )


@dataclass
class NodeStats:
    """Precomputed per-node statistics used by the feature extractor."""

    closeness: np.ndarray  # float64, >= 0
    clustering: np.ndarray  # float64, in [0, 1]
    in_degree: np.ndarray  # int64
    out_degree: np.ndarray  # int64
    closeness_mode: str  # "exact" or "sampled"
    sample_size: int | None
    graph_fingerprint: str


def _adjacency_matrix(graph: Graph) -> sp.csr_matrix:
    n = graph.node_count
    if graph.edge_count == 0:
        return sp.csr_matrix((n, n), dtype=np.int64)
    src = np.fromiter((u for u, _ in graph.edges), dtype=np.int64, count=graph.edge_count)
    dst = np.fromiter((v for _, v in graph.edges), dtype=np.int64, count=graph.edge_count)
    data = np.ones(graph.edge_count, dtype=np.int64)
    return sp.csr_matrix((data, (src, dst)), shape=(n, n))


def _closeness_from_targets(adj: sp.csr_matrix, targets: np.ndarray) -> np.ndarray:
    """Closeness estimate from distances to the given target nodes.

    One reverse BFS per target yields d(i, t) for every source i at once.
    Reach counts and distance sums are integers, so accumulation order
    cannot perturb the result and using all n targets reproduces the exact
    definition bit for bit.
    """
    n = adj.shape[0]
    reach = np.zeros(n, dtype=np.int64)
    dist_sum = np.zeros(n, dtype=np.int64)
    adj_t = adj.T.tocsr()
    chunk = max(1, int(4_000_000 // max(n, 1)))
    for lo in range(0, len(targets), chunk):
        batch = targets[lo : lo + chunk]
        # dijkstra on the transpose with unit weights = reverse BFS
        d = csgraph.dijkstra(adj_t, unweighted=True, indices=batch, min_only=False)
        d = np.atleast_2d(d)
        finite = np.isfinite(d)
        for row, t in enumerate(batch):
            finite[row, t] = False  # self-distance is excluded from the sums
        reach += finite.sum(axis=0)
        dist_sum += np.where(finite, d, 0.0).astype(np.int64).sum(axis=0)
    out = np.zeros(n, dtype=np.float64)
    nz = reach > 0
    out[nz] = reach[nz] / dist_sum[nz]
    return out


def _clustering(graph: Graph, adj: sp.csr_matrix) -> np.ndarray:
    sym = (adj + adj.T).tocsr()
    # half the closed 3-walk count; reciprocal edges carry weight 2 here
    triangles = (sym @ sym @ sym).diagonal().astype(np.float64) / 2.0
    deg_tot = (graph.in_degree_array() + graph.out_degree_array()).astype(np.float64)
    reciprocal = (adj @ adj).diagonal().astype(np.float64)
    denom = 2.0 * deg_tot * (deg_tot - 1.0) - 2.0 * reciprocal
    out = np.zeros(graph.node_count, dtype=np.float64)
    ok = denom > 0
    out[ok] = triangles[ok] / denom[ok]
    return out


def compute_node_stats(
    graph: Graph,
    closeness_mode: str = "exact",
    sample_size: int | None = None,
    seed: int = 0,
) -> NodeStats:
    """Compute closeness, clustering, and degrees for every node.

    closeness_mode="exact" runs one BFS per node. "sampled" estimates
    closeness from sample_size randomly chosen target nodes (without
    replacement, seeded); with sample_size equal to the node count the
    sampled mode reproduces the exact mode bit for bit.
    """
    n = graph.node_count
    adj = _adjacency_matrix(graph)
    if closeness_mode == "exact":
        targets = np.arange(n, dtype=np.int64)
    elif closeness_mode == "sampled":
        if sample_size is None or sample_size <= 0:
            raise ValueError("sampled closeness requires sample_size >= 1")
        k = min(sample_size, n)
        rng = np.random.default_rng(seed)
        targets = np.sort(rng.choice(n, size=k, replace=False)).astype(np.int64)
    else:
        raise ValueError(f"closeness_mode must be 'exact' or 'sampled', got {closeness_mode!r}")
    return NodeStats(
        closeness=_closeness_from_targets(adj, targets),
        clustering=_clustering(graph, adj),
        in_degree=graph.in_degree_array(),
        out_degree=graph.out_degree_array(),
        closeness_mode=closeness_mode,
        sample_size=None if closeness_mode == "exact" else int(len(targets)),
        graph_fingerprint=graph.fingerprint,
    )


def multi_source_bfs(graph: Graph, sources, depth_limit: int) -> dict:
    """Directed hop distances from a source set, truncated at depth_limit.

    Returns {node: d} for every node with d = min over sources of the hop
    distance, restricted to d <= depth_limit. Sources map to 0.
    """
    src = sorted(set(int(s) for s in sources))
    if not src:
        raise ValueError("sources must be nonempty")
    for s in src:
        graph.validate_node(s)
    if depth_limit < 0:
        raise ValueError("depth_limit must be >= 0")
    dist = {s: 0 for s in src}
    frontier = deque(src)
    depth = 0
    while frontier and depth < depth_limit:
        depth += 1
        for _ in range(len(frontier)):
            u = frontier.popleft()
            for v in graph.out_adj[u]:
                if v not in dist:
                    dist[v] = depth
                    frontier.append(v)
    return dist


def save_node_stats(stats: NodeStats, path: str) -> None:
    payload = {
        "format_version": STATS_FORMAT_VERSION,
        "graph_fingerprint": stats.graph_fingerprint,
        "closeness_mode": stats.closeness_mode,
        "sample_size": stats.sample_size,
        "closeness": stats.closeness.tolist(),
        "clustering": stats.clustering.tolist(),
        "in_degree": stats.in_degree.tolist(),
        "out_degree": stats.out_degree.tolist(),
    }
    atomic_write_text(path, dumps_deterministic(payload) + "\n")


def load_node_stats(path: str, graph: Graph | None = None) -> NodeStats:
    """Load a stats cache; verifies the fingerprint when a graph is given."""
    import json

    with open(path, "r", encoding="utf-8") as fh:
        try:
            payload = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ModelFormatError(f"stats cache {path}: {exc}") from None
    if not isinstance(payload, dict) or payload.get("format_version") != STATS_FORMAT_VERSION:
        raise ModelFormatError(
            f"stats cache {path}: unsupported format_version "
            f"{payload.get('format_version') if isinstance(payload, dict) else '?'}"
        )
    try:
        stats = NodeStats(
            closeness=np.asarray(payload["closeness"], dtype=np.float64),
            clustering=np.asarray(payload["clustering"], dtype=np.float64),
            in_degree=np.asarray(payload["in_degree"], dtype=np.int64),
            out_degree=np.asarray(payload["out_degree"], dtype=np.int64),
            closeness_mode=payload["closeness_mode"],
            sample_size=payload["sample_size"],
            graph_fingerprint=payload["graph_fingerprint"],
        )
    except KeyError as exc:
        raise ModelFormatError(f"stats cache {path}: missing field {exc}") from None
    if graph is not None and stats.graph_fingerprint != graph.fingerprint:
        raise FingerprintMismatchError(
            f"stats cache {path} was computed for a different graph"
        )
    return stats


def load_or_compute_stats(graph: Graph, cache_path: str | None, **kwargs) -> NodeStats:
    """Stats cache helper: hit on fingerprint match, else recompute (and warn
    if an existing cache was unusable)."""
    if cache_path and os.path.exists(cache_path):
        try:
            return load_node_stats(cache_path, graph)
        except (ModelFormatError, FingerprintMismatchError) as exc:
            warnings.warn(f"regenerating stats cache: {exc}")
    stats = compute_node_stats(graph, **kwargs)
    if cache_path:
        save_node_stats(stats, cache_path)
    return stats
