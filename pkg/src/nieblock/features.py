"""The 7-dimensional feature vector for the neural blocked-influence surrogate.

For each seed set the extractor computes three topological aggregates:

* neighborhood feature d: how many distinct nodes the set can reach in one
  hop (size of the union of out-neighbor sets),
* location feature b: summed closeness centrality of the seeds,
* structure feature c: summed directed clustering coefficient of the seeds,

and one coupling score p that quantifies how well the true seeds are placed
to intercept the false cascade. The coupling score first assigns every node
within hop radius h of the false seeds an approximate probability of ending
up false-active (a layered single-pass recurrence over average incoming edge
probabilities), then counts, probability-weighted, the nodes that the true
seeds reach strictly sooner than the false seeds do.

All functions are pure; the inputs are never mutated. Set-valued arguments
are iterated in sorted node order so floating-point accumulation is
reproducible.
"""

from dataclasses import dataclass

import numpy as np

from .cascade import Instance
from .errors import FingerprintMismatchError
from .graph import Graph, NodeStats, multi_source_bfs

FEATURE_NAMES = ("d_f", "b_f", "c_f", "d_t", "b_t", "c_t", "p")


@dataclass(frozen=True)
class FeatureVector:
    d_f: float
    b_f: float
    c_f: float
    d_t: float
    b_t: float
    c_t: float
    p: float

    def as_array(self) -> np.ndarray:
        return np.array(
            [self.d_f, self.b_f, self.c_f, self.d_t, self.b_t, self.c_t, self.p],
            dtype=np.float64,
        )


@dataclass(frozen=True)
class FActiveMap:
    """Approximate false-activation probabilities on the radius-h shell.

    probabilities maps every node at hop distance 1..h from the false seeds
    (the seeds themselves excluded) to a value in [0, 1].
    """

    probabilities: dict
    h_radius: int


def _as_sorted_ids(graph: Graph, s) -> list:
    ids = sorted(set(int(v) for v in s))
    for v in ids:
        graph.validate_node(v)
    return ids


def neighborhood_feature(graph: Graph, s) -> int:
    """Size of the union of the seeds' out-neighbor sets."""
    ids = _as_sorted_ids(graph, s)
    if not ids:
        raise ValueError("seed set must be nonempty")
    union = set()
    for v in ids:
        union.update(graph.out_adj[v])
    return len(union)


def location_feature(stats: NodeStats, s) -> float:
    """Summed closeness centrality over the seed set."""
    total = 0.0
    for v in sorted(set(int(x) for x in s)):
        if not (0 <= v < len(stats.closeness)):
            raise ValueError(f"node id {v} out of range")
        total += float(stats.closeness[v])
    return total


def structure_feature(stats: NodeStats, s) -> float:
    """Summed directed clustering coefficient over the seed set."""
    total = 0.0
    for v in sorted(set(int(x) for x in s)):
        if not (0 <= v < len(stats.clustering)):
            raise ValueError(f"node id {v} out of range")
        total += float(stats.clustering[v])
    return total


def f_active_probabilities(graph: Graph, s_f, h: int) -> FActiveMap:
    """Layered approximation of Pr[node becomes false-active] near the seeds.

    Nodes are grouped by hop distance from the false seeds. Every node v in
    the shell gets a propagation coefficient pc(v), the mean probability of
    its incoming edges. Distance-1 nodes take pc(v) directly. A node at
    distance k >= 2 takes pc(v) scaled by the probability that at least one
    of its distance-(k-1) predecessors is false-active, treating those
    predecessors as independent. Same-layer and seed predecessors do not
    enter the product; a node at distance k necessarily has a predecessor at
    distance k-1, so the recurrence is total.
    """
    if h < 1:
        raise ValueError(f"h must be >= 1, got {h}")
    graph.require_probabilities()
    seeds = set(_as_sorted_ids(graph, s_f))
    if not seeds:
        raise ValueError("s_f must be nonempty")
    dist = multi_source_bfs(graph, seeds, h)
    prob = {}
    for layer in range(1, h + 1):
        members = sorted(v for v, d in dist.items() if d == layer)
        for v in members:
            parents = graph.in_adj[v]
            pc = sum(graph.edge_prob[(u, v)] for u in parents) / len(parents)
            if layer == 1:
                prob[v] = pc
            else:
                miss = 1.0
                for u in parents:
                    if dist.get(u) == layer - 1:
                        miss *= 1.0 - prob[u]
                prob[v] = pc * (1.0 - miss)
    return FActiveMap(probabilities=prob, h_radius=h)


def _coupling_sum(famap: FActiveMap, dist_f: dict, dist_t: dict) -> float:
    """Probability-weighted count of shell nodes the true seeds reach first."""
    total = 0.0
    for v in sorted(famap.probabilities):
        if dist_t.get(v, np.inf) < dist_f[v]:
            total += famap.probabilities[v]
    return total


def inter_relationship(graph: Graph, instance: Instance, h: int) -> float:
    """Coupling score p between the false and true seed placements.

    A shell node counts (weighted by its false-activation probability) when
    the true seeds are strictly closer to it than the false seeds are.
    Distances from the true seeds only matter below h, so that search is
    truncated at depth h-1. Empty s_t gives 0.
    """
    if not instance.s_t:
        if h < 1:
            raise ValueError(f"h must be >= 1, got {h}")
        return 0.0
    famap = f_active_probabilities(graph, instance.s_f, h)
    dist_f = multi_source_bfs(graph, instance.s_f, h)
    dist_t = multi_source_bfs(graph, instance.s_t, h - 1)
    return _coupling_sum(famap, dist_f, dist_t)


def featurize(graph: Graph, stats: NodeStats, instance: Instance, h: int) -> FeatureVector:
    """Assemble the 7-feature input (d_f, b_f, c_f, d_t, b_t, c_t, p).

    The true-seed block and the coupling score are all 0 when s_t is empty,
    so the featurizer is total over optimizer states.
    """
    if stats.graph_fingerprint != graph.fingerprint:
        raise FingerprintMismatchError("node stats were computed for a different graph")
    d_f = float(neighborhood_feature(graph, instance.s_f))
    b_f = location_feature(stats, instance.s_f)
    c_f = structure_feature(stats, instance.s_f)
    if instance.s_t:
        d_t = float(neighborhood_feature(graph, instance.s_t))
        b_t = location_feature(stats, instance.s_t)
        c_t = structure_feature(stats, instance.s_t)
        p = inter_relationship(graph, instance, h)
    else:
        d_t = b_t = c_t = p = 0.0
    return FeatureVector(d_f=d_f, b_f=b_f, c_f=c_f, d_t=d_t, b_t=b_t, c_t=c_t, p=p)
