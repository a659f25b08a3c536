"""Shared fixtures and the independent brute-force oracle.

The brute-force helpers below recompute cascade quantities from first
principles (explicit per-round set arithmetic over every coin assignment,
no CSR arrays, no shared code with the package kernel) so the package's
simulator and enumeration oracle can be checked against an implementation
that cannot share their bugs.
"""

import itertools
import math

import numpy as np
import pytest

from nieblock import Instance, from_edges


# ---------------------------------------------------------------------------
# brute-force oracle


def brute_cascade_f_set(node_count, out_edges, live, s_f, s_t):
    """F-active set for one coin assignment, by explicit round bookkeeping.

    out_edges: dict u -> list of (v, edge_index). live: dict edge_index -> bool.
    Each round collects the targets of successful attempts from last round's
    newly false nodes and newly true nodes separately; false claims win
    contested targets.
    """
    state = {}
    for v in s_f:
        state[v] = "F"
    for v in s_t:
        state[v] = "T"
    new_f, new_t = set(s_f), set(s_t)
    while new_f or new_t:
        f_targets = set()
        for u in new_f:
            for v, ei in out_edges.get(u, ()):
                if v not in state and live[ei]:
                    f_targets.add(v)
        t_targets = set()
        for u in new_t:
            for v, ei in out_edges.get(u, ()):
                if v not in state and live[ei]:
                    t_targets.add(v)
        t_targets -= f_targets  # contested nodes go false
        for v in f_targets:
            state[v] = "F"
        for v in t_targets:
            state[v] = "T"
        new_f, new_t = f_targets, t_targets
    return {v for v, s in state.items() if s == "F"}


def _graph_tables(graph):
    out_edges = {}
    probs = []
    for ei, (u, v) in enumerate(graph.edges):
        out_edges.setdefault(u, []).append((v, ei))
        probs.append(graph.edge_prob[(u, v)])
    return out_edges, probs


def iter_worlds(probs):
    """(live dict, probability weight) over every coin assignment."""
    m = len(probs)
    for bits in itertools.product((False, True), repeat=m):
        weight = 1.0
        for p, bit in zip(probs, bits):
            weight *= p if bit else 1.0 - p
        yield dict(enumerate(bits)), weight


def brute_y(graph, s_f, s_t):
    """Exact expected count of nodes that do not end up false-active."""
    out_edges, probs = _graph_tables(graph)
    total = 0.0
    for live, weight in iter_worlds(probs):
        if weight == 0.0:
            continue
        f_set = brute_cascade_f_set(graph.node_count, out_edges, live, s_f, s_t)
        total += weight * (graph.node_count - len(f_set))
    return total


def brute_blocked(graph, s_f, s_t):
    return brute_y(graph, s_f, s_t) - brute_y(graph, s_f, ())


def brute_f_marginals(graph, s_f):
    """Exact per-node probability of ending false-active, with no true seeds."""
    out_edges, probs = _graph_tables(graph)
    marginal = {v: 0.0 for v in range(graph.node_count)}
    for live, weight in iter_worlds(probs):
        if weight == 0.0:
            continue
        for v in brute_cascade_f_set(graph.node_count, out_edges, live, s_f, ()):
            marginal[v] += weight
    return marginal


# ---------------------------------------------------------------------------
# graph builders


def random_graph(rng, max_nodes, max_edges, min_nodes=2):
    """Small random directed graph with probabilities, for property loops."""
    n = int(rng.integers(min_nodes, max_nodes + 1))
    pairs = [(u, v) for u in range(n) for v in range(n) if u != v]
    m = int(rng.integers(1, min(max_edges, len(pairs)) + 1))
    idx = rng.choice(len(pairs), size=m, replace=False)
    edges = [pairs[i] for i in idx]
    probs = {e: round(float(rng.uniform(0.05, 1.0)), 3) for e in edges}
    return from_edges(n, edges, probs)


def random_instance(rng, graph, max_kf=3, max_kt=3):
    n = graph.node_count
    k_f = int(rng.integers(1, min(max_kf, n - 1) + 1))
    nodes = rng.permutation(n)
    s_f = tuple(int(v) for v in nodes[:k_f])
    k_t = int(rng.integers(0, min(max_kt, n - k_f) + 1))
    s_t = tuple(int(v) for v in nodes[k_f : k_f + k_t])
    return Instance(s_f, s_t)


def random_tree(rng, max_nodes):
    """Random directed tree, edges pointing away from node 0."""
    n = int(rng.integers(2, max_nodes + 1))
    edges = []
    for v in range(1, n):
        parent = int(rng.integers(0, v))
        edges.append((parent, v))
    probs = {e: round(float(rng.uniform(0.1, 1.0)), 3) for e in edges}
    depth = {0: 0}
    for u, v in sorted(edges, key=lambda e: e[1]):
        depth[v] = depth[u] + 1
    return from_edges(n, edges, probs), max(depth.values())


def random_mlp(rng, graph, h_radius=2, dims=(7, 16, 1)):
    """Untrained surrogate with identity normalization, bound to a graph."""
    from nieblock import MlpModel

    weights = [rng.normal(0.0, 0.4, size=(o, i)) for i, o in zip(dims[:-1], dims[1:])]
    biases = [rng.normal(0.0, 0.1, size=o) for o in dims[1:]]
    return MlpModel(
        layer_dims=dims,
        weights=weights,
        biases=biases,
        feature_means=np.zeros(dims[0]),
        feature_stds=np.ones(dims[0]),
        label_mean=0.0,
        label_std=1.0,
        h_radius=h_radius,
        graph_fingerprint=graph.fingerprint,
    )


def make_power_law_edges(n, m, seed):
    """Synthetic power-law-ish digraph: hub-weighted sources, uniform targets."""
    rng = np.random.default_rng(seed)
    weights = rng.pareto(1.7, n) + 1.0
    pick = weights / weights.sum()
    edges = set()
    while len(edges) < m:
        u = int(rng.choice(n, p=pick))
        v = int(rng.integers(n))
        if u != v:
            edges.add((u, v))
    return sorted(edges)


# ---------------------------------------------------------------------------
# fixtures


@pytest.fixture
def fourcoin():
    """0->1 certain, 0->2 and 1->2 even odds. Blocked({1}) is exactly 1.25."""
    return from_edges(3, [(0, 1), (0, 2), (1, 2)], {(0, 1): 1.0, (0, 2): 0.5, (1, 2): 0.5})


@pytest.fixture
def path3():
    """0 -> 1 -> 2, both edges certain."""
    return from_edges(3, [(0, 1), (1, 2)], {(0, 1): 1.0, (1, 2): 1.0})


@pytest.fixture
def weighted_path():
    """a -> b -> c with probabilities 0.4 and 0.6."""
    return from_edges(3, [(0, 1), (1, 2)], {(0, 1): 0.4, (1, 2): 0.6})


def assert_close(a, b, tol=1e-12):
    assert math.isfinite(a) and math.isfinite(b)
    assert abs(a - b) <= tol, f"{a} != {b} (tol {tol})"
