"""Two-cascade competitive diffusion: simulation, Monte Carlo estimation,
and an exact enumeration oracle for tiny graphs.

Model
-----
Nodes are in one of three states: false-active (F), true-active (T), or
inactive (Theta). Both seed sets are active at step 0. The process runs in
synchronous rounds: every node activated in the previous round attempts each
still-inactive out-neighbor exactly once, succeeding with the edge
probability. When a false attempt and a true attempt both succeed on the same
node in the same round, the false cascade wins. States are final once set;
the process stops when a round changes nothing.

Because each directed edge is attempted at most once per realization (the
attempting endpoint has a single final state), flipping one coin per edge up
front yields the same distribution: a realization is a "live-edge world", a
boolean vector over edges. Replication i of an estimate draws its world from
a stream derived from (master_seed, i), so estimates are reproducible and
independent of evaluation order. The blocked-influence estimator reuses the
same world for both of its terms (common random numbers), which makes the
empty-true-seed case exactly zero and shrinks variance.

The quantity of interest is how many nodes end up NOT false-active:
y(s_t | s_f) = E[node_count - |F|]. Blocked influence is the lift
f(s_t | s_f) = y(s_t | s_f) - y(empty | s_f).
"""

import math
from dataclasses import dataclass

import numpy as np
from numba import njit

from .errors import OracleSizeError
from .graph import Graph

# node state codes, also used in SimOutcome.node_states
THETA = 0
F_ACTIVE = 1
T_ACTIVE = 2

DEFAULT_ORACLE_MAX_EDGES = 20


@dataclass(frozen=True)
class Instance:
    """A false-seed / true-seed pair. Seed sets are disjoint; s_f nonempty."""

    s_f: tuple
    s_t: tuple

    def __init__(self, s_f, s_t=()):
        sf = tuple(sorted(set(int(v) for v in s_f)))
        st = tuple(sorted(set(int(v) for v in s_t)))
        if not sf:
            raise ValueError("s_f must be nonempty")
        if set(sf) & set(st):
            raise ValueError(f"seed sets overlap: {sorted(set(sf) & set(st))}")
        object.__setattr__(self, "s_f", sf)
        object.__setattr__(self, "s_t", st)


@dataclass
class SimOutcome:
    """Result of one realization."""

    f_active_count: int
    not_f_count: int
    node_states: np.ndarray  # uint8 per node: THETA / F_ACTIVE / T_ACTIVE


@dataclass
class Estimate:
    """Monte Carlo estimate with its standard error."""

    mean: float
    std_error: float
    replications: int
    master_seed: int


def validate_instance(graph: Graph, instance: Instance) -> None:
    for v in instance.s_f:
        graph.validate_node(v)
    for v in instance.s_t:
        graph.validate_node(v)


@njit(cache=True)
def _propagate(n, indptr, dst, live, s_f, s_t, state, frontier):
    """One deterministic realization given live-edge coins.

    frontier is scratch of length 4n: current F frontier at [0, n),
    current T at [n, 2n), next F at [2n, 3n), next T at [3n, 4n).
    Returns the F-active count. The F frontier is expanded before the T
    frontier each round, and both only see states from the previous round
    plus same-round F wins, which is exactly the false-priority tie rule.
    """
    for i in range(n):
        state[i] = 0
    for s in s_f:
        state[s] = 1
    for s in s_t:
        state[s] = 2
    nf = len(s_f)
    for i in range(nf):
        frontier[i] = s_f[i]
    nt = len(s_t)
    for i in range(nt):
        frontier[n + i] = s_t[i]
    f_count = nf
    while nf > 0 or nt > 0:
        new_f = 0
        for i in range(nf):
            u = frontier[i]
            for e in range(indptr[u], indptr[u + 1]):
                v = dst[e]
                if state[v] == 0 and live[e]:
                    state[v] = 1
                    frontier[2 * n + new_f] = v
                    new_f += 1
        new_t = 0
        for i in range(nt):
            u = frontier[n + i]
            for e in range(indptr[u], indptr[u + 1]):
                v = dst[e]
                if state[v] == 0 and live[e]:
                    state[v] = 2
                    frontier[3 * n + new_t] = v
                    new_t += 1
        for i in range(new_f):
            frontier[i] = frontier[2 * n + i]
        for i in range(new_t):
            frontier[n + i] = frontier[3 * n + i]
        nf = new_f
        nt = new_t
        f_count += new_f
    return f_count


@njit(cache=True)
def _exact_enum(n, indptr, dst, probs, s_f, s_t, m):
    """Probability-weighted blocked influence over all 2^m live-edge worlds."""
    state = np.empty(n, dtype=np.uint8)
    frontier = np.empty(4 * n, dtype=np.int32)
    live = np.empty(m, dtype=np.bool_)
    empty = np.empty(0, dtype=np.int64)
    total = 0.0
    for w in range(1 << m):
        p_w = 1.0
        for e in range(m):
            if (w >> e) & 1:
                live[e] = True
                p_w *= probs[e]
            else:
                live[e] = False
                p_w *= 1.0 - probs[e]
        if p_w == 0.0:
            continue
        f_with = _propagate(n, indptr, dst, live, s_f, s_t, state, frontier)
        f_without = _propagate(n, indptr, dst, live, s_f, empty, state, frontier)
        total += p_w * (f_without - f_with)
    return total


def _seed_arrays(instance: Instance):
    s_f = np.asarray(instance.s_f, dtype=np.int64)
    s_t = np.asarray(instance.s_t, dtype=np.int64)
    return s_f, s_t


def replication_rng(master_seed: int, replication: int) -> np.random.Generator:
    """The stream for one replication, a pure function of (master_seed, i)."""
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence((master_seed, replication))))


def simulate_once(graph: Graph, instance: Instance, rng: np.random.Generator) -> SimOutcome:
    """Run a single realization, consuming one coin per edge from rng."""
    validate_instance(graph, instance)
    probs = graph.csr_probabilities()
    n = graph.node_count
    live = rng.random(len(probs)) < probs
    s_f, s_t = _seed_arrays(instance)
    state = np.empty(n, dtype=np.uint8)
    frontier = np.empty(4 * n, dtype=np.int32)
    f_count = _propagate(n, graph.csr_indptr, graph.csr_dst, live, s_f, s_t, state, frontier)
    return SimOutcome(f_active_count=int(f_count), not_f_count=n - int(f_count), node_states=state)


def _summarize(values_sum: int, squares_sum: int, r: int, master_seed: int) -> Estimate:
    mean = values_sum / r
    if r > 1:
        # exact integer arithmetic up to the final division
        var_num = r * squares_sum - values_sum * values_sum
        variance = var_num / (r * (r - 1))
        std_error = math.sqrt(variance / r) if variance > 0 else 0.0
    else:
        std_error = 0.0
    return Estimate(mean=mean, std_error=std_error, replications=r, master_seed=master_seed)


def estimate_y(graph: Graph, instance: Instance, r: int, master_seed: int) -> Estimate:
    """Monte Carlo estimate of y(s_t | s_f), the expected not-false count."""
    if r < 1:
        raise ValueError(f"replications must be >= 1, got {r}")
    validate_instance(graph, instance)
    probs = graph.csr_probabilities()
    n = graph.node_count
    m = len(probs)
    s_f, s_t = _seed_arrays(instance)
    state = np.empty(n, dtype=np.uint8)
    frontier = np.empty(4 * n, dtype=np.int32)
    total = 0
    total_sq = 0
    for i in range(r):
        live = replication_rng(master_seed, i).random(m) < probs
        y = n - _propagate(n, graph.csr_indptr, graph.csr_dst, live, s_f, s_t, state, frontier)
        total += y
        total_sq += y * y
    return _summarize(total, total_sq, r, master_seed)


def estimate_blocked(graph: Graph, instance: Instance, r: int, master_seed: int) -> Estimate:
    """Monte Carlo estimate of blocked influence f(s_t | s_f).

    Replication i evaluates both terms of the difference in the same
    live-edge world, so the result is the mean of per-world non-negative
    integers: exactly 0.0 when s_t is empty, never negative otherwise.
    """
    if r < 1:
        raise ValueError(f"replications must be >= 1, got {r}")
    validate_instance(graph, instance)
    probs = graph.csr_probabilities()
    n = graph.node_count
    m = len(probs)
    s_f, s_t = _seed_arrays(instance)
    empty = np.empty(0, dtype=np.int64)
    state = np.empty(n, dtype=np.uint8)
    frontier = np.empty(4 * n, dtype=np.int32)
    total = 0
    total_sq = 0
    indptr, dst = graph.csr_indptr, graph.csr_dst
    for i in range(r):
        live = replication_rng(master_seed, i).random(m) < probs
        f_with = _propagate(n, indptr, dst, live, s_f, s_t, state, frontier)
        f_without = _propagate(n, indptr, dst, live, s_f, empty, state, frontier)
        blocked = f_without - f_with
        total += blocked
        total_sq += blocked * blocked
    return _summarize(total, total_sq, r, master_seed)


def exact_blocked(graph: Graph, instance: Instance, max_edges: int = DEFAULT_ORACLE_MAX_EDGES) -> float:
    """Exact blocked influence by enumerating every live-edge world.

    Runs in O(2^m) and refuses graphs with more than max_edges edges.
    """
    m = graph.edge_count
    if m > max_edges:
        raise OracleSizeError(
            f"graph has {m} edges; exact enumeration is limited to max_edges={max_edges}"
        )
    validate_instance(graph, instance)
    probs = graph.csr_probabilities()
    s_f, s_t = _seed_arrays(instance)
    return float(
        _exact_enum(graph.node_count, graph.csr_indptr, graph.csr_dst, probs, s_f, s_t, m)
    )
