"""Greedy true-seed selection with CELF lazy evaluation.

Both selectors maximize a pluggable blocked-influence estimator subject to
|s_t| <= k, s_t disjoint from s_f. greedy() re-scores every candidate every
round; celf() keeps a max-heap of stale marginal gains and only re-scores
heap tops until the top entry is fresh, which is equivalent to greedy (and
never slower in estimator calls) whenever the estimator is deterministic and
its marginal gains never grow as the solution set grows. All three bundled
estimators satisfy that: the surrogate is a fixed function, and the Monte
Carlo estimator evaluates every candidate set on one common collection of
live-edge worlds (fixed master seed), making it an average of per-world
monotone submodular set functions.

Ties are broken toward the smallest node id in both selectors.
"""

import time
from dataclasses import dataclass, field
from heapq import heappop, heappush

import numpy as np

from .cascade import Estimate, Instance, estimate_blocked, exact_blocked
from .errors import NieblockError
from .features import (
    FeatureVector,
    _coupling_sum,
    f_active_probabilities,
    location_feature,
    neighborhood_feature,
    structure_feature,
)
from .graph import Graph, NodeStats, multi_source_bfs
from .model import MlpModel, check_model_graph, forward

DEFAULT_EVAL_REPLICATIONS = 10_000


class EstimatorError(NieblockError):
    """An estimator failed while scoring a candidate."""


class Estimator:
    """Scores an instance; higher is better. Subclasses set `kind`."""

    kind = "abstract"

    def evaluate(self, graph: Graph, instance: Instance) -> float:
        raise NotImplementedError


class McsEstimator(Estimator):
    """Monte Carlo blocked influence on a fixed set of live-edge worlds.

    Every evaluation, whatever the candidate set, reuses the worlds derived
    from (master_seed, replication). That keeps the estimator deterministic
    and queue-consistent inside CELF, and comparisons between candidate sets
    see identical noise, so the selector is not chasing sampling error.
    """

    kind = "mcs"

    def __init__(self, replications: int = DEFAULT_EVAL_REPLICATIONS, master_seed: int = 0):
        if replications < 1:
            raise ValueError("replications must be >= 1")
        self.replications = replications
        self.master_seed = master_seed

    def evaluate(self, graph: Graph, instance: Instance) -> float:
        return estimate_blocked(graph, instance, self.replications, self.master_seed).mean


class ExactEstimator(Estimator):
    """Exact enumeration; only viable on tiny graphs."""

    kind = "exact"

    def __init__(self, max_edges: int = 20):
        self.max_edges = max_edges

    def evaluate(self, graph: Graph, instance: Instance) -> float:
        return exact_blocked(graph, instance, self.max_edges)


class NieEstimator(Estimator):
    """Surrogate-model scorer: featurize then one MLP forward pass.

    The false-seed side of the feature vector (d_f, b_f, c_f, the
    false-activation shell, and the distances from the false seeds) depends
    only on s_f, so it is computed once per false seed set and reused across
    the thousands of candidate evaluations a CELF run makes.
    """

    kind = "nie"

    def __init__(self, model: MlpModel, stats: NodeStats):
        self.model = model
        self.stats = stats
        self._sf_side = {}
        self._checked_fingerprint = None

    def _check_graph(self, graph: Graph) -> None:
        if self._checked_fingerprint == graph.fingerprint:
            return
        check_model_graph(self.model, graph)
        if self.stats.graph_fingerprint != graph.fingerprint:
            raise EstimatorError("node stats were computed for a different graph")
        self._checked_fingerprint = graph.fingerprint

    def _false_side(self, graph: Graph, s_f: tuple):
        cached = self._sf_side.get(s_f)
        if cached is None:
            h = self.model.h_radius
            cached = (
                float(neighborhood_feature(graph, s_f)),
                location_feature(self.stats, s_f),
                structure_feature(self.stats, s_f),
                f_active_probabilities(graph, s_f, h),
                multi_source_bfs(graph, s_f, h),
            )
            self._sf_side[s_f] = cached
        return cached

    def evaluate(self, graph: Graph, instance: Instance) -> float:
        self._check_graph(graph)
        d_f, b_f, c_f, famap, dist_f = self._false_side(graph, instance.s_f)
        if instance.s_t:
            d_t = float(neighborhood_feature(graph, instance.s_t))
            b_t = location_feature(self.stats, instance.s_t)
            c_t = structure_feature(self.stats, instance.s_t)
            dist_t = multi_source_bfs(graph, instance.s_t, self.model.h_radius - 1)
            p = _coupling_sum(famap, dist_f, dist_t)
        else:
            d_t = b_t = c_t = p = 0.0
        fv = FeatureVector(d_f=d_f, b_f=b_f, c_f=c_f, d_t=d_t, b_t=b_t, c_t=c_t, p=p)
        return forward(self.model, fv)


@dataclass
class CelfTrace:
    """What a selector run did: picks, their gains, and the work spent."""

    chosen: list = field(default_factory=list)
    marginal_gains: list = field(default_factory=list)
    evaluations_used: int = 0
    wall_time_per_pick: list = field(default_factory=list)

    @property
    def total_gain(self) -> float:
        return float(sum(self.marginal_gains))


def _score(estimator, graph, instance, candidate):
    try:
        value = estimator.evaluate(graph, instance)
    except NieblockError:
        raise
    except Exception as exc:
        tag = "baseline" if candidate is None else f"candidate {candidate}"
        raise EstimatorError(f"estimator {estimator.kind!r} failed on {tag}: {exc}") from exc
    if not np.isfinite(value):
        tag = "baseline" if candidate is None else f"candidate {candidate}"
        raise EstimatorError(f"estimator {estimator.kind!r} returned {value} on {tag}")
    return value


def _selection_setup(graph: Graph, s_f, k: int):
    s_f = tuple(sorted(set(int(v) for v in s_f)))
    for v in s_f:
        graph.validate_node(v)
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    candidates = [v for v in range(graph.node_count) if v not in set(s_f)]
    if len(candidates) < k:
        raise ValueError(f"only {len(candidates)} candidates for k={k}")
    return s_f, candidates


def greedy(estimator: Estimator, graph: Graph, s_f, k: int, max_seconds: float | None = None) -> CelfTrace:
    """Plain greedy: score every remaining candidate each round, take the best.

    With max_seconds set, the clock is checked between estimator calls and a
    partial trace (fewer than k picks) is returned on expiry.
    """
    s_f, candidates = _selection_setup(graph, s_f, k)
    start = time.perf_counter()
    deadline = None if max_seconds is None else start + max_seconds
    trace = CelfTrace()
    current = _score(estimator, graph, Instance(s_f, ()), None)
    trace.evaluations_used = 1
    chosen = []
    for _ in range(k):
        round_start = time.perf_counter()
        best_gain = None
        best_node = None
        for v in candidates:
            if deadline is not None and time.perf_counter() >= deadline:
                return trace
            gain = _score(estimator, graph, Instance(s_f, chosen + [v]), v) - current
            trace.evaluations_used += 1
            if best_gain is None or gain > best_gain:
                best_gain = gain
                best_node = v
        chosen.append(best_node)
        candidates.remove(best_node)
        current += best_gain
        trace.chosen.append(best_node)
        trace.marginal_gains.append(best_gain)
        trace.wall_time_per_pick.append(time.perf_counter() - round_start)
    return trace


def celf(estimator: Estimator, graph: Graph, s_f, k: int, max_seconds: float | None = None) -> CelfTrace:
    """Lazy-forward greedy: re-score stale heap tops until the top is fresh.

    Heap entries are (-gain, node, round_scored); a popped entry scored in
    the current round is selected outright, anything older is re-scored
    against the current solution and pushed back. The (-gain, node) ordering
    reproduces greedy's smallest-id tie-break.
    """
    s_f, candidates = _selection_setup(graph, s_f, k)
    start = time.perf_counter()
    deadline = None if max_seconds is None else start + max_seconds
    trace = CelfTrace()
    current = _score(estimator, graph, Instance(s_f, ()), None)
    trace.evaluations_used = 1
    heap = []
    round_start = time.perf_counter()
    for v in candidates:
        if deadline is not None and time.perf_counter() >= deadline:
            return trace
        gain = _score(estimator, graph, Instance(s_f, (v,)), v) - current
        trace.evaluations_used += 1
        heappush(heap, (-gain, v, 0))
    chosen = []
    while len(chosen) < k:
        round_no = len(chosen)
        neg_gain, v, scored_at = heappop(heap)
        if scored_at == round_no:
            chosen.append(v)
            current += -neg_gain
            trace.chosen.append(v)
            trace.marginal_gains.append(-neg_gain)
            trace.wall_time_per_pick.append(time.perf_counter() - round_start)
            round_start = time.perf_counter()
            continue
        if deadline is not None and time.perf_counter() >= deadline:
            return trace
        gain = _score(estimator, graph, Instance(s_f, chosen + [v]), v) - current
        trace.evaluations_used += 1
        heappush(heap, (-gain, v, round_no))
    return trace


def evaluate_solution(graph: Graph, s_f, s_t, r: int = DEFAULT_EVAL_REPLICATIONS, seed: int = 0) -> Estimate:
    """High-replication Monte Carlo check of a finished solution."""
    return estimate_blocked(graph, Instance(s_f, s_t), r, seed)
