"""Labeled training data for the surrogate: instance sampling and labeling.

Sampling protocol: false seeds come from a high-impact pool (the top
ceil(rho * n) nodes by out-degree, ties broken by ascending id); the false
seed count is a rounded Pareto draw (shape 9, scale 10 by default, so it
concentrates around 10-15); the true seed count is uniform on [0, k_f]; true
seeds are drawn uniformly from all remaining nodes. Labels are Monte Carlo
blocked-influence estimates.

Record i derives all of its randomness from (master_seed, i), so generation
is reproducible and the worker count cannot change the output.
"""

import math
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .cascade import Instance, estimate_blocked
from .errors import FingerprintMismatchError, ModelFormatError
from .features import featurize
from .graph import Graph, NodeStats, compute_node_stats
from .ioutil import atomic_write_text, dumps_deterministic

DEFAULT_LABEL_REPLICATIONS = 1_000
DEFAULT_H_RADIUS = 2


@dataclass(frozen=True)
class SamplerConfig:
    rho: float
    pareto_shape: float = 9.0
    pareto_scale: float = 10.0
    k_cap: int = 64

    def __post_init__(self):
        if not (0.0 < self.rho <= 1.0):
            raise ValueError(f"rho must be in (0, 1], got {self.rho}")
        if self.pareto_shape <= 1.0:
            raise ValueError("pareto_shape must be > 1 (finite mean)")
        if self.pareto_scale < 1.0:
            raise ValueError("pareto_scale must be >= 1")
        if self.k_cap < 1:
            raise ValueError("k_cap must be >= 1")


@dataclass(frozen=True)
class DataRecord:
    s_f: tuple
    s_t: tuple
    label: float
    features: tuple | None = None


@dataclass
class Dataset:
    records: list
    graph_fingerprint: str
    label_replications: int
    h_radius: int


def high_impact_pool(graph: Graph, rho: float) -> np.ndarray:
    """Top ceil(rho * n) nodes by out-degree, ties by ascending node id."""
    n = graph.node_count
    size = math.ceil(rho * n)
    if size < 1:
        raise ValueError("rho too small: the high-impact pool is empty")
    out_deg = graph.out_degree_array()
    order = np.lexsort((np.arange(n), -out_deg))
    return order[:size].copy()


def sample_false_seeds(graph: Graph, config: SamplerConfig, rng: np.random.Generator) -> tuple:
    """Draw the false seed set from the high-impact pool."""
    pool = high_impact_pool(graph, config.rho)
    # numpy's pareto() is the Lomax tail; +1 rescales to the classic form
    # with support [scale, inf) and mean scale * shape / (shape - 1)
    draw = (rng.pareto(config.pareto_shape) + 1.0) * config.pareto_scale
    k_f = min(int(round(draw)), config.k_cap)
    if k_f > len(pool):
        warnings.warn(
            f"false seed count {k_f} exceeds the high-impact pool ({len(pool)}); clamping"
        )
        k_f = len(pool)
    chosen = rng.choice(pool, size=k_f, replace=False)
    return tuple(sorted(int(v) for v in chosen))


def sample_instance(graph: Graph, config: SamplerConfig, rng: np.random.Generator) -> Instance:
    """Draw a full instance: false seeds, then 0..k_f true seeds from the rest."""
    s_f = sample_false_seeds(graph, config, rng)
    k_t = int(rng.integers(0, len(s_f) + 1))
    complement = np.setdiff1d(np.arange(graph.node_count), np.asarray(s_f, dtype=np.int64))
    # tiny graphs: fewer free nodes than the drawn count
    k_t = min(k_t, len(complement))
    s_t = rng.choice(complement, size=k_t, replace=False)
    return Instance(s_f, tuple(int(v) for v in s_t))


def _record_rng(master_seed: int, index: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence((master_seed, index, 0))))


def _record_label_seed(master_seed: int, index: int) -> int:
    return int(np.random.SeedSequence((master_seed, index, 1)).generate_state(1)[0])


def _make_record(graph, stats, config, master_seed, index, label_r, h_radius, with_features):
    instance = sample_instance(graph, config, _record_rng(master_seed, index))
    label = estimate_blocked(graph, instance, label_r, _record_label_seed(master_seed, index)).mean
    features = None
    if with_features:
        features = tuple(featurize(graph, stats, instance, h_radius).as_array().tolist())
    return DataRecord(s_f=instance.s_f, s_t=instance.s_t, label=label, features=features)


def _make_record_chunk(args):
    graph, stats, config, master_seed, indices, label_r, h_radius, with_features = args
    return [
        _make_record(graph, stats, config, master_seed, i, label_r, h_radius, with_features)
        for i in indices
    ]


def generate_dataset(
    graph: Graph,
    count: int,
    label_r: int = DEFAULT_LABEL_REPLICATIONS,
    config: SamplerConfig | None = None,
    master_seed: int = 0,
    h_radius: int = DEFAULT_H_RADIUS,
    stats: NodeStats | None = None,
    with_features: bool = True,
    threads: int = 1,
) -> Dataset:
    """Sample and label `count` records; byte-identical for any thread count."""
    if count < 1:
        raise ValueError("count must be >= 1")
    if label_r < 1:
        raise ValueError("label_r must be >= 1")
    graph.require_probabilities()
    config = config or SamplerConfig(rho=0.1)
    if with_features and stats is None:
        stats = compute_node_stats(graph)
    if threads <= 1 or count < 4:
        records = [
            _make_record(graph, stats, config, master_seed, i, label_r, h_radius, with_features)
            for i in range(count)
        ]
    else:
        chunk = max(1, math.ceil(count / (threads * 4)))
        tasks = [
            (graph, stats, config, master_seed, range(lo, min(lo + chunk, count)),
             label_r, h_radius, with_features)
            for lo in range(0, count, chunk)
        ]
        records = []
        with ProcessPoolExecutor(max_workers=threads) as pool:
            for part in pool.map(_make_record_chunk, tasks):
                records.extend(part)
    return Dataset(
        records=records,
        graph_fingerprint=graph.fingerprint,
        label_replications=label_r,
        h_radius=h_radius,
    )


def check_dataset_graph(dataset: Dataset, graph: Graph) -> None:
    if dataset.graph_fingerprint != graph.fingerprint:
        raise FingerprintMismatchError("dataset was generated from a different graph")


def save_dataset(dataset: Dataset, path: str) -> None:
    """JSON-lines: one header line, then one record per line."""
    lines = [
        dumps_deterministic(
            {
                "graph_fingerprint": dataset.graph_fingerprint,
                "label_replications": dataset.label_replications,
                "h_radius": dataset.h_radius,
                "count": len(dataset.records),
            }
        )
    ]
    for rec in dataset.records:
        row = {"s_f": list(rec.s_f), "s_t": list(rec.s_t), "label": rec.label}
        if rec.features is not None:
            row["features"] = list(rec.features)
        lines.append(dumps_deterministic(row))
    atomic_write_text(path, "\n".join(lines) + "\n")


def load_dataset(path: str) -> Dataset:
    import json

    with open(path, "r", encoding="utf-8") as fh:
        lines = [ln for ln in (raw.strip() for raw in fh) if ln]
    if not lines:
        raise ModelFormatError(f"dataset file {path} is empty")
    try:
        header = json.loads(lines[0])
        rows = [json.loads(ln) for ln in lines[1:]]
    except json.JSONDecodeError as exc:
        raise ModelFormatError(f"dataset file {path}: {exc}") from None
    required = {"graph_fingerprint", "label_replications", "h_radius", "count"}
    if not isinstance(header, dict) or not required.issubset(header):
        raise ModelFormatError(f"dataset file {path}: bad header line")
    if header["count"] != len(rows):
        raise ModelFormatError(
            f"dataset file {path}: header says {header['count']} records, found {len(rows)}"
        )
    records = []
    for row in rows:
        label = float(row["label"])
        if not math.isfinite(label):
            raise ModelFormatError(f"dataset file {path}: non-finite label")
        features = row.get("features")
        records.append(
            DataRecord(
                s_f=tuple(int(v) for v in row["s_f"]),
                s_t=tuple(int(v) for v in row["s_t"]),
                label=label,
                features=None if features is None else tuple(float(f) for f in features),
            )
        )
    return Dataset(
        records=records,
        graph_fingerprint=header["graph_fingerprint"],
        label_replications=int(header["label_replications"]),
        h_radius=int(header["h_radius"]),
    )
