"""A small quality-within-budget benchmark, written to CSV like the CLI does.

Both methods get the same wall-clock budget per problem and the same final
judge. The CSV plus its JSON sidecar are what the bench subcommand emits.
"""

import json
import tempfile
from pathlib import Path

import numpy as np

from nieblock import (
    SamplerConfig,
    TrainConfig,
    assign_degree_probabilities,
    compute_node_stats,
    from_edges,
    generate_dataset,
    run_quality_within_budget,
    train,
    write_report,
)

rng = np.random.default_rng(31)
n = 120
weights = rng.pareto(1.6, n) + 1.0
pick = weights / weights.sum()
edges = set()
while len(edges) < 500:
    u, v = int(rng.choice(n, p=pick)), int(rng.integers(n))
    if u != v:
        edges.add((u, v))
g = assign_degree_probabilities(from_edges(n, sorted(edges)))
stats = compute_node_stats(g)

data = generate_dataset(g, 500, label_r=100, config=SamplerConfig(rho=0.2),
                        master_seed=5, stats=stats)
model, _ = train(data, TrainConfig(batch_size=64, learning_rate=0.05,
                                   max_epochs=150, patience=20), seed=0)

# three adversaries, each a fixed false seed set
problems = [
    tuple(int(v) for v in np.random.default_rng(40 + i).choice(n, size=4, replace=False))
    for i in range(3)
]
for i, s_f in enumerate(problems):
    print(f"problem {i}: false seeds {s_f}")

report = run_quality_within_budget(
    g, problems, ("nie", "mcs"), budget_seconds=10.0,
    model=model, stats=stats, mcs_r=1000, eval_r=3000, k=4,
)

print(f"\n{'problem':8} {'method':6} {'seconds':>8} {'blocked':>8} {'scores':>7}")
for row in report.rows:
    blocked = "-" if row.blocked_influence is None else f"{row.blocked_influence:8.2f}"
    print(f"{row.problem_id:8} {row.method:6} {row.runtime_seconds:8.2f} "
          f"{blocked:>8} {row.evaluations_used:7d}")

with tempfile.TemporaryDirectory() as d:
    csv_path = str(Path(d) / "report.csv")
    write_report(report, csv_path)
    print(f"\ncsv:\n{Path(csv_path).read_text()}")
    sidecar = json.loads((Path(d) / "report.meta.json").read_text())
    print(f"sidecar keys: {sorted(sidecar)}")
