"""Label instances by simulation, then fit the MLP surrogate on them.

Dataset generation is the expensive half: every record runs the simulator
r times. Training afterwards is seconds. This demo keeps both small.
"""

import tempfile
import time
from pathlib import Path

import numpy as np

from nieblock import (
    SamplerConfig,
    TrainConfig,
    assign_degree_probabilities,
    compute_node_stats,
    from_edges,
    generate_dataset,
    load_model,
    predict_batch,
    save_model,
    train,
)

# a synthetic scale-free-ish graph, probabilities 1/in-degree
rng = np.random.default_rng(11)
n = 200
weights = rng.pareto(1.6, n) + 1.0
pick = weights / weights.sum()
edges = set()
while len(edges) < 800:
    u, v = int(rng.choice(n, p=pick)), int(rng.integers(n))
    if u != v:
        edges.add((u, v))
g = assign_degree_probabilities(from_edges(n, sorted(edges)))
stats = compute_node_stats(g)

t0 = time.time()
data = generate_dataset(
    g, count=800, label_r=200, config=SamplerConfig(rho=0.2),
    master_seed=1, stats=stats,
)
labels = np.array([r.label for r in data.records])
print(f"800 records in {time.time() - t0:.1f}s, "
      f"labels mean {labels.mean():.2f} / max {labels.max():.1f}")

model, report = train(
    data,
    TrainConfig(batch_size=64, learning_rate=0.05, max_epochs=300, patience=30),
    seed=0,
)
print(f"trained {report.epochs_run} epochs "
      f"(best {report.best_epoch}, early stop: {report.stopped_early})")
print(f"validation mse per epoch, last 5: "
      f"{[round(v, 3) for v in report.validation_mse[-5:]]}")

# predictions against the training labels, just to see the fit
x = np.array([r.features for r in data.records])
pred = predict_batch(model, x)
corr = np.corrcoef(pred, labels)[0, 1]
print(f"in-sample correlation {corr:.3f}")

# models round-trip through json byte for byte
with tempfile.TemporaryDirectory() as d:
    path = str(Path(d) / "model.json")
    save_model(model, path)
    again = load_model(path)
    assert predict_batch(again, x).tolist() == pred.tolist()
    print(f"saved, reloaded, predictions identical")
