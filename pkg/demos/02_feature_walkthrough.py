"""The seven numbers the surrogate sees instead of the graph.

Each candidate solution is summarized by degree, centrality, and structure
aggregates for both seed sets, plus one coupling term that measures how well
the true seeds sit inside the false cascade's likely reach.
"""

import numpy as np

from nieblock import (
    Instance,
    compute_node_stats,
    f_active_probabilities,
    featurize,
    from_edges,
    inter_relationship,
)

rng = np.random.default_rng(5)
n = 40
edges = sorted({(int(u), int(v)) for u, v in rng.integers(0, n, size=(160, 2)) if u != v})
probs = {e: round(float(rng.uniform(0.1, 0.6)), 3) for e in edges}
g = from_edges(n, edges, probs)

# closeness and clustering are per-node and reusable, so they are computed
# once up front and passed around
stats = compute_node_stats(g)
print(f"stats over {n} nodes: closeness mode {stats.closeness_mode!r}")

s_f = (0, 3, 11)
# where could the false cascade plausibly get within 2 hops?
shell = f_active_probabilities(g, s_f, h=2)
top = sorted(shell.probabilities.items(), key=lambda kv: -kv[1])[:5]
print(f"\nfalse seeds {s_f} threaten {len(shell.probabilities)} nodes within 2 hops")
for v, p in top:
    print(f"  node {v:3d}: activation probability {p:.3f}")

# a good true seed set sits on the threatened nodes; a bad one hides far away
threatened = tuple(v for v, _ in top[:3])
far = tuple(sorted(set(range(n)) - set(s_f) - set(shell.probabilities)))[:3]

for label, s_t in (("on the shell", threatened), ("far away", far)):
    inst = Instance(s_f, s_t)
    p = inter_relationship(g, inst, h=2)
    fv = featurize(g, stats, inst, h=2)
    print(f"\ntrue seeds {s_t} ({label})")
    print(f"  coupling term: {p:.4f}")
    print(f"  full vector:   {np.round(fv.as_array(), 4)}")
