"""
Graphs and mixing matrices
==========================

Build the 100-node random network used throughout the demos, form the
base mixing matrix ``W = I - eps L`` and check that plain consensus over
it converges to the average.
"""

# %%
# A connected Erdos-Renyi graph. The same seed always gives the same graph.
import numpy as np

from probcast.graph import degrees, erdos_renyi, max_degree

g = erdos_renyi(100, 0.1, seed=7)
print(f"{g.n} nodes, {g.num_edges} edges, degrees {degrees(g).min()}..{max_degree(g)}")

# %%
# Step size 1/(max degree + 1) keeps every diagonal entry of W positive.
from probcast.mixing import base_mixing_matrix, default_epsilon, verify_convergence_conditions

eps = default_epsilon(g)
W = base_mixing_matrix(g, eps)
report = verify_convergence_conditions(W)
print(report.to_text().splitlines()[:4])

# %%
# The second-largest eigenvalue modulus sets the per-round contraction.
# Full communication costs N slots per round.
from probcast.engine import StopRule, metrics_series, run_consensus
from probcast.scheduler import ScheduleStream

x0 = np.random.default_rng(0).standard_normal(g.n)
traj = run_consensus(W, x0, np.ones(g.n), ScheduleStream(0), StopRule(tol=1e-8))
rows = metrics_series(traj, x0.mean())
for row in rows[:: max(1, len(rows) // 8)]:
    print(f"slots={row.cumulative_slots:6d}  stddev={row.stddev:.3e}  rmse={row.rmse:.3e}")
print("rounds:", traj.rounds, "status:", traj.status, "rho:", round(report.rho, 4))
