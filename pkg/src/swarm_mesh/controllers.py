"""Hand-built policy weights with known closed-form behavior.

Training is out of scope, so experiments that need a policy which actually
solves a task use these explicitly constructed MLPs.  The goal-swap
controller encodes [relative goal, position] into the latent, and its
message net computes, for each received latent, the goal-difference term, a
distance-decaying repulsion on the position difference, and a constant-one
channel; the action net mixes the aggregated channels linearly:

    a_i = attraction * sum_j (g_i - g_j) + repulsion * sum_j r(p_i - p_j)

where r is applied per axis and shaped like an odd tent: proportional push
for small separations, fading to zero beyond the far radius (so distant
agents do not interact).  The self-loop contributes zeros plus the constant
channel.  Because the repulsion only sees *communicated* positions, lost or
stale messages directly degrade collision avoidance, which is what the
networking ablation measures.
"""

from __future__ import annotations

import math

import numpy as np

from .policy import MlpLayer, MlpParams, PolicyWeights
from .world import ScenarioSpec

LATENT = 4  # [g_x, g_y, p_x, p_y]


def goal_swap_weights(
    attraction: float = 0.35,
    repulsion: float = 2.0,
    near_radius: float = 0.3,
    far_radius: float = 1.0,
) -> PolicyWeights:
    """Goal attraction with decaying neighbor repulsion, as one GNN policy."""
    c1, c2 = near_radius, far_radius
    if not 0 < c1 < c2:
        raise ValueError("need 0 < near_radius < far_radius")
    # r(u) = clip(u,±c1) - (c1/c2) clip(u,±c2): odd, peaks near c1, 0 beyond c2
    a2 = c1 / c2

    # ENC: observation [p, g, p+v] -> latent [g, p]
    w_enc = np.zeros((LATENT, 6))
    w_enc[0, 2] = 1.0  # g_x
    w_enc[1, 3] = 1.0  # g_y
    w_enc[2, 0] = 1.0  # p_x
    w_enc[3, 1] = 1.0  # p_y
    enc = MlpParams((MlpLayer(w_enc, np.zeros(LATENT), "identity"),))

    # GNN hidden layer over d = [dg, dp]:
    #   0..3: relu(+-dg_x), relu(+-dg_y)
    #   4..7: relu(dp_x +- c1), relu(dp_x +- c2)
    #   8..11: relu(dp_y +- c1), relu(dp_y +- c2)
    #   12: relu(1)   (constant channel)
    w_h = np.zeros((13, LATENT))
    b_h = np.zeros(13)
    w_h[0, 0], w_h[1, 0] = 1.0, -1.0
    w_h[2, 1], w_h[3, 1] = 1.0, -1.0
    for base, axis in ((4, 2), (8, 3)):
        w_h[base + 0, axis], b_h[base + 0] = 1.0, c1
        w_h[base + 1, axis], b_h[base + 1] = 1.0, -c1
        w_h[base + 2, axis], b_h[base + 2] = 1.0, c2
        w_h[base + 3, axis], b_h[base + 3] = 1.0, -c2
    b_h[12] = 1.0

    # output: [dg_x, dg_y, r(dp_x), r(dp_y), 1]
    # clip(u,±c) = relu(u+c) - relu(u-c) - c, and the two -c constants cancel:
    # r(u) = [relu(u+c1)-relu(u-c1)] - a2 [relu(u+c2)-relu(u-c2)] - c1 + a2 c2
    # with a2 = c1/c2 the constant term vanishes.
    w_o = np.zeros((5, 13))
    b_o = np.zeros(5)
    w_o[0, 0], w_o[0, 1] = 1.0, -1.0
    w_o[1, 2], w_o[1, 3] = 1.0, -1.0
    for out, base in ((2, 4), (3, 8)):
        w_o[out, base + 0], w_o[out, base + 1] = 1.0, -1.0
        w_o[out, base + 2], w_o[out, base + 3] = -a2, a2
    w_o[4, 12] = 1.0
    gnn = MlpParams((
        MlpLayer(w_h, b_h, "relu"),
        MlpLayer(w_o, b_o, "identity"),
    ))

    # ACT: linear mix of the aggregated channels
    w_a = np.zeros((2, 5))
    w_a[0, 0] = attraction
    w_a[1, 1] = attraction
    w_a[0, 2] = repulsion
    w_a[1, 3] = repulsion
    act = MlpParams((MlpLayer(w_a, np.zeros(2), "identity"),))

    return PolicyWeights(enc=enc, gnn=gnn, act=act, latent_dim=LATENT)


def make_swap_scenario(n: int = 5, episodes: int = 8, radius: float = 1.5) -> ScenarioSpec:
    """Agents on a circle swap slots; goal sets rotate by a varying stride.

    Goals are always a permutation of the circle slots, so goal chaining
    keeps every episode on the same points and the team centroid is shared
    between starts and goals (which the difference-based controller needs).
    """
    slots = [
        (radius * math.cos(2 * math.pi * k / n), radius * math.sin(2 * math.pi * k / n))
        for k in range(n)
    ]
    goal_sets = []
    for e in range(episodes):
        stride = (e % (n - 1)) + 1  # never the identity permutation
        goal_sets.append(tuple(slots[(k + stride) % n] for k in range(n)))
    return ScenarioSpec(n=n, starts=tuple(slots), goal_sets=tuple(goal_sets))
