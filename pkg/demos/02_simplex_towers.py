#!/usr/bin/env python3
"""Random collapse towers of simplices and their finite-stage geometry.

A walk trajectory drives a tower of finite-dimensional simplices: a step
down is a base inclusion, a step up collapses the new top vertex to a
random point of the base.  The collapse measure is one of three schemes;
which one is used decides the geometry of the limit (one accumulating
boundary sequence, a Cantor boundary, or a dense boundary), and the walk
decides whether the limit is a point (recurrent) or infinite-dimensional
(transient).
"""

import numpy as np

from cstarlab.sampler import classify_trace_space
from cstarlab.simplex import (
    MeasureScheme,
    build_tower,
    covering_radius,
    draw_collapse,
    pushdown,
)
from cstarlab.rng import stream
from cstarlab.walk import WalkParams, sample_trajectory

# --- the three collapse measures, by example --------------------------------

rng = stream(0)
print("collapse draws into dimension 3 (i.e. points of the base triangle)")
print("  barycenter :", draw_collapse(MeasureScheme.BARYCENTER_POINT_MASS, 3, 0, rng))
print("  vertices   :", draw_collapse(MeasureScheme.UNIFORM_VERTICES, 3, 0, rng))
for visit in range(4):
    vec = draw_collapse(MeasureScheme.LEBESGUE_FACES, 3, visit, rng)
    print(f"  faces (c={visit}):", np.round(vec, 4), " <- face cycles down then wraps")

# --- building a tower from a walk -------------------------------------------

traj = sample_trajectory(WalkParams.point(0.7), 400, seed=5)
tower = build_tower(traj, MeasureScheme.LEBESGUE_FACES, seed=6)
print(f"\ntower over a transient walk: {len(tower.dims)} levels, "
      f"dimension now {tower.dims[-1]}")

# pushing the current top vertex all the way to the bottom simplex
top = np.zeros(tower.dims[-1] + 1)
top[-1] = 1.0
shadow = pushdown(tower, tower.top_level, top, 0)
print("shadow of the top vertex at level 0:", np.round(shadow, 4))

# --- how well the pushed-down vertices fill a low stage ----------------------

level = max(i for i, d in enumerate(tower.dims) if d == 2)
print(f"\ncovering radius of the last 2-dimensional stage (level {level}):",
      round(covering_radius(tower, level), 4))
print("(halved-l1 metric: vertex to vertex is distance 1)")

# --- what the limits are, almost surely --------------------------------------

print("\nalmost-sure class of the limit trace simplex:")
for p in (0.45, 0.7):
    for scheme in MeasureScheme:
        tag = classify_trace_space(WalkParams.point(p), scheme)
        print(f"  p={p:.2f}, scheme={scheme.value:10s} -> {tag}")
