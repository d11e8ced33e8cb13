"""
Moving a pose to its base point
===============================

Each pose space has a base point p0 and a map rho with rho(p) . p = p0.
The freedom left over is the stabilizer H of p0.
"""

import numpy as np

from isoreduce.groups import compose, inverse, random_group_element
from isoreduce.poses import (
    AFF_STIEFEL_23,
    POS_ORI_3,
    act_pose,
    alternative_canonicalize,
    base_point,
    canonicalize,
    pose_coords,
    random_pose,
    stabilizer,
)

rng = np.random.default_rng(1)

p = random_pose(POS_ORI_3, rng)
rho = canonicalize(POS_ORI_3, p)
print("pose        :", p)
print("rho(p) . p  :", act_pose(rho, p))
print("base point  :", base_point(POS_ORI_3))

# any h rho(p) with h in H works just as well
print("stabilizer of the base point:", stabilizer(POS_ORI_3, "E"))
alt = alternative_canonicalize(POS_ORI_3, p, rng)
err = np.max(np.abs(pose_coords(act_pose(alt, p)) - pose_coords(base_point(POS_ORI_3))))
print(f"h rho(p) . p misses p0 by {err:.1e}")

# rho is equivariant only up to H: rho(g p) g rho(p)^-1 fixes p0
g = random_group_element("E", 3, rng)
h = compose(canonicalize(POS_ORI_3, act_pose(g, p)), compose(g, inverse(rho)))
print("that element, rotation part:\n", np.round(h.rotation, 6))

# for affine 2-frames the stabilizer is just {I, diag(1, 1, -1)}
q = random_pose(AFF_STIEFEL_23, rng)
print("aff-stiefel rho(q) . q:", act_pose(canonicalize(AFF_STIEFEL_23, q), q))
