"""
Rigid motions as (R, t) pairs
=============================

Composition, inverses and actions on points and directions for the four
families E(n), SE(n), O(n), SO(n).
"""

import numpy as np

from isoreduce.groups import (
    Family,
    GroupElement,
    act_direction,
    act_point,
    compose,
    distance,
    inverse,
    random_group_element,
)

rot90 = np.array([[0.0, -1.0], [1.0, 0.0]])
g = GroupElement(Family.SE, rot90, [1.0, 0.0])
shift = GroupElement(Family.SE, np.eye(2), [1.0, 0.0])

# composition reads right to left: shift first, then g
print("g o shift   =", compose(g, shift))
print("g^-1        =", inverse(g))

# points feel the translation, directions do not
print("g . (1, 0)  =", act_point(g, [1.0, 0.0]))
print("g . dir e1  =", act_direction(g, [1.0, 0.0]))

# a quick sanity sweep of the group axioms on random SE(3) elements
rng = np.random.default_rng(0)
worst = 0.0
for _ in range(1000):
    a, b, c = (random_group_element("SE", 3, rng) for _ in range(3))
    worst = max(worst, distance(compose(compose(a, b), c), compose(a, compose(b, c))))
print(f"associativity, worst of 1000: {worst:.1e}")

# O(3) samples split evenly between the two components
dets = [np.linalg.det(random_group_element("O", 3, rng).rotation) for _ in range(10_000)]
print(f"fraction with det = -1: {np.mean(np.array(dets) < 0):.3f}")
