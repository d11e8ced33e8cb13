"""
Two routes to one invariant, and a chain that collapses
=======================================================

With latent R^n x G one can canonicalize along either factor and must land
on the same numbers. Separately, the chain SE(3) > SO(3) > SO(2) > {e}
sends every (x, d, c) with c orthogonal to d to the same triple.
"""

import numpy as np

from isoreduce.groups import random_group_element
from isoreduce.reduction import cross_reduction_check, iterated_chain_SE3
from isoreduce.trials import chain_trial, cross_reduction_trial

rng = np.random.default_rng(3)
xs = [rng.standard_normal(3), rng.standard_normal(3)]
p = rng.uniform(-2, 2, 3)
q = random_group_element("SE", 3, rng)
via_point, via_group = cross_reduction_check("SE", 3, xs, p, q)
print("through R^3:", np.round(via_point.values, 6))
print("through G  :", np.round(via_group.values, 6))

for n in (2, 3):
    rep = cross_reduction_trial("SE", n, seed=0, trials=500)
    print(f"SE{n}: max disagreement {rep.max_disagreement:.1e}")

e = np.eye(3)
print("\n(x, e1, e3) ->", iterated_chain_SE3(np.array([5.0, -1.0, 2.0]), e[0], e[2]))

rep = chain_trial(seed=0, trials=500)
print(f"500 random triples, worst residue {rep.max_residue:.1e}; "
      f"oracle confirmed {rep.oracle_confirmed}/{rep.oracle_pairs} pairs")
