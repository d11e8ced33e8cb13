"""Separating invariants of the stabilizer subgroups and of small point tuples.

Outputs are ordered: squared norms, then squared distances, then
determinants, with indices in lexicographic order. Nothing is square-rooted.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

import numpy as np

from isoreduce.errors import UsageError, ValidationError

SPHERE_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class FeatureVector:
    values: np.ndarray
    labels: tuple[str, ...]

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float).reshape(-1)
        labels = tuple(self.labels)
        if len(labels) != values.shape[0]:
            raise ValueError(f"{values.shape[0]} values but {len(labels)} labels")
        if len(set(labels)) != len(labels):
            raise ValueError(f"duplicate labels in {labels}")
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "labels", labels)

    def __len__(self):
        return self.values.shape[0]

    def as_dict(self) -> dict[str, float]:
        return dict(zip(self.labels, self.values.tolist()))


def _points(points, d: int | None = None) -> np.ndarray:
    arr = np.asarray(points, dtype=float)
    if arr.ndim == 1:
        arr = arr[None, :]
    if arr.ndim != 2 or arr.shape[0] < 1:
        raise UsageError("expected a non-empty list of vectors")
    if d is not None and arr.shape[1] != d:
        raise UsageError(f"expected {d}-vectors, got {arr.shape[1]}-vectors")
    return arr


def _same_dim(*vs) -> list[np.ndarray]:
    arrs = [np.asarray(v, dtype=float).reshape(-1) for v in vs]
    if len({a.shape[0] for a in arrs}) != 1:
        raise UsageError(f"inputs must share a dimension, got {[a.shape[0] for a in arrs]}")
    return arrs


def _sphere(*vs) -> list[np.ndarray]:
    arrs = _same_dim(*vs)
    for name, a in zip("srp", arrs):
        if a.shape[0] != 3:
            raise UsageError("sphere inputs live in R^3")
        if abs(np.linalg.norm(a) - 1.0) > SPHERE_TOL:
            raise ValidationError(f"{name} must lie on the unit sphere (norm {np.linalg.norm(a):.12g})")
    return arrs


def weyl_O(d: int, points) -> FeatureVector:
    """O(d) generators: all squared norms, then all squared pairwise distances."""
    x = _points(points, d)
    m = x.shape[0]
    norms = np.einsum("ij,ij->i", x, x)
    pairs = list(combinations(range(m), 2))
    dists = [float(np.sum((x[i] - x[j]) ** 2)) for i, j in pairs]
    labels = [f"|x{i + 1}|^2" for i in range(m)]
    labels += [f"|x{i + 1}-x{j + 1}|^2" for i, j in pairs]
    return FeatureVector(np.concatenate([norms, dists]), labels)


def weyl_SO(d: int, points) -> FeatureVector:
    """weyl_O followed by det of every d-subset (none when fewer than d points)."""
    base = weyl_O(d, points)
    x = _points(points, d)
    subsets = list(combinations(range(x.shape[0]), d))
    dets = [float(np.linalg.det(x[list(idx)].T)) for idx in subsets]
    labels = [f"det({','.join(f'x{i + 1}' for i in idx)})" for idx in subsets]
    return FeatureVector(np.concatenate([base.values, dets]), base.labels + tuple(labels))


_O1_E2_LABELS = ("s[1]", "r[1]", "s[2]^2", "r[2]^2", "(s[2]-r[2])^2")


def stab_O1_in_E2(s, r) -> FeatureVector:
    """O(1) = {I, diag(1,-1)} acting on R^2 x R^2."""
    s, r = _same_dim(s, r)
    if s.shape[0] != 2:
        raise UsageError("expected 2D inputs")
    vals = [s[0], r[0], s[1] ** 2, r[1] ** 2, (s[1] - r[1]) ** 2]
    return FeatureVector(np.array(vals), _O1_E2_LABELS)


_O2_E3_LABELS = ("s[1]", "r[1]", "|s[2:3]|^2", "|r[2:3]|^2", "|s[2:3]-r[2:3]|^2")


def _o2_tail(s: np.ndarray, r: np.ndarray) -> list[float]:
    st, rt = s[1:], r[1:]
    return [s[0], r[0], st @ st, rt @ rt, (st - rt) @ (st - rt)]


def stab_O2_in_E3(s, r) -> FeatureVector:
    """O(2) acting on the last two coordinates of R^3 x R^3."""
    s, r = _same_dim(s, r)
    if s.shape[0] != 3:
        raise UsageError("expected 3D inputs")
    return FeatureVector(np.array(_o2_tail(s, r)), _O2_E3_LABELS)


def stab_SO2_in_SE3(s, r) -> FeatureVector:
    """SO(2) on the last two coordinates: the O(2) set plus the 2x2 tail determinant."""
    s, r = _same_dim(s, r)
    if s.shape[0] != 3:
        raise UsageError("expected 3D inputs")
    det = s[1] * r[2] - s[2] * r[1]
    return FeatureVector(np.array(_o2_tail(s, r) + [det]), _O2_E3_LABELS + ("det(s[2:3],r[2:3])",))


_O1_E3_LABELS = ("s[1]", "r[1]", "s[2]", "r[2]", "s[3]^2", "r[3]^2", "(s[3]-r[3])^2")


def stab_O1_in_E3(s, r) -> FeatureVector:
    """O(1) = {I, diag(1,1,-1)} acting on R^3 x R^3."""
    s, r = _same_dim(s, r)
    if s.shape[0] != 3:
        raise UsageError("expected 3D inputs")
    vals = [s[0], r[0], s[1], r[1], s[2] ** 2, r[2] ** 2, (s[2] - r[2]) ** 2]
    return FeatureVector(np.array(vals), _O1_E3_LABELS)


_SPHERE_O1_LABELS = ("s[1]", "s[2]", "r[1]", "r[2]", "s[3]r[3]")


def sphere_O1_minimal(s, r) -> FeatureVector:
    """O(1) = {I, diag(1,1,-1)} on S^2 x S^2.

    On the sphere s[3]^2 is fixed by s[1], s[2], and (s[3]-r[3])^2 then only
    adds s[3]r[3], so five entries suffice.
    """
    s, r = _sphere(s, r)
    return FeatureVector(np.array([s[0], s[1], r[0], r[1], s[2] * r[2]]), _SPHERE_O1_LABELS)


_TRIPLE_LABELS = ("|s-r|^2", "|s-p|^2", "|r-p|^2")


def _triple_dists(s, r, p) -> list[float]:
    sr, sp, rp = s - r, s - p, r - p
    return [sr @ sr, sp @ sp, rp @ rp]


def euclid_triple_E(s, r, p) -> FeatureVector:
    """Squared side lengths of the triangle (s, r, p)."""
    s, r, p = _same_dim(s, r, p)
    return FeatureVector(np.array(_triple_dists(s, r, p)), _TRIPLE_LABELS)


def euclid_triple_SE2(s, r, p) -> FeatureVector:
    s, r, p = _same_dim(s, r, p)
    if s.shape[0] != 2:
        raise UsageError("expected 2D inputs")
    a, b = s - p, r - p
    det = a[0] * b[1] - a[1] * b[0]
    return FeatureVector(np.array(_triple_dists(s, r, p) + [det]), _TRIPLE_LABELS + ("det(s-p,r-p)",))


def sphere_triple_E(s, r, p) -> FeatureVector:
    """euclid_triple_E restricted to unit vectors: squared chordal distances."""
    s, r, p = _sphere(s, r, p)
    return FeatureVector(np.array(_triple_dists(s, r, p)), _TRIPLE_LABELS)


def sphere_triple_SO3(s, r, p) -> FeatureVector:
    s, r, p = _sphere(s, r, p)
    det = float(np.linalg.det(np.column_stack([s, r, p])))
    return FeatureVector(np.array(_triple_dists(s, r, p) + [det]), _TRIPLE_LABELS + ("det(s,r,p)",))


def raw_coordinates(*xs) -> FeatureVector:
    """Concatenated coordinates, the separating set for a trivial stabilizer.

    Two inputs are labelled s and r; longer tuples x1, x2, ...
    """
    arrs = _same_dim(*xs)
    names = ("s", "r") if len(arrs) == 2 else tuple(f"x{i + 1}" for i in range(len(arrs)))
    labels = [f"{name}[{k + 1}]" for name, a in zip(names, arrs) for k in range(a.shape[0])]
    return FeatureVector(np.concatenate(arrs), labels)
