"""Orbit membership decided on point clouds, independently of the catalog.

A configuration instance (s, r, p) becomes a labelled point cloud whose
points move covariantly with the group. Two instances share an orbit exactly
when their clouds are congruent: equal squared-distance matrices for E/SE
(equal Gram matrices for O/SO, origin fixed), plus matching orientation for
the proper families whenever the cloud spans the whole space.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from isoreduce.errors import OracleInconsistency, UsageError
from isoreduce.groups import Family, GroupElement
from isoreduce.poses import AffStiefel, PointPose, PosOri, SpherePose, Stiefel
from isoreduce.reduction import Configuration, get_entry

EQUALITY_TOL = 1e-7
WITNESS_TOL = 1e-7
RANK_RTOL = 1e-8


@dataclass(frozen=True, eq=False)
class AugmentedCloud:
    points: np.ndarray  # (k, n)
    labels: tuple[str, ...]

    def __len__(self):
        return self.points.shape[0]


@dataclass(frozen=True)
class OrbitVerdict:
    same_orbit: bool
    witness: GroupElement | None = None
    residual: float | None = None

    def __bool__(self):
        return self.same_orbit


def augment(config: Configuration | str, s, r, p) -> AugmentedCloud:
    """Inputs plus pose anchors; anchors are points the group moves like inputs."""
    cfg = get_entry(config).config
    pts = [np.asarray(s, dtype=float), np.asarray(r, dtype=float)]
    labels = ["s", "r"]
    if isinstance(p, PointPose):
        pts.append(p.t)
        labels.append("t")
    elif isinstance(p, PosOri):
        pts += [p.t, p.t + p.alpha]
        labels += ["t", "t+alpha"]
    elif isinstance(p, AffStiefel):
        pts += [p.t, p.t + p.alpha, p.t + p.beta]
        labels += ["t", "t+alpha", "t+beta"]
    elif isinstance(p, Stiefel):
        pts += [p.alpha, p.beta]
        labels += ["alpha", "beta"]
    elif isinstance(p, SpherePose):
        pts.append(p.alpha)
        labels.append("alpha")
    elif isinstance(p, GroupElement):
        pts.append(p.translation)
        pts += list(p.translation + p.rotation.T)  # rows: t + R e_i
        labels += ["t"] + [f"t+Re{i + 1}" for i in range(p.dim)]
    else:
        raise UsageError(f"not a pose for {cfg.key}: {p!r}")
    return AugmentedCloud(np.array(pts), tuple(labels))


def _as_cloud(c) -> AugmentedCloud:
    if isinstance(c, AugmentedCloud):
        return c
    pts = np.atleast_2d(np.asarray(c, dtype=float))
    return AugmentedCloud(pts, tuple(f"x{i + 1}" for i in range(pts.shape[0])))


def _centred(points: np.ndarray, affine: bool) -> np.ndarray:
    return points - points.mean(axis=0) if affine else points


def _invariant_matrix(points: np.ndarray, affine: bool) -> np.ndarray:
    if affine:
        diff = points[:, None, :] - points[None, :, :]
        return np.einsum("ijk,ijk->ij", diff, diff)
    return points @ points.T


def _rank(x: np.ndarray, scale: float) -> int:
    if x.size == 0 or scale == 0.0:
        return 0
    sv = np.linalg.svd(x, compute_uv=False)
    return int(np.sum(sv > RANK_RTOL * scale))


def span_dimension(points, affine: bool) -> int:
    """Dimension of the affine (or linear, when not ``affine``) span."""
    x = _centred(np.asarray(points, dtype=float), affine)
    sv = np.linalg.svd(x, compute_uv=False)
    return _rank(x, sv[0] if sv.size else 0.0)


def frame_indices(points, affine: bool) -> list[int]:
    """Greedy pivoting: the first points whose centred vectors are independent."""
    x = _centred(np.asarray(points, dtype=float), affine)
    n = x.shape[1]
    scale = np.linalg.svd(x, compute_uv=False)[0]
    chosen: list[int] = []
    for i in range(x.shape[0]):
        cand = chosen + [i]
        if _rank(x[cand], scale) == len(cand):
            chosen = cand
            if len(chosen) == n:
                break
    return chosen


def orientation(points, idx: list[int], affine: bool) -> float:
    x = _centred(np.asarray(points, dtype=float), affine)
    return float(np.sign(np.linalg.det(x[idx])))


def same_orbit(
    family: Family | str, cloud_a, cloud_b, tol: float = EQUALITY_TOL, witness: bool = True
) -> OrbitVerdict:
    """Decide whether ``cloud_b = g . cloud_a`` for some g in the family (pointwise, in order)."""
    family = Family(family)
    a, b = _as_cloud(cloud_a), _as_cloud(cloud_b)
    if a.points.shape != b.points.shape:
        raise UsageError(f"cloud shapes differ: {a.points.shape} vs {b.points.shape}")
    if a.labels != b.labels:
        raise UsageError(f"cloud labels differ: {a.labels} vs {b.labels}")
    affine = family.affine
    pa, pb = a.points, b.points
    gap = np.max(np.abs(_invariant_matrix(pa, affine) - _invariant_matrix(pb, affine)))
    same = bool(gap <= tol)
    if same and family.proper:
        n = pa.shape[1]
        if span_dimension(pa, affine) == n and span_dimension(pb, affine) == n:
            idx = frame_indices(pa, affine)
            same = orientation(pa, idx, affine) == orientation(pb, idx, affine)
        # a lower-dimensional span is fixed by a reflection, so orientation is free
    if not same:
        return OrbitVerdict(False)
    if not witness:
        return OrbitVerdict(True)
    g = find_witness(family, a, b)
    return OrbitVerdict(True, g, alignment_residual(g, a, b))


def alignment_residual(g: GroupElement, cloud_a, cloud_b) -> float:
    a, b = _as_cloud(cloud_a), _as_cloud(cloud_b)
    moved = a.points @ g.rotation.T + g.translation
    return float(np.max(np.abs(moved - b.points)))


def find_witness(family: Family | str, cloud_a, cloud_b, tol: float = WITNESS_TOL) -> GroupElement:
    """Orthogonal Procrustes (Kabsch) fit of cloud_b by g . cloud_a.

    For proper families a negative determinant is repaired by flipping the
    weakest singular direction, which costs nothing when the span is
    degenerate. Raises OracleInconsistency if the fit misses by more than tol.
    """
    family = Family(family)
    a, b = _as_cloud(cloud_a), _as_cloud(cloud_b)
    pa, pb = a.points, b.points
    n = pa.shape[1]
    ca = pa.mean(axis=0) if family.affine else np.zeros(n)
    cb = pb.mean(axis=0) if family.affine else np.zeros(n)
    h = (pa - ca).T @ (pb - cb)
    u, _, vt = np.linalg.svd(h)
    rot = vt.T @ u.T
    if family.proper and np.linalg.det(rot) < 0:
        flip = np.eye(n)
        flip[-1, -1] = -1.0
        rot = vt.T @ flip @ u.T
    trans = cb - rot @ ca if family.affine else np.zeros(n)
    g = GroupElement._raw(family, rot, trans)
    residual = alignment_residual(g, a, b)
    if residual > tol:
        raise OracleInconsistency(f"best {family.value}({n}) alignment misses by {residual:.3g}")
    return g
