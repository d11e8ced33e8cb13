"""Lifting stabilizer invariants to G-invariants, and the configuration catalog.

For a pose space M = G/H with canonicalizer rho, an H-invariant ``f_H`` on
X^m lifts to the G-invariant ``f_G(x1..xm, p) = f_H(rho(p) x1, ..., rho(p) xm)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Callable

import numpy as np

from isoreduce import kernels
from isoreduce.errors import UsageError, ValidationError
from isoreduce.groups import (
    ARITH_TOL,
    Family,
    GroupElement,
    act_point,
    compose,
    embed_block,
    frame_from_direction,
    inverse,
)
from isoreduce.kernels import FeatureVector
from isoreduce.poses import (
    AFF_STIEFEL_23,
    POS_ORI_2,
    POS_ORI_3,
    SPHERE_2,
    STIEFEL_23,
    PointPose,
    PoseKind,
    PoseSpace,
    canonicalize,
    check_pose,
    stabilizer,
)

Kernel = Callable[..., FeatureVector]


def _as_features(out) -> FeatureVector:
    if isinstance(out, FeatureVector):
        return out
    values = np.asarray(out, dtype=float).reshape(-1)
    return FeatureVector(values, tuple(f"f{i + 1}" for i in range(values.shape[0])))


@dataclass(frozen=True)
class LiftedInvariant:
    """``f_H`` composed with the canonicalization of the pose."""

    space: PoseSpace
    kernel: Kernel
    family: Family

    def canonicalizer(self, p) -> GroupElement:
        return canonicalize(self.space, p, self.family)

    def __call__(self, xs, p, rho: GroupElement | None = None) -> FeatureVector:
        """Evaluate on the tuple ``xs`` and pose ``p``.

        ``rho`` overrides the canonicalizer; any element sending p to the base
        point gives the same result.
        """
        check_pose(self.space, p)
        g = self.canonicalizer(p) if rho is None else rho
        return _as_features(self.kernel(*(act_point(g, x) for x in xs)))


def lift(space: PoseSpace, kernel: Kernel, family: Family | str | None = None) -> LiftedInvariant:
    family = space.natural_family() if family is None else Family(family)
    # validates the family/space pairing
    stabilizer(space, family)
    return LiftedInvariant(space, kernel, family)


def group_latent(kernel: Kernel, family: Family | str, dim: int) -> LiftedInvariant:
    """``f_G(x, g) = kernel(g^-1 x)`` on X^m x G; no invariance needed of the kernel."""
    return lift(PoseSpace.full_group(family, dim), kernel, family)


class Ambient(str, Enum):
    R2 = "R2"
    R3 = "R3"
    S2 = "S2"

    @property
    def dim(self) -> int:
        return 2 if self is Ambient.R2 else 3

    @property
    def sphere(self) -> bool:
        return self is Ambient.S2


_POSE_TOKENS = {k.value: k for k in PoseKind}


@dataclass(frozen=True)
class Configuration:
    """(G, X, pose space) with two ambient inputs, source s and receiver r."""

    family: Family
    dim: int
    ambient: Ambient
    pose: PoseSpace

    @property
    def key(self) -> str:
        return f"{self.family.value}{self.dim}/{self.ambient.value}/{self.pose.kind.value}"

    @property
    def group_name(self) -> str:
        return f"{self.family.value}({self.dim})"

    def __str__(self):
        return self.key


def _config(group: str, ambient: str, pose: str) -> Configuration:
    family, dim = Family(group[:-1]), int(group[-1])
    amb = Ambient(ambient)
    kind = _POSE_TOKENS[pose]
    if kind == PoseKind.GROUP:
        space = PoseSpace.full_group(family, dim)
    elif kind == PoseKind.POINT:
        space = PoseSpace.eucl_point(dim)
    elif kind == PoseKind.POS_ORI:
        space = POS_ORI_2 if dim == 2 else POS_ORI_3
    else:
        space = {PoseKind.AFF_STIEFEL: AFF_STIEFEL_23, PoseKind.STIEFEL: STIEFEL_23, PoseKind.SPHERE: SPHERE_2}[kind]
    return Configuration(family, dim, amb, space)


@dataclass(frozen=True)
class CatalogEntry:
    config: Configuration
    labels: tuple[str, ...]
    stabilizer: str
    formula: str
    evaluator: Callable  # (s, r, p) -> FeatureVector
    lifted: LiftedInvariant | None = None

    @property
    def key(self) -> str:
        return self.config.key

    def metadata(self) -> dict:
        return {
            "key": self.key,
            "group": self.config.group_name,
            "ambient": self.config.ambient.value,
            "pose": self.config.pose.kind.value,
            "stabilizer": self.stabilizer,
            "features": len(self.labels),
            "labels": list(self.labels),
            "formula": self.formula,
        }


def _direct(fn, pose_attr: str):
    def evaluate(s, r, p):
        return fn(s, r, getattr(p, pose_attr))

    return evaluate


def _lifted(inv: LiftedInvariant):
    def evaluate(s, r, p):
        return inv((s, r), p)

    return evaluate


_TRIPLE = "{|s-r|^2, |s-p|^2, |r-p|^2}"
_CANON = "f_H(rho(p) s, rho(p) r)"


def _build_catalog() -> dict[str, CatalogEntry]:
    # (key, kernel, direct formula or lifted through rho, description)
    table = [
        ("E2/R2/point", kernels.euclid_triple_E, "direct", _TRIPLE),
        ("E2/R2/pos-ori", kernels.stab_O1_in_E2, "lift", f"{_CANON}, f_H = {{s1, r1, s2^2, r2^2, (s2-r2)^2}}"),
        ("E2/R2/group", kernels.raw_coordinates, "lift", "{g^-1 s, g^-1 r}"),
        ("SE2/R2/point", kernels.euclid_triple_SE2, "direct", "{|s-r|^2, |s-p|^2, |r-p|^2, det(s-p, r-p)}"),
        ("SE2/R2/group", kernels.raw_coordinates, "lift", "{g^-1 s, g^-1 r}"),
        ("E3/R3/point", kernels.euclid_triple_E, "direct", _TRIPLE),
        (
            "E3/R3/pos-ori",
            kernels.stab_O2_in_E3,
            "lift",
            f"{_CANON}, f_H = {{s1, r1, |s23|^2, |r23|^2, |s23-r23|^2}}",
        ),
        (
            "E3/R3/aff-stiefel",
            kernels.stab_O1_in_E3,
            "lift",
            f"{_CANON}, f_H = {{s1, r1, s2, r2, s3^2, r3^2, (s3-r3)^2}}",
        ),
        ("E3/R3/group", kernels.raw_coordinates, "lift", "{g^-1 s, g^-1 r}"),
        ("SE3/R3/point", kernels.euclid_triple_E, "direct", f"{_TRIPLE} (SE(3) and E(3) triangle orbits coincide)"),
        (
            "SE3/R3/pos-ori",
            kernels.stab_SO2_in_SE3,
            "lift",
            f"{_CANON}, f_H = {{s1, r1, |s23|^2, |r23|^2, |s23-r23|^2, det(s23, r23)}}",
        ),
        ("SE3/R3/group", kernels.raw_coordinates, "lift", "{g^-1 s, g^-1 r}"),
        ("O3/S2/sphere", kernels.sphere_triple_E, "direct", f"{_TRIPLE} on S^2"),
        ("O3/S2/stiefel", kernels.sphere_O1_minimal, "lift", f"{_CANON}, f_H = {{s1, s2, r1, r2, s3 r3}}"),
        ("O3/S2/group", kernels.raw_coordinates, "lift", "{R^T s, R^T r}"),
        ("SO3/S2/sphere", kernels.sphere_triple_SO3, "direct", "{|s-r|^2, |s-p|^2, |r-p|^2, det(s, r, p)} on S^2"),
        ("SO3/S2/group", kernels.raw_coordinates, "lift", "{R^T s, R^T r}"),
    ]
    catalog = {}
    for key, kernel, mode, formula in table:
        config = _config(*key.split("/"))
        probe = np.eye(config.ambient.dim)
        if mode == "direct":
            attr = "alpha" if config.pose.kind == PoseKind.SPHERE else "t"
            evaluator, inv = _direct(kernel, attr), None
            labels = kernel(probe[0], probe[0], probe[0]).labels
        else:
            inv = lift(config.pose, kernel, config.family)
            evaluator = _lifted(inv)
            labels = kernel(probe[0], probe[0]).labels
        stab = str(stabilizer(config.pose, config.family))
        catalog[key] = CatalogEntry(config, labels, stab, formula, evaluator, inv)
    return catalog


CATALOG: dict[str, CatalogEntry] = _build_catalog()
CONFIGURATIONS: tuple[Configuration, ...] = tuple(e.config for e in CATALOG.values())
LIFTED_KEYS: tuple[str, ...] = tuple(
    k for k, e in CATALOG.items() if e.lifted is not None and e.config.pose.kind != PoseKind.GROUP
)


def get_entry(config: Configuration | str) -> CatalogEntry:
    key = config if isinstance(config, str) else config.key
    try:
        return CATALOG[key]
    except KeyError:
        raise UsageError(f"unknown configuration {key!r}; valid entries: {', '.join(CATALOG)}") from None


def parse_config(key: str) -> Configuration:
    return get_entry(key).config


def check_input(config: Configuration, x, name: str = "input") -> np.ndarray:
    v = np.array(x, dtype=float).reshape(-1)
    if v.shape != (config.ambient.dim,):
        raise UsageError(f"{name} must have {config.ambient.dim} coordinates, got {v.shape[0]}")
    if not np.all(np.isfinite(v)):
        raise ValidationError(f"{name} has non-finite entries")
    if config.ambient.sphere and abs(np.linalg.norm(v) - 1.0) > ARITH_TOL:
        raise ValidationError(f"{name} must lie on the unit sphere (norm {np.linalg.norm(v):.12g})")
    return v


def catalog_eval(config: Configuration | str, s, r, p) -> FeatureVector:
    """The separating G-invariants of (s, r, p) for a catalog configuration."""
    entry = get_entry(config)
    cfg = entry.config
    s = check_input(cfg, s, "s")
    r = check_input(cfg, r, "r")
    check_pose(cfg.pose, p)
    return entry.evaluator(s, r, p)


def cross_reduction_check(
    family: Family | str, dim: int, xs, p, q: GroupElement, kernel: Kernel | None = None
) -> tuple[FeatureVector, FeatureVector]:
    """Evaluate an invariant on X x R^n x G through both reductions.

    M1 = R^n (base point 0, H1 = SO(n)) and M2 = G (base point e, H2 = {e}).
    ``kernel(x1..xm, p)`` is any function on X x M1; through M2 it is used
    directly, through M1 it is transported as
    ``f_H1(x', q') = kernel(q'^-1 x', q'^-1 0)``.
    """
    family = Family(family)
    if family not in (Family.SE, Family.E) or dim not in (2, 3):
        raise UsageError("cross-reduction is instantiated for SE(2), SE(3) (and E(n))")
    kernel = kernels.raw_coordinates if kernel is None else kernel
    xs = [np.asarray(x, dtype=float) for x in xs]
    p = p.t if isinstance(p, PointPose) else np.asarray(p, dtype=float)
    if q.family != family or q.dim != dim:
        raise UsageError(f"q must be an element of {family.value}({dim})")

    # T1: canonicalize along M1
    rho1 = canonicalize(PoseSpace.eucl_point(dim), PointPose(p), family)
    xs1 = [act_point(rho1, x) for x in xs]
    q1 = compose(rho1, q)
    q1_inv = inverse(q1)
    side1 = kernel(*(act_point(q1_inv, x) for x in xs1), act_point(q1_inv, np.zeros(dim)))

    # T2: canonicalize along M2
    rho2 = inverse(q)
    side2 = kernel(*(act_point(rho2, x) for x in xs), act_point(rho2, p))
    return _as_features(side1), _as_features(side2)


def chain_canonicalizer(x, d, c) -> GroupElement:
    """The SE(3) element built by SE(3) > SO(3) > SO(2) > {e}, sending (x, d, c) to (0, e1, e2)."""
    x = np.asarray(x, dtype=float)
    d = np.asarray(d, dtype=float)
    c = np.asarray(c, dtype=float)
    if x.shape != (3,) or d.shape != (3,) or c.shape != (3,):
        raise UsageError("chain inputs live in R^3")
    for name, v in (("d", d), ("c", c)):
        if abs(np.linalg.norm(v) - 1.0) > ARITH_TOL:
            raise ValidationError(f"{name} must be a unit vector")
    if abs(c @ d) > ARITH_TOL:
        raise ValidationError(f"c must be orthogonal to d (<c,d> = {c @ d:.3g})")

    translate = GroupElement._raw(Family.SE, np.eye(3), -x)
    align = GroupElement._raw(Family.SE, frame_from_direction(d).rotation.T, np.zeros(3))
    c1 = align.rotation @ c  # orthogonal to e1 now
    c2, c3 = c1[1], c1[2]
    n = np.hypot(c2, c3)
    spin_block = np.array([[c2, c3], [-c3, c2]]) / n
    spin = GroupElement._raw(Family.SE, embed_block(spin_block, (1, 2), 3), np.zeros(3))
    return compose(spin, compose(align, translate))


def iterated_chain_SE3(x, d, c) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Residue of (x, d, c) after the full chain; always (0, e1, e2)."""
    g = chain_canonicalizer(x, d, c)
    x_out = act_point(g, x)
    return x_out, g.rotation @ np.asarray(d, dtype=float), g.rotation @ np.asarray(c, dtype=float)
