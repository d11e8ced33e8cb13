"""Homogeneous pose spaces G/H, their base points, stabilizers and canonicalizers.

A canonicalizer ``rho`` sends every pose ``p`` to the base point:
``act_pose(rho(p), p) == base_point(space)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from isoreduce.errors import UsageError, ValidationError
from isoreduce.groups import (
    ARITH_TOL,
    Family,
    GroupElement,
    act_direction,
    act_point,
    compose,
    embed_block,
    frame_from_2frame,
    frame_from_direction,
    frame_from_direction_2d,
    inverse,
    random_group_element,
    random_rotation,
)

POSE_TOL = ARITH_TOL
TRANSLATION_BOUND = 2.0
PARALLEL_THRESHOLD = 1e-6


class PoseKind(str, Enum):
    POINT = "point"
    POS_ORI = "pos-ori"
    AFF_STIEFEL = "aff-stiefel"
    STIEFEL = "stiefel"
    SPHERE = "sphere"
    GROUP = "group"


@dataclass(frozen=True)
class PoseSpace:
    kind: PoseKind
    dim: int
    family: Family | None = None  # group latent spaces only

    def __post_init__(self):
        object.__setattr__(self, "kind", PoseKind(self.kind))
        if self.family is not None:
            object.__setattr__(self, "family", Family(self.family))
        fixed_3d = (PoseKind.AFF_STIEFEL, PoseKind.STIEFEL, PoseKind.SPHERE)
        if self.kind in fixed_3d and self.dim != 3:
            raise UsageError(f"{self.kind.value} is only defined in 3D")
        if self.kind == PoseKind.POS_ORI and self.dim not in (2, 3):
            raise UsageError("pos-ori is defined for dim 2 and 3")
        if self.kind == PoseKind.GROUP and self.family is None:
            raise UsageError("group pose space needs a family")
        if self.dim not in (1, 2, 3):
            raise UsageError(f"unsupported dimension {self.dim}")

    @classmethod
    def eucl_point(cls, n: int) -> "PoseSpace":
        return cls(PoseKind.POINT, n)

    @classmethod
    def full_group(cls, family: Family | str, n: int) -> "PoseSpace":
        return cls(PoseKind.GROUP, n, Family(family))

    def natural_family(self) -> Family:
        """The largest isometry group acting on this space."""
        if self.kind == PoseKind.GROUP:
            return self.family
        if self.kind in (PoseKind.STIEFEL, PoseKind.SPHERE):
            return Family.O
        return Family.E

    def __str__(self):
        if self.kind == PoseKind.GROUP:
            return f"{self.family.value}({self.dim})"
        return f"{self.kind.value}({self.dim})"


POS_ORI_2 = PoseSpace(PoseKind.POS_ORI, 2)
POS_ORI_3 = PoseSpace(PoseKind.POS_ORI, 3)
AFF_STIEFEL_23 = PoseSpace(PoseKind.AFF_STIEFEL, 3)
STIEFEL_23 = PoseSpace(PoseKind.STIEFEL, 3)
SPHERE_2 = PoseSpace(PoseKind.SPHERE, 3)


def _vec(x, what: str) -> np.ndarray:
    v = np.array(x, dtype=float).reshape(-1)
    if not np.all(np.isfinite(v)):
        raise ValidationError(f"{what} has non-finite entries")
    return v


def _unit(x, what: str) -> np.ndarray:
    v = _vec(x, what)
    if abs(np.linalg.norm(v) - 1.0) > POSE_TOL:
        raise ValidationError(f"{what} must be a unit vector (norm {np.linalg.norm(v):.12g})")
    return v


def _orthonormal_pair(alpha, beta) -> tuple[np.ndarray, np.ndarray]:
    a = _unit(alpha, "alpha")
    b = _unit(beta, "beta")
    if a.shape != (3,) or b.shape != (3,):
        raise ValidationError("frame vectors must live in R^3")
    if abs(a @ b) > POSE_TOL:
        raise ValidationError(f"alpha and beta must be orthogonal (<alpha,beta> = {a @ b:.3g})")
    return a, b


@dataclass(frozen=True, eq=False)
class PointPose:
    t: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "t", _vec(self.t, "t"))


@dataclass(frozen=True, eq=False)
class PosOri:
    """Position plus unit orientation, in R^2 x S^1 or R^3 x S^2."""

    t: np.ndarray
    alpha: np.ndarray

    def __post_init__(self):
        t = _vec(self.t, "t")
        a = _unit(self.alpha, "alpha")
        if t.shape != a.shape or t.shape[0] not in (2, 3):
            raise ValidationError("t and alpha must both be 2D or both 3D")
        object.__setattr__(self, "t", t)
        object.__setattr__(self, "alpha", a)


@dataclass(frozen=True, eq=False)
class AffStiefel:
    """Position plus an orthonormal 2-frame [alpha | beta] in R^3."""

    t: np.ndarray
    alpha: np.ndarray
    beta: np.ndarray

    def __post_init__(self):
        t = _vec(self.t, "t")
        if t.shape != (3,):
            raise ValidationError("t must live in R^3")
        a, b = _orthonormal_pair(self.alpha, self.beta)
        object.__setattr__(self, "t", t)
        object.__setattr__(self, "alpha", a)
        object.__setattr__(self, "beta", b)


@dataclass(frozen=True, eq=False)
class Stiefel:
    alpha: np.ndarray
    beta: np.ndarray

    def __post_init__(self):
        a, b = _orthonormal_pair(self.alpha, self.beta)
        object.__setattr__(self, "alpha", a)
        object.__setattr__(self, "beta", b)


@dataclass(frozen=True, eq=False)
class SpherePose:
    alpha: np.ndarray

    def __post_init__(self):
        a = _unit(self.alpha, "alpha")
        if a.shape != (3,):
            raise ValidationError("sphere poses live in R^3")
        object.__setattr__(self, "alpha", a)


Pose = PointPose | PosOri | AffStiefel | Stiefel | SpherePose | GroupElement

_POSE_TYPES = {
    PoseKind.POINT: PointPose,
    PoseKind.POS_ORI: PosOri,
    PoseKind.AFF_STIEFEL: AffStiefel,
    PoseKind.STIEFEL: Stiefel,
    PoseKind.SPHERE: SpherePose,
    PoseKind.GROUP: GroupElement,
}


def _make(cls, **fields):
    # skip validation for poses produced by isometries of valid poses
    p = object.__new__(cls)
    for k, v in fields.items():
        object.__setattr__(p, k, v)
    return p


def check_pose(space: PoseSpace, p) -> None:
    """Raise UsageError unless ``p`` is a pose of ``space``."""
    expected = _POSE_TYPES[space.kind]
    if not isinstance(p, expected):
        raise UsageError(f"expected a {expected.__name__} for {space}, got {type(p).__name__}")
    if pose_dim(p) != space.dim:
        raise UsageError(f"pose dimension {pose_dim(p)} does not match {space}")
    if space.kind == PoseKind.GROUP and p.family != space.family:
        raise UsageError(f"expected an element of {space.family.value}, got {p.family.value}")


def pose_dim(p) -> int:
    if isinstance(p, GroupElement):
        return p.dim
    if isinstance(p, (PointPose, PosOri, AffStiefel)):
        return p.t.shape[0]
    return p.alpha.shape[0]


def pose_coords(p) -> np.ndarray:
    """Flat coordinate vector, used for numeric comparison of poses."""
    if isinstance(p, GroupElement):
        return np.concatenate([p.rotation.ravel(), p.translation])
    if isinstance(p, PointPose):
        return p.t.copy()
    if isinstance(p, PosOri):
        return np.concatenate([p.t, p.alpha])
    if isinstance(p, AffStiefel):
        return np.concatenate([p.t, p.alpha, p.beta])
    if isinstance(p, Stiefel):
        return np.concatenate([p.alpha, p.beta])
    if isinstance(p, SpherePose):
        return p.alpha.copy()
    raise UsageError(f"not a pose: {p!r}")


def base_point(space: PoseSpace):
    n = space.dim
    e = np.eye(n)
    origin = np.zeros(n)
    if space.kind == PoseKind.POINT:
        return PointPose(origin)
    if space.kind == PoseKind.POS_ORI:
        return PosOri(origin, e[0])
    if space.kind == PoseKind.AFF_STIEFEL:
        return AffStiefel(origin, e[0], e[1])
    if space.kind == PoseKind.STIEFEL:
        return Stiefel(e[0], e[1])
    if space.kind == PoseKind.SPHERE:
        return SpherePose(e[0])
    return GroupElement.identity(space.family, n)


def act_pose(g: GroupElement, p):
    """Diagonal action: positions move by g, directions by its rotation part."""
    if isinstance(p, GroupElement):
        return compose(g, p)
    if pose_dim(p) != g.dim:
        raise UsageError(f"cannot act with {g.family.value}({g.dim}) on a {pose_dim(p)}-dimensional pose")
    if isinstance(p, PointPose):
        return _make(PointPose, t=act_point(g, p.t))
    if isinstance(p, PosOri):
        return _make(PosOri, t=act_point(g, p.t), alpha=act_direction(g, p.alpha))
    if isinstance(p, AffStiefel):
        return _make(
            AffStiefel,
            t=act_point(g, p.t),
            alpha=act_direction(g, p.alpha),
            beta=act_direction(g, p.beta),
        )
    if isinstance(p, Stiefel):
        return _make(Stiefel, alpha=act_direction(g, p.alpha), beta=act_direction(g, p.beta))
    if isinstance(p, SpherePose):
        return _make(SpherePose, alpha=act_direction(g, p.alpha))
    raise UsageError(f"not a pose: {p!r}")


def _resolve_family(space: PoseSpace, family) -> Family:
    if family is None:
        return space.natural_family()
    family = Family(family)
    if space.kind == PoseKind.GROUP and family != space.family:
        raise UsageError(f"group pose space {space} is acted on by {space.family.value} only")
    if space.kind in (PoseKind.STIEFEL, PoseKind.SPHERE) and family.affine:
        raise UsageError(f"{space} is acted on by O(3)/SO(3), not {family.value}(3)")
    if space.kind in (PoseKind.POINT, PoseKind.POS_ORI, PoseKind.AFF_STIEFEL) and not family.affine:
        raise UsageError(f"{space} needs a group with translations, not {family.value}")
    return family


def _inverse_frame(family: Family, frame: np.ndarray, t: np.ndarray) -> GroupElement:
    # rho(p) = pbar^{-1}, pbar = (A, t)
    at = frame.T
    return GroupElement._raw(family, at.copy(), -at @ t)


def canonicalize(space: PoseSpace, p, family=None) -> GroupElement:
    """The canonicalization rho(p) in G = ``family`` (default: the space's natural group)."""
    family = _resolve_family(space, family)
    check_pose(space, p)
    if space.kind == PoseKind.POINT:
        return GroupElement._raw(family, np.eye(space.dim), -p.t)
    if space.kind == PoseKind.POS_ORI:
        if space.dim == 2:
            frame = frame_from_direction_2d(p.alpha).rotation
        else:
            frame = frame_from_direction(p.alpha).rotation
        return _inverse_frame(family, frame, p.t)
    if space.kind == PoseKind.AFF_STIEFEL:
        return _inverse_frame(family, frame_from_2frame(p.alpha, p.beta).rotation, p.t)
    if space.kind == PoseKind.STIEFEL:
        return _inverse_frame(family, frame_from_2frame(p.alpha, p.beta).rotation, np.zeros(3))
    if space.kind == PoseKind.SPHERE:
        return _inverse_frame(family, frame_from_direction(p.alpha).rotation, np.zeros(3))
    return inverse(p)


@dataclass(frozen=True)
class StabilizerDescriptor:
    """H = Stab_G(p0) as a block group acting on ``coords`` (0-based) and fixing the rest."""

    family: Family
    dim: int
    coords: tuple[int, ...]
    ambient_dim: int

    def __str__(self):
        if self.dim == 0 or (self.family == Family.SO and self.dim == 1):
            return "{e}"
        return f"{self.family.value}({self.dim})"


def stabilizer(space: PoseSpace, family=None) -> StabilizerDescriptor:
    family = _resolve_family(space, family)
    n = space.dim
    linear = family.linear_part()
    if space.kind == PoseKind.POINT:
        coords = tuple(range(n))
    elif space.kind in (PoseKind.POS_ORI, PoseKind.SPHERE):
        coords = tuple(range(1, n))
    elif space.kind in (PoseKind.AFF_STIEFEL, PoseKind.STIEFEL):
        coords = (2,)
    else:
        coords = ()
    return StabilizerDescriptor(linear, len(coords), coords, n)


def stabilizer_sample(space: PoseSpace, rng: np.random.Generator, family=None) -> GroupElement:
    """A random element of Stab_G(base_point(space)), tagged with G's family."""
    family = _resolve_family(space, family)
    desc = stabilizer(space, family)
    if desc.dim == 0:
        return GroupElement.identity(family, space.dim)
    block = random_rotation(desc.dim, rng, proper=desc.family.proper)
    rot = embed_block(block, desc.coords, space.dim)
    return GroupElement._raw(family, rot, np.zeros(space.dim))


def alternative_canonicalize(space: PoseSpace, p, rng: np.random.Generator, family=None) -> GroupElement:
    """h * rho(p) for a random stabilizer element h; still sends p to the base point."""
    family = _resolve_family(space, family)
    return compose(stabilizer_sample(space, rng, family), canonicalize(space, p, family))


def random_direction(dim: int, rng: np.random.Generator) -> np.ndarray:
    v = rng.standard_normal(dim)
    return v / np.linalg.norm(v)


def random_2frame(rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray]:
    while True:
        a = rng.standard_normal(3)
        b = rng.standard_normal(3)
        a /= np.linalg.norm(a)
        b = b - (a @ b) * a
        nb = np.linalg.norm(b)
        if nb > PARALLEL_THRESHOLD:
            return a, b / nb


def random_pose(space: PoseSpace, rng: np.random.Generator, family=None):
    """Sample a pose: t uniform in [-2, 2]^n, directions from normalised Gaussians."""
    n = space.dim
    if space.kind == PoseKind.GROUP:
        return random_group_element(space.family, n, rng, TRANSLATION_BOUND)
    if space.kind == PoseKind.POINT:
        return _make(PointPose, t=rng.uniform(-TRANSLATION_BOUND, TRANSLATION_BOUND, n))
    if space.kind == PoseKind.POS_ORI:
        t = rng.uniform(-TRANSLATION_BOUND, TRANSLATION_BOUND, n)
        return _make(PosOri, t=t, alpha=random_direction(n, rng))
    if space.kind == PoseKind.AFF_STIEFEL:
        t = rng.uniform(-TRANSLATION_BOUND, TRANSLATION_BOUND, n)
        a, b = random_2frame(rng)
        return _make(AffStiefel, t=t, alpha=a, beta=b)
    if space.kind == PoseKind.STIEFEL:
        a, b = random_2frame(rng)
        return _make(Stiefel, alpha=a, beta=b)
    return _make(SpherePose, alpha=random_direction(3, rng))


ALL_SPACES = (
    PoseSpace.eucl_point(2),
    PoseSpace.eucl_point(3),
    POS_ORI_2,
    POS_ORI_3,
    AFF_STIEFEL_23,
    STIEFEL_23,
    SPHERE_2,
    *(PoseSpace.full_group(f, n) for f in Family for n in (2, 3)),
)
