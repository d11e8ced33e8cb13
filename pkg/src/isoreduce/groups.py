"""Isometry groups O(n), SO(n), E(n), SE(n) for n in {1, 2, 3}.

Elements are stored as a pair (R, t) acting by ``x -> R x + t`` and composing
as ``(R, t)(R', t') = (R R', t + R t')``.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from isoreduce.errors import UsageError, ValidationError

CONSTRUCT_TOL = 1e-12
ARITH_TOL = 1e-10
ACTION_TOL = 1e-9

# candidate order for completing a single direction to a frame
_BETA_CANDIDATES = np.eye(3)[[1, 2, 0]]
_BETA_MAX_OVERLAP = 0.9


class Family(str, Enum):
    O = "O"
    SO = "SO"
    E = "E"
    SE = "SE"

    @property
    def proper(self) -> bool:
        """True for the orientation-preserving families SO and SE."""
        return self in (Family.SO, Family.SE)

    @property
    def affine(self) -> bool:
        """True when the family carries translations."""
        return self in (Family.E, Family.SE)

    def linear_part(self) -> "Family":
        """The family of the rotation block: O for O/E, SO for SO/SE."""
        return Family.SO if self.proper else Family.O


@dataclass(frozen=True, eq=False)
class GroupElement:
    """An isometry ``x -> rotation @ x + translation`` tagged with its family."""

    family: Family
    rotation: np.ndarray
    translation: np.ndarray

    def __post_init__(self):
        family = Family(self.family)
        rot = np.array(self.rotation, dtype=float)
        trans = np.array(self.translation, dtype=float).reshape(-1)
        object.__setattr__(self, "family", family)
        object.__setattr__(self, "rotation", rot)
        object.__setattr__(self, "translation", trans)
        _check_element(family, rot, trans, CONSTRUCT_TOL)
        rot.setflags(write=False)
        trans.setflags(write=False)

    @classmethod
    def _raw(cls, family: Family, rotation: np.ndarray, translation: np.ndarray) -> "GroupElement":
        # arithmetic results skip construction-time validation
        g = object.__new__(cls)
        object.__setattr__(g, "family", family)
        object.__setattr__(g, "rotation", rotation)
        object.__setattr__(g, "translation", translation)
        return g

    @classmethod
    def identity(cls, family: Family | str, dim: int) -> "GroupElement":
        return cls._raw(Family(family), np.eye(dim), np.zeros(dim))

    @property
    def dim(self) -> int:
        return self.rotation.shape[0]

    def matrix(self) -> np.ndarray:
        """Homogeneous (n+1)x(n+1) matrix."""
        n = self.dim
        m = np.eye(n + 1)
        m[:n, :n] = self.rotation
        m[:n, n] = self.translation
        return m

    def with_family(self, family: Family | str) -> "GroupElement":
        """Re-tag the same isometry; validated against the new family."""
        return GroupElement(Family(family), self.rotation, self.translation)

    def __repr__(self):
        return (
            f"GroupElement({self.family.value}({self.dim}), "
            f"R={self.rotation.tolist()}, t={self.translation.tolist()})"
        )


def _check_element(family: Family, rot: np.ndarray, trans: np.ndarray, tol: float) -> None:
    if rot.ndim != 2 or rot.shape[0] != rot.shape[1] or rot.shape[0] not in (1, 2, 3):
        raise ValidationError(f"rotation must be n x n with n in {{1,2,3}}, got shape {rot.shape}")
    n = rot.shape[0]
    if trans.shape != (n,):
        raise ValidationError(f"translation must have length {n}, got {trans.shape}")
    if not (np.all(np.isfinite(rot)) and np.all(np.isfinite(trans))):
        raise ValidationError("group element entries must be finite")
    if np.max(np.abs(rot.T @ rot - np.eye(n))) > tol:
        raise ValidationError("rotation is not orthogonal")
    det = np.linalg.det(rot)
    if abs(abs(det) - 1.0) > tol:
        raise ValidationError(f"rotation determinant {det} is not +-1")
    if family.proper and det < 0:
        raise ValidationError(f"family {family.value} requires det(R) = +1")
    if not family.affine and np.any(trans != 0.0):
        raise ValidationError(f"family {family.value} carries no translation")


def is_valid(g: GroupElement, tol: float = ARITH_TOL) -> bool:
    try:
        _check_element(g.family, g.rotation, g.translation, tol)
    except ValidationError:
        return False
    return True


def _same_group(g: GroupElement, h: GroupElement) -> None:
    if g.family != h.family or g.dim != h.dim:
        raise UsageError(
            f"cannot combine {g.family.value}({g.dim}) with {h.family.value}({h.dim})"
        )


def compose(g: GroupElement, h: GroupElement) -> GroupElement:
    """Group product g*h, acting as first h then g."""
    _same_group(g, h)
    return GroupElement._raw(
        g.family, g.rotation @ h.rotation, g.translation + g.rotation @ h.translation
    )


def inverse(g: GroupElement) -> GroupElement:
    rt = g.rotation.T
    return GroupElement._raw(g.family, rt.copy(), -rt @ g.translation)


def _as_vector(x, dim: int, what: str) -> np.ndarray:
    v = np.asarray(x, dtype=float)
    if v.shape != (dim,):
        raise UsageError(f"{what} must have shape ({dim},), got {v.shape}")
    return v


def act_point(g: GroupElement, x) -> np.ndarray:
    return g.rotation @ _as_vector(x, g.dim, "point") + g.translation


def act_direction(g: GroupElement, d) -> np.ndarray:
    """Rotate a direction; the translation part never touches directions."""
    return g.rotation @ _as_vector(d, g.dim, "direction")


def act_points(g: GroupElement, xs) -> np.ndarray:
    """Vectorised act_point on an (k, n) array of points."""
    xs = np.asarray(xs, dtype=float)
    return xs @ g.rotation.T + g.translation


def distance(g: GroupElement, h: GroupElement) -> float:
    """Max-norm distance between the (R, t) parts."""
    return float(
        max(np.max(np.abs(g.rotation - h.rotation)), np.max(np.abs(g.translation - h.translation)))
    )


def _check_unit(v: np.ndarray, what: str, tol: float = ARITH_TOL) -> None:
    if abs(np.linalg.norm(v) - 1.0) > tol:
        raise ValidationError(f"{what} must be a unit vector (norm {np.linalg.norm(v):.12g})")


def _frame3(alpha: np.ndarray, beta: np.ndarray) -> np.ndarray:
    # [alpha | beta | alpha x beta]; np.cross is slow on single vectors
    a1, a2, a3 = alpha
    b1, b2, b3 = beta
    gamma = (a2 * b3 - a3 * b2, a3 * b1 - a1 * b3, a1 * b2 - a2 * b1)
    return np.array([[a1, b1, gamma[0]], [a2, b2, gamma[1]], [a3, b3, gamma[2]]])


def complete_direction(alpha) -> np.ndarray:
    """Deterministic unit vector orthogonal to ``alpha`` (3D).

    Takes the first of e2, e3, e1 whose overlap with ``alpha`` is at most 0.9
    and Gram-Schmidts it against ``alpha``.
    """
    alpha = _as_vector(alpha, 3, "direction")
    for c in _BETA_CANDIDATES:
        overlap = alpha @ c
        if abs(overlap) <= _BETA_MAX_OVERLAP:
            beta = c - overlap * alpha
            return beta / np.linalg.norm(beta)
    raise AssertionError("unreachable for unit alpha")


def frame_from_direction(alpha) -> GroupElement:
    """Rotation in SO(3) whose first column is ``alpha``."""
    alpha = _as_vector(alpha, 3, "direction")
    _check_unit(alpha, "alpha")
    beta = complete_direction(alpha)
    return GroupElement._raw(Family.SO, _frame3(alpha, beta), np.zeros(3))


def frame_from_2frame(alpha, beta) -> GroupElement:
    """The rotation [alpha | beta | alpha x beta] for an orthonormal pair."""
    alpha = _as_vector(alpha, 3, "alpha")
    beta = _as_vector(beta, 3, "beta")
    _check_unit(alpha, "alpha")
    _check_unit(beta, "beta")
    if abs(alpha @ beta) > ARITH_TOL:
        raise ValidationError(f"alpha and beta must be orthogonal (<alpha,beta> = {alpha @ beta:.3g})")
    return GroupElement._raw(Family.SO, _frame3(alpha, beta), np.zeros(3))


def frame_from_direction_2d(alpha) -> GroupElement:
    """Planar rotation sending e1 to ``alpha``."""
    alpha = _as_vector(alpha, 2, "direction")
    _check_unit(alpha, "alpha")
    a1, a2 = alpha
    return GroupElement._raw(Family.SO, np.array([[a1, -a2], [a2, a1]]), np.zeros(2))


def random_rotation(dim: int, rng: np.random.Generator, proper: bool = False) -> np.ndarray:
    """Near-Haar orthogonal matrix: QR of a Gaussian with the sign of diag(R) folded in."""
    q, r = np.linalg.qr(rng.standard_normal((dim, dim)))
    q = q * np.where(np.diag(r) < 0, -1.0, 1.0)
    if proper and np.linalg.det(q) < 0:
        q[:, -1] = -q[:, -1]
    return q


def random_group_element(
    family: Family | str, dim: int, rng: np.random.Generator, translation_bound: float = 2.0
) -> GroupElement:
    family = Family(family)
    if dim not in (1, 2, 3):
        raise UsageError(f"dim must be 1, 2 or 3, got {dim}")
    rot = random_rotation(dim, rng, proper=family.proper)
    if family.affine:
        if translation_bound <= 0:
            raise UsageError("translation_bound must be positive")
        trans = rng.uniform(-translation_bound, translation_bound, dim)
    else:
        trans = np.zeros(dim)
    return GroupElement._raw(family, rot, trans)


def embed_block(block: np.ndarray, coords, dim: int) -> np.ndarray:
    """Place ``block`` on the given 0-based coordinates of a dim x dim identity."""
    m = np.eye(dim)
    if len(coords):
        idx = np.asarray(coords)
        m[np.ix_(idx, idx)] = block
    return m


def reflection(dim: int, family: Family | str) -> GroupElement:
    """The improper element diag(1, ..., 1, -1); raises for proper families."""
    family = Family(family)
    if family.proper:
        raise UsageError(f"{family.value}({dim}) contains no reflections")
    rot = np.eye(dim)
    rot[-1, -1] = -1.0
    return GroupElement._raw(family, rot, np.zeros(dim))
