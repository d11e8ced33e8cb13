"""Separating invariants on products X^m x G/H via reduction to the isotropy subgroup."""

from isoreduce.errors import OracleInconsistency, UsageError, ValidationError
from isoreduce.groups import (
    Family,
    GroupElement,
    act_direction,
    act_point,
    compose,
    frame_from_2frame,
    frame_from_direction,
    frame_from_direction_2d,
    inverse,
    random_group_element,
)
from isoreduce.kernels import FeatureVector
from isoreduce.oracle import AugmentedCloud, OrbitVerdict, augment, find_witness, same_orbit
from isoreduce.poses import (
    AffStiefel,
    PointPose,
    PoseKind,
    PoseSpace,
    PosOri,
    SpherePose,
    Stiefel,
    act_pose,
    alternative_canonicalize,
    base_point,
    canonicalize,
    stabilizer,
    stabilizer_sample,
)
from isoreduce.reduction import (
    CATALOG,
    Configuration,
    LiftedInvariant,
    catalog_eval,
    cross_reduction_check,
    group_latent,
    iterated_chain_SE3,
    lift,
    parse_config,
)

__version__ = "0.1.0"
