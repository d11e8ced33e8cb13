"""Randomised verification harnesses: invariance, canonicalizers, separation, reductions.

Every trial draws from its own stream seeded by (master seed, stream key,
trial index), so results do not depend on evaluation order.
"""

from __future__ import annotations

import zlib
from dataclasses import asdict, dataclass, field

import numpy as np

from isoreduce.errors import UsageError
from isoreduce.groups import (
    Family,
    GroupElement,
    act_point,
    random_group_element,
    reflection,
)
from isoreduce.kernels import FeatureVector
from isoreduce.oracle import EQUALITY_TOL, augment, same_orbit
from isoreduce.poses import (
    TRANSLATION_BOUND,
    AffStiefel,
    PointPose,
    PosOri,
    PoseKind,
    PoseSpace,
    SpherePose,
    Stiefel,
    _make,
    act_pose,
    alternative_canonicalize,
    base_point,
    canonicalize,
    pose_coords,
    random_2frame,
    random_direction,
    random_pose,
)
from isoreduce.reduction import (
    CatalogEntry,
    Configuration,
    cross_reduction_check,
    get_entry,
    iterated_chain_SE3,
)

PERTURBATION = 1e-3
POPULATIONS = ("orbit", "random", "perturbed", "mirror", "partial")


def trial_rng(seed: int, key: str, index: int) -> np.random.Generator:
    return np.random.default_rng([seed, zlib.crc32(key.encode()), index])


def _check_trials(trials: int) -> None:
    if trials < 1:
        raise UsageError(f"trials must be at least 1, got {trials}")


# -- sampling --------------------------------------------------------------


def sample_inputs(config: Configuration, rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray]:
    n = config.ambient.dim
    if config.ambient.sphere:
        return random_direction(n, rng), random_direction(n, rng)
    return (
        rng.uniform(-TRANSLATION_BOUND, TRANSLATION_BOUND, n),
        rng.uniform(-TRANSLATION_BOUND, TRANSLATION_BOUND, n),
    )


def sample_instance(config: Configuration, rng: np.random.Generator):
    s, r = sample_inputs(config, rng)
    return s, r, random_pose(config.pose, rng)


def sample_group(config: Configuration, rng: np.random.Generator) -> GroupElement:
    return random_group_element(config.family, config.dim, rng, TRANSLATION_BOUND)


def transform_instance(g: GroupElement, s, r, p):
    return act_point(g, s), act_point(g, r), act_pose(g, p)


def _unit(v: np.ndarray) -> np.ndarray:
    return v / np.linalg.norm(v)


def _gram_schmidt(a: np.ndarray, b: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    a = _unit(a)
    return a, _unit(b - (a @ b) * a)


def perturb_pose(p, rng: np.random.Generator, eps: float = PERTURBATION):
    """Additive noise of size eps, projected back onto the pose constraints."""

    def noise(n):
        return eps * rng.standard_normal(n)

    if isinstance(p, GroupElement):
        u, _, vt = np.linalg.svd(p.rotation + noise((p.dim, p.dim)))
        rot = u @ vt  # polar projection keeps det for small eps
        trans = p.translation + noise(p.dim) if p.family.affine else np.zeros(p.dim)
        return GroupElement._raw(p.family, rot, trans)
    if isinstance(p, PointPose):
        return _make(PointPose, t=p.t + noise(p.t.shape[0]))
    if isinstance(p, PosOri):
        n = p.t.shape[0]
        return _make(PosOri, t=p.t + noise(n), alpha=_unit(p.alpha + noise(n)))
    if isinstance(p, AffStiefel):
        a, b = _gram_schmidt(p.alpha + noise(3), p.beta + noise(3))
        return _make(AffStiefel, t=p.t + noise(3), alpha=a, beta=b)
    if isinstance(p, Stiefel):
        a, b = _gram_schmidt(p.alpha + noise(3), p.beta + noise(3))
        return _make(Stiefel, alpha=a, beta=b)
    if isinstance(p, SpherePose):
        return _make(SpherePose, alpha=_unit(p.alpha + noise(3)))
    raise UsageError(f"not a pose: {p!r}")


def perturb_instance(config: Configuration, s, r, p, rng: np.random.Generator, eps: float = PERTURBATION):
    n = config.ambient.dim
    s2 = s + eps * rng.standard_normal(n)
    r2 = r + eps * rng.standard_normal(n)
    if config.ambient.sphere:
        s2, r2 = _unit(s2), _unit(r2)
    return s2, r2, perturb_pose(p, rng, eps)


def mirror_available(config: Configuration) -> bool:
    """Whether reflecting an instance yields a valid instance (not for G-valued poses of SO/SE)."""
    return not (config.pose.kind == PoseKind.GROUP and config.family.proper)


def mirror_instance(config: Configuration, s, r, p):
    f = reflection(config.dim, Family.E if config.family.affine else Family.O)
    return transform_instance(f, s, r, p)


def _evaluate(entry: CatalogEntry, s, r, p, skip_canonicalization: bool = False) -> FeatureVector:
    if not skip_canonicalization:
        return entry.evaluator(s, r, p)
    if entry.lifted is None:
        raise UsageError(f"{entry.key} is not a lifted entry")
    inv = entry.lifted
    return inv((s, r), p, rho=GroupElement.identity(inv.family, entry.config.dim))


# -- reports ---------------------------------------------------------------


@dataclass
class DeviationReport:
    name: str
    trials: int
    max_deviation: float

    def passed(self, tol: float) -> bool:
        return self.max_deviation <= tol

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass
class PopulationTally:
    pairs: int = 0
    agreements: int = 0
    false_merges: int = 0
    false_splits: int = 0
    oracle_same: int = 0


@dataclass
class SeparationReport:
    name: str
    populations: dict[str, PopulationTally] = field(default_factory=dict)

    @property
    def agreements(self) -> int:
        return sum(t.agreements for t in self.populations.values())

    @property
    def false_merges(self) -> int:
        return sum(t.false_merges for t in self.populations.values())

    @property
    def false_splits(self) -> int:
        return sum(t.false_splits for t in self.populations.values())

    def passed(self) -> bool:
        return self.false_merges == 0 and self.false_splits == 0

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "agreements": self.agreements,
            "false_merges": self.false_merges,
            "false_splits": self.false_splits,
            "populations": {k: asdict(v) for k, v in self.populations.items()},
        }


# -- harnesses -------------------------------------------------------------


def invariance_trial(
    config: Configuration | str, seed: int = 0, trials: int = 1000, skip_canonicalization: bool = False
) -> DeviationReport:
    """Max componentwise change of the catalog invariants under random g."""
    _check_trials(trials)
    entry = get_entry(config)
    cfg = entry.config
    worst = 0.0
    for i in range(trials):
        rng = trial_rng(seed, f"invariance/{cfg.key}", i)
        s, r, p = sample_instance(cfg, rng)
        g = sample_group(cfg, rng)
        before = _evaluate(entry, s, r, p, skip_canonicalization).values
        after = _evaluate(entry, *transform_instance(g, s, r, p), skip_canonicalization).values
        worst = max(worst, float(np.max(np.abs(after - before))))
    return DeviationReport(cfg.key, trials, worst)


def rho_independence_trial(config: Configuration | str, seed: int = 0, trials: int = 1000) -> DeviationReport:
    """Max change of a lifted entry when rho(p) is replaced by h rho(p), h in H."""
    _check_trials(trials)
    entry = get_entry(config)
    if entry.lifted is None:
        raise UsageError(f"{entry.key} is evaluated directly, not through a canonicalizer")
    cfg, inv = entry.config, entry.lifted
    worst = 0.0
    for i in range(trials):
        rng = trial_rng(seed, f"rho/{cfg.key}", i)
        s, r, p = sample_instance(cfg, rng)
        alt = alternative_canonicalize(cfg.pose, p, rng, cfg.family)
        a = inv((s, r), p).values
        b = inv((s, r), p, rho=alt).values
        worst = max(worst, float(np.max(np.abs(a - b))))
    return DeviationReport(cfg.key, trials, worst)


def canonicalizer_trial(
    space: PoseSpace, seed: int = 0, trials: int = 1000, family: Family | str | None = None
) -> DeviationReport:
    """Max coordinate error of rho(p) . p against the base point."""
    _check_trials(trials)
    target = pose_coords(base_point(space))
    worst = 0.0
    for i in range(trials):
        rng = trial_rng(seed, f"canon/{space}", i)
        p = random_pose(space, rng)
        moved = act_pose(canonicalize(space, p, family), p)
        worst = max(worst, float(np.max(np.abs(pose_coords(moved) - target))))
    return DeviationReport(str(space), trials, worst)


def _pair(cfg: Configuration, population: str, rng: np.random.Generator):
    a = sample_instance(cfg, rng)
    if population == "random":
        return a, sample_instance(cfg, rng)
    if population == "orbit":
        b = a
    elif population == "perturbed":
        b = perturb_instance(cfg, *a, rng)
    elif population == "mirror":
        b = mirror_instance(cfg, *a)
    elif population == "partial":
        # move the inputs but leave the pose behind
        g = sample_group(cfg, rng)
        return a, (act_point(g, a[0]), act_point(g, a[1]), a[2])
    else:
        raise UsageError(f"unknown population {population!r}")
    return a, transform_instance(sample_group(cfg, rng), *b)


def separation_trial(
    config: Configuration | str,
    seed: int = 0,
    pairs: int = 500,
    tol: float = EQUALITY_TOL,
    populations: tuple[str, ...] | None = None,
) -> SeparationReport:
    """Cross-tabulate invariant equality against the orbit oracle.

    A false merge has equal invariants on different orbits; a false split has
    different invariants on one orbit.
    """
    _check_trials(pairs)
    entry = get_entry(config)
    cfg = entry.config
    if populations is None:
        populations = tuple(p for p in POPULATIONS if p != "mirror" or mirror_available(cfg))
    report = SeparationReport(cfg.key)
    for pop in populations:
        tally = PopulationTally()
        for i in range(pairs):
            rng = trial_rng(seed, f"separation/{cfg.key}/{pop}", i)
            a, b = _pair(cfg, pop, rng)
            fa = entry.evaluator(*a).values
            fb = entry.evaluator(*b).values
            equal = bool(np.max(np.abs(fa - fb)) <= tol)
            verdict = same_orbit(cfg.family, augment(cfg, *a), augment(cfg, *b), tol)
            tally.pairs += 1
            tally.oracle_same += verdict.same_orbit
            if equal == verdict.same_orbit:
                tally.agreements += 1
            elif equal:
                tally.false_merges += 1
            else:
                tally.false_splits += 1
        report.populations[pop] = tally
    return report


@dataclass
class CrossReductionReport:
    name: str
    trials: int
    max_disagreement: float
    max_invariance_deviation: float

    def passed(self, tol: float) -> bool:
        return self.max_disagreement <= tol and self.max_invariance_deviation <= tol

    def to_dict(self) -> dict:
        return asdict(self)


def cross_reduction_trial(
    family: Family | str = Family.SE, dim: int = 2, seed: int = 0, trials: int = 1000
) -> CrossReductionReport:
    """Agreement of the two reductions of X x R^n x G, and their G-invariance."""
    _check_trials(trials)
    family = Family(family)
    name = f"{family.value}{dim}"
    worst_gap = worst_inv = 0.0
    for i in range(trials):
        rng = trial_rng(seed, f"cross/{name}", i)
        xs = [rng.uniform(-TRANSLATION_BOUND, TRANSLATION_BOUND, dim) for _ in range(2)]
        p = rng.uniform(-TRANSLATION_BOUND, TRANSLATION_BOUND, dim)
        q = random_group_element(family, dim, rng, TRANSLATION_BOUND)
        g = random_group_element(family, dim, rng, TRANSLATION_BOUND)
        f1, f2 = cross_reduction_check(family, dim, xs, p, q)
        worst_gap = max(worst_gap, float(np.max(np.abs(f1.values - f2.values))))
        h1, h2 = cross_reduction_check(
            family, dim, [act_point(g, x) for x in xs], act_point(g, p), act_pose(g, q)
        )
        worst_inv = max(
            worst_inv,
            float(np.max(np.abs(h1.values - f1.values))),
            float(np.max(np.abs(h2.values - f2.values))),
        )
    return CrossReductionReport(name, trials, worst_gap, worst_inv)


@dataclass
class ChainReport:
    trials: int
    max_residue: float
    oracle_pairs: int
    oracle_confirmed: int
    max_witness_residual: float

    def passed(self, tol: float, witness_tol: float = 1e-7) -> bool:
        return (
            self.max_residue <= tol
            and self.oracle_confirmed == self.oracle_pairs
            and self.max_witness_residual <= witness_tol
        )

    def to_dict(self) -> dict:
        return asdict(self)


def sample_chain_triple(rng: np.random.Generator):
    x = rng.uniform(-TRANSLATION_BOUND, TRANSLATION_BOUND, 3)
    d, c = random_2frame(rng)
    return x, d, c


def chain_cloud(x, d, c) -> np.ndarray:
    return np.array([x, x + d, x + c])


def chain_trial(seed: int = 0, trials: int = 1000) -> ChainReport:
    """Every (x, d, c) with c orthogonal to d reduces to (0, e1, e2); the oracle agrees."""
    _check_trials(trials)
    target = np.concatenate([np.zeros(3), np.eye(3)[0], np.eye(3)[1]])
    worst = 0.0
    confirmed = 0
    worst_witness = 0.0
    prev = None
    for i in range(trials):
        rng = trial_rng(seed, "chain", i)
        triple = sample_chain_triple(rng)
        residue = np.concatenate(iterated_chain_SE3(*triple))
        worst = max(worst, float(np.max(np.abs(residue - target))))
        if prev is not None:
            verdict = same_orbit(Family.SE, chain_cloud(*prev), chain_cloud(*triple))
            if verdict.same_orbit:
                confirmed += 1
                worst_witness = max(worst_witness, verdict.residual)
        prev = triple
    pairs = max(trials - 1, 0)
    if trials == 1:
        # a single trial still gets an oracle check against the canonical triple
        verdict = same_orbit(Family.SE, chain_cloud(*prev), chain_cloud(*np.split(target, 3)))
        pairs, confirmed = 1, int(verdict.same_orbit)
        worst_witness = verdict.residual if verdict.same_orbit else float("inf")
    return ChainReport(trials, worst, pairs, confirmed, worst_witness)

