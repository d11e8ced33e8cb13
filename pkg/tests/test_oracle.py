import numpy as np
import pytest

from isoreduce.errors import OracleInconsistency, UsageError
from isoreduce.groups import Family, act_point, random_group_element, reflection
from isoreduce.oracle import alignment_residual, augment, find_witness, same_orbit, span_dimension
from isoreduce.poses import PointPose
from isoreduce.reduction import CATALOG, LIFTED_KEYS, catalog_eval, get_entry
from isoreduce.trials import (
    invariance_trial,
    mirror_instance,
    rho_independence_trial,
    sample_group,
    sample_instance,
    separation_trial,
    transform_instance,
)

TETRA = np.array([[0.0, 0, 0], [1, 0, 0], [0, 1, 0], [0, 0, 1]])
TRIANGLE = np.array([[0.0, 0, 0], [1, 0, 0], [0.3, 2, 0]])
MIRROR = np.diag([1.0, 1.0, -1.0])


def test_augment_counts():
    cfg = get_entry("SE3/R3/point").config
    cloud = augment(cfg, np.ones(3), np.zeros(3), PointPose(np.zeros(3)))
    assert cloud.points.shape == (3, 3) and cloud.labels == ("s", "r", "t")
    s, r, p = sample_instance(get_entry("E3/R3/pos-ori").config, np.random.default_rng(0))
    assert len(augment("E3/R3/pos-ori", s, r, p)) == 4
    s, r, p = sample_instance(get_entry("SE3/R3/group").config, np.random.default_rng(0))
    assert len(augment("SE3/R3/group", s, r, p)) == 6


@pytest.mark.parametrize("key", sorted(CATALOG))
def test_augment_is_covariant(key):
    cfg = get_entry(key).config
    rng = np.random.default_rng(1)
    for _ in range(100):
        s, r, p = sample_instance(cfg, rng)
        g = sample_group(cfg, rng)
        moved = augment(cfg, *transform_instance(g, s, r, p)).points
        expected = augment(cfg, s, r, p).points @ g.rotation.T + g.translation
        assert np.max(np.abs(moved - expected)) <= 1e-10


@pytest.mark.parametrize("family", list(Family))
def test_oracle_sound_on_constructed_pairs(family):
    rng = np.random.default_rng(2)
    for _ in range(1000):
        cloud = rng.standard_normal((4, 3))
        g = random_group_element(family, 3, rng)
        v = same_orbit(family, cloud, cloud @ g.rotation.T + g.translation)
        assert v.same_orbit and v.residual <= 1e-9


def test_tetrahedron_vs_mirror():
    mirror = TETRA @ MIRROR
    assert same_orbit("E", TETRA, mirror).same_orbit
    assert not same_orbit("SE", TETRA, mirror).same_orbit
    assert same_orbit("O", TETRA, mirror).same_orbit
    assert not same_orbit("SO", TETRA, mirror).same_orbit


def test_coplanar_triangle_vs_mirror():
    # mirror across a plane not containing the triangle
    flip = np.diag([-1.0, 1.0, 1.0])
    mirror = TRIANGLE @ flip
    v = same_orbit("SE", TRIANGLE, mirror)
    assert v.same_orbit
    assert np.linalg.det(v.witness.rotation) == pytest.approx(1.0)
    assert v.residual <= 1e-7
    assert same_orbit("E", TRIANGLE, mirror).same_orbit


def test_identical_clouds_identity_witness():
    g = find_witness("SE", TETRA, TETRA)
    np.testing.assert_allclose(g.rotation, np.eye(3), atol=1e-12)
    np.testing.assert_allclose(g.translation, 0, atol=1e-12)
    assert alignment_residual(g, TETRA, TETRA) <= 1e-12


def test_witness_recovers_full_rank_transform():
    rng = np.random.default_rng(3)
    for _ in range(100):
        g = random_group_element("SE", 3, rng)
        cloud = rng.standard_normal((5, 3))
        w = find_witness("SE", cloud, cloud @ g.rotation.T + g.translation)
        for x in cloud:
            np.testing.assert_allclose(act_point(w, x), act_point(g, x), atol=1e-8)


def test_witness_failure_raises():
    other = TETRA.copy()
    other[3] *= 2
    with pytest.raises(OracleInconsistency):
        find_witness("E", TETRA, other)
    assert not same_orbit("E", TETRA, other).same_orbit


def test_mismatched_clouds_rejected():
    with pytest.raises(UsageError):
        same_orbit("E", TETRA, TRIANGLE)
    a = augment("E3/R3/point", np.zeros(3), np.ones(3), PointPose(np.zeros(3)))
    cfg = get_entry("E3/R3/pos-ori").config
    b = augment(cfg, *sample_instance(cfg, np.random.default_rng(0)))
    with pytest.raises(UsageError):
        same_orbit("E", a, b)


def test_span_dimension():
    assert span_dimension(TETRA, affine=True) == 3
    assert span_dimension(TRIANGLE, affine=True) == 2
    assert span_dimension(TRIANGLE, affine=False) == 2
    assert span_dimension(np.ones((3, 3)), affine=True) == 0


def test_coplanar_verdicts_coincide():
    rng = np.random.default_rng(4)
    for _ in range(200):
        tri = rng.standard_normal((3, 3))
        for other in (tri @ MIRROR, tri @ random_group_element("E", 3, rng).rotation.T):
            assert same_orbit("SE", tri, other).same_orbit == same_orbit("E", tri, other).same_orbit


def test_reflection_rejected_for_proper_family():
    with pytest.raises(UsageError):
        reflection(3, "SE")


def test_invariance_trial_passes_and_rejects_zero():
    assert invariance_trial("E2/R2/pos-ori", seed=1, trials=200).max_deviation <= 1e-9
    with pytest.raises(UsageError):
        invariance_trial("E2/R2/pos-ori", trials=0)
    with pytest.raises(UsageError):
        separation_trial("E2/R2/pos-ori", pairs=0)


def test_negative_control_pos_ori2():
    assert invariance_trial("E2/R2/pos-ori", seed=2, trials=200, skip_canonicalization=True).max_deviation > 1e-3


def test_negative_control_needs_lifted_entry():
    with pytest.raises(UsageError):
        invariance_trial("E2/R2/point", trials=5, skip_canonicalization=True)
    with pytest.raises(UsageError):
        rho_independence_trial("E2/R2/point", trials=5)


def test_rho_independence_small_run():
    for key in sorted(LIFTED_KEYS):
        assert rho_independence_trial(key, seed=3, trials=100).max_deviation <= 1e-9


def test_se2_point_mirror_pairs():
    cfg = get_entry("SE2/R2/point").config
    rng = np.random.default_rng(5)
    for _ in range(100):
        a = sample_instance(cfg, rng)
        b = mirror_instance(cfg, *a)
        fa, fb = catalog_eval(cfg, *a).values, catalog_eval(cfg, *b).values
        np.testing.assert_allclose(fa[:3], fb[:3], atol=1e-12)
        assert fa[3] == pytest.approx(-fb[3])
        assert not same_orbit(cfg.family, augment(cfg, *a), augment(cfg, *b)).same_orbit


def test_separation_small_run_all_populations():
    report = separation_trial("SE3/R3/pos-ori", seed=4, pairs=100)
    assert set(report.populations) == {"orbit", "random", "perturbed", "mirror", "partial"}
    assert report.passed()
    orbit = report.populations["orbit"]
    assert orbit.agreements == orbit.pairs == orbit.oracle_same == 100
    assert report.populations["perturbed"].false_merges == 0


def test_separation_is_deterministic():
    a = separation_trial("O3/S2/stiefel", seed=7, pairs=50).to_dict()
    b = separation_trial("O3/S2/stiefel", seed=7, pairs=50).to_dict()
    assert a == b
