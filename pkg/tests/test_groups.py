import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from isoreduce.errors import UsageError, ValidationError
from isoreduce.groups import (
    Family,
    GroupElement,
    act_direction,
    act_point,
    compose,
    distance,
    frame_from_2frame,
    frame_from_direction,
    frame_from_direction_2d,
    inverse,
    is_valid,
    random_group_element,
)

ROT90 = np.array([[0.0, -1.0], [1.0, 0.0]])
E3 = np.eye(3)


def se2(rot, t):
    return GroupElement(Family.SE, rot, t)


def assert_element(g, rot, t, tol=1e-12):
    np.testing.assert_allclose(g.rotation, rot, atol=tol)
    np.testing.assert_allclose(g.translation, t, atol=tol)


def test_compose_translations_add():
    g = compose(se2(np.eye(2), [1, 0]), se2(np.eye(2), [0, 1]))
    assert_element(g, np.eye(2), [1, 1])


def test_compose_rotation_then_translation():
    # (t + R t', R R') with R = rot90, t' = (1, 0)
    g = compose(se2(ROT90, [0, 0]), se2(np.eye(2), [1, 0]))
    assert_element(g, ROT90, [0, 1])


def test_compose_family_mismatch():
    with pytest.raises(UsageError):
        compose(GroupElement.identity("E", 2), GroupElement.identity("SE", 2))
    with pytest.raises(UsageError):
        compose(GroupElement.identity("SE", 2), GroupElement.identity("SE", 3))


def test_inverse_examples():
    assert_element(inverse(GroupElement.identity("SE", 2)), np.eye(2), [0, 0])
    assert_element(inverse(se2(np.eye(2), [1, 2])), np.eye(2), [-1, -2])
    assert_element(inverse(se2(ROT90, [1, 0])), ROT90.T, [0, 1])


def test_act_point_examples():
    assert np.array_equal(act_point(GroupElement.identity("E", 2), [5, -3]), [5, -3])
    np.testing.assert_allclose(act_point(se2(ROT90, [1, 0]), [1, 0]), [1, 1])
    refl = GroupElement(Family.E, np.diag([1.0, -1.0]), [0, 0])
    np.testing.assert_allclose(act_point(refl, [1, 2]), [1, -2])


def test_act_point_dim_mismatch():
    with pytest.raises(UsageError):
        act_point(GroupElement.identity("E", 3), [1, 2])


def test_act_direction_ignores_translation():
    assert np.array_equal(act_direction(GroupElement.identity("O", 3), E3[0]), E3[0])
    np.testing.assert_allclose(act_direction(se2(ROT90, [0, 0]), [1, 0]), [0, 1])
    np.testing.assert_allclose(act_direction(se2(ROT90, [7, 7]), [1, 0]), [0, 1])


def test_frame_from_direction_examples():
    assert np.array_equal(frame_from_direction(E3[0]).rotation, np.eye(3))
    # alpha = e3: beta candidate e2 is already orthogonal, third column e3 x e2 = -e1
    a = frame_from_direction(E3[2]).rotation
    np.testing.assert_allclose(a, np.column_stack([E3[2], E3[1], -E3[0]]))
    assert np.linalg.det(a) == pytest.approx(1.0)
    a = frame_from_direction(-E3[0]).rotation
    np.testing.assert_allclose(a[:, 0], -E3[0])
    np.testing.assert_allclose(a.T @ a, np.eye(3), atol=1e-12)
    assert np.linalg.det(a) == pytest.approx(1.0)


def test_frame_from_direction_switches_candidate_near_e2():
    alpha = np.array([0.1, 0.99, 0.0])
    alpha /= np.linalg.norm(alpha)
    a = frame_from_direction(alpha).rotation
    # |<alpha, e2>| > 0.9, so beta comes from e3
    np.testing.assert_allclose(a[:, 1], E3[2], atol=1e-15)


def test_frame_from_2frame_examples():
    assert np.array_equal(frame_from_2frame(E3[0], E3[1]).rotation, np.eye(3))
    a = frame_from_2frame(E3[1], E3[2]).rotation
    np.testing.assert_allclose(a, np.column_stack([E3[1], E3[2], E3[0]]))
    assert np.linalg.det(a) == pytest.approx(1.0)
    a = frame_from_2frame(E3[0], E3[2]).rotation
    np.testing.assert_allclose(a, np.column_stack([E3[0], E3[2], -E3[1]]))


def test_frame_from_2frame_rejects_non_orthonormal():
    with pytest.raises(ValidationError):
        frame_from_2frame(E3[0], (E3[0] + E3[1]) / np.sqrt(2))
    with pytest.raises(ValidationError):
        frame_from_2frame(1.1 * E3[0], E3[1])


def test_frame_from_direction_2d_examples():
    assert np.array_equal(frame_from_direction_2d([1, 0]).rotation, np.eye(2))
    assert np.array_equal(frame_from_direction_2d([0, 1]).rotation, [[0, -1], [1, 0]])
    assert np.array_equal(frame_from_direction_2d([-1, 0]).rotation, [[-1, 0], [0, -1]])


def test_constructor_validation():
    with pytest.raises(ValidationError):
        GroupElement(Family.SO, np.diag([1.0, -1.0]), [0, 0])
    with pytest.raises(ValidationError):
        GroupElement(Family.O, np.eye(2), [1, 0])
    with pytest.raises(ValidationError):
        GroupElement(Family.E, 1.01 * np.eye(2), [0, 0])
    with pytest.raises(ValidationError):
        GroupElement(Family.E, np.eye(2), [0, 0, 0])


def test_one_dimensional_groups():
    g = GroupElement(Family.O, [[-1.0]], [0.0])
    assert act_point(g, [3.0]) == pytest.approx([-3.0])
    assert compose(g, g).rotation[0, 0] == 1.0


@pytest.mark.parametrize("family", list(Family))
@pytest.mark.parametrize("dim", [1, 2, 3])
def test_random_elements_valid(family, dim):
    rng = np.random.default_rng(dim)
    for _ in range(200):
        g = random_group_element(family, dim, rng, 2.0)
        assert is_valid(g, 1e-12)
        assert np.all(np.abs(g.translation) <= 2.0)


def test_random_SO_always_proper():
    rng = np.random.default_rng(1)
    dets = [np.linalg.det(random_group_element("SO", 3, rng).rotation) for _ in range(10_000)]
    assert min(dets) > 0


def test_random_O_det_fraction():
    # binomial(10^4, 1/2) has sd 0.005, so [0.45, 0.55] is a 10-sigma band
    rng = np.random.default_rng(2)
    dets = np.array([np.linalg.det(random_group_element("O", 3, rng).rotation) for _ in range(10_000)])
    assert 0.45 <= np.mean(dets < 0) <= 0.55


@pytest.mark.parametrize("family", list(Family))
def test_group_axioms_sampled(family):
    rng = np.random.default_rng(3)
    for _ in range(1000):
        g, h, k = (random_group_element(family, 3, rng) for _ in range(3))
        assert distance(compose(compose(g, h), k), compose(g, compose(h, k))) <= 1e-10
        assert distance(compose(inverse(g), g), GroupElement.identity(family, 3)) <= 1e-10
        assert distance(compose(g, inverse(g)), GroupElement.identity(family, 3)) <= 1e-10
        x = rng.uniform(-2, 2, 3)
        np.testing.assert_allclose(
            act_point(compose(g, h), x), act_point(g, act_point(h, x)), atol=1e-9
        )


@settings(max_examples=200, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), dim=st.sampled_from([1, 2, 3]))
def test_direction_action_preserves_norm(seed, dim):
    rng = np.random.default_rng(seed)
    g = random_group_element("SE", dim, rng)
    d = rng.standard_normal(dim)
    d /= np.linalg.norm(d)
    assert abs(np.linalg.norm(act_direction(g, d)) - 1.0) <= 1e-10


@settings(max_examples=200, deadline=None)
@given(st.lists(st.floats(-1, 1), min_size=3, max_size=3).filter(lambda v: np.linalg.norm(v) > 1e-3))
def test_frame_from_direction_is_rotation(v):
    alpha = np.array(v) / np.linalg.norm(v)
    a = frame_from_direction(alpha).rotation
    assert np.max(np.abs(a.T @ a - np.eye(3))) <= 1e-10
    assert abs(np.linalg.det(a) - 1.0) <= 1e-10
    np.testing.assert_allclose(a[:, 0], alpha, atol=1e-15)
