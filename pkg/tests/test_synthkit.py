import numpy as np
import pytest

from eigenorient import decompose_panel, generate_oriented_eigenvectors, orient_eigenvectors
from eigenorient.synthkit import (
    EllipsoidSpec,
    ellipsoid_cloud,
    flip_columns,
    inject_flips,
    random_angle_matrix,
    random_flip_mask,
    random_orthonormal,
    wobble_ensemble,
)


def test_random_orthonormal_is_orthonormal_and_seeded():
    Q = random_orthonormal(6, seed=3)
    np.testing.assert_allclose(Q.T @ Q, np.eye(6), atol=1e-13)
    np.testing.assert_array_equal(Q, random_orthonormal(6, seed=3))


def test_flip_columns_mask_forms():
    V = np.arange(6.0).reshape(2, 3)
    np.testing.assert_array_equal(flip_columns(V, [True, False, True]), V * [-1, 1, -1])
    np.testing.assert_array_equal(flip_columns(V, [1, -1, 1]), V * [1, -1, 1])
    assert random_flip_mask(5, seed=0).dtype == bool


def test_random_angle_matrix_domain():
    t = random_angle_matrix(5, seed=1)
    assert np.all(np.tril(t) == 0)
    assert np.all(np.abs(t) < np.pi / 2)


def test_ellipsoid_spec_validation():
    theta = np.zeros((3, 3))
    with pytest.raises(ValueError):
        EllipsoidSpec(np.array([1.0, 2.0, 3.0]), theta, 50)
    with pytest.raises(ValueError):
        EllipsoidSpec(np.array([3.0, 2.0]), theta, 50)
    with pytest.raises(ValueError):
        EllipsoidSpec(np.array([3.0, 2.0, 1.0]), theta, 3)


def test_ellipsoid_covariance_matches_construction():
    theta = random_angle_matrix(3, seed=2, scale=1.0)
    spec = EllipsoidSpec(np.array([3.0, 2.0, 1.0]), theta, 200000, noise_sigma=0.1, seed=4)
    P = ellipsoid_cloud(spec)
    assert P.centered
    np.testing.assert_allclose(P.data.mean(axis=0), 0.0, atol=1e-12)
    R = generate_oriented_eigenvectors(theta)
    oracle = R @ np.diag([9.01, 4.01, 1.01]) @ R.T
    np.testing.assert_allclose(np.cov(P.data, rowvar=False), oracle, atol=0.06)


def test_inject_flips_preserves_panel():
    spec = EllipsoidSpec(np.array([3.0, 2.0, 1.0]), np.zeros((3, 3)), 50, seed=5)
    d = decompose_panel(ellipsoid_cloud(spec))
    f = inject_flips(d, [False, True, True])
    np.testing.assert_allclose(f.U * f.sqrt_lambdas @ f.system.V.T, d.U * d.sqrt_lambdas @ d.system.V.T,
                               atol=1e-14)
    np.testing.assert_array_equal(f.system.V[:, 1], -d.system.V[:, 1])


def test_wobble_members_are_oriented():
    theta = np.zeros((4, 4))
    theta[0, 1:] = np.radians([20.0, -10.0, 5.0])
    ens = wobble_ensemble(theta, 30.0, 50, seed=6)
    assert len(ens) == 50
    for m in ens.members:
        again = orient_eigenvectors(m.Vor, m.Eor)
        np.testing.assert_array_equal(again.signs, np.ones(4))
        np.testing.assert_allclose(again.theta, m.theta, atol=1e-10)


def test_wobble_infinite_kappa_gives_identical_members():
    theta = random_angle_matrix(3, seed=7, scale=1.0)
    ens = wobble_ensemble(theta, np.inf, 4)
    for m in ens.members:
        np.testing.assert_array_equal(m.theta, theta)


def test_random_orthonormal_small_and_many():
    assert abs(random_orthonormal(1, seed=0)[0, 0]) == 1.0
    rng = np.random.default_rng(8)
    worst = max(np.abs(Q.T @ Q - np.eye(Q.shape[0])).max()
                for Q in (random_orthonormal(int(rng.integers(1, 10)), rng) for _ in range(1000)))
    assert worst < 1e-12


def test_flip_then_orient_equals_orient():
    V = random_orthonormal(5, seed=9)
    lam = np.arange(5, 0, -1)
    a = orient_eigenvectors(V, lam)
    b = orient_eigenvectors(flip_columns(V, random_flip_mask(5, seed=10)), lam)
    np.testing.assert_array_equal(a.Vor, b.Vor)


@pytest.mark.parametrize("m", [400, 4000])
def test_unrotated_cloud_axes_within_sampling_error(m):
    for seed in range(5):
        spec = EllipsoidSpec(np.array([3.0, 2.0, 1.0]), np.zeros((3, 3)), m, seed=seed)
        oe = orient_eigenvectors(*decompose_panel(ellipsoid_cloud(spec)).system)
        ang = np.arccos(np.clip(np.diag(oe.Vor), -1, 1))
        assert np.all(ang < 3 / np.sqrt(m))


def test_wobble_mean_recovers_theta_bar():
    from eigenorient import mean_eigenbasis

    theta = np.zeros((3, 3))
    theta[0, 1], theta[0, 2], theta[1, 2] = np.radians([30.0, -20.0, 25.0])
    rep = mean_eigenbasis(wobble_ensemble(theta, 100.0, 2000, seed=11))
    assert np.abs(rep.theta_bar - theta).max() < 0.05


def test_generators_are_deterministic():
    theta = random_angle_matrix(3, seed=12)
    spec = EllipsoidSpec(np.array([3.0, 2.0, 1.0]), theta, 20, noise_sigma=0.1, seed=13)
    np.testing.assert_array_equal(ellipsoid_cloud(spec).data, ellipsoid_cloud(spec).data)
    np.testing.assert_array_equal(wobble_ensemble(theta, 10.0, 5, seed=14).thetas,
                                  wobble_ensemble(theta, 10.0, 5, seed=14).thetas)
