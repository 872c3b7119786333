import numpy as np
import pytest

from stereocalib.aggregate import aggregate, canonicalize_signs, spherical_mean
from stereocalib.errors import DegenerateSum
from stereocalib.metrics import ReferenceExtrinsics, rotation_error_theta
from stereocalib.rectification import Extrinsics
from stereocalib.so3 import exp_so3, log_so3

from conftest import MOUNTED_RIG
from helpers import fibonacci_sphere_1deg, make_estimate, noisy_estimates, random_unit


def test_spherical_mean_singleton():
    np.testing.assert_array_equal(spherical_mean([[1.0, 0, 0]]), [1, 0, 0])


def test_spherical_mean_symmetric_pair():
    np.testing.assert_allclose(spherical_mean([[1.0, 0, 0], [0, 1.0, 0]]),
                               [2 ** -0.5, 2 ** -0.5, 0], atol=1e-15)


def test_spherical_mean_cancelling():
    with pytest.raises(DegenerateSum):
        spherical_mean([[1.0, 0, 0], [-1.0, 0, 0]])


def test_spherical_mean_beats_random_candidates(rng):
    v = random_unit(rng, 500)
    best = v.sum(0) @ spherical_mean(v)
    assert np.all(v.sum(0) @ random_unit(rng, 10_000).T <= best)


def test_spherical_mean_beats_sphere_grid(rng):
    grid = fibonacci_sphere_1deg()
    for _ in range(5):
        center = random_unit(rng, 1)[0]
        v = random_unit(rng, 200) * 0.3 + center
        v /= np.linalg.norm(v, axis=1, keepdims=True)
        assert np.max(grid @ v.sum(0)) <= v.sum(0) @ spherical_mean(v) + 1e-12


def test_canonicalize_aligned_is_identity(rng):
    ests = noisy_estimates(rng, MOUNTED_RIG, 10, 0.01, 0.001, 0.01)
    out = canonicalize_signs(ests)
    assert all(a is b for a, b in zip(ests, out))


def test_canonicalize_restores_negated_translation(rng):
    ests = noisy_estimates(rng, MOUNTED_RIG, 5, 0.01, 0.001, 0.01)
    flipped = list(ests)
    flipped[2] = make_estimate(ests[2].rotation, -ests[2].translation)
    out = canonicalize_signs(flipped)
    np.testing.assert_array_equal(out[2].translation, ests[2].translation)


def test_canonicalize_majority_not_first(rng):
    ests = noisy_estimates(rng, MOUNTED_RIG, 5, 0.01, 0.001, 0.01)
    flipped = [make_estimate(ests[0].rotation, -ests[0].translation)] + ests[1:]
    out = canonicalize_signs(flipped)
    assert all(e.translation @ MOUNTED_RIG.translation > 0 for e in out)


def test_canonicalized_mean_matches_consistent_batch(rng):
    for _ in range(20):
        ests = noisy_estimates(rng, MOUNTED_RIG, 21, 0.01, 0.001, 0.05)
        expected = spherical_mean([e.translation for e in ests])
        flips = rng.permutation(21)[:rng.integers(0, 10)]
        mixed = [make_estimate(e.rotation, -e.translation) if i in flips else e
                 for i, e in enumerate(ests)]
        got = spherical_mean([e.translation for e in canonicalize_signs(mixed)])
        np.testing.assert_allclose(got, expected, atol=1e-12)


def test_canonicalize_flips_axis_only_at_pi():
    axis = np.array([0.6, 0.0, 0.8])
    at_pi = make_estimate(exp_so3(np.pi * axis), [-1.0, 0, 0])
    ref = make_estimate(exp_so3(3.0 * axis), [-1.0, 0, 0])
    at_pi_flipped = at_pi.__class__(**{**at_pi.__dict__, "axis": -at_pi.axis,
                                       "theta": -at_pi.theta})
    out = canonicalize_signs([ref, ref, at_pi_flipped])
    np.testing.assert_allclose(out[2].axis, axis, atol=1e-9)
    np.testing.assert_allclose(exp_so3(out[2].theta), at_pi.rotation, atol=1e-9)


def test_aggregate_single():
    est = make_estimate(MOUNTED_RIG.rotation, MOUNTED_RIG.translation)
    g = aggregate([est])
    np.testing.assert_allclose(g.rotation, est.rotation, atol=1e-12)
    np.testing.assert_allclose(g.translation, est.translation, atol=1e-12)
    np.testing.assert_allclose(g.theta, est.theta, atol=1e-12)
    assert g.contributing_pairs == 1


def test_aggregate_identical():
    est = make_estimate(MOUNTED_RIG.rotation, MOUNTED_RIG.translation)
    g = aggregate([est] * 7)
    np.testing.assert_allclose(g.rotation, est.rotation, atol=1e-12)
    assert g.angle == est.angle


def test_aggregate_internally_consistent(rng):
    g = aggregate(noisy_estimates(rng, MOUNTED_RIG, 30, 0.05, 0.005, 0.02))
    np.testing.assert_allclose(exp_so3(g.theta), g.rotation, atol=1e-10)
    np.testing.assert_allclose(log_so3(g.rotation), g.theta, atol=1e-10)
    np.testing.assert_allclose(g.angle * g.axis, g.theta, atol=1e-15)
    assert abs(np.linalg.norm(g.translation) - 1) < 1e-15


def test_aggregate_order_invariant(rng):
    ests = noisy_estimates(rng, MOUNTED_RIG, 31, 0.05, 0.005, 0.02)
    ests[3] = make_estimate(ests[3].rotation, -ests[3].translation)
    a = aggregate(ests)
    b = aggregate([ests[i] for i in rng.permutation(31)])
    np.testing.assert_allclose(a.rotation, b.rotation, atol=1e-12)
    np.testing.assert_allclose(a.translation, b.translation, atol=1e-12)


def test_aggregate_all_degenerate_axes():
    ests = [make_estimate(np.eye(3), [-1.0, 0, 0])] * 3
    g = aggregate(ests)
    assert not g.axes_valid
    np.testing.assert_array_equal(g.rotation, np.eye(3))


def test_degenerate_axes_count_toward_angle_only():
    good = make_estimate(exp_so3([0, 0, 0.3]), [-1.0, 0, 0])
    zero = make_estimate(np.eye(3), [-1.0, 0, 0])
    g = aggregate([good, zero, zero])
    np.testing.assert_allclose(g.axis, [0, 0, 1])
    assert g.angle == 0.0


def test_aggregation_beats_median_single_pair():
    # axis noise 2 deg, angle noise 0.5 deg, M = 101
    ref = ReferenceExtrinsics.from_extrinsics(MOUNTED_RIG)
    wins = 0
    for seed in range(100):
        rng = np.random.default_rng(seed)
        ests = noisy_estimates(rng, MOUNTED_RIG, 101, np.deg2rad(2) / np.sqrt(2),
                               np.deg2rad(0.5))
        single = np.median([rotation_error_theta(ref, e) for e in ests])
        wins += rotation_error_theta(ref, aggregate(ests)) < single
    assert wins >= 95
