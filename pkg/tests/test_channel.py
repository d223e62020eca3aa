import cmath

import numpy as np
import pytest
from conftest import scene_with_users

import pinchbeam as pb
from pinchbeam.channel import channel_column, validate_pinch_locations

# mpmath oracles (40 digits): 2*pi*1.44/lambda at 28 GHz, and sqrt(34)
PHASE_1M_28GHZ = 845.02345425443938209
SQRT_34 = 5.8309518948453004709
XI_28GHZ = 8.5204735605268252971e-4


def test_distance_element_above_user():
    scene = scene_with_users([[5.0, 10.0, 0.0]], m=4)
    # waveguide index 1 has y = 10 for d = 10
    assert scene.array.y_positions_m[1] == pytest.approx(10.0)
    assert pb.element_user_distance(scene, 1, 0, 5.0) == pytest.approx(3.0, abs=1e-14)


def test_distance_345_triangle():
    scene = scene_with_users([[0.0, 4.0, 0.0]])
    assert pb.element_user_distance(scene, 0, 0, 0.0) == pytest.approx(5.0, abs=1e-14)


def test_distance_oracle_value():
    scene = scene_with_users([[3.0, 4.0, 0.0]])
    assert pb.element_user_distance(scene, 0, 0, 0.0) == pytest.approx(SQRT_34, rel=1e-15)


def test_distance_never_below_height():
    scene = pb.build_scene(4, 8, 30.0, 20.0, seed=5)
    rng = np.random.default_rng(1)
    for _ in range(200):
        m = rng.integers(0, 4)
        k = rng.integers(0, 8)
        ell = rng.uniform(0.0, 30.0)
        assert pb.element_user_distance(scene, m, k, ell) >= 3.0


def test_distance_rejects_out_of_range():
    scene = pb.build_scene(2, 2, 30.0, 20.0, seed=0)
    with pytest.raises(ValueError):
        pb.element_user_distance(scene, 0, 0, -0.5)
    with pytest.raises(ValueError):
        pb.element_user_distance(scene, 0, 0, 30.5)


def test_pinch_phase_values():
    scene = pb.build_scene(2, 2, 30.0, 20.0, seed=0)
    assert pb.pinch_phase(scene, 0.0) == 0.0
    one_guided_wavelength = scene.rf.wavelength_m / scene.rf.refractive_index
    assert pb.pinch_phase(scene, one_guided_wavelength) == pytest.approx(
        2 * np.pi, rel=1e-12)
    assert pb.pinch_phase(scene, 1.0) == pytest.approx(PHASE_1M_28GHZ, rel=1e-13)


def test_effective_channel_entry_below_feed():
    # user directly below the feed point: distance a, no in-guide phase
    scene = scene_with_users([[0.0, 0.0, 0.0]])
    a = scene.array.height_a_m
    expected = scene.rf.xi * cmath.exp(-1j * scene.rf.wavenumber_k0 * a) / a
    got = pb.effective_channel_entry(scene, 0, 0, 0.0)
    assert got == pytest.approx(expected, rel=1e-9)


def test_effective_channel_magnitude_law():
    scene = pb.build_scene(4, 6, 30.0, 20.0, seed=2)
    rng = np.random.default_rng(3)
    for _ in range(500):
        m = int(rng.integers(0, 4))
        k = int(rng.integers(0, 6))
        ell = float(rng.uniform(0.0, 30.0))
        entry = pb.effective_channel_entry(scene, m, k, ell)
        dist = pb.element_user_distance(scene, m, k, ell)
        assert abs(entry) * dist == pytest.approx(
            scene.rf.xi * scene.shadowing_alpha[k, m], rel=1e-12)


def test_effective_channel_entry_magnitude_example():
    scene = scene_with_users([[5.0, 0.0, 0.0]], m=4)
    got = pb.effective_channel_entry(scene, 0, 0, 5.0)
    assert abs(got) == pytest.approx(XI_28GHZ / 3.0, rel=1e-13)


def test_phase_additivity():
    scene = pb.build_scene(4, 4, 90.0, 20.0, seed=7)
    rng = np.random.default_rng(11)
    k0 = scene.rf.wavenumber_k0
    iref = scene.rf.refractive_index
    for _ in range(300):
        m = int(rng.integers(0, 4))
        k = int(rng.integers(0, 4))
        ell = float(rng.uniform(0.0, 90.0))
        entry = pb.effective_channel_entry(scene, m, k, ell)
        dist = pb.element_user_distance(scene, m, k, ell)
        expected = -k0 * (dist + iref * ell)
        diff = np.angle(entry) - expected
        wrapped = (diff + np.pi) % (2 * np.pi) - np.pi
        assert abs(wrapped) < 1e-9


def test_build_channel_matrix_scalar_consistency():
    scene = pb.build_scene(3, 4, 30.0, 20.0, seed=4)
    pinch = np.array([1.0, 12.5, 29.0])
    mat = pb.build_channel_matrix(scene, pinch)
    assert mat.shape == (4, 3)
    for k in range(4):
        for m in range(3):
            assert mat[k, m] == pytest.approx(
                pb.effective_channel_entry(scene, m, k, pinch[m]), rel=1e-13)


def test_build_channel_matrix_1x1():
    with pytest.warns(UserWarning):
        scene = pb.build_scene(1, 1, 10.0, 0.0, seed=0)
    mat = pb.build_channel_matrix(scene, np.array([2.0]))
    assert mat.shape == (1, 1)
    assert mat[0, 0] == pytest.approx(
        pb.effective_channel_entry(scene, 0, 0, 2.0), rel=1e-13)


def test_channel_bounds_validation():
    scene = pb.build_scene(2, 2, 30.0, 20.0, seed=0)
    with pytest.raises(ValueError):
        pb.build_channel_matrix(scene, np.array([0.0, 31.0]))
    with pytest.raises(ValueError):
        validate_pinch_locations(scene, np.array([-0.1, 5.0]))
    with pytest.raises(ValueError):
        validate_pinch_locations(scene, np.array([1.0]))


def test_decomposition_exact():
    # L_k(l) g_k^0 must reproduce row k of G through the same floating path
    for seed in range(5):
        scene = pb.build_scene(4, 3, 30.0, 20.0, seed=seed)
        rng = np.random.default_rng(seed)
        pinch = rng.uniform(0.0, 30.0, size=4)
        mat = pb.build_channel_matrix(scene, pinch)
        for k in range(3):
            dec = pb.decompose_channel(scene, pinch, k)
            entrywise = np.diagonal(dec.location_diag_Lk) * dec.env_vector_g0
            assert np.array_equal(entrywise, mat[k])
            np.testing.assert_allclose(dec.location_diag_Lk @ dec.env_vector_g0,
                                       mat[k], rtol=1e-15)


def test_decomposition_env_vector_unit_shadowing():
    scene = pb.build_scene(3, 2, 30.0, 20.0, seed=1)
    dec = pb.decompose_channel(scene, np.array([0.0, 1.0, 2.0]), 0)
    np.testing.assert_allclose(dec.env_vector_g0, scene.rf.xi * np.ones(3), rtol=0)


def test_channel_column_matches_matrix():
    scene = pb.build_scene(3, 5, 30.0, 20.0, seed=8)
    pinch = np.array([3.0, 17.0, 25.0])
    mat = pb.build_channel_matrix(scene, pinch)
    for m in range(3):
        col = channel_column(scene, m, np.array([pinch[m]]))[:, 0]
        np.testing.assert_allclose(col, mat[:, m], rtol=1e-13)


def test_magnitude_maximized_above_user():
    # |g| peaks where the element-user distance is smallest, i.e. ell = x_k
    scene = scene_with_users([[12.3, 0.0, 0.0]])
    grid = np.linspace(0.0, 30.0, 2001)
    mags = np.abs(channel_column(scene, 0, grid)[0])
    best = grid[np.argmax(mags)]
    assert abs(best - 12.3) <= 30.0 / 2000 + 1e-12


def test_fixed_channel_single_antenna_above_user():
    # user right below the single fixed antenna at [D/2, 0, a]
    scene = scene_with_users([[15.0, 0.0, 0.0]], m=1)
    mat = pb.fixed_channel_matrix(scene)
    a = scene.array.height_a_m
    expected = scene.rf.xi * cmath.exp(-1j * ((scene.rf.wavenumber_k0 * a) % (2 * np.pi))) / a
    assert mat[0, 0] == pytest.approx(expected, rel=1e-12)


def test_fixed_channel_magnitudes():
    scene = pb.build_scene(4, 4, 30.0, 20.0, seed=3)
    mat = pb.fixed_channel_matrix(scene)
    antennas = pb.fixed_array_positions(scene)
    for k in range(4):
        for m in range(4):
            dist = np.linalg.norm(antennas[m] - scene.users.positions[k])
            assert abs(mat[k, m]) == pytest.approx(scene.rf.xi / dist, rel=1e-12)


def test_fixed_channel_mirrored_users_equal_magnitude():
    # mirroring about x = D/2 leaves distances to the fixed array unchanged
    scene = scene_with_users([[15.0 - 4.0, 7.0, 0.0], [15.0 + 4.0, 7.0, 0.0]], m=3)
    mat = pb.fixed_channel_matrix(scene)
    np.testing.assert_allclose(np.abs(mat[0]), np.abs(mat[1]), rtol=1e-12)
