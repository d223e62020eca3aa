import numpy as np
import pytest

import pinchbeam as pb
from pinchbeam.geometry import (
    SPEED_OF_LIGHT_M_S,
    ConfigError,
    RfConstants,
    parse_config_file,
    write_config_file,
)

# Frozen from a 40-digit mpmath evaluation of lambda = c/f, xi = lambda/(4 pi),
# k0 = 2 pi / lambda at c = 2.998e8 m/s, f = 28 GHz.
LAMBDA_28GHZ = 1.0707142857142857143e-2
XI_28GHZ = 8.5204735605268252971e-4
K0_28GHZ = 586.82184323224957089


def test_rf_constants_28ghz():
    rf = RfConstants.from_frequency(28e9)
    assert rf.wavelength_m == pytest.approx(LAMBDA_28GHZ, rel=1e-14)
    assert rf.xi == pytest.approx(XI_28GHZ, rel=1e-14)
    assert rf.wavenumber_k0 == pytest.approx(K0_28GHZ, rel=1e-14)
    assert rf.refractive_index == 1.44


def test_rf_constant_invariants():
    for f in (1e9, 28e9, 300e9):
        rf = RfConstants.from_frequency(f)
        assert rf.wavelength_m * rf.carrier_frequency_hz == pytest.approx(
            SPEED_OF_LIGHT_M_S, rel=1e-9)
        assert rf.wavenumber_k0 * rf.wavelength_m == pytest.approx(2 * np.pi, rel=1e-12)
        assert rf.xi == pytest.approx(rf.wavelength_m / (4 * np.pi), rel=1e-12)


def test_build_scene_paper_defaults():
    scene = pb.build_scene(4, 4, 30.0, 20.0, seed=0)
    assert scene.array.spacing_d_m == pytest.approx(10.0)
    assert scene.array.height_a_m == 3.0
    assert scene.noise_variance_w == pytest.approx(1e-12, rel=1e-12)
    assert scene.power_budget_w == pytest.approx(0.1, rel=1e-12)
    assert np.allclose(scene.array.lengths_m, 30.0)
    assert np.allclose(scene.rate_weights, 0.25)
    assert np.all(scene.shadowing_alpha == 1.0)
    np.testing.assert_allclose(scene.array.y_positions_m, [0.0, 10.0, 20.0, 30.0])


def test_build_scene_small_case():
    scene = pb.build_scene(2, 1, 1.0, 0.0, seed=1)
    assert scene.array.spacing_d_m == pytest.approx(1.0)
    assert scene.power_budget_w == pytest.approx(0.001, rel=1e-12)


def test_feed_points_match_spacing():
    scene = pb.build_scene(5, 3, 20.0, 10.0, seed=3)
    pts = scene.array.feed_points
    for m in range(5):
        np.testing.assert_array_equal(
            pts[m], [0.0, m * scene.array.spacing_d_m, scene.array.height_a_m])


def test_single_waveguide_centered_and_warns():
    with pytest.warns(UserWarning, match="single waveguide"):
        scene = pb.build_scene(1, 2, 12.0, 10.0, seed=0)
    assert scene.array.y_positions_m[0] == pytest.approx(6.0)


def test_users_inside_square():
    # >= 1e4 draws across seeds
    for seed in range(4):
        scene = pb.build_scene(4, 3000, 30.0, 20.0, seed=seed)
        pos = scene.users.positions
        assert np.all(pos[:, :2] >= 0.0) and np.all(pos[:, :2] <= 30.0)
        assert np.all(pos[:, 2] == 0.0)


def test_scene_deterministic_given_seed():
    a = pb.build_scene(4, 6, 30.0, 20.0, seed=42)
    b = pb.build_scene(4, 6, 30.0, 20.0, seed=42)
    np.testing.assert_array_equal(a.users.positions, b.users.positions)
    c = pb.build_scene(4, 6, 30.0, 20.0, seed=43)
    assert not np.array_equal(a.users.positions, c.users.positions)


def test_dbm_roundtrip():
    rng = np.random.default_rng(0)
    watts = 10.0 ** rng.uniform(-15, 3, size=200)
    for w in watts:
        back = pb.dbm_to_watts(pb.watts_to_dbm(w))
        assert back == pytest.approx(w, rel=1e-12)
    assert pb.dbm_to_watts(20.0) == pytest.approx(0.1, rel=1e-15)
    assert pb.dbm_to_watts(-90.0) == pytest.approx(1e-12, rel=1e-15)


def test_invalid_parameters_rejected():
    with pytest.raises(ConfigError):
        pb.build_scene(0, 4, 30.0, 20.0, seed=0)
    with pytest.raises(ConfigError):
        pb.build_scene(4, 0, 30.0, 20.0, seed=0)
    with pytest.raises(ConfigError):
        pb.build_scene(4, 4, -1.0, 20.0, seed=0)
    with pytest.raises(ConfigError):
        pb.build_scene(4, 4, 30.0, 20.0, seed=0, freq_ghz=-1.0)


def test_fixed_array_positions_m2():
    scene = pb.build_scene(2, 2, 30.0, 20.0, seed=0)
    pts = pb.fixed_array_positions(scene)
    np.testing.assert_allclose(pts[0], [15.0, 0.0, 3.0], atol=0)
    assert pts[1][1] == pytest.approx(LAMBDA_28GHZ / 2, rel=1e-14)


def test_fixed_array_positions_m1():
    with pytest.warns(UserWarning):
        scene = pb.build_scene(1, 1, 30.0, 20.0, seed=0)
    np.testing.assert_allclose(pb.fixed_array_positions(scene), [[15.0, 0.0, 3.0]])


def test_fixed_array_half_wavelength_pattern():
    scene = pb.build_scene(4, 4, 30.0, 20.0, seed=0)
    ys = pb.fixed_array_positions(scene)[:, 1]
    np.testing.assert_allclose(ys, np.arange(4) * LAMBDA_28GHZ / 2, rtol=1e-14)


def test_config_roundtrip():
    scene = pb.build_scene(3, 5, 45.0, 15.0, seed=9, noise_dbm=-85.0)
    cfg = pb.scene_to_config(scene)
    assert cfg["m"] == 3 and cfg["k"] == 5 and cfg["seed"] == 9
    assert cfg["noise_dbm"] == pytest.approx(-85.0, rel=1e-12)
    rebuilt = pb.scene_from_config(cfg)
    np.testing.assert_array_equal(rebuilt.users.positions, scene.users.positions)
    assert rebuilt.power_budget_w == pytest.approx(scene.power_budget_w, rel=1e-12)


def test_config_unknown_key_rejected():
    with pytest.raises(ConfigError, match="unknown"):
        pb.scene_from_config({"m": 2, "k": 2, "side_d_m": 10.0, "power_dbm": 0.0,
                              "bogus": 1})


def test_write_config_file_round_trip(tmp_path):
    scene = pb.build_scene(4, 4, 30.0, 20.0, seed=5)
    cfg = pb.scene_to_config(scene)
    path = tmp_path / "scene.cfg"
    write_config_file(cfg, path)
    parsed = parse_config_file(path)
    rebuilt = pb.scene_from_config(parsed)
    np.testing.assert_array_equal(rebuilt.users.positions, scene.users.positions)


def test_scene_is_immutable():
    scene = pb.build_scene(2, 2, 30.0, 20.0, seed=0)
    with pytest.raises(AttributeError):
        scene.power_budget_w = 1.0
    with pytest.raises(AttributeError):
        scene.rf.xi = 0.0


def test_parse_config_file(tmp_path):
    path = tmp_path / "scene.cfg"
    path.write_text("# comment\nm = 4\nk = 2\nside_d_m = 30  # inline\npower_dbm = 20\n")
    cfg = parse_config_file(path)
    assert cfg == {"m": 4, "k": 2, "side_d_m": 30.0, "power_dbm": 20.0}
    bad = tmp_path / "bad.cfg"
    bad.write_text("nonsense = 1\n")
    with pytest.raises(ConfigError, match="unknown config key"):
        parse_config_file(bad)
