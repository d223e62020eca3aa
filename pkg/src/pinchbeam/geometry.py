"""Problem-instance construction: waveguide array layout, user placement,
RF-derived constants, and the fixed-location baseline array.

All powers are stored in linear watts internally; dBm appears only at the
CLI / config boundary.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

SPEED_OF_LIGHT_M_S = 2.998e8

DEFAULT_FREQ_GHZ = 28.0
DEFAULT_REFRACTIVE_INDEX = 1.44
DEFAULT_HEIGHT_A_M = 3.0
DEFAULT_NOISE_DBM = -90.0

# Flat key-value config schema (CLI contract).  Values are the parsers.
CONFIG_KEYS = {
    "m": int,
    "k": int,
    "side_d_m": float,
    "power_dbm": float,
    "noise_dbm": float,
    "freq_ghz": float,
    "refractive_index": float,
    "height_a_m": float,
    "seed": int,
}


class ConfigError(ValueError):
    """Invalid scene / experiment configuration."""


def dbm_to_watts(dbm: float) -> float:
    return 10.0 ** ((dbm - 30.0) / 10.0)


def watts_to_dbm(watts: float) -> float:
    if watts <= 0.0:
        raise ValueError("power must be positive to express in dBm")
    return float(10.0 * np.log10(watts) + 30.0)


@dataclass(frozen=True)
class RfConstants:
    """Carrier-derived constants.

    wavelength = c/f, wavenumber k0 = 2*pi/wavelength, and
    xi = wavelength/(4*pi), the free-space amplitude coefficient of an
    isotropic radiating element.  refractive_index is the effective index
    of the dielectric waveguide (in-guide phase velocity c/index).
    """

    carrier_frequency_hz: float
    refractive_index: float
    wavelength_m: float
    wavenumber_k0: float
    xi: float

    @classmethod
    def from_frequency(cls, carrier_frequency_hz: float,
                       refractive_index: float = DEFAULT_REFRACTIVE_INDEX) -> "RfConstants":
        if carrier_frequency_hz <= 0:
            raise ConfigError("carrier frequency must be positive")
        if refractive_index < 1.0:
            raise ConfigError("refractive index must be >= 1")
        wavelength = SPEED_OF_LIGHT_M_S / carrier_frequency_hz
        return cls(
            carrier_frequency_hz=carrier_frequency_hz,
            refractive_index=refractive_index,
            wavelength_m=wavelength,
            wavenumber_k0=2.0 * np.pi / wavelength,
            xi=wavelength / (4.0 * np.pi),
        )


@dataclass(frozen=True)
class WaveguideArray:
    """M parallel waveguides along the x-axis at height a, spaced d on y.

    Waveguide m (0-based) runs at y = y_positions_m[m]; its feed point is
    [0, y_m, a] and the movable element position ell_m lives in
    [0, lengths_m[m]].  For M >= 2 the y positions are exactly (m-1)*d in
    1-based indexing; the single-waveguide case is placed by the caller.
    """

    num_waveguides: int
    height_a_m: float
    spacing_d_m: float
    lengths_m: np.ndarray
    y_positions_m: np.ndarray

    def __post_init__(self):
        if self.num_waveguides < 1:
            raise ConfigError("need at least one waveguide")
        if self.height_a_m <= 0:
            raise ConfigError("waveguide height must be positive")
        lengths = np.asarray(self.lengths_m, dtype=float)
        ys = np.asarray(self.y_positions_m, dtype=float)
        if lengths.shape != (self.num_waveguides,) or ys.shape != (self.num_waveguides,):
            raise ConfigError("lengths/y positions must have one entry per waveguide")
        if not np.all(np.isfinite(lengths)) or np.any(lengths <= 0):
            raise ConfigError("waveguide lengths must be finite and positive")
        object.__setattr__(self, "lengths_m", lengths)
        object.__setattr__(self, "y_positions_m", ys)

    @property
    def feed_points(self) -> np.ndarray:
        """(M, 3) array of feed coordinates [0, y_m, a]."""
        pts = np.zeros((self.num_waveguides, 3))
        pts[:, 1] = self.y_positions_m
        pts[:, 2] = self.height_a_m
        return pts


@dataclass(frozen=True)
class UserLayout:
    """K single-antenna users in the xy-plane (z = 0)."""

    positions: np.ndarray

    def __post_init__(self):
        pos = np.asarray(self.positions, dtype=float)
        if pos.ndim != 2 or pos.shape[1] != 3 or pos.shape[0] < 1:
            raise ConfigError("user positions must be a (K, 3) array, K >= 1")
        if np.any(pos[:, 2] != 0.0):
            raise ConfigError("users must lie in the xy-plane (z = 0)")
        object.__setattr__(self, "positions", pos)

    @property
    def num_users(self) -> int:
        return self.positions.shape[0]


@dataclass(frozen=True)
class Scene:
    """Full static problem instance.

    Immutable after construction; safe to share across threads.  rate_weights
    holds the per-user priority lambda_k, shadowing_alpha the (K, M) positive
    link gains alpha_{m,k} (all ones in free space).
    """

    rf: RfConstants
    array: WaveguideArray
    users: UserLayout
    power_budget_w: float
    noise_variance_w: float
    rate_weights: np.ndarray
    shadowing_alpha: np.ndarray
    side_d_m: float
    seed: int | None = None

    def __post_init__(self):
        if self.power_budget_w <= 0:
            raise ConfigError("power budget must be positive")
        if self.noise_variance_w <= 0:
            raise ConfigError("noise variance must be positive")
        w = np.asarray(self.rate_weights, dtype=float)
        if w.shape != (self.num_users,) or np.any(w < 0) or not np.any(w > 0):
            raise ConfigError("rate weights must be nonnegative with at least one positive")
        alpha = np.asarray(self.shadowing_alpha, dtype=float)
        if alpha.shape != (self.num_users, self.num_waveguides) or np.any(alpha <= 0):
            raise ConfigError("shadowing must be a positive (K, M) matrix")
        object.__setattr__(self, "rate_weights", w)
        object.__setattr__(self, "shadowing_alpha", alpha)

    @property
    def num_waveguides(self) -> int:
        return self.array.num_waveguides

    @property
    def num_users(self) -> int:
        return self.users.num_users


def build_scene(m: int, k: int, side_d_m: float, power_dbm: float,
                seed: int | np.random.SeedSequence | None = 0,
                noise_dbm: float = DEFAULT_NOISE_DBM,
                freq_ghz: float = DEFAULT_FREQ_GHZ,
                refractive_index: float = DEFAULT_REFRACTIVE_INDEX,
                height_a_m: float = DEFAULT_HEIGHT_A_M) -> Scene:
    """Build a random scene matching the standard experimental setup.

    Users are drawn i.i.d. uniform on the square [0, D] x [0, D] (D is
    side_d_m), waveguides span the square with spacing d = D/(M-1) and
    length D, and rate weights are uniform 1/K.  Construction is
    deterministic given the parameters and seed.

    Args:
        m: number of waveguides (>= 1).
        k: number of users (>= 1).
        side_d_m: side length D of the square region, meters.
        power_dbm: total transmit power budget, dBm.
        seed: RNG seed (int or numpy SeedSequence) for user placement.
        noise_dbm, freq_ghz, refractive_index, height_a_m: optional
            overrides of the default RF setup.
    """
    if m < 1 or k < 1:
        raise ConfigError("m and k must be >= 1")
    if side_d_m <= 0:
        raise ConfigError("side length must be positive")

    rf = RfConstants.from_frequency(freq_ghz * 1e9, refractive_index)

    if m >= 2:
        spacing = side_d_m / (m - 1)
        ys = spacing * np.arange(m)
    else:
        # d = D/(M-1) is undefined for a single waveguide; center it.
        warnings.warn("single waveguide: spacing undefined, centering at y = D/2",
                      stacklevel=2)
        spacing = 0.0
        ys = np.array([side_d_m / 2.0])

    array = WaveguideArray(
        num_waveguides=m,
        height_a_m=height_a_m,
        spacing_d_m=spacing,
        lengths_m=np.full(m, float(side_d_m)),
        y_positions_m=ys,
    )

    if isinstance(seed, np.random.SeedSequence):
        seed_seq = seed
        stored_seed = None
    elif seed is None:
        seed_seq = np.random.SeedSequence()
        stored_seed = None
    else:
        stored_seed = int(seed)
        seed_seq = np.random.SeedSequence(stored_seed)
    rng = np.random.Generator(np.random.PCG64(seed_seq))
    xy = rng.uniform(0.0, side_d_m, size=(k, 2))
    positions = np.column_stack([xy, np.zeros(k)])

    return Scene(
        rf=rf,
        array=array,
        users=UserLayout(positions=positions),
        power_budget_w=dbm_to_watts(power_dbm),
        noise_variance_w=dbm_to_watts(noise_dbm),
        rate_weights=np.full(k, 1.0 / k),
        shadowing_alpha=np.ones((k, m)),
        side_d_m=float(side_d_m),
        seed=stored_seed,
    )


def fixed_array_positions(scene: Scene) -> np.ndarray:
    """Half-wavelength-spaced fixed antenna coordinates [D/2, (m-1)*lam/2, a].

    This is the conventional fixed-location baseline array; coordinates are
    used exactly as printed (first antenna at y = 0).
    """
    m = scene.num_waveguides
    pts = np.zeros((m, 3))
    pts[:, 0] = scene.side_d_m / 2.0
    pts[:, 1] = np.arange(m) * scene.rf.wavelength_m / 2.0
    pts[:, 2] = scene.array.height_a_m
    return pts


def scene_to_config(scene: Scene, power_dbm: float | None = None) -> dict:
    """Flatten a scene to the key-value config schema.

    Powers are converted back to dBm.  The random user layout itself is not
    serialized; the seed is, so `scene_from_config` round-trips scenes built
    by `build_scene` with an integer seed.
    """
    return {
        "m": scene.num_waveguides,
        "k": scene.num_users,
        "side_d_m": scene.side_d_m,
        "power_dbm": watts_to_dbm(scene.power_budget_w) if power_dbm is None else power_dbm,
        "noise_dbm": watts_to_dbm(scene.noise_variance_w),
        "freq_ghz": scene.rf.carrier_frequency_hz / 1e9,
        "refractive_index": scene.rf.refractive_index,
        "height_a_m": scene.array.height_a_m,
        "seed": scene.seed if scene.seed is not None else 0,
    }


def scene_from_config(config: dict) -> Scene:
    """Build a scene from a flat key-value config dict (schema CONFIG_KEYS)."""
    unknown = set(config) - set(CONFIG_KEYS)
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    for required in ("m", "k", "side_d_m", "power_dbm"):
        if required not in config:
            raise ConfigError(f"missing config key: {required}")
    cfg = {key: CONFIG_KEYS[key](value) for key, value in config.items()}
    return build_scene(
        m=cfg["m"],
        k=cfg["k"],
        side_d_m=cfg["side_d_m"],
        power_dbm=cfg["power_dbm"],
        seed=cfg.get("seed", 0),
        noise_dbm=cfg.get("noise_dbm", DEFAULT_NOISE_DBM),
        freq_ghz=cfg.get("freq_ghz", DEFAULT_FREQ_GHZ),
        refractive_index=cfg.get("refractive_index", DEFAULT_REFRACTIVE_INDEX),
        height_a_m=cfg.get("height_a_m", DEFAULT_HEIGHT_A_M),
    )


def write_config_file(config: dict, path) -> None:
    """Write a config dict as `key = value` lines (schema-checked)."""
    unknown = set(config) - set(CONFIG_KEYS)
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for key, value in config.items():
            fh.write(f"{key} = {value}\n")


def parse_config_file(path) -> dict:
    """Parse a `key = value` config file ('#' comments, unknown keys rejected)."""
    config = {}
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigError(f"{path}:{lineno}: expected 'key = value', got {raw!r}")
            key, _, value = line.partition("=")
            key = key.strip()
            value = value.strip()
            if key not in CONFIG_KEYS:
                raise ConfigError(f"{path}:{lineno}: unknown config key {key!r}")
            try:
                config[key] = CONFIG_KEYS[key](value)
            except ValueError as exc:
                raise ConfigError(f"{path}:{lineno}: bad value for {key!r}: {value!r}") from exc
    return config
