"""LoS channel of the pinched-waveguide array.

The effective channel from waveguide m to user k is

    g_{m,k}(ell) = xi * alpha_{m,k} * exp(-j*k0*(D_{m,k}(ell) + i_ref*ell)) / D_{m,k}(ell)

where D_{m,k}(ell) is the element-to-user distance and i_ref*ell accounts for
the in-guide phase accumulated from the feed point.  Matrices follow the
y = G z convention: row k of the (K, M) matrix G is g_k^T, with no
conjugation applied when forming rows.

Phases of order 1e5 rad are reduced mod 2*pi before exponentiation to limit
precision loss at large regions (k0*D can exceed 1e4 for D = 90 m).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .geometry import Scene, fixed_array_positions

TWO_PI = 2.0 * np.pi


@dataclass(frozen=True)
class ChannelDecomposition:
    """Per-user split g_k(l) = L_k(l) @ g_k0.

    env_vector_g0 is the location-independent part xi*[alpha_{1,k}..alpha_{M,k}]
    (real-valued, stored complex); location_diag_Lk is the diagonal matrix of
    per-waveguide phase/attenuation factors.
    """

    env_vector_g0: np.ndarray
    location_diag_Lk: np.ndarray


def validate_pinch_locations(scene: Scene, pinch: np.ndarray) -> np.ndarray:
    """Check 0 <= ell_m <= L_m for all m; returns the locations as an array."""
    ell = np.asarray(pinch, dtype=float)
    if ell.shape != (scene.num_waveguides,):
        raise ValueError(f"expected {scene.num_waveguides} pinch locations, got shape {ell.shape}")
    if np.any(ell < 0.0) or np.any(ell > scene.array.lengths_m):
        raise ValueError("pinch locations must satisfy 0 <= ell_m <= L_m")
    return ell


def element_user_distance(scene: Scene, m: int, k: int, ell: float) -> float:
    """Distance from the element at ell on waveguide m to user k (always >= a)."""
    if not 0.0 <= ell <= scene.array.lengths_m[m]:
        raise ValueError(f"ell={ell} outside [0, {scene.array.lengths_m[m]}]")
    ux, uy, _ = scene.users.positions[k]
    dy = scene.array.y_positions_m[m] - uy
    return float(np.sqrt((ell - ux) ** 2 + dy ** 2 + scene.array.height_a_m ** 2))


def pinch_phase(scene: Scene, ell: float) -> float:
    """In-guide phase 2*pi*i_ref*ell/lambda accumulated from feed to element."""
    if ell < 0:
        raise ValueError("ell must be nonnegative")
    return TWO_PI * scene.rf.refractive_index * abs(ell) / scene.rf.wavelength_m


def _location_factors(scene: Scene, pinch: np.ndarray) -> np.ndarray:
    """(K, M) matrix of exp(-j*k0*(D + i_ref*ell))/D factors."""
    ell = np.asarray(pinch, dtype=float)
    ux = scene.users.positions[:, 0][:, None]
    uy = scene.users.positions[:, 1][:, None]
    dist = np.sqrt((ell[None, :] - ux) ** 2
                   + (scene.array.y_positions_m[None, :] - uy) ** 2
                   + scene.array.height_a_m ** 2)
    total_phase = scene.rf.wavenumber_k0 * (dist + scene.rf.refractive_index * ell[None, :])
    return np.exp(-1j * np.mod(total_phase, TWO_PI)) / dist


def _env_factors(scene: Scene) -> np.ndarray:
    """(K, M) location-independent amplitudes xi*alpha, complex typed."""
    return (scene.rf.xi * scene.shadowing_alpha).astype(complex)


def effective_channel_entry(scene: Scene, m: int, k: int, ell: float) -> complex:
    """Single entry g_{m,k}(ell); magnitude is xi*alpha/D exactly."""
    if not 0.0 <= ell <= scene.array.lengths_m[m]:
        raise ValueError(f"ell={ell} outside [0, {scene.array.lengths_m[m]}]")
    dist = element_user_distance(scene, m, k, ell)
    phase = scene.rf.wavenumber_k0 * (dist + scene.rf.refractive_index * ell)
    loc = np.exp(-1j * np.mod(phase, TWO_PI)) / dist
    return complex(loc * (scene.rf.xi * scene.shadowing_alpha[k, m]))


def build_channel_matrix(scene: Scene, pinch: np.ndarray) -> np.ndarray:
    """(K, M) effective channel G(l); row k is g_k^T."""
    ell = validate_pinch_locations(scene, pinch)
    return _location_factors(scene, ell) * _env_factors(scene)


def channel_column(scene: Scene, m: int, ells: np.ndarray) -> np.ndarray:
    """Column m of G evaluated at each candidate location in ells: (K, N)."""
    ells = np.atleast_1d(np.asarray(ells, dtype=float))
    ux = scene.users.positions[:, 0][:, None]
    dy = scene.array.y_positions_m[m] - scene.users.positions[:, 1][:, None]
    dist = np.sqrt((ells[None, :] - ux) ** 2 + dy ** 2 + scene.array.height_a_m ** 2)
    phase = scene.rf.wavenumber_k0 * (dist + scene.rf.refractive_index * ells[None, :])
    loc = np.exp(-1j * np.mod(phase, TWO_PI)) / dist
    return loc * (scene.rf.xi * scene.shadowing_alpha[:, m])[:, None].astype(complex)


def decompose_channel(scene: Scene, pinch: np.ndarray, k: int) -> ChannelDecomposition:
    """Split row k of G into environment vector and location diagonal."""
    ell = validate_pinch_locations(scene, pinch)
    loc_row = _location_factors(scene, ell)[k]
    g0 = _env_factors(scene)[k]
    return ChannelDecomposition(env_vector_g0=g0, location_diag_Lk=np.diag(loc_row))


def fixed_channel_matrix(scene: Scene) -> np.ndarray:
    """(K, M) LoS channel of the fixed half-wavelength baseline array.

    Static antennas radiate directly (no in-guide phase term):
    h_{m,k} = xi*alpha/dist * exp(-j*k0*dist).
    """
    antennas = fixed_array_positions(scene)
    diff = antennas[None, :, :] - scene.users.positions[:, None, :]
    dist = np.linalg.norm(diff, axis=2)
    loc = np.exp(-1j * np.mod(scene.rf.wavenumber_k0 * dist, TWO_PI)) / dist
    return loc * _env_factors(scene)
