"""Comparison schemes: the fixed half-wavelength array and ZF/MRT precoders.

ZF and MRT follow the y = G z convention of the channel module: zero-forcing
means the off-diagonal entries of G @ W vanish (no conjugation surprises).
"""

from __future__ import annotations

import numpy as np

from .channel import fixed_channel_matrix
from .fpbcd import SolverConfig, SolverState, init_precoder_mrt, solve_precoder
from .geometry import Scene

MAX_ZF_CONDITION = 1e12


class ZfRankError(np.linalg.LinAlgError):
    """Channel too ill-conditioned (or K > M) for zero-forcing."""


def mrt_precoder(channel: np.ndarray, power_w: float) -> np.ndarray:
    """Matched-filter baseline; identical to the optimizer's MRT initializer."""
    return init_precoder_mrt(channel, power_w)


def zf_precoder(channel: np.ndarray, power_w: float) -> np.ndarray:
    """Interference-nulling precoder G^H (G G^H)^{-1} with equal column powers.

    Columns are rescaled to sqrt(P/K) each; column scaling preserves
    g_k^T w_j = 0 for j != k, so the nulling survives normalization.
    """
    k, m = channel.shape
    if k > m:
        raise ZfRankError(f"zero-forcing needs K <= M, got K={k}, M={m}")
    gram = channel @ channel.conj().T
    if np.linalg.cond(gram) > MAX_ZF_CONDITION:
        raise ZfRankError("channel Gram matrix condition exceeds 1e12")
    pinv_cols = channel.conj().T @ np.linalg.inv(gram)
    norms = np.linalg.norm(pinv_cols, axis=0)
    if np.any(norms == 0.0):
        raise ZfRankError("zero pseudoinverse column")
    return np.sqrt(power_w / k) * pinv_cols / norms[None, :]


def solve_fixed_antenna(scene: Scene, config: SolverConfig | None = None) -> SolverState:
    """Digital-only alternating optimization on the fixed-array channel.

    Same omega/q/RZF loop as the full optimizer, with no locations to move.
    """
    channel = fixed_channel_matrix(scene)
    return solve_precoder(channel, scene.power_budget_w, scene.noise_variance_w,
                          scene.rate_weights, config)
