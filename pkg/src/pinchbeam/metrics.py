"""Rates, SINRs, the sum-power constraint, and the scale-invariant objective.

The optimizer works on the scale-invariant variant of the SINR, where the
noise term sigma^2 is replaced by (sigma^2/P) * tr(W^H W): the two objectives
agree whenever the power constraint is tight, and any precoder can be scaled
to tightness without changing the scaled SINR.  Internally the solver uses
natural logs (the closed-form updates are derived in nats); reported rates
are log2-based bits/s/Hz.  The two differ by the constant 1/ln 2, so all
argmaxes coincide.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

LN2 = float(np.log(2.0))


def _check_dims(channel: np.ndarray, precoder: np.ndarray) -> None:
    if channel.ndim != 2 or precoder.ndim != 2 or channel.shape[1] != precoder.shape[0] \
            or channel.shape[0] != precoder.shape[1]:
        raise ValueError(
            f"dimension mismatch: channel {channel.shape} vs precoder {precoder.shape}")


def all_sinr(channel: np.ndarray, precoder: np.ndarray, noise_w: float) -> np.ndarray:
    """Per-user SINR_k = |g_k^T w_k|^2 / (sum_{j!=k} |g_k^T w_j|^2 + sigma^2)."""
    _check_dims(channel, precoder)
    if noise_w <= 0:
        raise ValueError("noise power must be positive")
    gains = np.abs(channel @ precoder) ** 2
    signal = np.diagonal(gains)
    interference = gains.sum(axis=1) - signal
    return signal / (interference + noise_w)


def sinr(channel: np.ndarray, precoder: np.ndarray, noise_w: float, k: int) -> float:
    return float(all_sinr(channel, precoder, noise_w)[k])


def all_scaled_sinr(channel: np.ndarray, precoder: np.ndarray,
                    noise_w: float, power_w: float) -> np.ndarray:
    """Scale-invariant SINR with noise replaced by (sigma^2/P)*tr(W^H W).

    Invariant under W -> c W for c > 0; defined as 0 for W = 0.
    """
    _check_dims(channel, precoder)
    if noise_w <= 0 or power_w <= 0:
        raise ValueError("noise and power budget must be positive")
    total_power = float(np.sum(np.abs(precoder) ** 2))
    if total_power == 0.0:
        return np.zeros(channel.shape[0])
    gains = np.abs(channel @ precoder) ** 2
    signal = np.diagonal(gains)
    interference = gains.sum(axis=1) - signal
    return signal / (interference + (noise_w / power_w) * total_power)


def scaled_sinr(channel: np.ndarray, precoder: np.ndarray,
                noise_w: float, power_w: float, k: int) -> float:
    return float(all_scaled_sinr(channel, precoder, noise_w, power_w)[k])


def weighted_sum_rate(channel: np.ndarray, precoder: np.ndarray,
                      noise_w: float, weights: np.ndarray) -> float:
    """sum_k lambda_k * log2(1 + SINR_k), bits/s/Hz."""
    return float(np.sum(weights * np.log2(1.0 + all_sinr(channel, precoder, noise_w))))


def weighted_sum_rate_nats(channel: np.ndarray, precoder: np.ndarray,
                           noise_w: float, weights: np.ndarray) -> float:
    """Natural-log variant used inside the solver."""
    return float(np.sum(weights * np.log1p(all_sinr(channel, precoder, noise_w))))


def scaled_weighted_sum_rate(channel: np.ndarray, precoder: np.ndarray,
                             noise_w: float, power_w: float,
                             weights: np.ndarray) -> float:
    """Scale-invariant objective sum_k lambda_k*log(1 + scaled SINR_k), nats."""
    scaled = all_scaled_sinr(channel, precoder, noise_w, power_w)
    return float(np.sum(weights * np.log1p(scaled)))


def enforce_power_equality(precoder: np.ndarray, power_w: float) -> np.ndarray:
    """Scale W so tr(W^H W) = P exactly.

    Leaves every scaled SINR unchanged and makes the plain SINR of the result
    equal to the scaled SINR of the input.  Rejects W = 0 (no direction).
    """
    if power_w <= 0:
        raise ValueError("power budget must be positive")
    total = float(np.sum(np.abs(precoder) ** 2))
    if total == 0.0:
        raise ValueError("cannot scale the zero precoder to the power budget")
    return precoder * np.sqrt(power_w / total)


@dataclass(frozen=True)
class RateReport:
    """Per-user SINRs/rates and the weighted sum-rate of one (G, W) pair."""

    per_user_sinr: np.ndarray
    per_user_rate_bits: np.ndarray
    weighted_sum_rate_bits: float

    @classmethod
    def evaluate(cls, channel: np.ndarray, precoder: np.ndarray,
                 noise_w: float, weights: np.ndarray) -> "RateReport":
        s = all_sinr(channel, precoder, noise_w)
        rates = np.log2(1.0 + s)
        return cls(per_user_sinr=s, per_user_rate_bits=rates,
                   weighted_sum_rate_bits=float(np.sum(weights * rates)))

    def to_csv_row(self) -> str:
        """One CSV row: sinr_1..K, rate_1..K, wsr (17 significant digits)."""
        values = [*self.per_user_sinr, *self.per_user_rate_bits,
                  self.weighted_sum_rate_bits]
        return ",".join(f"{v:.17g}" for v in values)
