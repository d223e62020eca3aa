"""Two-tier block-coordinate ascent for joint precoder / element-location design.

Each outer iteration performs four block updates on the scale-invariant
weighted sum-rate objective, every one of which is non-decreasing:

  1. omega_k  <- scaled SINR_k                       (closed form)
  2. q_k      <- sqrt(1+omega_k) g_k^T w_k / Gamma_k (closed form)
  3. W        <- regularized zero-forcing solve      (closed form)
  4. ell_m    <- per-waveguide grid search, Gauss-Seidel order

Steps 3 and 4 maximize the quadratic surrogate

  F(W, l) = 2 Re tr(T^H G(l) W) - tr(G(l) W W^H G(l)^H U)
            - (sigma^2 tr(U)/P) tr(W W^H)

with diagonal T, U built from (omega, q).  The element-location subproblem is
heavily oscillatory in ell (phase terms of order k0), so gradient steps are
useless; the grid search always includes the incumbent location, which keeps
the sweep monotone even when the optimum sits off-grid.

Convergence is monitored on the scale-invariant objective in nats (the power
constraint is only tightened at the very end, so the constrained objective is
not meaningful mid-run); the final scaling makes both objectives equal.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import cho_factor, cho_solve

from .channel import build_channel_matrix, channel_column, validate_pinch_locations
from .geometry import ConfigError, Scene
from .metrics import (
    LN2,
    RateReport,
    all_scaled_sinr,
    enforce_power_equality,
    scaled_weighted_sum_rate,
)


class PrecoderUpdateError(RuntimeError):
    """RZF system is singular (all quadratic-transform auxiliaries vanished)."""


@dataclass
class SolverConfig:
    """Stopping rule and grid resolution of the optimizer."""

    epsilon: float = 1e-3
    grid_points: int = 1000
    max_outer_iters: int = 200
    inner_location_sweeps: int = 1

    def __post_init__(self):
        if self.epsilon <= 0:
            raise ConfigError("epsilon must be positive")
        if self.grid_points < 2:
            raise ConfigError("grid_points must be >= 2")
        if self.max_outer_iters < 1 or self.inner_location_sweeps < 1:
            raise ConfigError("iteration counts must be >= 1")


@dataclass(frozen=True)
class AuxiliaryVariables:
    """FP auxiliaries: dual weights omega (>= 0) and quadratic-transform q."""

    omega: np.ndarray
    q: np.ndarray


@dataclass(frozen=True)
class FpWeights:
    """Diagonals of the surrogate weight matrices.

    t_diag[k] = lambda_k * sqrt(1 + omega_k) * q_k, chosen so that
    2 Re tr(T^H G W) reproduces the linear quadratic-transform term
    sum_k 2 lambda_k sqrt(1+omega_k) Re{conj(q_k) g_k^T w_k} exactly.
    u_diag[k] = lambda_k * |q_k|^2 (real, nonnegative).
    """

    t_diag: np.ndarray
    u_diag: np.ndarray

    @classmethod
    def from_aux(cls, weights: np.ndarray, omega: np.ndarray, q: np.ndarray) -> "FpWeights":
        return cls(t_diag=weights * np.sqrt(1.0 + omega) * q,
                   u_diag=weights * np.abs(q) ** 2)


@dataclass
class SolverState:
    """Result of one solve: final iterate plus the objective trajectory.

    objective_history[0] is the objective of the initialization; entry i is
    the objective after outer iteration i (nats, scale-invariant form).
    """

    precoder: np.ndarray
    pinch: np.ndarray | None
    aux: AuxiliaryVariables | None
    objective_history: np.ndarray
    iters: int
    converged: bool
    report: RateReport | None = None

    @property
    def objective_history_bits(self) -> np.ndarray:
        return self.objective_history / LN2

    def history_csv(self) -> str:
        lines = ["iteration,objective_nats,objective_bits"]
        for i, nats in enumerate(self.objective_history):
            lines.append(f"{i},{nats:.17g},{nats / LN2:.17g}")
        return "\n".join(lines) + "\n"

    def solution_csv(self) -> str:
        """Final precoder (row-major re,im pairs) and locations as CSV blocks."""
        lines = ["# precoder re,im pairs, row-major"]
        for row in self.precoder:
            lines.append(",".join(f"{z.real:.17g},{z.imag:.17g}" for z in row))
        if self.pinch is not None:
            lines.append("# pinch locations")
            lines.append(",".join(f"{v:.17g}" for v in self.pinch))
        return "\n".join(lines) + "\n"

    def write_history_csv(self, path) -> None:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(self.history_csv())

    def write_solution_csv(self, path) -> None:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(self.solution_csv())


def init_locations_nearest_neighbor(scene: Scene) -> np.ndarray:
    """Place each element at the x of its laterally nearest user.

    k_m = argmin_k |y_k - y_m| (ties to the smallest user index), then
    ell_m = clamp(x_{k_m}, 0, L_m).
    """
    ys = scene.users.positions[:, 1]
    xs = scene.users.positions[:, 0]
    nearest = np.array([np.argmin(np.abs(ys - y_m)) for y_m in scene.array.y_positions_m])
    return np.clip(xs[nearest], 0.0, scene.array.lengths_m)


def init_precoder_mrt(channel: np.ndarray, power_w: float) -> np.ndarray:
    """Matched-filter columns w_k = sqrt(P/K) conj(g_k)/||g_k||; tr(W^H W) = P."""
    norms = np.linalg.norm(channel, axis=1)
    if np.any(norms == 0.0):
        raise ValueError("MRT undefined for a zero channel row")
    k = channel.shape[0]
    return np.sqrt(power_w / k) * (channel.conj() / norms[:, None]).T


def update_omega(channel: np.ndarray, precoder: np.ndarray,
                 noise_w: float, power_w: float) -> np.ndarray:
    """Optimal dual weights: omega_k = scaled SINR_k at the current iterate."""
    return all_scaled_sinr(channel, precoder, noise_w, power_w)


def update_q(channel: np.ndarray, precoder: np.ndarray, omega: np.ndarray,
             noise_w: float, power_w: float) -> np.ndarray:
    """Optimal quadratic-transform auxiliaries.

    q_k = sqrt(1+omega_k) * g_k^T w_k / Gamma_k with
    Gamma_k = sum_j |g_k^T w_j|^2 + (sigma^2/P) sum_j ||w_j||^2 (all j).
    Returns the zero vector for W = 0 (flagged downstream by the RZF update).
    """
    total_power = float(np.sum(np.abs(precoder) ** 2))
    if total_power == 0.0:
        return np.zeros(channel.shape[0], dtype=complex)
    products = channel @ precoder
    gamma = np.sum(np.abs(products) ** 2, axis=1) + (noise_w / power_w) * total_power
    return np.sqrt(1.0 + omega) * np.diagonal(products) / gamma


def quadratic_objective(channel: np.ndarray, precoder: np.ndarray, fpw: FpWeights,
                        noise_w: float, power_w: float) -> float:
    """Surrogate F(W, l) evaluated exactly as written (T, U diagonal)."""
    products = channel @ precoder
    linear = 2.0 * float(np.real(np.sum(np.conj(fpw.t_diag) * np.diagonal(products))))
    quad = float(fpw.u_diag @ np.sum(np.abs(products) ** 2, axis=1))
    reg = (noise_w * float(np.sum(fpw.u_diag)) / power_w) * float(np.sum(np.abs(precoder) ** 2))
    return linear - quad - reg


def update_precoder_rzf(channel: np.ndarray, fpw: FpWeights,
                        noise_w: float, power_w: float) -> np.ndarray:
    """Exact W-block maximizer: (G^H U G + (sigma^2 tr U / P) I)^{-1} G^H T.

    Solved per column through a Hermitian positive-definite factorization;
    no explicit inverse is formed.
    """
    trace_u = float(np.sum(fpw.u_diag))
    if trace_u <= 0.0:
        raise PrecoderUpdateError(
            "all quadratic-transform auxiliaries are zero; re-initialize the precoder")
    m = channel.shape[1]
    gh = channel.conj().T
    system = (gh * fpw.u_diag[None, :]) @ channel + (noise_w * trace_u / power_w) * np.eye(m)
    rhs = gh * fpw.t_diag[None, :]
    return cho_solve(cho_factor(system), rhs)


def _location_coefficients(scene: Scene, m: int, precoder: np.ndarray, fpw: FpWeights,
                           locations: np.ndarray) -> tuple[np.ndarray, float]:
    """Linear coefficient c_m and self-coupling [W W^H]_{mm} for slot m.

    c_m = a_m - b_m with a_m the m-th row of W T^H and
    b_m[k] = u_k * sum_{m'!=m} [W W^H]_{m,m'} conj(G[k,m']).
    """
    frozen = build_channel_matrix(scene, locations)
    gram_row = precoder[m, :] @ precoder.conj().T
    a = precoder[m, :] * np.conj(fpw.t_diag)
    mask = np.arange(scene.num_waveguides) != m
    b = fpw.u_diag * (frozen[:, mask].conj() @ gram_row[mask])
    return a - b, float(np.real(gram_row[m]))


def location_objective_values(scene: Scene, m: int, ells: np.ndarray,
                              precoder: np.ndarray, fpw: FpWeights,
                              locations: np.ndarray) -> np.ndarray:
    """f_m at each candidate: 2 Re{c_m^T g_m(ell)} - [WW^H]_{mm} g_m^H U g_m.

    Differs from F only by ell_m-independent terms, so maximizing it over
    ell_m maximizes F.  Direct complex evaluation (no cosine expansion).
    """
    c, v_mm = _location_coefficients(scene, m, precoder, fpw, locations)
    cols = channel_column(scene, m, ells)
    linear = 2.0 * np.real(c @ cols)
    quad = v_mm * (fpw.u_diag @ (np.abs(cols) ** 2))
    return linear - quad


def location_objective_direct(scene: Scene, m: int, ell: float,
                              precoder: np.ndarray, fpw: FpWeights,
                              locations: np.ndarray) -> float:
    if not 0.0 <= ell <= scene.array.lengths_m[m]:
        raise ValueError(f"ell={ell} outside [0, {scene.array.lengths_m[m]}]")
    return float(location_objective_values(
        scene, m, np.array([ell]), precoder, fpw, locations)[0])


def grid_search_location(scene: Scene, m: int, precoder: np.ndarray, fpw: FpWeights,
                         locations: np.ndarray, grid_points: int = 1000) -> float:
    """Maximize f_m over the uniform grid plus the incumbent ell_m.

    Including the incumbent guarantees f_m never decreases, hence neither
    does F.  Ties resolve to the smallest location.
    """
    if grid_points < 2:
        raise ConfigError("grid_points must be >= 2")
    candidates = np.linspace(0.0, scene.array.lengths_m[m], grid_points)
    candidates = np.unique(np.append(candidates, locations[m]))
    values = location_objective_values(scene, m, candidates, precoder, fpw, locations)
    return float(candidates[int(np.argmax(values))])


def gauss_seidel_location_sweep(scene: Scene, precoder: np.ndarray, fpw: FpWeights,
                                pinch: np.ndarray, grid_points: int = 1000) -> np.ndarray:
    """One in-order pass updating ell_1..ell_M, each against the latest others."""
    locations = validate_pinch_locations(scene, pinch).copy()
    for m in range(scene.num_waveguides):
        locations[m] = grid_search_location(scene, m, precoder, fpw, locations, grid_points)
    return locations


def solve(scene: Scene, config: SolverConfig | None = None,
          init: tuple[np.ndarray, np.ndarray] | None = None) -> SolverState:
    """Run the full alternating optimization on a scene.

    Args:
        scene: problem instance.
        config: stopping threshold / grid resolution (defaults per SolverConfig).
        init: optional (precoder, pinch_locations) warm start; defaults to MRT
            and nearest-neighbor placement.

    Returns:
        SolverState with the power-tight final precoder, optimized locations,
        last auxiliaries, the objective trajectory in nats, and a bits-based
        RateReport.  `converged` is False if the threshold was not reached
        within max_outer_iters (the best iterate is still returned).
    """
    config = config or SolverConfig()
    noise_w = scene.noise_variance_w
    power_w = scene.power_budget_w
    weights = scene.rate_weights

    if init is not None:
        precoder, pinch = init
        pinch = validate_pinch_locations(scene, pinch).copy()
        precoder = np.array(precoder, dtype=complex)
    else:
        pinch = init_locations_nearest_neighbor(scene)
        precoder = init_precoder_mrt(build_channel_matrix(scene, pinch), power_w)

    channel = build_channel_matrix(scene, pinch)
    history = [scaled_weighted_sum_rate(channel, precoder, noise_w, power_w, weights)]
    aux = None
    converged = False
    iters = 0

    for _ in range(config.max_outer_iters):
        omega = update_omega(channel, precoder, noise_w, power_w)
        q = update_q(channel, precoder, omega, noise_w, power_w)
        aux = AuxiliaryVariables(omega=omega, q=q)
        fpw = FpWeights.from_aux(weights, omega, q)
        precoder = update_precoder_rzf(channel, fpw, noise_w, power_w)
        for _ in range(config.inner_location_sweeps):
            pinch = gauss_seidel_location_sweep(scene, precoder, fpw, pinch,
                                                config.grid_points)
        channel = build_channel_matrix(scene, pinch)
        history.append(scaled_weighted_sum_rate(channel, precoder, noise_w,
                                                power_w, weights))
        iters += 1
        if history[-1] - history[-2] < config.epsilon:
            converged = True
            break

    final = enforce_power_equality(precoder, power_w)
    report = RateReport.evaluate(channel, final, noise_w, weights)
    return SolverState(precoder=final, pinch=pinch, aux=aux,
                       objective_history=np.asarray(history), iters=iters,
                       converged=converged, report=report)


def solve_precoder(channel: np.ndarray, power_w: float, noise_w: float,
                   weights: np.ndarray, config: SolverConfig | None = None,
                   init_precoder: np.ndarray | None = None) -> SolverState:
    """Digital-only variant for a fixed channel: omega/q/RZF loop, no locations."""
    config = config or SolverConfig()
    precoder = init_precoder_mrt(channel, power_w) if init_precoder is None \
        else np.array(init_precoder, dtype=complex)

    history = [scaled_weighted_sum_rate(channel, precoder, noise_w, power_w, weights)]
    aux = None
    converged = False
    iters = 0
    for _ in range(config.max_outer_iters):
        omega = update_omega(channel, precoder, noise_w, power_w)
        q = update_q(channel, precoder, omega, noise_w, power_w)
        aux = AuxiliaryVariables(omega=omega, q=q)
        fpw = FpWeights.from_aux(weights, omega, q)
        precoder = update_precoder_rzf(channel, fpw, noise_w, power_w)
        history.append(scaled_weighted_sum_rate(channel, precoder, noise_w,
                                                power_w, weights))
        iters += 1
        if history[-1] - history[-2] < config.epsilon:
            converged = True
            break

    final = enforce_power_equality(precoder, power_w)
    report = RateReport.evaluate(channel, final, noise_w, weights)
    return SolverState(precoder=final, pinch=None, aux=aux,
                       objective_history=np.asarray(history), iters=iters,
                       converged=converged, report=report)
