"""Monte Carlo experiment driver: seeded realization loops, scheme evaluation,
aggregation, and CSV export.

Reproducibility: every trial draws its scene from a child seed derived as
numpy SeedSequence(master_seed, spawn_key=(sweep_index, trial_index)) feeding
a PCG64 generator.  Child streams are therefore independent of trial ordering
and of the total trial count, and identical under serial or parallel
execution.
"""

from __future__ import annotations

import concurrent.futures
from dataclasses import dataclass, field, replace

import numpy as np

from . import baselines, fpbcd
from .channel import build_channel_matrix, fixed_channel_matrix
from .geometry import (
    DEFAULT_FREQ_GHZ,
    DEFAULT_HEIGHT_A_M,
    DEFAULT_NOISE_DBM,
    DEFAULT_REFRACTIVE_INDEX,
    ConfigError,
    Scene,
    build_scene,
)
from .metrics import weighted_sum_rate

SCHEMES = ("pas_fpbcd", "fixed_fpbcd", "fixed_zf", "pas_zf_fixed_locations", "mrt")
ITERATIVE_SCHEMES = ("pas_fpbcd", "fixed_fpbcd")
KINDS = ("sweep_power", "sweep_users", "sweep_area", "convergence", "single")

CSV_SWEEP_HEADER = "sweep,scheme,mean_bits,std_bits,trials,failures"
CSV_CONVERGENCE_HEADER = "iter,scheme,mean_objective_bits"

_TRIAL_FAILURES = (baselines.ZfRankError, fpbcd.PrecoderUpdateError, np.linalg.LinAlgError)


@dataclass(frozen=True)
class BaseParams:
    """Scene parameters shared by every trial; the sweep overrides one of them."""

    m: int = 4
    k: int = 4
    side_d_m: float = 30.0
    power_dbm: float = 20.0
    noise_dbm: float = DEFAULT_NOISE_DBM
    freq_ghz: float = DEFAULT_FREQ_GHZ
    refractive_index: float = DEFAULT_REFRACTIVE_INDEX
    height_a_m: float = DEFAULT_HEIGHT_A_M


@dataclass
class ExperimentSpec:
    """One experiment: a sweep kind, its values, and the evaluation protocol."""

    kind: str
    sweep_values: list
    base: BaseParams = field(default_factory=BaseParams)
    trials: int = 500
    seed: int = 0
    schemes: tuple = ("pas_fpbcd", "fixed_fpbcd")
    solver: fpbcd.SolverConfig = field(default_factory=fpbcd.SolverConfig)
    jobs: int = 1

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ConfigError(f"unknown experiment kind {self.kind!r}")
        if len(self.sweep_values) == 0:
            raise ConfigError("sweep_values must be non-empty")
        if list(self.sweep_values) != sorted(self.sweep_values):
            raise ConfigError("sweep_values must be sorted ascending")
        if self.trials < 1:
            raise ConfigError("trials must be >= 1")
        if self.jobs < 1:
            raise ConfigError("jobs must be >= 1")
        unknown = set(self.schemes) - set(SCHEMES)
        if unknown:
            raise ConfigError(f"unknown schemes: {sorted(unknown)} (choose from {SCHEMES})")
        if len(self.schemes) == 0:
            raise ConfigError("at least one scheme required")
        if self.kind in ("sweep_users", "convergence"):
            if any(float(v) != int(v) for v in self.sweep_values):
                raise ConfigError(f"{self.kind} sweep values must be integers")
        if self.kind == "convergence":
            bad = set(self.schemes) - set(ITERATIVE_SCHEMES)
            if bad:
                raise ConfigError(
                    f"convergence experiments need iterative schemes, got {sorted(bad)}")


@dataclass(frozen=True)
class PointStats:
    """Aggregate of one (sweep value, scheme) cell; failures excluded from mean."""

    sweep_value: float
    scheme: str
    mean_bits: float
    std_bits: float
    trials: int
    failures: int


@dataclass(frozen=True)
class ConvergenceCurve:
    label: str
    mean_objective_bits: np.ndarray


@dataclass
class ExperimentResult:
    kind: str
    sweep_values: list
    schemes: tuple
    points: list
    curves: list


def _scene_params(spec: ExperimentSpec, value) -> dict:
    base = spec.base
    params = {
        "m": base.m, "k": base.k, "side_d_m": base.side_d_m,
        "power_dbm": base.power_dbm, "noise_dbm": base.noise_dbm,
        "freq_ghz": base.freq_ghz, "refractive_index": base.refractive_index,
        "height_a_m": base.height_a_m,
    }
    if spec.kind == "sweep_power":
        params["power_dbm"] = float(value)
    elif spec.kind == "sweep_users":
        params["k"] = int(value)
    elif spec.kind == "sweep_area":
        params["side_d_m"] = float(value)
    elif spec.kind == "convergence":
        params["m"] = int(value)
    return params


def _build_trial_scene(params: dict, master_seed: int,
                       sweep_idx: int, trial_idx: int) -> Scene:
    child = np.random.SeedSequence(master_seed, spawn_key=(sweep_idx, trial_idx))
    return build_scene(seed=child, **params)


def run_scheme(scheme: str, scene: Scene,
               config: fpbcd.SolverConfig) -> tuple[float, np.ndarray | None]:
    """Evaluate one scheme on one scene: (weighted sum-rate bits, history bits)."""
    if scheme == "pas_fpbcd":
        state = fpbcd.solve(scene, config)
        return state.report.weighted_sum_rate_bits, state.objective_history_bits
    if scheme == "fixed_fpbcd":
        state = baselines.solve_fixed_antenna(scene, config)
        return state.report.weighted_sum_rate_bits, state.objective_history_bits
    if scheme == "fixed_zf":
        channel = fixed_channel_matrix(scene)
        precoder = baselines.zf_precoder(channel, scene.power_budget_w)
    elif scheme == "pas_zf_fixed_locations":
        channel = build_channel_matrix(scene, fpbcd.init_locations_nearest_neighbor(scene))
        precoder = baselines.zf_precoder(channel, scene.power_budget_w)
    elif scheme == "mrt":
        channel = fixed_channel_matrix(scene)
        precoder = baselines.mrt_precoder(channel, scene.power_budget_w)
    else:
        raise ConfigError(f"unknown scheme {scheme!r}")
    wsr = weighted_sum_rate(channel, precoder, scene.noise_variance_w, scene.rate_weights)
    return wsr, None


def _run_trial(task: tuple) -> dict:
    """Worker body: one (sweep value, trial) for all schemes.  Picklable."""
    params, schemes, config, master_seed, sweep_idx, trial_idx = task
    scene = _build_trial_scene(params, master_seed, sweep_idx, trial_idx)
    outcome = {}
    for scheme in schemes:
        try:
            wsr, history = run_scheme(scheme, scene, config)
            outcome[scheme] = (wsr, history)
        except _TRIAL_FAILURES:
            outcome[scheme] = (None, None)
    return outcome


def _aggregate_point(value, scheme: str, wsrs: list, trials: int) -> PointStats:
    ok = np.array([w for w in wsrs if w is not None], dtype=float)
    failures = trials - ok.size
    mean = float(np.mean(ok)) if ok.size else float("nan")
    std = float(np.std(ok, ddof=1)) if ok.size > 1 else 0.0
    return PointStats(sweep_value=float(value), scheme=scheme, mean_bits=mean,
                      std_bits=std, trials=trials, failures=failures)


def _mean_curve(histories: list) -> np.ndarray:
    """Average trajectories, padding shorter runs with their converged value."""
    length = max(len(h) for h in histories)
    padded = np.stack([
        np.concatenate([h, np.full(length - len(h), h[-1])]) for h in histories
    ])
    return padded.mean(axis=0)


def run_experiment(spec: ExperimentSpec) -> ExperimentResult:
    """Run every (sweep value, trial, scheme) cell and aggregate.

    Deterministic given the spec; trial failures are recorded per scheme and
    excluded from that scheme's statistics rather than aborting the run.
    """
    tasks = [
        (_scene_params(spec, value), spec.schemes, spec.solver, spec.seed, si, ti)
        for si, value in enumerate(spec.sweep_values)
        for ti in range(spec.trials)
    ]
    if spec.jobs > 1:
        with concurrent.futures.ProcessPoolExecutor(max_workers=spec.jobs) as pool:
            outcomes = list(pool.map(_run_trial, tasks, chunksize=1))
    else:
        outcomes = [_run_trial(task) for task in tasks]

    points = []
    curves = []
    for si, value in enumerate(spec.sweep_values):
        per_value = outcomes[si * spec.trials:(si + 1) * spec.trials]
        for scheme in spec.schemes:
            wsrs = [o[scheme][0] for o in per_value]
            points.append(_aggregate_point(value, scheme, wsrs, spec.trials))
            if spec.kind == "convergence":
                histories = [o[scheme][1] for o in per_value if o[scheme][1] is not None]
                if histories:
                    label = f"{scheme}_M{int(value)}"
                    curves.append(ConvergenceCurve(label, _mean_curve(histories)))
    return ExperimentResult(kind=spec.kind, sweep_values=list(spec.sweep_values),
                            schemes=spec.schemes, points=points, curves=curves)


def experiment_fig2a(power_dbm_list=(0, 5, 10, 15, 20, 25, 30), trials: int = 500,
                     seed: int = 0, schemes: tuple = ("pas_fpbcd", "fixed_fpbcd", "fixed_zf"),
                     **kwargs) -> ExperimentResult:
    """Rate vs transmit power at K = M = 4, D = 30 m."""
    spec = ExperimentSpec(kind="sweep_power", sweep_values=sorted(power_dbm_list),
                          base=BaseParams(m=4, k=4, side_d_m=30.0),
                          trials=trials, seed=seed, schemes=schemes, **kwargs)
    return run_experiment(spec)


def experiment_fig2b(k_list=(2, 3, 4, 5, 6, 7, 8), d_list=(30.0, 60.0), trials: int = 500,
                     seed: int = 0, schemes: tuple = ("pas_fpbcd", "fixed_fpbcd"),
                     **kwargs) -> ExperimentResult:
    """Rate vs number of users at M = 4, P = 20 dBm, one curve set per side length.

    The same master seed drives each side-length sub-experiment (common random
    numbers), so curves for different D are paired across trials.  Scheme
    labels carry the side length, e.g. 'pas_fpbcd@D=30'.
    """
    merged_points = []
    merged_schemes = []
    for d in d_list:
        spec = ExperimentSpec(kind="sweep_users", sweep_values=sorted(k_list),
                              base=BaseParams(m=4, k=4, side_d_m=float(d), power_dbm=20.0),
                              trials=trials, seed=seed, schemes=schemes, **kwargs)
        result = run_experiment(spec)
        for point in result.points:
            label = f"{point.scheme}@D={d:g}"
            merged_points.append(replace(point, scheme=label))
        merged_schemes.extend(f"{s}@D={d:g}" for s in schemes)
    return ExperimentResult(kind="sweep_users", sweep_values=sorted(k_list),
                            schemes=tuple(merged_schemes), points=merged_points, curves=[])


def experiment_fig2c(d_list=(15.0, 30.0, 45.0, 60.0, 75.0, 90.0), trials: int = 500,
                     seed: int = 0, schemes: tuple = ("pas_fpbcd", "fixed_fpbcd"),
                     **kwargs) -> ExperimentResult:
    """Rate vs region side length at K = 4, P = 20 dBm."""
    spec = ExperimentSpec(kind="sweep_area", sweep_values=sorted(d_list),
                          base=BaseParams(m=4, k=4, power_dbm=20.0),
                          trials=trials, seed=seed, schemes=schemes, **kwargs)
    return run_experiment(spec)


def experiment_fig3(m_list=(2, 4, 6, 8), trials: int = 500, seed: int = 0,
                    schemes: tuple = ("pas_fpbcd",), **kwargs) -> ExperimentResult:
    """Mean objective trajectory per iteration at P = 20 dBm, D = 30 m, K = 4."""
    spec = ExperimentSpec(kind="convergence", sweep_values=sorted(m_list),
                          base=BaseParams(k=4, side_d_m=30.0, power_dbm=20.0),
                          trials=trials, seed=seed, schemes=schemes, **kwargs)
    return run_experiment(spec)


def format_csv(result: ExperimentResult) -> str:
    """Render a result as CSV text: LF endings, '.' decimals, 17 sig digits."""
    lines = []
    if result.kind == "convergence":
        lines.append(CSV_CONVERGENCE_HEADER)
        for curve in result.curves:
            for it, value in enumerate(curve.mean_objective_bits):
                lines.append(f"{it},{curve.label},{value:.17g}")
    else:
        lines.append(CSV_SWEEP_HEADER)
        for point in result.points:
            lines.append(f"{point.sweep_value:.17g},{point.scheme},"
                         f"{point.mean_bits:.17g},{point.std_bits:.17g},"
                         f"{point.trials},{point.failures}")
    return "\n".join(lines) + "\n"


def write_csv(result: ExperimentResult, path) -> None:
    """Write the CSV rendering of a result to path (UTF-8, LF endings)."""
    try:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(format_csv(result))
    except OSError as exc:
        raise OSError(f"failed writing results to {path}: {exc}") from exc


def complex_matrix_csv(matrix: np.ndarray) -> str:
    """Debug export of a complex matrix: row-major re,im pairs."""
    rows = np.atleast_2d(np.asarray(matrix))
    lines = [",".join(f"{z.real:.17g},{z.imag:.17g}" for z in row) for row in rows]
    return "\n".join(lines) + "\n"


def write_complex_matrix_csv(matrix: np.ndarray, path) -> None:
    try:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(complex_matrix_csv(matrix))
    except OSError as exc:
        raise OSError(f"failed writing matrix to {path}: {exc}") from exc
