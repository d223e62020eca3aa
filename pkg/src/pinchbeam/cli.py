"""Command-line entry point.

Subcommands mirror the standard experiments: `solve` (one configuration),
`sweep-power`, `sweep-users`, `sweep-area`, and `convergence`.  Results go to
--out as CSV (stdout if omitted); --plot additionally renders a PNG figure
next to the CSV.  Exit codes: 0 success, 1 configuration error, 2 runtime
failure.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import replace
from pathlib import Path

from . import fpbcd, harness
from .geometry import ConfigError, parse_config_file

DEFAULT_SWEEPS = {
    "sweep-power": "0,5,10,15,20,25,30",
    "sweep-users": "2,3,4,5,6,7,8",
    "sweep-area": "15,30,45,60,75,90",
    "convergence": "2,4,6,8",
}

KIND_BY_COMMAND = {
    "solve": "single",
    "sweep-power": "sweep_power",
    "sweep-users": "sweep_users",
    "sweep-area": "sweep_area",
    "convergence": "convergence",
}


class _Parser(argparse.ArgumentParser):
    # argparse exits 2 on bad usage by default; the CLI contract is exit 1.
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _add_common_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--m", type=int, help="number of waveguides / antennas")
    parser.add_argument("--k", type=int, help="number of users")
    parser.add_argument("--side-d", type=float, dest="side_d_m",
                        help="square region side length D in meters")
    parser.add_argument("--power-dbm", type=float, help="transmit power budget in dBm")
    parser.add_argument("--noise-dbm", type=float, help="noise variance in dBm")
    parser.add_argument("--freq-ghz", type=float, help="carrier frequency in GHz")
    parser.add_argument("--refractive-index", type=float,
                        help="waveguide refractive index")
    parser.add_argument("--height-a", type=float, dest="height_a_m",
                        help="waveguide height a in meters")
    parser.add_argument("--trials", type=int, default=None,
                        help="Monte Carlo realizations per sweep point")
    parser.add_argument("--seed", type=int, default=None, help="master RNG seed")
    parser.add_argument("--grid-points", type=int, default=None,
                        help="grid resolution of the location search")
    parser.add_argument("--epsilon", type=float, default=None,
                        help="convergence threshold on the objective increase")
    parser.add_argument("--schemes", type=str, default=None,
                        help="comma-separated schemes: " + ",".join(harness.SCHEMES))
    parser.add_argument("--values", type=str, default=None,
                        help="comma-separated sweep values (power dBm / K / D / M)")
    parser.add_argument("--jobs", type=int, default=None,
                        help="parallel worker processes for trials")
    parser.add_argument("--out", type=str, default=None,
                        help="output CSV path (stdout if omitted)")
    parser.add_argument("--plot", action="store_true",
                        help="also render a PNG figure next to the CSV")
    parser.add_argument("--config", type=str, default=None,
                        help="flat key = value scene config file (CLI flags override)")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="pinchbeam",
                     description="Pinching-antenna multiuser beamforming experiments")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for command in KIND_BY_COMMAND:
        p = sub.add_parser(command, help=f"run the {command} experiment")
        _add_common_flags(p)
    return parser


def _base_params(args) -> tuple[harness.BaseParams, int]:
    config = parse_config_file(args.config) if args.config else {}
    updates = {}
    for key in ("m", "k", "side_d_m", "power_dbm", "noise_dbm", "freq_ghz",
                "refractive_index", "height_a_m"):
        if key in config:
            updates[key] = config[key]
        flag = getattr(args, key, None)
        if flag is not None:
            updates[key] = flag
    base = replace(harness.BaseParams(), **updates) if updates else harness.BaseParams()
    seed = config.get("seed", 0)
    if args.seed is not None:
        seed = args.seed
    return base, seed


def _build_spec(args) -> harness.ExperimentSpec:
    base, seed = _base_params(args)
    kind = KIND_BY_COMMAND[args.command]

    if args.command == "solve":
        values = [base.power_dbm]
    elif args.values is not None:
        try:
            values = sorted(float(v) for v in args.values.split(","))
        except ValueError as exc:
            raise ConfigError(f"bad --values list: {args.values!r}") from exc
    else:
        values = sorted(float(v) for v in DEFAULT_SWEEPS[args.command].split(","))

    schemes = tuple(s.strip() for s in args.schemes.split(",")) if args.schemes \
        else ("pas_fpbcd",) if args.command == "convergence" \
        else ("pas_fpbcd", "fixed_fpbcd")

    solver_kwargs = {}
    if args.epsilon is not None:
        solver_kwargs["epsilon"] = args.epsilon
    if args.grid_points is not None:
        solver_kwargs["grid_points"] = args.grid_points

    return harness.ExperimentSpec(
        kind=kind,
        sweep_values=values,
        base=base,
        trials=args.trials if args.trials is not None else (1 if args.command == "solve" else 500),
        seed=seed,
        schemes=schemes,
        solver=fpbcd.SolverConfig(**solver_kwargs),
        jobs=args.jobs if args.jobs is not None else 1,
    )


def cli_main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)

    try:
        spec = _build_spec(args)
        if args.plot and not args.out:
            raise ConfigError("--plot requires --out")
    except ConfigError as exc:
        print(f"pinchbeam: configuration error: {exc}", file=sys.stderr)
        return 1

    try:
        result = harness.run_experiment(spec)
        if args.out:
            harness.write_csv(result, args.out)
        else:
            sys.stdout.write(harness.format_csv(result))
        if args.plot:
            from .plotting import render_result
            render_result(result, Path(args.out).with_suffix(".png"))
    except ConfigError as exc:
        print(f"pinchbeam: configuration error: {exc}", file=sys.stderr)
        return 1
    except Exception as exc:  # noqa: BLE001 - runtime failures map to exit 2
        print(f"pinchbeam: error: {exc}", file=sys.stderr)
        return 2
    return 0


def main() -> None:
    sys.exit(cli_main())


if __name__ == "__main__":
    main()
