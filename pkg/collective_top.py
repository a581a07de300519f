"""
Command-line front end: run heavy top experiments and write invariant series.

    python collective_top.py list
    python collective_top.py run --experiment kovalevskaya-fig1 --method implicit-midpoint --formulation collective
"""

import argparse
import sys
from typing import Dict, List, Optional

from core.errors import CollectiveTopError, ConfigError
from core.experiment_orchestrator import ExperimentOrchestrator, ExperimentOutcome
from core.experiments import experiment_presets, get_experiment, load_config_file, parse_number
from core.hamiltonians import TopPreset
from core.integrators import Formulation, Method
from core.observability import observability


def positive_number(text: str) -> float:
    try:
        value = parse_number(text)
    except ConfigError as e:
        raise argparse.ArgumentTypeError(str(e))
    if not value > 0.0:
        raise argparse.ArgumentTypeError(f"must be positive, got {text}")
    return value


def positive_int(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid integer '{text}'")
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be at least 1, got {text}")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="collective_top",
        description="Collective and direct integration of the heavy top",
    )
    subparsers = parser.add_subparsers(dest="command", required=True)

    subparsers.add_parser("list", help="list experiment presets")

    run = subparsers.add_parser("run", help="run an experiment or a single configuration")
    run.add_argument("--experiment", help="preset name, see 'list'")
    run.add_argument("--method", choices=[m.value for m in Method])
    run.add_argument("--formulation", choices=[f.value for f in Formulation])
    run.add_argument("--dt", type=positive_number, help="time step, e.g. 0.02 or 1/50")
    run.add_argument("--t-final", dest="t_final", type=positive_number)
    run.add_argument("--pi0", metavar="X,Y,Z")
    run.add_argument("--gamma0", metavar="X,Y,Z")
    run.add_argument("--preset", choices=[p.value for p in TopPreset])
    run.add_argument("--inertia", metavar="I1,I2,I3")
    run.add_argument("--mgl", metavar="M,G,L")
    run.add_argument("--c", metavar="X,Y,Z")
    run.add_argument("--gauge", metavar="free|fix-re-chi1=V")
    run.add_argument("--output", metavar="PATH")
    run.add_argument("--stride", type=positive_int)
    run.add_argument("--config", metavar="PATH", help="key = value file; flags take precedence")
    run.add_argument("--plot", action="store_true", help="write a PNG next to the CSV output")
    return parser


def collect_overrides(args: argparse.Namespace) -> Dict[str, object]:
    """Config file values overlaid with explicitly given flags"""
    overrides: Dict[str, object] = dict(load_config_file(args.config)) if args.config else {}
    for key in ("experiment", "method", "formulation", "dt", "t_final", "pi0", "gamma0", "preset",
                "inertia", "mgl", "c", "gauge", "output", "stride"):
        value = getattr(args, key)
        if value is not None:
            overrides[key] = value
    return overrides


def print_outcome(outcome: ExperimentOutcome):
    for name, path in outcome.csv_paths.items():
        print(f"{name}: {path}")
    for name, path in outcome.report_paths.items():
        print(f"{name} drift report: {path}")
    if outcome.convergence:
        for method, order in outcome.convergence.orders.items():
            print(f"{method}: convergence order {order:.3f}")
    if outcome.commuting_flows:
        print(f"max |M(collective) - direct| = {outcome.commuting_flows.max_deviation:.3e} "
              f"up to t = {outcome.commuting_flows.t_final:g}")
    if outcome.plot_path:
        print(f"plot: {outcome.plot_path}")


def list_experiments():
    for name, experiment in experiment_presets().items():
        print(f"{name:<20} {experiment.description}")


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "list":
        list_experiments()
        return 0

    try:
        overrides = collect_overrides(args)
        name = overrides.get("experiment")
        experiment = get_experiment(name) if name else None
        outcome = ExperimentOrchestrator().run_experiment(experiment, overrides, plot=args.plot)
    except (CollectiveTopError, OSError) as e:
        observability.log_debug("Run failed", error_type=type(e).__name__)
        print(f"collective_top: error: {e}", file=sys.stderr)
        return 1

    print_outcome(outcome)
    return 0


if __name__ == "__main__":
    sys.exit(main())
