"""
Experiment Orchestrator - runs integration experiments end to end.

1. Resolves the runs of an experiment preset and applies overrides
2. Validates every run configuration
3. Integrates the runs, in parallel across runs
4. Writes CSV series, drift reports and optional plots
"""

import dataclasses
import logging
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable, Dict, List, Mapping, Optional, Sequence, Tuple

import numpy as np
import pandas as pd
from langfuse import observe

from config.settings import settings
from core.diagnostics import DriftReport, InvariantSeries, convergence_order, drift_report, invariant_series
from core.errors import ConfigError
from core.experiments import Experiment, ExperimentKind, RunConfig, resolve_runs
from core.guardrails import ConfigGuardrails
from core.integrators import Method, integrate, system_for
from core.observability import observability
from utils.export_handlers import ExportManager
from utils.visualization import VisualizationManager

logger = logging.getLogger(__name__)


@dataclass
class RunResult:
    config: RunConfig
    series: InvariantSeries
    report: DriftReport
    duration: float
    newton_iterations_mean: Optional[float] = None
    newton_iterations_max: Optional[int] = None


@dataclass
class ConvergenceResult:
    errors: Dict[str, List[Tuple[float, float]]]
    orders: Dict[str, float]
    t_final: float
    reference_dt: float

    def local_orders(self) -> Dict[str, List[float]]:
        """Order between consecutive step sizes, largest dt first"""
        local = {}
        for method, pairs in self.errors.items():
            ordered = sorted(pairs, reverse=True)
            local[method] = [float(np.log(e0 / e1) / np.log(dt0 / dt1))
                             for (dt0, e0), (dt1, e1) in zip(ordered, ordered[1:])]
        return local

    def to_frame(self) -> pd.DataFrame:
        rows = [{"method": method, "dt": dt, "error": err}
                for method, pairs in self.errors.items() for dt, err in pairs]
        return pd.DataFrame(rows, columns=["method", "dt", "error"])


@dataclass
class CommutingFlowsResult:
    """Sup-norm distance between M(collective flow) and the direct flow"""
    max_deviation: float
    final_deviation: float
    t_final: float


@dataclass
class ExperimentOutcome:
    name: str
    results: List[RunResult] = field(default_factory=list)
    csv_paths: Dict[str, Path] = field(default_factory=dict)
    report_paths: Dict[str, Path] = field(default_factory=dict)
    plot_path: Optional[Path] = None
    convergence: Optional[ConvergenceResult] = None
    commuting_flows: Optional[CommutingFlowsResult] = None


# Worker functions live at module level so that process pools can pickle them

def execute_run(config: RunConfig) -> RunResult:
    start_time = time.time()
    system = system_for(config.formulation, config.params)
    traj = integrate(system, config.initial_state(), config.t_final, config.stepper_config(), stride=config.stride)
    series = invariant_series(traj)
    report = drift_report(series) if len(series) >= 2 else DriftReport(t_final=float(traj.times[-1]), samples=1)
    iterations = traj.newton_iterations
    return RunResult(
        config=config,
        series=series,
        report=report,
        duration=time.time() - start_time,
        newton_iterations_mean=float(np.mean(iterations)) if iterations else None,
        newton_iterations_max=int(max(iterations)) if iterations else None,
    )


def final_state(config: RunConfig) -> np.ndarray:
    """State at t_final without keeping intermediate samples"""
    system = system_for(config.formulation, config.params)
    stride = max(1, config.n_steps)
    traj = integrate(system, config.initial_state(), config.t_final, config.stepper_config(), stride=stride)
    return traj.final_state


def sampled_se3_states(config: RunConfig) -> np.ndarray:
    system = system_for(config.formulation, config.params)
    traj = integrate(system, config.initial_state(), config.t_final, config.stepper_config(), stride=config.stride)
    return traj.se3_states()


class ExperimentOrchestrator:
    """Runs experiment presets or single runs and exports their results"""

    def __init__(self, max_workers: Optional[int] = None, export_manager: Optional[ExportManager] = None,
                 visualization_manager: Optional[VisualizationManager] = None):
        self.max_workers = max_workers or settings.MAX_WORKERS
        self.export_manager = export_manager or ExportManager()
        self.visualization_manager = visualization_manager
        self.guardrails = ConfigGuardrails()

    def _map(self, fn: Callable, items: Sequence) -> List[Any]:
        """Apply fn to items, in worker processes when more than one is available"""
        workers = min(self.max_workers, len(items))
        if workers <= 1:
            return [fn(item) for item in items]
        with ProcessPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(fn, items))

    def _visualizer(self) -> VisualizationManager:
        if self.visualization_manager is None:
            self.visualization_manager = VisualizationManager()
        return self.visualization_manager

    def validate(self, runs: Sequence[RunConfig]):
        errors = []
        for run in runs:
            result = self.guardrails.validate_run_config(run)
            errors.extend(f"{run.name}: {message}" for message in result["errors"])
        if errors:
            raise ConfigError("invalid run configuration: " + "; ".join(errors), errors)

    @staticmethod
    def output_paths(runs: Sequence[RunConfig], experiment_name: str,
                     output: Optional[str] = None) -> Dict[str, Path]:
        """An explicit single-run output is used as is; multi-run outputs get a run suffix"""
        if output is None:
            base_dir = Path(settings.OUTPUT_DIR) / experiment_name
            return {run.name: base_dir / f"{run.name}.csv" for run in runs}
        output = Path(output)
        if len(runs) == 1:
            return {runs[0].name: output}
        return {run.name: output.with_name(f"{output.stem}_{run.name}{output.suffix or '.csv'}") for run in runs}

    @observe(name="experiment_workflow")
    def run_experiment(self, experiment: Optional[Experiment], overrides: Optional[Mapping[str, Any]] = None,
                       plot: bool = False) -> ExperimentOutcome:
        overrides = dict(overrides or {})
        name = experiment.name if experiment else "run"
        start_time = time.time()
        observability.log_workflow_step("experiment_workflow", "start", "start", experiment=name)
        observability.update_current_observation(input={"experiment": name, "overrides": {
            key: str(value) for key, value in overrides.items()}})

        try:
            kind = experiment.kind if experiment else ExperimentKind.RUNS
            if kind is ExperimentKind.CONVERGENCE:
                outcome = self.run_convergence(experiment, overrides, plot=plot)
            elif kind is ExperimentKind.COMMUTING_FLOWS:
                outcome = self.check_commuting_flows(experiment, overrides)
            else:
                outcome = self.run_configs(resolve_runs(experiment, overrides), name,
                                           output=overrides.get("output"), plot=plot)
        except Exception as e:
            observability.log_workflow_step("experiment_workflow", "error", "error", experiment=name,
                                            duration=f"{time.time() - start_time:.2f}s")
            observability.log_exception(e, context=name)
            raise

        duration = time.time() - start_time
        observability.log_workflow_step("experiment_workflow", "complete", "success",
                                        experiment=name, runs=len(outcome.results))
        observability.log_performance("experiment_workflow", duration, experiment=name)
        observability.flush_traces()
        return outcome

    def run_configs(self, runs: List[RunConfig], experiment_name: str = "run",
                    output: Optional[str] = None, plot: bool = False) -> ExperimentOutcome:
        self.validate(runs)
        paths = self.output_paths(runs, experiment_name, output)
        outcome = ExperimentOutcome(name=experiment_name)

        observability.log_workflow_step("experiment_workflow", "integration", "start", runs=len(runs),
                                        workers=min(self.max_workers, len(runs)))
        outcome.results = self._map(execute_run, runs)
        for result in outcome.results:
            run = result.config
            observability.log_info(
                f"Run '{run.name}' finished", method=run.method.value, formulation=run.formulation.value,
                steps=run.n_steps, duration=f"{result.duration:.2f}s",
                newton_mean=result.newton_iterations_mean,
            )
        observability.log_workflow_step("experiment_workflow", "integration", "success")

        for result in outcome.results:
            name = result.config.name
            csv_path = self.export_manager.write_series_csv(result.series, paths[name])
            outcome.csv_paths[name] = csv_path
            if result.report.entries:
                outcome.report_paths[name] = self.export_manager.write_drift_report(
                    result.report, self.export_manager.drift_report_path(csv_path))

        if plot and outcome.results:
            first = next(iter(outcome.csv_paths.values()))
            plot_path = first.with_name(
                f"{experiment_name}_deviations.png" if len(runs) > 1 else f"{first.stem}_deviations.png")
            fig = self._visualizer().create_deviation_figure(
                {result.config.name: result.series for result in outcome.results})
            outcome.plot_path = self._visualizer().save_figure(fig, plot_path)
        return outcome

    def run_convergence(self, experiment: Experiment, overrides: Mapping[str, Any],
                        plot: bool = False, reference_dt: Optional[float] = None) -> ExperimentOutcome:
        """Global error of each method against an RK4 reference over the preset dt sweep"""
        reference_dt = reference_dt or settings.REFERENCE_DT
        templates = resolve_runs(experiment, {k: v for k, v in overrides.items() if k != "dt"})
        self.validate(templates)
        sweeps = [dataclasses.replace(run, dt=dt) for run in templates for dt in experiment.dts]
        references = {run.name: dataclasses.replace(run, method=Method.RK4, dt=reference_dt)
                      for run in templates}
        observability.log_workflow_step("convergence", "integration", "start",
                                        runs=len(sweeps), reference_dt=reference_dt)

        finals = self._map(final_state, sweeps + list(references.values()))
        reference_finals = dict(zip(references, finals[len(sweeps):]))

        errors: Dict[str, List[Tuple[float, float]]] = {}
        for run, state in zip(sweeps, finals[:len(sweeps)]):
            err = float(np.max(np.abs(state - reference_finals[run.name])))
            errors.setdefault(run.method.value, []).append((run.dt, err))
        orders = {method: convergence_order(pairs) for method, pairs in errors.items()}
        result = ConvergenceResult(errors, orders, templates[0].t_final, reference_dt)
        for method, local in result.local_orders().items():
            observability.log_info("Convergence order", method=method, order=f"{orders[method]:.3f}",
                                   local=",".join(f"{p:.3f}" for p in local))

        outcome = ExperimentOutcome(name=experiment.name, convergence=result)
        output = overrides.get("output")
        csv_path = Path(output) if output else Path(settings.OUTPUT_DIR) / experiment.name / "convergence.csv"
        csv_path.parent.mkdir(parents=True, exist_ok=True)
        outcome.convergence.to_frame().to_csv(csv_path, index=False, float_format=settings.CSV_FLOAT_FORMAT,
                                              lineterminator="\n")
        outcome.csv_paths["convergence"] = csv_path
        if plot:
            fig = self._visualizer().create_convergence_figure(errors, orders)
            outcome.plot_path = self._visualizer().save_figure(fig, csv_path.with_suffix(".png"))
        return outcome

    def check_commuting_flows(self, experiment: Experiment, overrides: Mapping[str, Any]) -> ExperimentOutcome:
        """Compare M of the collective flow with the direct flow at every common sample"""
        runs = resolve_runs(experiment, {k: v for k, v in overrides.items() if k != "formulation"})
        if len(runs) != 2 or {run.formulation for run in runs} != {r.formulation for r in experiment.runs}:
            raise ConfigError("commuting flows check needs one collective and one direct run")
        self.validate(runs)
        collective, direct = self._map(sampled_se3_states, runs)
        deviation = np.max(np.abs(collective - direct), axis=1)
        result = CommutingFlowsResult(
            max_deviation=float(np.max(deviation)),
            final_deviation=float(deviation[-1]),
            t_final=runs[0].t_final,
        )
        observability.log_info("Commuting flows", max_deviation=f"{result.max_deviation:.3e}",
                               t_final=result.t_final)
        return ExperimentOutcome(name=experiment.name, commuting_flows=result)
