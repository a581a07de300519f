"""
Run configurations, named experiment presets and the key = value config file format.
"""

import dataclasses
import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from pathlib import Path
from typing import Any, Dict, List, Mapping, Optional, Tuple

import numpy as np

from config.settings import settings
from core.errors import ConfigError, UnknownExperimentError
from core.hamiltonians import TopParams, TopPreset
from core.integrators import Formulation, Method, NewtonOptions, StepperConfig
from core.maps import LiftGauge, lift

logger = logging.getLogger(__name__)

Vec3Tuple = Tuple[float, float, float]

KOVALEVSKAYA_PI0: Vec3Tuple = (2.0, 3.0, 4.0)
KOVALEVSKAYA_GAMMA0: Vec3Tuple = (0.5, 0.0, math.sqrt(3.0) / 2.0)
EXPERIMENT_DT = 1.0 / 50.0
EXPERIMENT_T_FINAL = 200.0
CONVERGENCE_DTS = (1.0 / 25.0, 1.0 / 50.0, 1.0 / 100.0, 1.0 / 200.0)
CONVERGENCE_T_FINAL = 5.0

CONFIG_KEYS = {
    "experiment", "method", "formulation", "dt", "t_final", "pi0", "gamma0", "preset",
    "inertia", "mgl", "c", "gauge", "output", "stride",
}


class ExperimentKind(Enum):
    RUNS = "runs"
    CONVERGENCE = "convergence"
    COMMUTING_FLOWS = "commuting-flows"


@dataclass(frozen=True)
class RunConfig:
    """One integration run: parameters, initial data, method and output"""

    name: str = "run"
    params: TopParams = field(default_factory=TopParams.kovalevskaya)
    Pi0: Vec3Tuple = KOVALEVSKAYA_PI0
    Gamma0: Vec3Tuple = KOVALEVSKAYA_GAMMA0
    gauge: LiftGauge = field(default_factory=lambda: LiftGauge.fix_re_chi1(1.0))
    method: Method = Method.IMPLICIT_MIDPOINT
    formulation: Formulation = Formulation.COLLECTIVE
    dt: float = field(default_factory=lambda: settings.DEFAULT_DT)
    t_final: float = field(default_factory=lambda: settings.DEFAULT_T_FINAL)
    stride: int = 1
    output_path: Optional[str] = None
    newton: NewtonOptions = field(default_factory=NewtonOptions)

    @property
    def preset(self) -> TopPreset:
        return self.params.preset

    @property
    def label(self) -> str:
        return f"{self.method.value}_{self.formulation.value}"

    @property
    def n_steps(self) -> int:
        return int(round(self.t_final / self.dt))

    def stepper_config(self) -> StepperConfig:
        return StepperConfig(method=self.method, dt=self.dt, newton=self.newton)

    def initial_state(self) -> np.ndarray:
        """(Pi0, Gamma0) for direct runs, its lift for collective runs"""
        s0 = np.concatenate([self.Pi0, self.Gamma0]).astype(np.float64)
        if self.formulation is Formulation.COLLECTIVE:
            return lift(s0, self.gauge).to_real()
        return s0

    def identity_key(self) -> tuple:
        """Everything that determines the numerical result"""
        return (self.params, self.Pi0, self.Gamma0, str(self.gauge), self.method,
                self.formulation, self.dt, self.t_final, self.stride, self.newton)


@dataclass(frozen=True)
class Experiment:
    name: str
    description: str
    runs: Tuple[RunConfig, ...]
    kind: ExperimentKind = ExperimentKind.RUNS
    dts: Tuple[float, ...] = ()


def _kovalevskaya_run(name: str, method: Method, formulation: Formulation) -> RunConfig:
    return RunConfig(
        name=name,
        params=TopParams.kovalevskaya(),
        method=method,
        formulation=formulation,
        dt=EXPERIMENT_DT,
        t_final=EXPERIMENT_T_FINAL,
    )


def experiment_presets() -> Dict[str, Experiment]:
    explicit, implicit = Method.EXPLICIT_MIDPOINT, Method.IMPLICIT_MIDPOINT
    collective, direct = Formulation.COLLECTIVE, Formulation.DIRECT
    lagrange = TopParams.lagrange(I1=2.0, I3=1.0)
    presets = [
        Experiment(
            name="kovalevskaya-fig1",
            description="Kovalevskaya top: explicit midpoint (collective, direct) against implicit midpoint (collective)",
            runs=(
                _kovalevskaya_run("explicit-collective", explicit, collective),
                _kovalevskaya_run("explicit-direct", explicit, direct),
                _kovalevskaya_run("implicit-collective", implicit, collective),
            ),
        ),
        Experiment(
            name="kovalevskaya-fig2",
            description="Kovalevskaya top: implicit midpoint on the heavy top equations against the collective integrator",
            runs=(
                _kovalevskaya_run("implicit-direct", implicit, direct),
                _kovalevskaya_run("implicit-collective", implicit, collective),
            ),
        ),
        Experiment(
            name="lagrange-demo",
            description="Lagrange top: f3 = Pi3 under the collective implicit midpoint rule",
            runs=(
                dataclasses.replace(_kovalevskaya_run("implicit-collective", implicit, collective), params=lagrange),
                dataclasses.replace(_kovalevskaya_run("explicit-collective", explicit, collective), params=lagrange),
            ),
        ),
        Experiment(
            name="convergence",
            description="Global error at t = 5 against an RK4 reference for both midpoint rules",
            runs=(
                dataclasses.replace(_kovalevskaya_run("explicit-collective", explicit, collective),
                                    t_final=CONVERGENCE_T_FINAL),
                dataclasses.replace(_kovalevskaya_run("implicit-collective", implicit, collective),
                                    t_final=CONVERGENCE_T_FINAL),
            ),
            kind=ExperimentKind.CONVERGENCE,
            dts=CONVERGENCE_DTS,
        ),
        Experiment(
            name="commuting-flows",
            description="M of the collective RK4 flow against the direct RK4 flow up to t = 1",
            runs=(
                dataclasses.replace(_kovalevskaya_run("rk4-collective", Method.RK4, collective),
                                    dt=settings.REFERENCE_DT, t_final=1.0),
                dataclasses.replace(_kovalevskaya_run("rk4-direct", Method.RK4, direct),
                                    dt=settings.REFERENCE_DT, t_final=1.0),
            ),
            kind=ExperimentKind.COMMUTING_FLOWS,
        ),
    ]
    return {experiment.name: experiment for experiment in presets}


def get_experiment(name: str) -> Experiment:
    presets = experiment_presets()
    if name not in presets:
        raise UnknownExperimentError(name, sorted(presets))
    return presets[name]


# Parsing of flag and file values

def parse_number(text: str) -> float:
    """Float, also accepting fractions such as '1/50'"""
    try:
        return float(Fraction(text.strip()))
    except (ValueError, ZeroDivisionError):
        raise ConfigError(f"invalid number '{text}'")


def parse_vec3(text: str) -> Vec3Tuple:
    parts = [p for p in text.replace(" ", "").split(",") if p]
    if len(parts) != 3:
        raise ConfigError(f"expected three comma-separated numbers, got '{text}'")
    return tuple(parse_number(p) for p in parts)


def _parse_enum(enum_cls, text: str):
    try:
        return enum_cls(text.strip().lower())
    except ValueError:
        choices = ", ".join(member.value for member in enum_cls)
        raise ConfigError(f"invalid {enum_cls.__name__.lower()} '{text}', expected one of: {choices}")


def _coerce(key: str, value: Any) -> Any:
    if not isinstance(value, str):
        return value
    if key in ("dt", "t_final"):
        return parse_number(value)
    if key in ("pi0", "gamma0", "inertia", "mgl", "c"):
        return parse_vec3(value)
    if key == "stride":
        try:
            return int(value)
        except ValueError:
            raise ConfigError(f"invalid stride '{value}'")
    if key == "method":
        return _parse_enum(Method, value)
    if key == "formulation":
        return _parse_enum(Formulation, value)
    if key == "preset":
        return _parse_enum(TopPreset, value)
    if key == "gauge":
        try:
            return LiftGauge.parse(value)
        except ValueError as e:
            raise ConfigError(str(e))
    return value.strip()


def load_config_file(path) -> Dict[str, str]:
    """Read 'key = value' lines; blank lines and '#' comments are skipped"""
    values: Dict[str, str] = {}
    for number, raw in enumerate(Path(path).read_text().splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{number}: expected 'key = value', got '{raw.strip()}'")
        key, value = (part.strip() for part in line.split("=", 1))
        key = key.replace("-", "_").lower()
        if key not in CONFIG_KEYS:
            raise ConfigError(f"{path}:{number}: unknown key '{key}'")
        values[key] = value
    logger.debug(f"Loaded {len(values)} settings from {path}")
    return values


def _override_params(params: TopParams, overrides: Mapping[str, Any]) -> TopParams:
    preset = overrides.get("preset")
    inertia = overrides.get("inertia")
    mgl = overrides.get("mgl")
    m, g, l = mgl if mgl is not None else (params.m, params.g, params.l)

    if preset is TopPreset.LAGRANGE:
        I1, _, I3 = inertia if inertia is not None else (params.I1, params.I2, params.I3)
        return TopParams.lagrange(I1=I1, I3=I3, m=m, g=g, l=l)
    if preset is TopPreset.KOVALEVSKAYA:
        I3 = inertia[2] if inertia is not None else params.I3
        return TopParams.kovalevskaya(I3=I3, m=m, g=g, l=l)

    I1, I2, I3 = inertia if inertia is not None else (params.I1, params.I2, params.I3)
    c = overrides.get("c", params.c)
    if preset is None and inertia is None and mgl is None and "c" not in overrides:
        return params
    return TopParams(I1=I1, I2=I2, I3=I3, m=m, g=g, l=l, c=c)


def apply_overrides(run: RunConfig, overrides: Mapping[str, Any]) -> RunConfig:
    """Return run with the given flag/file values applied; strings are parsed"""
    values = {key: _coerce(key, value) for key, value in overrides.items()
              if value is not None and key != "experiment"}
    changes: Dict[str, Any] = {}
    for key, attr in (("method", "method"), ("formulation", "formulation"), ("dt", "dt"),
                      ("t_final", "t_final"), ("pi0", "Pi0"), ("gamma0", "Gamma0"),
                      ("gauge", "gauge"), ("stride", "stride"), ("output", "output_path")):
        if key in values:
            changes[attr] = values[key]
    params = _override_params(run.params, values)
    if params is not run.params:
        changes["params"] = params
    return dataclasses.replace(run, **changes) if changes else run


def resolve_runs(experiment: Optional[Experiment], overrides: Mapping[str, Any]) -> List[RunConfig]:
    """Runs of an experiment (or the default run) after overrides, without duplicates"""
    base = list(experiment.runs) if experiment else [RunConfig()]
    runs: List[RunConfig] = []
    seen = set()
    for run in base:
        run = apply_overrides(run, overrides)
        key = run.identity_key()
        if key in seen:
            logger.debug(f"Dropping duplicate run '{run.name}' after overrides")
            continue
        seen.add(key)
        runs.append(run)
    return runs
