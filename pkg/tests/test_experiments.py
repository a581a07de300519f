import math

import pytest

from core.errors import ConfigError, UnknownExperimentError
from core.experiments import (
    CONVERGENCE_DTS,
    ExperimentKind,
    RunConfig,
    apply_overrides,
    experiment_presets,
    get_experiment,
    load_config_file,
    parse_number,
    parse_vec3,
    resolve_runs,
)
from core.guardrails import ConfigGuardrails
from core.hamiltonians import TopPreset
from core.integrators import Formulation, Method
from core.maps import GaugeMode, LiftGauge


def test_fig1_preset_expands_to_kovalevskaya_runs():
    experiment = get_experiment("kovalevskaya-fig1")
    assert [run.name for run in experiment.runs] == ["explicit-collective", "explicit-direct", "implicit-collective"]
    for run in experiment.runs:
        assert run.dt == 1.0 / 50.0
        assert run.t_final == 200.0
        assert run.Pi0 == (2.0, 3.0, 4.0)
        assert run.Gamma0 == (0.5, 0.0, math.sqrt(3.0) / 2.0)
        assert run.gauge.mode is GaugeMode.FIX_RE_CHI1 and run.gauge.value == 1.0
        assert run.preset is TopPreset.KOVALEVSKAYA
    assert [(run.method, run.formulation) for run in experiment.runs] == [
        (Method.EXPLICIT_MIDPOINT, Formulation.COLLECTIVE),
        (Method.EXPLICIT_MIDPOINT, Formulation.DIRECT),
        (Method.IMPLICIT_MIDPOINT, Formulation.COLLECTIVE),
    ]


def test_other_presets():
    presets = experiment_presets()
    assert set(presets) >= {"kovalevskaya-fig1", "kovalevskaya-fig2", "lagrange-demo", "convergence"}
    fig2 = presets["kovalevskaya-fig2"]
    assert {(run.method, run.formulation) for run in fig2.runs} == {
        (Method.IMPLICIT_MIDPOINT, Formulation.DIRECT),
        (Method.IMPLICIT_MIDPOINT, Formulation.COLLECTIVE),
    }
    assert all(run.preset is TopPreset.LAGRANGE for run in presets["lagrange-demo"].runs)
    convergence = presets["convergence"]
    assert convergence.kind is ExperimentKind.CONVERGENCE
    assert convergence.dts == CONVERGENCE_DTS == (1 / 25, 1 / 50, 1 / 100, 1 / 200)
    assert all(run.t_final == 5.0 for run in convergence.runs)
    assert presets["commuting-flows"].kind is ExperimentKind.COMMUTING_FLOWS


def test_unknown_experiment():
    with pytest.raises(UnknownExperimentError) as info:
        get_experiment("kovalevskaya-fig3")
    assert "kovalevskaya-fig1" in str(info.value)


@pytest.mark.parametrize("text, value", [("0.02", 0.02), ("1/50", 0.02), (" 5 ", 5.0), ("1e-4", 1e-4)])
def test_parse_number(text, value):
    assert parse_number(text) == value


def test_parse_errors():
    with pytest.raises(ConfigError):
        parse_number("fast")
    with pytest.raises(ConfigError):
        parse_number("1/0")
    with pytest.raises(ConfigError):
        parse_vec3("1,2")
    assert parse_vec3("1/2, 0, 2") == (0.5, 0.0, 2.0)


def test_load_config_file(tmp_path):
    path = tmp_path / "run.cfg"
    path.write_text("# Kovalevskaya, direct\nexperiment = kovalevskaya-fig2\n\nt-final = 10  # short\nmethod=rk4\n")
    assert load_config_file(path) == {"experiment": "kovalevskaya-fig2", "t_final": "10", "method": "rk4"}


def test_load_config_file_rejects_bad_lines(tmp_path):
    path = tmp_path / "bad.cfg"
    path.write_text("dt 0.02\n")
    with pytest.raises(ConfigError, match="bad.cfg:1"):
        load_config_file(path)
    path.write_text("speed = 3\n")
    with pytest.raises(ConfigError, match="unknown key"):
        load_config_file(path)


def test_apply_overrides_parses_strings():
    run = apply_overrides(RunConfig(), {
        "method": "rk4", "formulation": "direct", "dt": "1/100", "t_final": "3",
        "pi0": "1,0,0", "gauge": "free", "stride": "5", "output": "out.csv",
    })
    assert run.method is Method.RK4 and run.formulation is Formulation.DIRECT
    assert run.dt == 0.01 and run.t_final == 3.0 and run.stride == 5
    assert run.Pi0 == (1.0, 0.0, 0.0)
    assert run.gauge == LiftGauge.free()
    assert run.output_path == "out.csv"
    assert run.n_steps == 300


def test_apply_overrides_rejects_bad_enum():
    with pytest.raises(ConfigError, match="expected one of"):
        apply_overrides(RunConfig(), {"method": "leapfrog"})


def test_parameter_overrides():
    base = RunConfig()
    assert apply_overrides(base, {}) is base
    lagrange = apply_overrides(base, {"preset": "lagrange", "inertia": "3,3,1"}).params
    assert lagrange.preset is TopPreset.LAGRANGE and lagrange.I1 == 3.0
    general = apply_overrides(base, {"inertia": "1,2,3", "mgl": "2,1,0.5", "c": "0,0,1"}).params
    assert (general.I1, general.I2, general.I3, general.mgl) == (1.0, 2.0, 3.0, 1.0)
    assert general.c == (0.0, 0.0, 1.0)
    kovalevskaya = apply_overrides(base, {"preset": "kovalevskaya", "inertia": "4,4,2"}).params
    assert (kovalevskaya.I1, kovalevskaya.I3) == (4.0, 2.0)


def test_resolve_runs_drops_duplicates():
    runs = resolve_runs(get_experiment("kovalevskaya-fig1"), {"method": "implicit-midpoint", "formulation": "collective"})
    assert [run.name for run in runs] == ["explicit-collective"]
    assert runs[0].method is Method.IMPLICIT_MIDPOINT
    assert len(resolve_runs(get_experiment("kovalevskaya-fig1"), {"t_final": "1"})) == 3
    assert resolve_runs(None, {})[0] == RunConfig()


def test_initial_state_lifts_collective_runs():
    run = RunConfig(t_final=1.0)
    assert run.initial_state().shape == (8,)
    assert run.initial_state()[0] == pytest.approx(1.0, abs=1e-12)
    direct = apply_overrides(run, {"formulation": "direct"})
    assert direct.initial_state().tolist() == [2.0, 3.0, 4.0, 0.5, 0.0, math.sqrt(3.0) / 2.0]


def test_guardrails():
    guardrails = ConfigGuardrails()
    assert guardrails.validate_run_config(RunConfig())["is_valid"]

    result = guardrails.validate_run_config(RunConfig(Gamma0=(0.0, 0.0, 0.0)))
    assert not result["is_valid"]
    assert any("Gamma0" in message for message in result["errors"])

    direct = RunConfig(Gamma0=(0.0, 0.0, 0.0), formulation=Formulation.DIRECT)
    assert guardrails.validate_run_config(direct)["is_valid"]

    result = guardrails.validate_run_config(RunConfig(Gamma0=(0.0, 0.0, 2.0), t_final=0.001))
    assert result["is_valid"]
    assert len(result["warnings"]) == 2

    result = guardrails.validate_run_config(RunConfig(stride=0, Pi0=(float("nan"), 0.0, 0.0)))
    assert not result["is_valid"]
    assert len(result["errors"]) == 2
