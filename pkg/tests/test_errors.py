import pickle

import pytest

from core.errors import (
    CollectiveTopError,
    ConfigError,
    NewtonDivergedError,
    UnknownExperimentError,
    ZeroGammaError,
)


@pytest.mark.parametrize("error", [
    NewtonDivergedError(50, 1.5e-3, step_index=7),
    UnknownExperimentError("fig3", ["kovalevskaya-fig1", "convergence"]),
    ConfigError("invalid run configuration: a: dt must be positive", ["a: dt must be positive"]),
    ZeroGammaError("Gamma0 must be nonzero", step_index=0),
])
def test_errors_survive_pickling(error):
    restored = pickle.loads(pickle.dumps(error))
    assert type(restored) is type(error)
    assert str(restored) == str(error)
    assert restored.__dict__ == error.__dict__


def test_newton_error_keeps_diagnostics_through_pickling():
    error = NewtonDivergedError(12, 0.25)
    error.step_index = 3
    restored = pickle.loads(pickle.dumps(error))
    assert (restored.iterations, restored.residual, restored.step_index) == (12, 0.25, 3)
    assert str(restored).endswith("(residual 2.500e-01) (at step 3)")
    assert isinstance(restored, CollectiveTopError)
