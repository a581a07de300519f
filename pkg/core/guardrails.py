# core/guardrails.py
from typing import Any, Dict

import numpy as np

from core.experiments import RunConfig
from core.integrators import Formulation
from core.observability import observability

LONG_RUN_STEPS = 10_000_000
UNIT_GAMMA_TOL = 1e-12


class ConfigGuardrails:
    """Validates run configurations before any integration starts"""

    def __init__(self):
        self.observability = observability

    def validate_run_config(self, config: RunConfig) -> Dict[str, Any]:
        """Check step sizes, horizon, stride and initial data of one run"""
        validation_result = {
            "is_valid": True,
            "warnings": [],
            "errors": [],
        }

        if not (np.isfinite(config.dt) and config.dt > 0.0):
            validation_result["errors"].append(f"dt must be positive, got {config.dt}")
        if not (np.isfinite(config.t_final) and config.t_final > 0.0):
            validation_result["errors"].append(f"t_final must be positive, got {config.t_final}")
        if config.stride < 1:
            validation_result["errors"].append(f"stride must be at least 1, got {config.stride}")

        Pi0 = np.asarray(config.Pi0, dtype=np.float64)
        Gamma0 = np.asarray(config.Gamma0, dtype=np.float64)
        if not (np.all(np.isfinite(Pi0)) and np.all(np.isfinite(Gamma0))):
            validation_result["errors"].append("initial Pi0 and Gamma0 must be finite")
        else:
            gamma_norm = float(np.linalg.norm(Gamma0))
            if config.formulation is Formulation.COLLECTIVE and gamma_norm == 0.0:
                validation_result["errors"].append("Gamma0 must be nonzero for the collective formulation")
            elif abs(gamma_norm - 1.0) > UNIT_GAMMA_TOL:
                validation_result["warnings"].append(
                    f"|Gamma0| = {gamma_norm:.6g}; the physical direction of gravity is a unit vector"
                )

        if not validation_result["errors"]:
            if config.t_final < config.dt / 2.0:
                validation_result["warnings"].append("t_final < dt/2: the run takes no steps")
            elif config.n_steps > LONG_RUN_STEPS:
                validation_result["warnings"].append(
                    f"{config.n_steps} steps requested; this run will be slow"
                )

        if validation_result["errors"]:
            validation_result["is_valid"] = False
            self.observability.log_error("Run configuration rejected", run=config.name,
                                         errors=validation_result["errors"])
        for warning in validation_result["warnings"]:
            self.observability.log_warning("Run configuration warning", run=config.name, warning=warning)

        return validation_result
