"""Quantum-trajectory simulation of a driven, lossy atom-cavity system.

The package computes atom-field entanglement (log negativity and related
measures) for a single two-level atom coupled to a damped, coherently
driven cavity mode, by Monte Carlo wavefunction unraveling of the master
equation, and cross-checks the results against a direct master-equation
solver and closed-form weak-drive perturbation theory.

Modules
-------
hilbert      composite-space operators, states, partial trace/transpose
model        system parameters, Hamiltonians, collapse operators
trajectory   stochastic wavefunction integrator and ensemble averaging
measures     entanglement and purity measures on states and ensembles
weakfield    closed-form weak-drive amplitudes and entanglement laws
steadystate  dense master-equation oracle (steady state and evolution)
scenarios    named sweeps with CSV/JSON output
cli          the `cavity-traj` command-line front end
"""

from . import hilbert, measures, model, scenarios, steadystate, trajectory, weakfield
from .errors import (
    CavityTrajError,
    ConfigError,
    ConvergenceError,
    InvalidDimensionError,
    InvalidParameterError,
    NonUniqueSteadyStateError,
    OutOfRegimeError,
    TruncationError,
    UndefinedCorrelationError,
    ZeroNormError,
)
from .hilbert import SpaceDims
from .measures import DensityMatrix, EntanglementSeries, log_negativity
from .model import SystemParams
from .scenarios import ScenarioConfig, builtin_scenarios, run_scenario
from .steadystate import liouvillian, steady_state
from .trajectory import EnsembleResult, TrajectoryRecord, run_ensemble, run_trajectory

__version__ = "0.1.0"

__all__ = [
    "__version__",
    "CavityTrajError",
    "ConfigError",
    "ConvergenceError",
    "InvalidDimensionError",
    "InvalidParameterError",
    "NonUniqueSteadyStateError",
    "OutOfRegimeError",
    "TruncationError",
    "UndefinedCorrelationError",
    "ZeroNormError",
    "SpaceDims",
    "SystemParams",
    "DensityMatrix",
    "EntanglementSeries",
    "log_negativity",
    "TrajectoryRecord",
    "EnsembleResult",
    "run_trajectory",
    "run_ensemble",
    "liouvillian",
    "steady_state",
    "ScenarioConfig",
    "builtin_scenarios",
    "run_scenario",
    "hilbert",
    "model",
    "trajectory",
    "measures",
    "weakfield",
    "steadystate",
    "scenarios",
    "cli",
]

from . import cli  # noqa: E402  (imports scenarios; kept last to avoid cycles)
