"""Finite-bath erasure bounds and recycling of HHL failure branches as athermal baths."""
__version__ = "0.1.0"

from .bath import (
    INFEASIBLE,
    AthermalSummary,
    BathSpec,
    BranchEnsemble,
    ErasureBounds,
    branch_mixture_analysis,
    energy_of_entropy,
    erasure_bounds,
    gain,
    is_feasible,
    s_max_threshold,
    s_max_tradeoff_check,
    temperature_of_entropy,
)
from .errors import ThermoRecycleError
from .hhl import AngleMode, HhlInstance, HhlParams, branch_analysis
from .kernels import BACKEND
from .latency import LatencyDataset, LatencyFit, fit_gate_time, synthesize_dataset
from .protocol import NoiseModel, ProtocolConfig, run_recycling, run_reference, sweep
from .tomography import estimate_state
