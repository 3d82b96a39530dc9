"""End-to-end recycling pipeline: HHL, failure-branch reset into the bath, erasure.

Six-qubit register ``[S, B, C_I, C_C1, C_C2, C_A]``. The failure branch of
HHL is swapped into the bath ``B`` (reset of ``C_I``), and the now athermal
bath erases the target ``S`` by a second SWAP. The reference run erases ``S``
against the untouched thermal bath in the success branch.
"""
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from enum import Enum

import numpy as np

from . import hhl as circuit
from . import qstate, tomography
from .bath import (
    INFEASIBLE,
    AthermalSummary,
    BathSpec,
    erasure_bounds,
)
from .errors import DegenerateBranchError, DomainError, InfeasibleError
from .units import reduced_temperature

S_Q, B_Q, CI_Q, CC1_Q, CC2_Q, CA_Q = range(6)
DIMS = [2] * 6
COMP = [CI_Q, CC1_Q, CC2_Q, CA_Q]
ERASURE_TOL = 1e-12

# (single-qubit layers, two-qubit gates) per touched qubit for each logical
# stage; the totals sum to a depth of 100.
STAGE_COST = {
    "hadamard": (1, 0),
    "c-exp(iAt*1)": (11, 2),
    "c-exp(iAt*2)": (11, 2),
    "iqft": (8, 2),
    "rotation": (22, 4),
}
STAGE_QUBITS = {
    "hadamard": [circuit.CLOCK_HI, circuit.CLOCK_LO],
    "c-exp(iAt*1)": [circuit.INPUT, circuit.CLOCK_LO],
    "c-exp(iAt*2)": [circuit.INPUT, circuit.CLOCK_HI],
    "iqft": [circuit.CLOCK_HI, circuit.CLOCK_LO],
    "rotation": [circuit.CLOCK_HI, circuit.CLOCK_LO, circuit.ANCILLA],
}


def _base_stage(name):
    return name[:-4] if name.endswith("^dag") else name


def stage_depth(name):
    return sum(STAGE_COST[_base_stage(name)])


@dataclass(frozen=True)
class NoiseModel:
    """Gate depolarization and T1 relaxation; times in microseconds."""

    enabled: bool = False
    t1: float = 397.0
    latency_ff: float = 3.3
    duration_algo: float = 4.0
    p1: float = 1e-4
    p2: float = 5e-3
    comp_init_excitation: float = None

    def __post_init__(self):
        for name in ("p1", "p2"):
            if not 0 <= getattr(self, name) <= 1:
                raise DomainError(f"{name} must be a probability")
        for name in ("t1", "latency_ff", "duration_algo"):
            if not getattr(self, name) > 0:
                raise DomainError(f"{name} must be positive")
        e = self.comp_init_excitation
        if e is not None and not 0 <= e <= 0.5:
            raise DomainError("comp_init_excitation must lie in [0, 1/2]")

    def stage_depolarizing(self, name):
        n1, n2 = STAGE_COST[_base_stage(name)]
        return 1 - (1 - self.p1) ** n1 * (1 - self.p2) ** n2


def default_bath(freq_ghz=5.0, t0_mk=43.0):
    return BathSpec.qubit(reduced_temperature(freq_ghz, t0_mk))


@dataclass(frozen=True)
class ProtocolConfig:
    theta_b: float = 0.0
    p_x: float = 0.4
    bath: BathSpec = field(default_factory=default_bath)
    hhl: circuit.HhlParams = field(default_factory=lambda: circuit.HhlParams(angle_mode="simplified"))
    noise: NoiseModel = field(default_factory=NoiseModel)
    seed: int = 0
    shots_per_basis: int = 8000
    trials: int = 5

    def __post_init__(self):
        if not 0 <= self.p_x <= 0.5:
            raise DomainError(f"p_x = {self.p_x} outside [0, 1/2]")
        if self.bath.dim != 2:
            raise DomainError("the pipeline swaps qubits; the bath must be a single qubit")
        circuit.HhlInstance(self.theta_b)

    @property
    def instance(self):
        return circuit.HhlInstance(self.theta_b)

    @property
    def comp_excitation(self):
        if not self.noise.enabled:
            return 0.0 if self.noise.comp_init_excitation is None else self.noise.comp_init_excitation
        if self.noise.comp_init_excitation is None:
            return self.bath.thermal.populations[1]
        return self.noise.comp_init_excitation


@dataclass(frozen=True)
class ProtocolResult:
    theta_b: float
    p_x: float
    p_fail: float
    rho_ath: object
    delta_S: float
    delta_Q: float
    bounds: object
    fidelity_success: float
    equality_gap: float
    flags: frozenset
    bath_entropy_final: float = None
    bath_entropy_initial: float = None
    trial: int = None

    @property
    def degenerate_branch(self):
        return "degenerate_branch" in self.flags

    @property
    def erasure_failed(self):
        return "erasure_failed" in self.flags

    @property
    def q_landauer(self):
        return None if self.bounds is None else self.bounds.q_landauer

    @property
    def q_tight(self):
        return None if self.bounds is None else self.bounds.q_tight

    @property
    def q_ath(self):
        return None if self.bounds is None else self.bounds.q_ath

    @property
    def gain(self):
        return None if self.bounds is None else self.bounds.gain


def _relax(rho, qubits, duration, cfg, p_eq):
    for q in qubits:
        rho = qstate.apply_channel(
            rho, qstate.Channel.relaxation(q, duration, cfg.noise.t1, p_eq), DIMS
        )
    return rho


def run_algorithm(cfg):
    """Prepare the register and apply the (optionally noisy) HHL stages."""
    spec = cfg.bath
    p_th = spec.thermal.populations[1]
    rho_s = np.diag([1 - cfg.p_x, cfg.p_x]).astype(complex)
    rho_b = spec.thermal.state
    rho = qstate.kron(rho_s, rho_b, circuit.prepare_input(cfg.instance, cfg.comp_excitation))
    noise = cfg.noise
    stages = circuit.algorithm_stages(cfg.hhl)
    total_depth = sum(stage_depth(name) for name, _ in stages)
    for name, u in stages:
        rho = qstate.apply_operator(rho, u, COMP, DIMS)
        if not noise.enabled:
            continue
        p = noise.stage_depolarizing(name)
        for q in STAGE_QUBITS[_base_stage(name)]:
            rho = qstate.apply_channel(rho, qstate.Channel.depolarizing(q + CI_Q, p), DIMS)
        dt = noise.duration_algo * stage_depth(name) / total_depth
        rho = _relax(rho, [B_Q] + COMP, dt, cfg, p_th)
    return rho_s, rho


def _branch(rho, cfg, outcome):
    try:
        return qstate.measure_branch(rho, CA_Q, outcome, DIMS)
    except DegenerateBranchError as exc:
        return exc.probability, None


def _success_fidelity(rho, cfg):
    _, post = _branch(rho, cfg, cfg.hhl.success_outcome)
    if post is None:
        return None, None
    rho_ci = qstate.partial_trace(post, [CI_Q], DIMS)
    return rho_ci, qstate.fidelity_with_pure(rho_ci, circuit.ideal_solution(cfg.instance))


def _thermo(spec, rho_s, rho_s_after, rho_b_before, rho_b_after):
    delta_S = qstate.von_neumann_entropy(rho_s) - qstate.von_neumann_entropy(rho_s_after)
    delta_Q = qstate.energy(rho_b_after, spec.levels) - qstate.energy(rho_b_before, spec.levels)
    flags = set()
    bounds = None
    if delta_S <= ERASURE_TOL:
        flags.add("erasure_failed")
    if delta_S >= -ERASURE_TOL:
        try:
            bounds = erasure_bounds(
                spec, max(delta_S, 0.0), AthermalSummary.from_state(spec, rho_b_before)
            )
        except InfeasibleError:
            flags.add("bound_infeasible")
    if bounds is not None and bounds.q_tight is INFEASIBLE:
        flags.add("tight_infeasible")
    gap = None if bounds is None else delta_Q - bounds.q_ath
    return delta_S, delta_Q, bounds, gap, flags


def _estimate(rho, cfg, rng):
    est = tomography.estimate_state(rho, cfg.shots_per_basis, rng)
    return est.projected


def _finish(cfg, p_fail, rho_s, rho_s_after, rho_b_before, rho_b_after, rho_ci_suc, fidelity, trial, flags):
    spec = cfg.bath
    if trial is not None and cfg.shots_per_basis > 0:
        rng = np.random.default_rng(trial_seed(cfg.seed, trial))
        rho_s, rho_s_after, rho_b_before, rho_b_after = (
            _estimate(r, cfg, rng) for r in (rho_s, rho_s_after, rho_b_before, rho_b_after)
        )
        if rho_ci_suc is not None:
            fidelity = qstate.fidelity_with_pure(
                _estimate(rho_ci_suc, cfg, rng), circuit.ideal_solution(cfg.instance)
            )
    delta_S, delta_Q, bounds, gap, more = _thermo(spec, rho_s, rho_s_after, rho_b_before, rho_b_after)
    return ProtocolResult(
        theta_b=cfg.theta_b,
        p_x=cfg.p_x,
        p_fail=p_fail,
        rho_ath=rho_b_before,
        delta_S=delta_S,
        delta_Q=delta_Q,
        bounds=bounds,
        fidelity_success=fidelity,
        equality_gap=gap,
        flags=frozenset(flags | more),
        bath_entropy_final=qstate.von_neumann_entropy(rho_b_after),
        bath_entropy_initial=qstate.von_neumann_entropy(rho_b_before),
        trial=trial,
    )


def trial_seed(master, trial, value_index=0):
    return int(np.random.SeedSequence([int(master), int(value_index), int(trial)]).generate_state(1)[0])


def run_recycling(cfg, trial=None):
    """Recycle the HHL failure branch as an athermal bath and erase ``S`` against it.

    With ``trial`` set (and ``shots_per_basis > 0``) the thermodynamic
    quantities are computed from tomography estimates seeded by
    ``(cfg.seed, trial)``; otherwise they are exact.
    """
    spec = cfg.bath
    rho_s, rho = run_algorithm(cfg)
    rho_ci_suc, fidelity = _success_fidelity(rho, cfg)
    p_fail, rho = _branch(rho, cfg, cfg.hhl.failure_outcome)
    if rho is None:
        return ProtocolResult(
            theta_b=cfg.theta_b,
            p_x=cfg.p_x,
            p_fail=p_fail,
            rho_ath=None,
            delta_S=None,
            delta_Q=None,
            bounds=None,
            fidelity_success=fidelity,
            equality_gap=None,
            flags=frozenset({"degenerate_branch"}),
            trial=trial,
        )
    if cfg.noise.enabled:
        rho = _relax(rho, [B_Q, CI_Q], cfg.noise.latency_ff, cfg, spec.thermal.populations[1])
    rho = qstate.apply_operator(rho, qstate.SWAP, [B_Q, CI_Q], DIMS)
    rho_ath = qstate.partial_trace(rho, [B_Q], DIMS)
    rho = qstate.apply_operator(rho, qstate.SWAP, [S_Q, B_Q], DIMS)
    return _finish(
        cfg,
        p_fail,
        rho_s,
        qstate.partial_trace(rho, [S_Q], DIMS),
        rho_ath,
        qstate.partial_trace(rho, [B_Q], DIMS),
        rho_ci_suc,
        fidelity,
        trial,
        set(),
    )


def run_reference(cfg, trial=None):
    """Erase ``S`` against the thermal bath in the HHL success branch (no feedforward)."""
    rho_s, rho = run_algorithm(cfg)
    rho_ci_suc, fidelity = _success_fidelity(rho, cfg)
    p_succ, rho = _branch(rho, cfg, cfg.hhl.success_outcome)
    if rho is None:
        raise DegenerateBranchError("success branch has zero probability", probability=p_succ)
    rho_b = qstate.partial_trace(rho, [B_Q], DIMS)
    rho = qstate.apply_operator(rho, qstate.SWAP, [S_Q, B_Q], DIMS)
    return _finish(
        cfg,
        1.0 - p_succ,
        rho_s,
        qstate.partial_trace(rho, [S_Q], DIMS),
        rho_b,
        qstate.partial_trace(rho, [B_Q], DIMS),
        rho_ci_suc,
        fidelity,
        trial,
        set(),
    )


# --- sweeps ---


class Axis(str, Enum):
    THETA_B = "theta_b"
    P_X = "p_x"
    BATH_FREQ = "bath_freq_ghz"


SUMMARY_METRICS = (
    "p_fail",
    "delta_S",
    "delta_Q",
    "q_landauer",
    "q_tight",
    "q_ath",
    "gain",
    "fidelity_success",
)
THERMO_METRICS = frozenset(SUMMARY_METRICS) - {"p_fail", "fidelity_success"}


@dataclass(frozen=True)
class SweepRow:
    value_index: int
    value: float
    trial: int
    result: ProtocolResult


@dataclass(frozen=True)
class MedianRow:
    value_index: int
    value: float
    theta_b: float
    p_x: float
    metrics: dict
    n_trials: int


@dataclass(frozen=True)
class ResultTable:
    axis: Axis
    rows: list
    medians: list


def _configure(template, axis, value, t0_mk=43.0):
    if axis is Axis.THETA_B:
        return replace(template, theta_b=float(value))
    if axis is Axis.P_X:
        return replace(template, p_x=float(value))
    return replace(template, bath=BathSpec.qubit(reduced_temperature(float(value), t0_mk)))


def _run_point(job):
    runner, cfg, trial = job
    return runner(cfg, trial=trial)


def _metric(result, name):
    v = getattr(result, name)
    if v is INFEASIBLE:
        return math.inf
    return v


def summarize_row_group(rows):
    metrics = {}
    for name in SUMMARY_METRICS:
        use = rows
        if name in THERMO_METRICS:
            use = [r for r in rows if not r.result.erasure_failed and not r.result.degenerate_branch]
        vals = [_metric(r.result, name) for r in use]
        vals = [v for v in vals if v is not None]
        metrics[name] = tomography.summarize_trials(vals)["median"] if vals else None
    return metrics


def sweep(template, axis, values, runner=None, workers=1, t0_mk=43.0):
    """Evaluate ``runner`` (default :func:`run_recycling`) over an axis and all trials.

    Each point's trial ``k`` uses ``trial_seed(template.seed, k, value_index)``
    through a per-point seed, so results do not depend on ``workers``.
    """
    axis = Axis(axis)
    values = list(values)
    if not values:
        raise DomainError("sweep needs at least one value")
    runner = run_recycling if runner is None else runner
    jobs, points = [], []
    for i, v in enumerate(values):
        cfg = _configure(template, axis, v, t0_mk)
        cfg = replace(cfg, seed=trial_seed(template.seed, 0, i))
        for k in range(template.trials):
            jobs.append((runner, cfg, k))
            points.append((i, k))
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_run_point, jobs))
    else:
        results = [_run_point(j) for j in jobs]
    rows = [SweepRow(i, float(values[i]), k, res) for (i, k), res in zip(points, results)]
    medians = []
    for i, v in enumerate(values):
        group = [r for r in rows if r.value_index == i]
        cfg = _configure(template, axis, v, t0_mk)
        medians.append(MedianRow(i, float(v), cfg.theta_b, cfg.p_x, summarize_row_group(group), len(group)))
    return ResultTable(axis, rows, medians)
