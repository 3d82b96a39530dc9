"""Four-qubit HHL for the 2x2 system ``A = [[2, -1], [-1, 2]]``.

Register order: ``[C_I, C_C1, C_C2, C_A]`` (input/output qubit, clock with
``C_C1`` the most significant bit, rotation ancilla). The clock value ``k``
encodes the eigenphase ``k / 4``.
"""
import math
from dataclasses import dataclass
from enum import Enum

import numpy as np
from scipy.linalg import expm

from . import qstate
from .errors import DegenerateBranchError, DomainError, PhaseEncodingError

A_MATRIX = np.array([[2.0, -1.0], [-1.0, 2.0]])
EIGENVALUES = (1.0, 3.0)
EIGENVECTORS = (
    np.array([1.0, 1.0]) / math.sqrt(2),
    np.array([1.0, -1.0]) / math.sqrt(2),
)
DIMS = [2, 2, 2, 2]
INPUT, CLOCK_HI, CLOCK_LO, ANCILLA = 0, 1, 2, 3
CLOCK_BITS = 2
PHASE_TOL = 1e-9


class AngleMode(str, Enum):
    EXACT = "exact"
    SIMPLIFIED = "simplified"


SIMPLIFIED_ANGLES = {1.0: math.pi, 3.0: math.pi / 3}


@dataclass(frozen=True)
class HhlInstance:
    theta_b: float

    def __post_init__(self):
        if not -1e-12 <= self.theta_b <= math.pi / 4 + 1e-12:
            raise DomainError(f"theta_b = {self.theta_b} outside [0, pi/4]")

    @property
    def b(self):
        return np.array([math.cos(self.theta_b), math.sin(self.theta_b)])

    @property
    def eigen_overlaps(self):
        """Coefficients ``<u_i|b>`` in the eigenbasis of ``A``."""
        return tuple(float(u @ self.b) for u in EIGENVECTORS)


@dataclass(frozen=True)
class HhlParams:
    C: float = 1.0
    t: float = math.pi / 2
    angle_mode: AngleMode = AngleMode.EXACT
    success_outcome: int = 1

    def __post_init__(self):
        object.__setattr__(self, "angle_mode", AngleMode(self.angle_mode))
        if not 0 < self.C <= min(EIGENVALUES):
            raise DomainError(f"rotation constant C = {self.C} outside (0, 1]")
        if self.success_outcome not in (0, 1):
            raise DomainError("success outcome must be 0 or 1")

    @property
    def failure_outcome(self):
        return 1 - self.success_outcome

    def rotation_angle(self, lam):
        if self.angle_mode is AngleMode.SIMPLIFIED:
            return SIMPLIFIED_ANGLES[lam]
        return 2 * math.asin(self.C / lam)

    def amplitudes(self, lam):
        """(success, failure) amplitudes of the ancilla for eigenvalue ``lam``."""
        theta = self.rotation_angle(lam)
        excited, ground = math.sin(theta / 2), math.cos(theta / 2)
        return (excited, ground) if self.success_outcome == 1 else (ground, excited)


def ideal_solution(inst):
    """Normalized ``A^-1 b`` with a non-negative first component."""
    x = np.linalg.solve(A_MATRIX, inst.b)
    x = x / np.linalg.norm(x)
    return -x if x[0] < 0 else x


def clock_index(lam, t):
    """Clock basis state that exact phase estimation assigns to ``lam``."""
    k = (2 ** CLOCK_BITS) * lam * t / (2 * math.pi)
    nearest = round(k)
    if abs(k - nearest) > PHASE_TOL:
        raise PhaseEncodingError(
            f"eigenvalue {lam} with t={t} gives clock value {k:.6g}, not an integer"
        )
    return int(nearest) % (2 ** CLOCK_BITS)


def _clock_qft():
    n = 2 ** CLOCK_BITS
    w = np.exp(2j * math.pi / n)
    return np.array([[w ** (j * k) for k in range(n)] for j in range(n)]) / math.sqrt(n)


def algorithm_stages(params):
    """Ordered ``(name, unitary)`` stages of the HHL circuit on the 16-dim register.

    Phase estimation, eigenvalue-conditioned ancilla rotation, and the inverse
    of phase estimation.
    """
    idx = {lam: clock_index(lam, params.t) for lam in EIGENVALUES}
    if len(set(idx.values())) != len(idx):
        raise PhaseEncodingError(f"eigenvalues share a clock state: {idx}")

    hadamards = qstate.embed(np.kron(qstate.HADAMARD, qstate.HADAMARD), [CLOCK_HI, CLOCK_LO], DIMS)
    proj1 = np.diag([0.0, 1.0])
    evolutions = []
    for control, power in ((CLOCK_LO, 1), (CLOCK_HI, 2)):
        generator = qstate.embed(np.kron(A_MATRIX, proj1), [INPUT, control], DIMS)
        evolutions.append((f"c-exp(iAt*{power})", expm(1j * params.t * power * generator)))
    iqft = qstate.embed(_clock_qft().conj().T, [CLOCK_HI, CLOCK_LO], DIMS)

    rotation = np.zeros((8, 8), dtype=complex)
    for k in range(2 ** CLOCK_BITS):
        block = np.eye(2, dtype=complex)
        for lam, kk in idx.items():
            if kk == k:
                block = qstate.ry(params.rotation_angle(lam))
        rotation[2 * k:2 * k + 2, 2 * k:2 * k + 2] = block
    rotation = qstate.embed(rotation, [CLOCK_HI, CLOCK_LO, ANCILLA], DIMS)

    forward = [("hadamard", hadamards), *evolutions, ("iqft", iqft)]
    backward = [(f"{name}^dag", u.conj().T) for name, u in reversed(forward)]
    return forward + [("rotation", rotation)] + backward


def build_algorithm_unitary(inst, params):
    """Full 16x16 HHL unitary on ``C_I (x) C_C (x) C_A``."""
    u = np.eye(16, dtype=complex)
    for _, stage in algorithm_stages(params):
        u = stage @ u
    return qstate.validate_unitary(u)


def prepare_input(inst, excitation=0.0):
    """Initial 16-dim state: ``b`` on ``C_I`` over (possibly excited) idle qubits."""
    idle = np.diag([1 - excitation, excitation]).astype(complex)
    rho = qstate.kron(idle, idle, idle, idle)
    return qstate.apply_operator(rho, qstate.ry(2 * inst.theta_b), [INPUT], DIMS)


@dataclass(frozen=True)
class BranchResult:
    p_success: float
    p_fail: float
    success_state: np.ndarray
    failure_state: object
    fidelity: float
    degenerate: bool


def split_branches(rho, params, dims=DIMS, ancilla=ANCILLA, keep=INPUT):
    """Measure the ancilla; return probabilities and reduced ``C_I`` states per branch."""
    out = {}
    for label, outcome in (("success", params.success_outcome), ("failure", params.failure_outcome)):
        try:
            p, post = qstate.measure_branch(rho, ancilla, outcome, dims)
        except DegenerateBranchError as exc:
            out[label] = (exc.probability, None, None)
            continue
        out[label] = (p, qstate.partial_trace(post, [keep], dims), post)
    return out


def branch_analysis(inst, params):
    u = build_algorithm_unitary(inst, params)
    rho = u @ prepare_input(inst) @ u.conj().T
    br = split_branches(rho, params)
    p_s, rho_s, _ = br["success"]
    p_f, rho_f, _ = br["failure"]
    if rho_s is None:
        raise DegenerateBranchError("success branch has zero probability", probability=p_s)
    fid = qstate.fidelity_with_pure(rho_s, ideal_solution(inst))
    return BranchResult(
        p_success=p_s,
        p_fail=p_f,
        success_state=rho_s,
        failure_state=rho_f,
        fidelity=fid,
        degenerate=rho_f is None,
    )


def analytic_failure_state(inst, params):
    """Normalized ``sum_i <u_i|b> f_i |u_i>`` with ``f_i`` the failure amplitudes."""
    vec = np.zeros(2)
    for lam, u, beta in zip(EIGENVALUES, EIGENVECTORS, inst.eigen_overlaps):
        vec += beta * params.amplitudes(lam)[1] * u
    norm = np.linalg.norm(vec)
    return norm ** 2, (vec / norm if norm ** 2 > qstate.BRANCH_FLOOR else None)
