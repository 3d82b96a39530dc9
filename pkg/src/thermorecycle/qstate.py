"""Dense density-matrix mechanics for small qubit registers.

States are plain complex ``numpy`` arrays. Multi-partite operands carry a
``dims`` list; subsystem 0 is the most significant tensor factor, so a
register ``[a, b, c]`` has basis index ``i_a * d_b * d_c + i_b * d_c + i_c``.
"""
from dataclasses import dataclass
from enum import Enum
from functools import reduce

import numpy as np

from .errors import (
    DegenerateBranchError,
    InvalidOperatorError,
    InvalidStateError,
    NormalizationError,
    ShapeError,
)

ATOL = 1e-9
CLAMP_FLOOR = -1e-6
BRANCH_FLOOR = 1e-12

PAULI_I = np.eye(2, dtype=complex)
PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)
PAULI_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=complex)
HADAMARD = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)
SWAP = np.array(
    [[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]], dtype=complex
)


def ry(theta):
    """Single-qubit Y rotation ``exp(-i theta Y / 2)``."""
    c, s = np.cos(theta / 2), np.sin(theta / 2)
    return np.array([[c, -s], [s, c]], dtype=complex)


def kron(*ops):
    return reduce(np.kron, ops)


def ket(amplitudes):
    v = np.asarray(amplitudes, dtype=complex).reshape(-1)
    return v


def pure(amplitudes):
    """Density matrix ``|psi><psi|`` of a (normalized) amplitude vector."""
    v = ket(amplitudes)
    norm = np.linalg.norm(v)
    if abs(norm - 1) > ATOL:
        raise NormalizationError(f"state vector has norm {norm}")
    return np.outer(v, v.conj())


def basis_state(index, dim):
    rho = np.zeros((dim, dim), dtype=complex)
    rho[index, index] = 1
    return rho


def maximally_mixed(dim):
    return np.eye(dim, dtype=complex) / dim


def validate_density_matrix(rho, atol=ATOL):
    """Return ``rho`` as a complex array, raising if it is not a valid state."""
    rho = np.asarray(rho, dtype=complex)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        raise ShapeError(f"density matrix must be square, got shape {rho.shape}")
    herm = np.max(np.abs(rho - rho.conj().T))
    if herm > atol:
        raise InvalidStateError(f"matrix is not Hermitian (deviation {herm:.3g})")
    tr = np.trace(rho).real
    if abs(tr - 1) > atol:
        raise InvalidStateError(f"trace is {tr!r}, expected 1")
    lam = np.linalg.eigvalsh(rho).min()
    if lam < -atol:
        raise InvalidStateError(f"matrix has negative eigenvalue {lam:.3g}")
    return rho


def validate_unitary(u, atol=ATOL):
    u = np.asarray(u, dtype=complex)
    if u.ndim != 2 or u.shape[0] != u.shape[1]:
        raise ShapeError(f"operator must be square, got shape {u.shape}")
    dev = np.max(np.abs(u.conj().T @ u - np.eye(u.shape[0])))
    if dev > atol:
        raise InvalidOperatorError(f"operator is not unitary (deviation {dev:.3g})")
    return u


def _check_dims(rho, dims):
    dims = [int(d) for d in dims]
    if int(np.prod(dims)) != rho.shape[0]:
        raise ShapeError(f"dims {dims} do not multiply to {rho.shape[0]}")
    return dims


def _check_targets(targets, dims):
    targets = [int(t) for t in targets]
    if len(set(targets)) != len(targets):
        raise ShapeError(f"repeated subsystem index in {targets}")
    for t in targets:
        if not 0 <= t < len(dims):
            raise ShapeError(f"subsystem index {t} out of range for {len(dims)} subsystems")
    return targets


def von_neumann_entropy(rho):
    """Entropy ``-Tr rho ln rho`` in nats.

    Eigenvalues in ``[-1e-6, 0)`` are treated as round-off and dropped.
    """
    rho = np.asarray(rho, dtype=complex)
    lam = np.linalg.eigvalsh(rho)
    if lam.min() < CLAMP_FLOOR:
        raise InvalidStateError(f"negative eigenvalue {lam.min():.3g} in entropy")
    lam = lam[lam > 0]
    return float(max(0.0, -np.sum(lam * np.log(lam))))


def partial_trace(rho, keep, dims):
    """Reduced state on the ``keep`` subsystems, in the order given."""
    rho = np.asarray(rho, dtype=complex)
    dims = _check_dims(rho, dims)
    keep = _check_targets(keep, dims)
    n = len(dims)
    t = rho.reshape(dims + dims)
    traced = [i for i in range(n) if i not in keep]
    # trace pairs from the highest axis down so earlier axis numbers stay valid
    for k, i in enumerate(sorted(traced, reverse=True)):
        m = n - k
        t = np.trace(t, axis1=i, axis2=i + m)
    remaining = sorted(keep)
    perm = [remaining.index(k) for k in keep]
    r = len(keep)
    t = t.transpose(perm + [p + r for p in perm])
    d = int(np.prod([dims[k] for k in keep])) if keep else 1
    return t.reshape(d, d)


def _apply_left(t, op, axes, n):
    """Contract ``op`` into tensor axes ``axes`` (row side of an operator tensor)."""
    k = len(axes)
    op_t = op.reshape([t.shape[a] for a in axes] * 2)
    out = np.tensordot(op_t, t, axes=(list(range(k, 2 * k)), axes))
    # tensordot puts the new axes first; move them back into place
    return np.moveaxis(out, list(range(k)), axes)


def apply_operator(rho, op, targets, dims):
    """``K rho K^dagger`` with ``K`` acting on ``targets``; no unitarity check."""
    rho = np.asarray(rho, dtype=complex)
    dims = _check_dims(rho, dims)
    targets = _check_targets(targets, dims)
    dt = int(np.prod([dims[t] for t in targets]))
    op = np.asarray(op, dtype=complex)
    if op.shape != (dt, dt):
        raise ShapeError(f"operator shape {op.shape} does not match targets of dim {dt}")
    n = len(dims)
    t = rho.reshape(dims + dims)
    t = _apply_left(t, op, targets, n)
    t = _apply_left(t, op.conj(), [a + n for a in targets], n)
    return t.reshape(rho.shape)


def apply_unitary(rho, u, targets, dims):
    """Evolve ``rho`` by unitary ``u`` embedded on ``targets``."""
    u = validate_unitary(u)
    return apply_operator(rho, u, targets, dims)


def embed(op, targets, dims):
    """Full-register matrix of ``op`` acting on ``targets`` (identity elsewhere)."""
    dims = [int(d) for d in dims]
    targets = _check_targets(targets, dims)
    d = int(np.prod(dims))
    n = len(dims)
    eye = np.eye(d, dtype=complex).reshape(dims + dims)
    out = _apply_left(eye, np.asarray(op, dtype=complex), targets, n)
    return out.reshape(d, d)


def projector(qubit, outcome, dims):
    dims = [int(d) for d in dims]
    p = np.zeros((dims[qubit], dims[qubit]), dtype=complex)
    p[outcome, outcome] = 1
    return p


def measure_branch(rho, qubit, outcome, dims):
    """Probability and normalized post-state for a projective outcome.

    Raises :class:`DegenerateBranchError` when the outcome probability is
    below ``1e-12``.
    """
    rho = np.asarray(rho, dtype=complex)
    dims = _check_dims(rho, dims)
    _check_targets([qubit], dims)
    if outcome not in range(dims[qubit]):
        raise ShapeError(f"outcome {outcome} invalid for subsystem of dim {dims[qubit]}")
    projected = apply_operator(rho, projector(qubit, outcome, dims), [qubit], dims)
    prob = float(np.trace(projected).real)
    if prob < BRANCH_FLOOR:
        raise DegenerateBranchError(
            f"outcome {outcome} on subsystem {qubit} has probability {prob:.3g}",
            probability=max(prob, 0.0),
        )
    post = projected / prob
    return prob, 0.5 * (post + post.conj().T)


class ChannelKind(str, Enum):
    GAD = "generalized-amplitude-damping"
    DEPOLARIZING = "depolarizing"


@dataclass(frozen=True)
class Channel:
    """Single-qubit noise channel acting on subsystem ``target``.

    ``gamma``/``p_eq`` parameterize generalized amplitude damping with fixed
    point ``diag(1 - p_eq, p_eq)``; ``p`` is the depolarizing probability.
    """

    kind: ChannelKind
    target: int
    gamma: float = 0.0
    p_eq: float = 0.0
    p: float = 0.0

    def __post_init__(self):
        kind = ChannelKind(self.kind)
        object.__setattr__(self, "kind", kind)
        if kind is ChannelKind.GAD:
            if not 0 <= self.gamma <= 1:
                raise InvalidOperatorError(f"GAD decay probability {self.gamma} outside [0, 1]")
            if not 0 <= self.p_eq <= 0.5:
                raise InvalidOperatorError(f"GAD equilibrium population {self.p_eq} outside [0, 1/2]")
        elif not 0 <= self.p <= 1:
            raise InvalidOperatorError(f"depolarizing probability {self.p} outside [0, 1]")

    @classmethod
    def gad(cls, target, gamma, p_eq):
        return cls(ChannelKind.GAD, target, gamma=gamma, p_eq=p_eq)

    @classmethod
    def depolarizing(cls, target, p):
        return cls(ChannelKind.DEPOLARIZING, target, p=p)

    @classmethod
    def relaxation(cls, target, duration, t1, p_eq):
        """GAD for an idle period ``duration`` with relaxation time ``t1``."""
        return cls.gad(target, float(-np.expm1(-duration / t1)), p_eq)

    def kraus(self):
        if self.kind is ChannelKind.GAD:
            g, q = self.gamma, self.p_eq
            a, b = np.sqrt(1 - q), np.sqrt(q)
            return [
                a * np.array([[1, 0], [0, np.sqrt(1 - g)]], dtype=complex),
                a * np.array([[0, np.sqrt(g)], [0, 0]], dtype=complex),
                b * np.array([[np.sqrt(1 - g), 0], [0, 1]], dtype=complex),
                b * np.array([[0, 0], [np.sqrt(g), 0]], dtype=complex),
            ]
        p = self.p
        return [
            np.sqrt(1 - 3 * p / 4) * PAULI_I,
            np.sqrt(p / 4) * PAULI_X,
            np.sqrt(p / 4) * PAULI_Y,
            np.sqrt(p / 4) * PAULI_Z,
        ]


def apply_channel(rho, ch, dims):
    rho = np.asarray(rho, dtype=complex)
    dims = _check_dims(rho, dims)
    if dims[ch.target] != 2:
        raise ShapeError("channels act on qubit subsystems only")
    out = np.zeros_like(rho)
    for k in ch.kraus():
        out += apply_operator(rho, k, [ch.target], dims)
    return out


def fidelity_with_pure(rho, psi):
    """Overlap ``<psi|rho|psi>`` for a normalized amplitude vector."""
    rho = np.asarray(rho, dtype=complex)
    v = ket(psi)
    norm = np.linalg.norm(v)
    if abs(norm - 1) > ATOL:
        raise NormalizationError(f"state vector has norm {norm}")
    if v.shape[0] != rho.shape[0]:
        raise ShapeError(f"vector of length {v.shape[0]} vs state of dim {rho.shape[0]}")
    return float(np.real(v.conj() @ rho @ v))


def purity(rho):
    return float(np.real(np.trace(rho @ rho)))


def energy(rho, levels):
    """Mean energy ``Tr[H rho]`` for a Hamiltonian diagonal in the computational basis."""
    return float(np.real(np.diag(rho)) @ np.asarray(levels, dtype=float))


def random_unitary(dim, rng):
    """Haar-random unitary from the QR decomposition of a complex Gaussian matrix."""
    z = (rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    d = np.diag(r)
    return q * (d / np.abs(d))


def random_density_matrix(dim, rng, rank=None):
    """Random mixed state ``G G^dagger / Tr`` from a Ginibre matrix."""
    rank = dim if rank is None else rank
    g = rng.standard_normal((dim, rank)) + 1j * rng.standard_normal((dim, rank))
    rho = g @ g.conj().T
    return rho / np.trace(rho).real
