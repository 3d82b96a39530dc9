"""Single-qubit Pauli tomography with shot noise.

Counts are binomial draws; the Bloch vector is estimated by linear inversion
and rescaled onto the unit ball when it falls outside (for one qubit this is
the eigenvalue-clipping projection onto the nearest physical state).
"""
from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .qstate import PAULI_I, PAULI_X, PAULI_Y, PAULI_Z, von_neumann_entropy

PAULIS = {"X": PAULI_X, "Y": PAULI_Y, "Z": PAULI_Z}
BASES = ("X", "Y", "Z")


@dataclass(frozen=True)
class TomographyEstimate:
    bloch: np.ndarray
    raw: np.ndarray
    projected: np.ndarray
    shots_per_basis: int

    @property
    def projected_bloch(self):
        return bloch_vector(self.projected)


def bloch_vector(rho):
    return np.array([np.real(np.trace(rho @ PAULIS[b])) for b in BASES])


def state_from_bloch(r):
    r = np.asarray(r, dtype=float)
    return 0.5 * (PAULI_I + r[0] * PAULI_X + r[1] * PAULI_Y + r[2] * PAULI_Z)


def sample_pauli_counts(rho, basis, shots, rng):
    """Draw ``(n_plus, n_minus)`` for a ``basis`` measurement.

    ``rng`` is a ``numpy.random.Generator`` or an integer seed.
    """
    if shots < 1:
        raise DomainError("shots must be at least 1")
    rng = np.random.default_rng(rng)
    expectation = np.real(np.trace(np.asarray(rho) @ PAULIS[basis]))
    p_plus = min(1.0, max(0.0, 0.5 * (1 + expectation)))
    n_plus = int(rng.binomial(shots, p_plus))
    return n_plus, shots - n_plus


def project_bloch(r):
    r = np.asarray(r, dtype=float)
    norm = np.linalg.norm(r)
    return r / norm if norm > 1 else r


def reconstruct(counts):
    """Linear-inversion estimate from ``{"X": (n+, n-), "Y": ..., "Z": ...}``."""
    missing = [b for b in BASES if b not in counts]
    if missing:
        raise DomainError(f"missing tomography bases: {missing}")
    bloch = np.array([(counts[b][0] - counts[b][1]) / (counts[b][0] + counts[b][1]) for b in BASES])
    shots = int(sum(counts["Z"]))
    return TomographyEstimate(
        bloch=bloch,
        raw=state_from_bloch(bloch),
        projected=state_from_bloch(project_bloch(bloch)),
        shots_per_basis=shots,
    )


def estimate_state(rho, shots, rng):
    rng = np.random.default_rng(rng)
    return reconstruct({b: sample_pauli_counts(rho, b, shots, rng) for b in BASES})


def lower_median(values):
    ordered = sorted(values)
    return ordered[(len(ordered) - 1) // 2]


def summarize_trials(values):
    """Median (lower median for even counts), min, max and the per-trial values.

    Array-valued trials are summarized component-wise.
    """
    values = list(values)
    if not values:
        raise DomainError("need at least one trial")
    arr = np.asarray(values, dtype=float)
    if arr.ndim == 1:
        return {
            "median": lower_median(values),
            "min": min(values),
            "max": max(values),
            "values": values,
        }
    flat = arr.reshape(len(values), -1)
    med = np.array([lower_median(list(col)) for col in flat.T]).reshape(arr.shape[1:])
    return {
        "median": med,
        "min": arr.min(axis=0),
        "max": arr.max(axis=0),
        "values": values,
    }


def entropy_bias(rho, shots, rng, samples=200):
    """Mean plug-in entropy of projected estimates minus the true entropy.

    Also returns the sample standard deviation of the plug-in estimates.
    """
    rng = np.random.default_rng(rng)
    true = von_neumann_entropy(rho)
    ests = np.array([von_neumann_entropy(estimate_state(rho, shots, rng).projected) for _ in range(samples)])
    return float(ests.mean() - true), float(ests.std(ddof=1))
