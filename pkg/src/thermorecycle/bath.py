"""Finite-bath Gibbs thermodynamics and erasure bounds.

Units: ``k_B = 1``, entropies in nats, energies and temperatures in the units
of the bath spectrum ``levels``. Along the Gibbs family the bath is described
by its entropy ``s``; ``E(s)`` is the Gibbs energy at that entropy and
``T(s) = dE/ds`` its temperature.
"""
import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np
from scipy import integrate, optimize

from . import kernels
from .errors import (
    DomainError,
    InfeasibleEntropyError,
    InfeasibleErasureError,
    InfeasibleMixtureError,
    InvalidStateError,
    ShapeError,
    ThresholdOutOfRangeError,
)
from .qstate import energy, von_neumann_entropy

LOG_T_RANGE = (-40.0, 40.0)
ENTROPY_TOL = 1e-12
CEILING_MARGIN = 1e-12
# the limiting inequality is saturated; allow for extrapolation round-off
LIMIT_SLACK_TOL = 1e-8


class Infeasible(Enum):
    """Tag for a bound that does not exist because of the entropy ceiling."""

    INFEASIBLE = "INF"

    def __repr__(self):
        return "INFEASIBLE"


INFEASIBLE = Infeasible.INFEASIBLE


def is_feasible(value):
    return value is not INFEASIBLE


@dataclass(frozen=True)
class BathSpec:
    """Finite bath with energy ``levels`` (ground level first) at base temperature ``T0``."""

    levels: tuple
    T0: float

    def __post_init__(self):
        lv = tuple(float(x) for x in self.levels)
        if len(lv) < 2:
            raise DomainError("a bath needs at least two levels")
        if any(b < a for a, b in zip(lv, lv[1:])):
            raise DomainError(f"levels must be non-decreasing, got {lv}")
        if lv[0] == lv[-1]:
            raise DomainError("levels must not all be equal")
        if not self.T0 > 0:
            raise DomainError(f"base temperature must be positive, got {self.T0}")
        object.__setattr__(self, "levels", lv)
        object.__setattr__(self, "_arr", np.asarray(lv, dtype=np.float64))

    @classmethod
    def qubit(cls, T0, gap=1.0):
        return cls((0.0, float(gap)), float(T0))

    @property
    def dim(self):
        return len(self.levels)

    @property
    def log_dim(self):
        return math.log(self.dim)

    @property
    def ground_degeneracy(self):
        return sum(1 for e in self.levels if e == self.levels[0])

    @property
    def min_entropy(self):
        return math.log(self.ground_degeneracy)

    @property
    def array(self):
        return self._arr

    def hamiltonian(self):
        return np.diag(self._arr).astype(complex)

    @property
    def thermal(self):
        return gibbs_ensemble(self, self.T0)


@dataclass(frozen=True)
class GibbsPoint:
    T: float
    E: float
    S: float
    C: float
    populations: tuple = field(repr=False)

    @property
    def state(self):
        return np.diag(np.asarray(self.populations, dtype=complex))


def gibbs_populations(spec, T):
    if math.isinf(T):
        return np.full(spec.dim, 1.0 / spec.dim)
    w = np.exp(-(spec.array - spec.levels[0]) / T)
    return w / w.sum()


def gibbs_ensemble(spec, T):
    """Gibbs state of ``spec`` at temperature ``T`` (``math.inf`` allowed)."""
    if not T > 0:
        raise DomainError(f"temperature must be positive, got {T}")
    E, S, C = kernels.gibbs_stats(spec.array, float(T))
    return GibbsPoint(T, E, S, C, tuple(gibbs_populations(spec, T)))


def _check_entropy(spec, s):
    if s < 0:
        raise DomainError(f"entropy must be non-negative, got {s}")
    if s >= spec.log_dim - CEILING_MARGIN:
        raise InfeasibleEntropyError(
            f"entropy {s:.12g} reaches the ceiling ln d = {spec.log_dim:.12g}"
        )
    if s < spec.min_entropy - ENTROPY_TOL:
        raise DomainError(
            f"entropy {s} below the ground-state entropy {spec.min_entropy}"
        )


def temperature_of_entropy(spec, s):
    """Temperature of the positive-temperature Gibbs state with entropy ``s``."""
    _check_entropy(spec, s)
    lo, hi = LOG_T_RANGE
    u = kernels.log_temperature_of_entropy(spec.array, float(s), lo, hi)
    T = math.exp(u)
    got = kernels.gibbs_entropy(spec.array, T)
    if abs(got - s) > ENTROPY_TOL and s > spec.min_entropy:
        raise InfeasibleEntropyError(
            f"entropy inversion stalled at T={T:.6g} (|S - s| = {abs(got - s):.3g})"
        )
    return T


def gibbs_at_entropy(spec, s):
    return gibbs_ensemble(spec, temperature_of_entropy(spec, s))


def energy_of_entropy(spec, s):
    """Gibbs energy ``E(s)``; the ground energy for ``s`` at the entropy floor."""
    _check_entropy(spec, s)
    if s <= spec.min_entropy:
        return spec.levels[0]
    return kernels.gibbs_stats(spec.array, temperature_of_entropy(spec, s))[0]


def entropy_of_energy(spec, E):
    """Entropy of the Gibbs state with mean energy ``E`` (positive temperatures)."""
    mean = float(np.mean(spec.array))
    if not spec.levels[0] <= E < mean:
        raise DomainError(f"energy {E} outside [{spec.levels[0]}, {mean}) of the T > 0 branch")
    if E == spec.levels[0]:
        return spec.min_entropy, 0.0
    lo, hi = LOG_T_RANGE
    f = lambda u: kernels.gibbs_stats(spec.array, math.exp(u))[0] - E
    if f(hi) < 0:
        return spec.log_dim, math.inf
    u = optimize.brentq(f, lo, hi, xtol=1e-15, rtol=4 * np.finfo(float).eps, maxiter=500)
    T = math.exp(u)
    return kernels.gibbs_stats(spec.array, T)[1], T


# --- Appendix-style integral forms (independent of the entropy inversion) ---


def heat_capacity(spec, T):
    return kernels.gibbs_stats(spec.array, float(T))[2]


def entropy_integral(spec, T, T_ref):
    """``int_{T_ref}^{T} C(tau)/tau dtau`` by adaptive quadrature."""
    val, _ = integrate.quad(
        lambda u: heat_capacity(spec, math.exp(u)),
        math.log(T_ref),
        math.log(T),
        epsabs=1e-14,
        epsrel=1e-13,
        limit=200,
    )
    return val


def heat_integral(spec, T, T_ref):
    """``int_{T_ref}^{T} C(tau) dtau`` by adaptive quadrature."""
    val, _ = integrate.quad(
        lambda t: heat_capacity(spec, t), T_ref, T, epsabs=1e-14, epsrel=1e-13, limit=200
    )
    return val


def temperature_for_entropy_increase(spec, delta_S, T_ref):
    """Invert ``entropy_integral(., T_ref) = delta_S`` by Brent's method."""
    if delta_S == 0:
        return T_ref
    f = lambda u: entropy_integral(spec, math.exp(u), T_ref) - delta_S
    lo = math.log(T_ref)
    hi = lo + 1.0
    while f(hi) < 0:
        hi += 1.0
        if hi > LOG_T_RANGE[1]:
            raise InfeasibleEntropyError("entropy increase exceeds the bath ceiling")
    return math.exp(optimize.brentq(f, lo, hi, xtol=1e-14, rtol=1e-14))


def q_tight_quadrature(spec, delta_S):
    """Tight finite-bath heat bound from the heat-capacity integrals."""
    T0 = spec.T0
    s0 = spec.thermal.S
    if s0 + delta_S >= spec.log_dim - CEILING_MARGIN:
        return INFEASIBLE
    return heat_integral(spec, temperature_for_entropy_increase(spec, delta_S, T0), T0)


# --- bounds ---


@dataclass(frozen=True)
class AthermalSummary:
    """Energy and entropy of an (athermal) bath state."""

    E_ath: float
    S_ath: float

    @classmethod
    def from_state(cls, spec, rho):
        rho = np.asarray(rho, dtype=complex)
        if rho.shape != (spec.dim, spec.dim):
            raise ShapeError(f"bath state of shape {rho.shape} for a {spec.dim}-level bath")
        return cls(energy(rho, spec.levels), von_neumann_entropy(rho))

    @classmethod
    def thermal(cls, spec):
        g = spec.thermal
        return cls(g.E, g.S)

    def validate(self, spec, atol=1e-9):
        if not -atol <= self.S_ath <= spec.log_dim + atol:
            raise InvalidStateError(f"entropy {self.S_ath} outside [0, ln d]")
        if not spec.levels[0] - atol <= self.E_ath <= spec.levels[-1] + atol:
            raise InvalidStateError(f"energy {self.E_ath} outside the spectrum")
        if self.S_ath < spec.log_dim - CEILING_MARGIN:
            floor = energy_of_entropy(spec, max(self.S_ath, spec.min_entropy))
            if self.E_ath < floor - atol:
                raise InvalidStateError(
                    f"energy {self.E_ath} below the Gibbs minimum {floor} at entropy {self.S_ath}"
                )
        return self


@dataclass(frozen=True)
class ErasureBounds:
    delta_S: float
    q_landauer: float
    q_tight: object
    gain: object
    q_ath: float

    @property
    def tight_feasible(self):
        return is_feasible(self.q_tight)


def gain(spec, delta_S, E_ath, S_ath):
    """Heat-bound reduction from bath athermality, or ``INFEASIBLE``."""
    g0 = spec.thermal
    top = spec.log_dim - CEILING_MARGIN
    if g0.S + delta_S >= top or S_ath + delta_S >= top:
        return INFEASIBLE
    return (E_ath - g0.E) - (
        energy_of_entropy(spec, S_ath + delta_S) - energy_of_entropy(spec, g0.S + delta_S)
    )


def athermal_heat_bound(spec, delta_S, E_ath, S_ath):
    """Minimum heat ``E(S_ath + delta_S) - E_ath`` for an athermal starting bath."""
    if S_ath + delta_S >= spec.log_dim - CEILING_MARGIN:
        raise InfeasibleErasureError(
            f"bath entropy {S_ath:.6g} + {delta_S:.6g} reaches ln d = {spec.log_dim:.6g}"
        )
    return energy_of_entropy(spec, max(S_ath + delta_S, spec.min_entropy)) - E_ath


def erasure_bounds(spec, delta_S, athermal=None):
    """Landauer, tight finite-bath and athermal heat bounds for erasing ``delta_S``."""
    if delta_S < 0:
        raise DomainError(f"erasure amount must be non-negative, got {delta_S}")
    g0 = spec.thermal
    q_l = spec.T0 * delta_S
    if g0.S + delta_S < spec.log_dim - CEILING_MARGIN:
        q_t = energy_of_entropy(spec, g0.S + delta_S) - g0.E
    else:
        q_t = INFEASIBLE
    if athermal is None:
        if q_t is INFEASIBLE:
            raise InfeasibleErasureError("thermal bath cannot absorb the requested entropy")
        return ErasureBounds(delta_S, q_l, q_t, 0.0, q_t)
    q_a = athermal_heat_bound(spec, delta_S, athermal.E_ath, athermal.S_ath)
    g = gain(spec, delta_S, athermal.E_ath, athermal.S_ath)
    return ErasureBounds(delta_S, q_l, q_t, g, q_a)


# --- branch mixtures ---


@dataclass(frozen=True)
class BranchEnsemble:
    """Failure-branch bath states ``rho_m`` with probabilities ``p_m``."""

    probabilities: tuple
    states: tuple
    shared_failure_entropy: float

    @classmethod
    def from_states(cls, probabilities, states, atol=1e-6):
        p = tuple(float(x) for x in probabilities)
        if len(p) != len(states) or not p:
            raise ShapeError("need one probability per branch state")
        if abs(sum(p) - 1) > 1e-9 or min(p) < 0:
            raise InvalidStateError(f"branch probabilities {p} do not form a distribution")
        ents = [von_neumann_entropy(r) for r in states]
        s = float(np.dot(p, ents))
        if max(abs(e - s) for e in ents) > atol:
            raise InvalidStateError(f"branch entropies {ents} are not equal")
        return cls(p, tuple(np.asarray(r, dtype=complex) for r in states), s)

    @property
    def mixture(self):
        return sum(p * r for p, r in zip(self.probabilities, self.states))


@dataclass(frozen=True)
class MixtureAnalysis:
    g_bar: float
    chi: float
    g_mix: float


def branch_mixture_analysis(spec, ensemble, delta_S):
    """Average gain with branch labels kept, versus the gain of the label-free mixture."""
    gains = []
    for rho in ensemble.states:
        a = AthermalSummary.from_state(spec, rho)
        g = gain(spec, delta_S, a.E_ath, a.S_ath)
        if g is INFEASIBLE:
            raise InfeasibleErasureError("per-branch gain is infeasible")
        gains.append(g)
    g_bar = float(np.dot(ensemble.probabilities, gains))
    s_f = ensemble.shared_failure_entropy
    chi = von_neumann_entropy(ensemble.mixture) - s_f
    if chi < -1e-9:
        raise InvalidStateError(f"negative Holevo quantity {chi}")
    chi = max(chi, 0.0)
    if s_f + chi + delta_S >= spec.log_dim - CEILING_MARGIN:
        raise InfeasibleMixtureError(
            "mixture entropy reaches ln d; discarding branch labels costs unbounded heat",
            g_bar=g_bar,
            chi=chi,
        )
    if chi == 0.0:
        return MixtureAnalysis(g_bar, 0.0, g_bar)
    penalty = energy_of_entropy(spec, s_f + chi + delta_S) - energy_of_entropy(spec, s_f + delta_S)
    return MixtureAnalysis(g_bar, chi, g_bar - penalty)


# --- gain threshold ---


def _bisect_decreasing(f, lo, hi):
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        fm = f(mid)
        if fm == 0:
            return mid
        if fm > 0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def s_max_threshold(spec, E_ath, delta_S):
    """Largest bath entropy that still gives a positive gain at fixed energy ``E_ath``."""
    if delta_S < 0:
        raise DomainError(f"erasure amount must be non-negative, got {delta_S}")
    g0 = spec.thermal
    if E_ath < g0.E - 1e-12:
        raise DomainError(f"athermal energy {E_ath} below the thermal energy {g0.E}")
    top = spec.log_dim - CEILING_MARGIN
    if g0.S + delta_S >= top:
        raise DomainError("thermal reference cannot absorb the erasure amount")
    ref = energy_of_entropy(spec, g0.S + delta_S)
    lo = spec.min_entropy
    hi = spec.log_dim - 2 * CEILING_MARGIN - delta_S
    f = lambda s: (E_ath - g0.E) - (energy_of_entropy(spec, s + delta_S) - ref)
    flo, fhi = f(lo), f(hi)
    if flo < 0 or fhi > 0:
        raise ThresholdOutOfRangeError(
            f"gain has no sign change on [{lo:.6g}, {hi:.6g}]: G={flo:.3g} .. {fhi:.3g}",
            sign_at_low=int(np.sign(flo)),
            sign_at_high=int(np.sign(fhi)),
        )
    return _bisect_decreasing(f, lo, hi)


@dataclass(frozen=True)
class TradeoffReport:
    numeric_slope: float
    analytic_slope: float
    analytic_slope_literal: object
    tolerance: float
    slopes_agree: bool
    limit_lhs: float
    limit_rhs: float
    slack: float
    limit_slack: float
    holds: bool


def s_max_tradeoff_check(spec, E_ath, delta_S, h, limit_step=1e-4):
    """Compare the finite-difference slope of ``s_max_threshold`` with the implicit-function formula.

    ``analytic_slope`` uses ``T(S0 + dS) / T(S_max + dS) - 1`` (erasure raises
    the bath entropy); ``analytic_slope_literal`` evaluates the same ratio at
    ``S0 - dS`` and ``S_max - dS`` when those entropies exist, for comparison.
    The limit report evaluates ``(S_E - S_max)/dS >= 1 - T0/T_E`` at
    ``limit_step`` and by its Richardson extrapolation to ``dS -> 0``.
    """
    if h <= 0 or delta_S - h < 0:
        raise DomainError(f"central difference needs 0 < h <= delta_S (h={h}, delta_S={delta_S})")
    g0 = spec.thermal
    top = spec.log_dim - CEILING_MARGIN
    s_hi = s_max_threshold(spec, E_ath, delta_S + h)
    s_lo = s_max_threshold(spec, E_ath, delta_S - h)
    s_mid = s_max_threshold(spec, E_ath, delta_S)
    numeric = (s_hi - s_lo) / (2 * h)
    temp = lambda s: temperature_of_entropy(spec, s)
    analytic = temp(g0.S + delta_S) / temp(s_mid + delta_S) - 1
    literal = None
    if g0.S - delta_S > spec.min_entropy and s_mid - delta_S > spec.min_entropy:
        literal = temp(g0.S - delta_S) / temp(s_mid - delta_S) - 1
    tol = max(1e-4, 10 * h * h * max(1.0, abs(analytic)))

    s_e, t_e = entropy_of_energy(spec, E_ath)
    rhs = 1 - spec.T0 / t_e
    lhs_at = lambda d: (s_e - s_max_threshold(spec, E_ath, d)) / d
    lhs = lhs_at(limit_step)
    half, quarter = lhs_at(limit_step / 2), lhs_at(limit_step / 4)
    # two-level Richardson for an expansion a + b*dS + c*dS**2
    lhs_limit = (8 * quarter - 6 * half + lhs) / 3
    limit_slack = lhs_limit - rhs
    if s_e >= top:
        raise DomainError("athermal energy has no finite-temperature Gibbs partner")
    return TradeoffReport(
        numeric_slope=numeric,
        analytic_slope=analytic,
        analytic_slope_literal=literal,
        tolerance=tol,
        slopes_agree=abs(numeric - analytic) <= tol,
        limit_lhs=lhs,
        limit_rhs=rhs,
        slack=lhs - rhs,
        limit_slack=limit_slack,
        holds=limit_slack >= -LIMIT_SLACK_TOL,
    )
