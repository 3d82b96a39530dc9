"""Pure-Python Gibbs-family kernels.

Reference implementation of the routines in ``_kernels.pyx``; used when the
compiled extension is unavailable. Energies are shifted by the ground level
before exponentiation so that low temperatures underflow cleanly to zero.
"""
import math

MAX_BISECTIONS = 200


def gibbs_stats(levels, T):
    """Return ``(E, S, C)`` of the Gibbs state at temperature ``T``.

    ``levels`` must be non-decreasing; ``T`` may be ``math.inf``.
    """
    levels = [float(x) for x in levels]
    e0 = levels[0]
    if math.isinf(T):
        n = len(levels)
        mean = sum(levels) / n
        return mean, math.log(n), 0.0
    beta = 1.0 / T
    z = 0.0
    ew = 0.0
    for e in levels:
        w = math.exp(-(e - e0) * beta)
        z += w
        ew += (e - e0) * w
    shift = ew / z
    var = 0.0
    for e in levels:
        w = math.exp(-(e - e0) * beta)
        d = e - e0 - shift
        var += d * d * w
    var /= z
    return e0 + shift, math.log(z) + shift * beta, var * beta * beta


def gibbs_entropy(levels, T):
    return gibbs_stats(levels, T)[1]


def log_temperature_of_entropy(levels, s, lo, hi):
    """Bisect ``ln T`` on ``[lo, hi]`` so that the Gibbs entropy equals ``s``.

    Returns an endpoint when ``s`` lies outside the bracketed entropy range.
    """
    levels = [float(x) for x in levels]
    if gibbs_stats(levels, math.exp(lo))[1] >= s:
        return lo
    if gibbs_stats(levels, math.exp(hi))[1] <= s:
        return hi
    for _ in range(MAX_BISECTIONS):
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        if gibbs_stats(levels, math.exp(mid))[1] < s:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)
