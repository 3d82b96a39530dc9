"""Per-operation execution time from total job durations.

A job repeats the target operation ``N`` times per circuit, runs ``n_shots``
shots per circuit and ``n_circ`` circuits, so the total time grows by
``per_op * n_shots * n_circ`` per unit of ``N``. Only the linear regime
``N > n_min`` enters the fit.
"""
import csv
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, InsufficientDataError

GATE_N_MIN = 2000
FEEDFORWARD_N_MIN = 20
MIN_POINTS = 3
CSV_HEADER = ("N", "T_total_seconds")


@dataclass(frozen=True)
class LatencyDataset:
    points: tuple
    n_shots: int = 10_000
    n_circ: int = 10
    n_min: int = GATE_N_MIN

    def __post_init__(self):
        pts = tuple((int(n), float(t)) for n, t in self.points)
        object.__setattr__(self, "points", pts)
        ns = [n for n, _ in pts]
        if len(set(ns)) != len(ns):
            raise DomainError("repetition counts must be distinct")
        if any(n <= 0 for n in ns):
            raise DomainError("repetition counts must be positive")
        if any(t <= 0 for _, t in pts):
            raise DomainError("job durations must be positive")
        if self.n_shots < 1 or self.n_circ < 1:
            raise DomainError("n_shots and n_circ must be at least 1")

    @property
    def amplification(self):
        return self.n_shots * self.n_circ

    def usable(self):
        return [(n, t) for n, t in self.points if n > self.n_min]


@dataclass(frozen=True)
class LatencyFit:
    slope: float
    intercept: float
    per_op: float
    r_squared: float
    n_points: int
    unphysical: bool = False


def fit_gate_time(data):
    pts = data.usable()
    if len(pts) < MIN_POINTS:
        raise InsufficientDataError(
            f"need at least {MIN_POINTS} points with N > {data.n_min}, got {len(pts)}"
        )
    n = np.array([p[0] for p in pts], dtype=float)
    t = np.array([p[1] for p in pts], dtype=float)
    # centred normal equations; cheaper and as accurate as lstsq here
    n_bar, t_bar = n.mean(), t.mean()
    dn, dt = n - n_bar, t - t_bar
    sxx = dn @ dn
    if sxx == 0:
        raise InsufficientDataError("all usable points share one N")
    slope = (dn @ dt) / sxx
    intercept = t_bar - slope * n_bar
    ss_tot = dt @ dt
    ss_res = float(np.sum((t - (intercept + slope * n)) ** 2))
    r2 = 1.0 if ss_tot == 0 else min(1.0, max(0.0, 1 - ss_res / ss_tot))
    return LatencyFit(
        slope=float(slope),
        intercept=float(intercept),
        per_op=float(slope) / data.amplification,
        r_squared=r2,
        n_points=len(pts),
        unphysical=bool(slope <= 0),
    )


def synthesize_dataset(per_op, overhead, noise_sd, Ns, n_shots=10_000, n_circ=10, seed=0,
                       round_to=None, n_min=GATE_N_MIN):
    """Linear job times plus Gaussian jitter, optionally rounded to ``round_to`` seconds."""
    if per_op < 0:
        raise DomainError(f"per-op time must be non-negative, got {per_op}")
    if noise_sd < 0:
        raise DomainError("noise_sd must be non-negative")
    ns = np.asarray(list(Ns), dtype=int)
    t = overhead + ns * per_op * n_shots * n_circ
    if noise_sd > 0:
        t = t + np.random.default_rng(seed).normal(0.0, noise_sd, size=len(ns))
    if round_to:
        t = np.round(t / round_to) * round_to
    return LatencyDataset(tuple(zip(ns.tolist(), t.tolist())), n_shots, n_circ, n_min)


def read_csv(path, n_shots=10_000, n_circ=10, n_min=GATE_N_MIN):
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows or tuple(c.strip() for c in rows[0]) != CSV_HEADER:
        raise DomainError(f"{path}: expected header {','.join(CSV_HEADER)}")
    points = []
    for lineno, row in enumerate(rows[1:], start=2):
        if not row or not "".join(row).strip():
            continue
        if len(row) != 2:
            raise DomainError(f"{path}:{lineno}: expected two columns")
        try:
            points.append((int(row[0]), float(row[1])))
        except ValueError as exc:
            raise DomainError(f"{path}:{lineno}: {exc}") from None
    return LatencyDataset(tuple(points), n_shots, n_circ, n_min)


def write_csv(data, path):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(CSV_HEADER)
        for n, t in data.points:
            w.writerow([n, repr(t)])
