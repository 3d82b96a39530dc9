import numpy as np
import pytest
from hypothesis import given, strategies as st

from thermorecycle import latency as lt
from thermorecycle.errors import DomainError, InsufficientDataError

GATE_NS = range(500, 3001, 100)


def test_exact_gate_line():
    data = lt.synthesize_dataset(31.3e-9, 2.0, 0.0, GATE_NS)
    fit = lt.fit_gate_time(data)
    assert fit.per_op == pytest.approx(31.3e-9, rel=1e-12)
    assert fit.intercept == pytest.approx(2.0, rel=1e-9)
    assert fit.r_squared == pytest.approx(1.0)
    assert not fit.unphysical
    assert fit.n_points == 10  # N = 2100 .. 3000


def test_exact_feedforward_line():
    data = lt.synthesize_dataset(3.3e-6, 1.5, 0.0, range(5, 201, 5), n_min=lt.FEEDFORWARD_N_MIN)
    assert lt.fit_gate_time(data).per_op == pytest.approx(3.3e-6, rel=1e-12)


def test_constant_data_is_unphysical():
    data = lt.LatencyDataset(tuple((n, 5.0) for n in range(2100, 2600, 100)))
    fit = lt.fit_gate_time(data)
    assert fit.per_op == 0 and fit.unphysical


def test_negative_slope_flagged():
    data = lt.LatencyDataset(tuple((n, 10.0 - 1e-3 * n) for n in range(2100, 2600, 100)))
    assert lt.fit_gate_time(data).unphysical


def test_insufficient_points():
    data = lt.synthesize_dataset(31.3e-9, 2.0, 0.0, [100, 1000, 2100, 2500])
    with pytest.raises(InsufficientDataError):
        lt.fit_gate_time(data)


def test_dataset_validation():
    with pytest.raises(DomainError):
        lt.synthesize_dataset(-1e-9, 1.0, 0.0, [1, 2, 3])
    with pytest.raises(DomainError):
        lt.LatencyDataset(((1, 1.0), (1, 2.0), (3, 3.0)))
    with pytest.raises(DomainError):
        lt.LatencyDataset(((0, 1.0), (2, 2.0), (3, 3.0)))
    with pytest.raises(DomainError):
        lt.LatencyDataset(((1, -1.0), (2, 2.0), (3, 3.0)))
    with pytest.raises(DomainError):
        lt.LatencyDataset(((1, 1.0), (2, 2.0)), n_shots=0)


def test_synthesis_deterministic():
    a = lt.synthesize_dataset(31.3e-9, 2.0, 0.5, GATE_NS, seed=4)
    assert a == lt.synthesize_dataset(31.3e-9, 2.0, 0.5, GATE_NS, seed=4)
    assert a != lt.synthesize_dataset(31.3e-9, 2.0, 0.5, GATE_NS, seed=5)


def test_exactly_linear_without_noise():
    data = lt.synthesize_dataset(31.3e-9, 2.0, 0.0, GATE_NS)
    n = np.array([p[0] for p in data.points])
    t = np.array([p[1] for p in data.points])
    np.testing.assert_allclose(t, 2.0 + n * 31.3e-9 * 1e5, rtol=1e-15)


@given(offset=st.floats(0, 100), seed=st.integers(0, 1000))
def test_overhead_invariance(offset, seed):
    base = lt.synthesize_dataset(31.3e-9, 2.0, 0.2, GATE_NS, seed=seed)
    shifted = lt.LatencyDataset(tuple((n, t + offset) for n, t in base.points))
    assert lt.fit_gate_time(shifted).slope == pytest.approx(lt.fit_gate_time(base).slope, rel=1e-9)


def test_amplification_algebra():
    a = lt.synthesize_dataset(31.3e-9, 2.0, 0.0, GATE_NS, n_shots=10_000)
    b = lt.synthesize_dataset(62.6e-9, 2.0, 0.0, GATE_NS, n_shots=5_000)
    np.testing.assert_allclose([t for _, t in a.points], [t for _, t in b.points], rtol=1e-15)
    fa, fb = lt.fit_gate_time(a), lt.fit_gate_time(b)
    assert fa.slope == pytest.approx(fb.slope, rel=1e-12)
    assert fb.per_op == pytest.approx(2 * fa.per_op, rel=1e-12)


def test_points_below_threshold_ignored():
    clean = lt.synthesize_dataset(31.3e-9, 2.0, 0.0, GATE_NS)
    # a nonlinear low-N tail must not move the slope
    tail = tuple((n, t + 50.0 / n) if n <= 2000 else (n, t) for n, t in clean.points)
    bent = lt.LatencyDataset(tail)
    assert lt.fit_gate_time(bent).slope == pytest.approx(lt.fit_gate_time(clean).slope, rel=1e-12)


def test_rounded_gate_data_recovers_per_op():
    # one-second job-time resolution against a 3.13 ms/N signal needs a long linear regime
    errs = []
    for seed in range(20):
        data = lt.synthesize_dataset(31.3e-9, 2.0, 0.1, range(2100, 30001, 300), seed=seed, round_to=1.0)
        errs.append(abs(lt.fit_gate_time(data).per_op / 31.3e-9 - 1))
    assert max(errs) < 0.01


def test_rounded_feedforward_data_recovers_per_op():
    for seed in range(20):
        data = lt.synthesize_dataset(3.3e-6, 2.0, 0.1, range(5, 201, 5), seed=seed, round_to=1.0,
                                     n_min=lt.FEEDFORWARD_N_MIN)
        assert lt.fit_gate_time(data).per_op == pytest.approx(3.3e-6, rel=0.01)


def test_short_gate_range_is_quantization_limited():
    # with N <= 3000 only ten points survive the N > 2000 cut and rounding dominates
    errs = []
    for seed in range(20):
        data = lt.synthesize_dataset(31.3e-9, 2.0, 0.1, GATE_NS, seed=seed, round_to=1.0)
        errs.append(abs(lt.fit_gate_time(data).per_op / 31.3e-9 - 1))
    assert max(errs) > 0.01


def test_csv_roundtrip(tmp_path):
    data = lt.synthesize_dataset(31.3e-9, 2.0, 0.3, GATE_NS, seed=1)
    path = tmp_path / "jobs.csv"
    lt.write_csv(data, path)
    assert path.read_text().splitlines()[0] == "N,T_total_seconds"
    assert lt.read_csv(path) == data


def test_csv_rejects_bad_header(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("n,t\n1,2\n")
    with pytest.raises(DomainError):
        lt.read_csv(path)
