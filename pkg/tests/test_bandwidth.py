import numpy as np
import pytest

from antenna_count.bandwidth import (
    bandwidth_sweep,
    calibrate_noise_density,
    capacity,
    optimal_pilot_bandwidth,
    pilot_limited_throughput,
    power_for_rate,
    wideband_limit,
)
from antenna_count.errors import DomainError

P0, B0, R0 = 10.0, 20e6, 60e6
N0 = P0 / (B0 * 7)


# ── Capacity ─────────────────────────────────────────────────────────────────

def test_reference_point_rate():
    assert capacity(B0, P0, N0) == pytest.approx(R0, rel=1e-12)
    assert calibrate_noise_density(P0, B0, R0) == pytest.approx(N0, rel=1e-12)


def test_wideband_limit():
    limit = wideband_limit(P0, N0)
    assert limit == pytest.approx(P0 / N0 * np.log2(np.e))
    assert capacity(1e6 * B0, P0, N0) == pytest.approx(limit, rel=1e-4)


def test_capacity_never_exceeds_wideband_limit():
    bandwidths = np.logspace(0, 12, 121)
    assert np.all(capacity(bandwidths, P0, N0) < wideband_limit(P0, N0))


def test_scaling_bandwidth_and_power_together_scales_capacity():
    assert capacity(50 * B0, 50 * P0, N0) == pytest.approx(50 * capacity(B0, P0, N0), rel=1e-12)


def test_diminishing_returns():
    for B in np.logspace(5, 10, 11):
        gain_up = capacity(2 * B, P0, N0) - capacity(B, P0, N0)
        gain_down = capacity(B, P0, N0) - capacity(B / 2, P0, N0)
        assert gain_up < gain_down


def test_capacity_rejects_nonpositive_inputs():
    with pytest.raises(DomainError):
        capacity(0.0, P0, N0)
    with pytest.raises(DomainError):
        capacity(B0, -1.0, N0)
    with pytest.raises(DomainError):
        capacity(np.array([1e6, 0.0]), P0, N0)


# ── Required power ───────────────────────────────────────────────────────────

def test_fifty_times_bandwidth_and_rate_needs_500_watts():
    assert power_for_rate(50 * B0, 50 * R0, N0) == pytest.approx(500.0, rel=1e-12)


def test_one_gigahertz_for_25_times_rate_needs_131_watts():
    power = power_for_rate(1e9, 25 * R0, N0)
    assert power == pytest.approx(131.0, rel=0.01)
    assert power == pytest.approx(1e9 * N0 * (2 ** 1.5 - 1))


def test_zero_rate_needs_no_power():
    assert power_for_rate(B0, 0.0, N0) == 0.0
    assert power_for_rate(B0, 1e-3, N0) == pytest.approx(1e-3 * N0 * np.log(2), rel=1e-6)


def test_power_and_capacity_are_inverse():
    for B in (1e5, 2e7, 1e9):
        for P in (0.01, 10.0, 500.0):
            assert power_for_rate(B, capacity(B, P, N0), N0) == pytest.approx(P, rel=1e-9)


def test_negative_rate_rejected():
    with pytest.raises(DomainError):
        power_for_rate(B0, -1.0, N0)


# ── Pilot-limited throughput ─────────────────────────────────────────────────

def test_pilot_limited_reference_point():
    assert pilot_limited_throughput(B0, 7.0, B0) == pytest.approx(B0 * np.log2(8.0))


def test_pilot_limited_optimum_matches_grid_search():
    rho0 = 7.0
    B_star = optimal_pilot_bandwidth(rho0, B0)
    grid = np.geomspace(B0 / 100, B0 * 100, 200_001)
    best = grid[np.argmax(pilot_limited_throughput(grid, rho0, B0))]
    assert B_star == pytest.approx(best, rel=1e-3)


def test_more_bandwidth_eventually_lowers_pilot_limited_throughput():
    B_star = optimal_pilot_bandwidth(7.0, B0)
    peak = pilot_limited_throughput(B_star, 7.0, B0)
    assert pilot_limited_throughput(100 * B_star, 7.0, B0) < peak
    assert pilot_limited_throughput(B_star / 100, 7.0, B0) < peak


# ── Sweep table ──────────────────────────────────────────────────────────────

def test_sweep_table_columns():
    bandwidths = B0 * np.array([1.0, 10.0, 50.0])
    table = bandwidth_sweep(P0, N0, bandwidths, rho0=7.0, B0=B0, rate_per_hz=1.5)
    assert list(table.columns) == [
        "bandwidth_hz", "capacity_bps", "wideband_limit_bps", "pilot_limited_bps", "required_power_w",
    ]
    assert table["capacity_bps"].iloc[0] == pytest.approx(R0)
    assert table["required_power_w"].iloc[2] == pytest.approx(power_for_rate(1e9, 1.5e9, N0))
    assert table["capacity_bps"].is_monotonic_increasing


def test_sweep_without_optional_columns():
    table = bandwidth_sweep(P0, N0, [B0])
    assert list(table.columns) == ["bandwidth_hz", "capacity_bps", "wideband_limit_bps"]
