import numpy as np
import pytest

from antenna_count.power_control import (
    BISECTION_TOLERANCE,
    PowerAllocation,
    downlink_sinrs,
    maxmin_downlink_multicell,
    maxmin_downlink_single,
    maxmin_uplink_multicell,
    maxmin_uplink_single,
    minimal_power_iterates,
    uplink_sinrs,
)
from antenna_count.zf_core import zf_diagnostics

SIGMA2 = 1.59e-12
P_UL = 0.2
P_DL = 2.0


def _equal_orthogonal_channel(M, K, beta):
    dft = np.exp(-2j * np.pi * np.outer(np.arange(M), np.arange(K)) / M)
    return dft * np.sqrt(beta)


def _random_diag(random_channel, M=32, K=6, scale=1e-4):
    return zf_diagnostics(random_channel(M, K) * scale)


def _spread(sinrs):
    return (np.max(sinrs) - np.min(sinrs)) / np.max(sinrs)


# ── Single cell: closed forms ────────────────────────────────────────────────

def test_uplink_orthogonal_columns():
    M, beta = 64, np.array([2e-9, 5e-10, 1e-9])
    dft = np.exp(-2j * np.pi * np.outer(np.arange(M), np.arange(3)) / M)
    diag = zf_diagnostics(dft * np.sqrt(beta))
    allocation = maxmin_uplink_single(diag, SIGMA2, P_UL)
    assert allocation.achieved_sinr == pytest.approx(P_UL * M * beta.min() / SIGMA2)
    assert allocation.per_terminal_power[1] == P_UL
    assert allocation.link == "uplink" and allocation.bisection_steps == 0


def test_uplink_single_terminal(random_channel):
    g = random_channel(10, 1) * 1e-4
    allocation = maxmin_uplink_single(zf_diagnostics(g), SIGMA2, P_UL)
    np.testing.assert_array_equal(allocation.per_terminal_power, [P_UL])
    assert allocation.achieved_sinr == pytest.approx(P_UL * np.sum(np.abs(g) ** 2) / SIGMA2)


def test_uplink_powers_within_cap_and_equalized(random_channel):
    diag = _random_diag(random_channel)
    allocation = maxmin_uplink_single(diag, SIGMA2, P_UL)
    p = allocation.per_terminal_power
    assert np.all((p > 0) & (p <= P_UL))
    assert np.any(p == P_UL)
    sinrs = uplink_sinrs(p, diag.inv_gram_diag, None, SIGMA2)
    assert _spread(sinrs) <= 1e-9
    assert allocation.achieved_sinr == pytest.approx(np.min(sinrs), rel=1e-12)


def _seeded_diags(n=100):
    """Inverse-Gram diagnostics of n seeded random channels of varying shape and gain."""
    for seed in range(n):
        rng = np.random.default_rng(seed)
        K = int(rng.integers(1, 9))
        M = int(rng.integers(K + 1, 65))
        G = (rng.standard_normal((M, K)) + 1j * rng.standard_normal((M, K))) / np.sqrt(2)
        yield zf_diagnostics(G * 10 ** rng.uniform(-6, -3))


def test_uplink_matches_bisection_oracle():
    for diag in _seeded_diags():
        _check_uplink_against_oracle(diag)


def _check_uplink_against_oracle(diag):
    lo, hi = 0.0, P_UL * np.max(diag.gains) / SIGMA2
    for _ in range(200):
        t = 0.5 * (lo + hi)
        if np.all(t * SIGMA2 * diag.inv_gram_diag <= P_UL):
            lo = t
        else:
            hi = t
    assert maxmin_uplink_single(diag, SIGMA2, P_UL).achieved_sinr == pytest.approx(lo, rel=1e-6)


def test_downlink_equal_split():
    M, K, beta = 64, 4, 1e-9
    diag = zf_diagnostics(_equal_orthogonal_channel(M, K, beta))
    allocation = maxmin_downlink_single(diag, SIGMA2, P_DL)
    assert allocation.achieved_sinr == pytest.approx(P_DL * M * beta / (K * SIGMA2))
    np.testing.assert_allclose(allocation.per_terminal_power, P_DL / K)


def test_downlink_spends_the_whole_pool(random_channel):
    diag = _random_diag(random_channel)
    allocation = maxmin_downlink_single(diag, SIGMA2, P_DL)
    assert np.sum(allocation.per_terminal_power) == pytest.approx(P_DL, rel=1e-12)
    sinrs = downlink_sinrs(allocation.per_terminal_power, diag.inv_gram_diag, None, SIGMA2)
    assert _spread(sinrs) <= 1e-9


def test_downlink_matches_sum_constraint_oracle():
    for diag in _seeded_diags():
        _check_downlink_against_oracle(diag)


def _check_downlink_against_oracle(diag):
    lo, hi = 0.0, P_DL * np.max(diag.gains) / SIGMA2
    for _ in range(200):
        t = 0.5 * (lo + hi)
        if np.sum(t * SIGMA2 * diag.inv_gram_diag) <= P_DL:
            lo = t
        else:
            hi = t
    assert maxmin_downlink_single(diag, SIGMA2, P_DL).achieved_sinr == pytest.approx(lo, rel=1e-6)


def test_uplink_downlink_power_imbalance():
    diag = zf_diagnostics(_equal_orthogonal_channel(128, 18, 1e-9))
    uplink = maxmin_uplink_single(diag, SIGMA2, P_UL)
    downlink = maxmin_downlink_single(diag, SIGMA2, P_DL)
    assert uplink.achieved_sinr / downlink.achieved_sinr == pytest.approx(18 * 0.2 / 2)
    assert uplink.achieved_sinr_db - downlink.achieved_sinr_db == pytest.approx(2.55, abs=0.01)


@pytest.mark.parametrize("solver, budget", [(maxmin_uplink_single, P_UL), (maxmin_downlink_single, P_DL)])
def test_single_cell_optimality_certificate(random_channel, solver, budget):
    diag = _random_diag(random_channel)
    allocation = solver(diag, SIGMA2, budget)
    baseline = np.min(uplink_sinrs(allocation.per_terminal_power, diag.inv_gram_diag, None, SIGMA2))
    for k in range(diag.K):
        raised = allocation.per_terminal_power.copy()
        raised[k] *= 1.01
        sinrs = uplink_sinrs(raised, diag.inv_gram_diag, None, SIGMA2)
        assert np.min(sinrs) <= baseline * (1 + 1e-12)


# ── Multi cell ───────────────────────────────────────────────────────────────

def test_uncoupled_multicell_reduces_to_single_cell(random_channel):
    diag = _random_diag(random_channel)
    w = diag.inv_gram_diag
    zero = np.zeros((diag.K, diag.K))
    uplink = maxmin_uplink_multicell(w, zero, SIGMA2, P_UL)
    downlink = maxmin_downlink_multicell(w, zero, np.zeros(diag.K, dtype=int), SIGMA2, P_DL)
    reference_up = maxmin_uplink_single(diag, SIGMA2, P_UL)
    reference_down = maxmin_downlink_single(diag, SIGMA2, P_DL)
    assert uplink.achieved_sinr == reference_up.achieved_sinr
    assert downlink.achieved_sinr == reference_down.achieved_sinr
    np.testing.assert_array_equal(uplink.per_terminal_power, reference_up.per_terminal_power)
    np.testing.assert_array_equal(downlink.per_terminal_power, reference_down.per_terminal_power)


def test_uncoupled_cells_take_the_worst_cell(random_channel):
    first, second = _random_diag(random_channel), _random_diag(random_channel, scale=5e-5)
    w = np.concatenate([first.inv_gram_diag, second.inv_gram_diag])
    cells = np.repeat([0, 1], 6)
    zero = np.zeros((12, 12))
    expected_up = min(maxmin_uplink_single(d, SIGMA2, P_UL).achieved_sinr for d in (first, second))
    expected_down = min(maxmin_downlink_single(d, SIGMA2, P_DL).achieved_sinr for d in (first, second))
    assert maxmin_uplink_multicell(w, zero, SIGMA2, P_UL).achieved_sinr == pytest.approx(expected_up)
    assert maxmin_downlink_multicell(w, zero, cells, SIGMA2, P_DL).achieved_sinr == pytest.approx(expected_down)


def test_symmetric_two_terminal_uplink():
    gain, cross, P, sigma2 = 1e-8, 1e-11, 0.2, 1e-12
    w = np.full(2, 1 / gain)
    C = np.array([[0.0, cross], [cross, 0.0]])
    allocation = maxmin_uplink_multicell(w, C, sigma2, P)
    expected = gain * P / (sigma2 + cross * P)
    assert allocation.achieved_sinr == pytest.approx(expected, rel=1e-4)
    assert allocation.achieved_sinr <= expected
    assert allocation.bisection_steps > 0
    np.testing.assert_allclose(allocation.per_terminal_power, allocation.per_terminal_power[0])
    assert np.max(allocation.per_terminal_power) <= P * (1 + 1e-9)


def test_interference_limited_bound():
    gain, cross = 1e-8, 1e-11
    w = np.full(2, 1 / gain)
    C = np.array([[0.0, cross], [cross, 0.0]])
    bound = gain / cross
    for P in (0.2, 2.0, 200.0):
        assert maxmin_uplink_multicell(w, C, 1e-15, P).achieved_sinr <= bound * (1 + 1e-9)


def test_two_cell_downlink_matches_linear_solve():
    w = np.array([1 / 4e-8, 1 / 1e-8])
    D = np.array([[0.0, 2e-11], [5e-12, 0.0]])
    cells = np.array([0, 1])
    sigma2, P = 1e-10, 2.0
    allocation = maxmin_downlink_multicell(w, D, cells, sigma2, P)
    t = allocation.achieved_sinr
    expected_q = np.linalg.solve(np.eye(2) - t * w[:, np.newaxis] * D, t * w * sigma2)
    np.testing.assert_allclose(allocation.per_terminal_power, expected_q, rtol=1e-9)
    # the binding cell spends its pool at the optimum, up to the bisection tolerance
    assert np.max(allocation.per_terminal_power) == pytest.approx(P, rel=10 * BISECTION_TOLERANCE)
    assert np.max(allocation.per_terminal_power) <= P * (1 + 1e-9)


def _coupled_instance(rng, K=8, n_cells=2):
    w = 1 / (10 ** rng.uniform(-9, -8, K))
    C = 10 ** rng.uniform(-13, -12, (K, K))
    cells = np.repeat(np.arange(n_cells), K // n_cells)
    C[cells[:, np.newaxis] == cells[np.newaxis, :]] = 0.0
    return w, C, cells


def test_multicell_equalizes_and_respects_budgets(rng):
    w, C, cells = _coupled_instance(rng)
    uplink = maxmin_uplink_multicell(w, C, SIGMA2, P_UL)
    up_sinrs = uplink_sinrs(uplink.per_terminal_power, w, C, SIGMA2)
    assert _spread(up_sinrs) <= 1e-9
    assert up_sinrs.min() == pytest.approx(uplink.achieved_sinr, rel=1e-9)
    assert np.max(uplink.per_terminal_power) <= P_UL * (1 + 1e-9)

    downlink = maxmin_downlink_multicell(w, C.T, cells, SIGMA2, P_DL)
    down_sinrs = downlink_sinrs(downlink.per_terminal_power, w, C.T, SIGMA2)
    assert _spread(down_sinrs) <= 1e-9
    assert np.max(np.bincount(cells, weights=downlink.per_terminal_power)) <= P_DL * (1 + 1e-9)


def test_pooled_uplink_mirrors_the_downlink_pool(rng):
    w, C, cells = _coupled_instance(rng)
    pooled = maxmin_uplink_multicell(w, C, SIGMA2, P_UL, cells)
    # four terminals per cell share 4 * P_UL, the same problem as a downlink pool over C
    mirrored = maxmin_downlink_multicell(w, C, cells, SIGMA2, 4 * P_UL)
    assert pooled.achieved_sinr == pytest.approx(mirrored.achieved_sinr, rel=BISECTION_TOLERANCE)
    assert np.max(np.bincount(cells, weights=pooled.per_terminal_power)) <= 4 * P_UL * (1 + 1e-9)
    sinrs = uplink_sinrs(pooled.per_terminal_power, w, C, SIGMA2)
    assert _spread(sinrs) <= 1e-9
    assert pooled.binding.endswith("power pool")
    # pooling only relaxes the per-terminal caps
    assert pooled.achieved_sinr >= maxmin_uplink_multicell(w, C, SIGMA2, P_UL).achieved_sinr * (1 - 1e-9)


def test_pooled_uplink_without_coupling(rng):
    w = 1 / (10 ** rng.uniform(-9, -8, 6))
    cells = np.array([0, 0, 0, 1, 1, 1])
    allocation = maxmin_uplink_multicell(w, np.zeros((6, 6)), SIGMA2, P_UL, cells)
    totals = np.bincount(cells, weights=w)
    assert allocation.achieved_sinr == pytest.approx(np.min(3 * P_UL / (SIGMA2 * totals)))
    assert np.max(np.bincount(cells, weights=allocation.per_terminal_power)) == pytest.approx(3 * P_UL)


def test_fixed_point_iterates_are_nondecreasing(rng):
    w, C, _ = _coupled_instance(rng)
    t = 0.5 * maxmin_uplink_multicell(w, C, SIGMA2, P_UL).achieved_sinr
    iterates = minimal_power_iterates(t, w, C, SIGMA2)
    previous = next(iterates)
    np.testing.assert_array_equal(previous, 0.0)
    for _ in range(50):
        current = next(iterates)
        assert np.all(current >= previous)
        previous = current


def test_zero_noise_is_invariant_to_amplitude_scaling(rng):
    w, C, cells = _coupled_instance(rng)
    alpha2 = 4.0 ** 3
    base_up = maxmin_uplink_multicell(w, C, 0.0, P_UL)
    scaled_up = maxmin_uplink_multicell(w / alpha2, C * alpha2, 0.0, P_UL)
    assert scaled_up.achieved_sinr == base_up.achieved_sinr
    assert base_up.binding == "interference limited"
    assert np.isfinite(base_up.achieved_sinr)

    base_down = maxmin_downlink_multicell(w, C.T, cells, 0.0, P_DL)
    scaled_down = maxmin_downlink_multicell(w / alpha2, C.T * alpha2, cells, 0.0, P_DL)
    assert scaled_down.achieved_sinr == base_down.achieved_sinr


def test_zero_noise_matches_vanishing_noise_limit(rng):
    w, C, _ = _coupled_instance(rng)
    limit = maxmin_uplink_multicell(w, C, 0.0, P_UL).achieved_sinr
    tiny = maxmin_uplink_multicell(w, C, 1e-24, P_UL).achieved_sinr
    assert tiny == pytest.approx(limit, rel=1e-3)
    assert tiny <= limit * (1 + 1e-9)


def test_allocation_reports_decibels():
    allocation = PowerAllocation(np.ones(2), 100.0, "pool", "downlink")
    assert allocation.achieved_sinr_db == pytest.approx(20.0)
