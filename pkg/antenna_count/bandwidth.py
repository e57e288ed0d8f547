"""
Bandwidth / Power Tradeoff
--------------------------
Shannon-Hartley capacity B log2(1 + P/(B N0)), its finite wideband limit,
the power needed for a rate, and the pilot-limited throughput
B log2(1 + rho0 B0^2 / B^2) whose SNR falls as 1/B^2.
Project: LoS Massive MIMO Antenna Count
"""

import numpy as np
import pandas as pd
from scipy.optimize import minimize_scalar

from .errors import DomainError

LOG2_E = np.log2(np.e)


def _require_positive(**values):
    for name, value in values.items():
        if np.any(np.asarray(value) <= 0):
            raise DomainError(f"{name} must be positive")


def capacity(B, P, N0):
    """Shannon capacity in bit/s; vectorized over B."""
    _require_positive(bandwidth=B, power=P, noise_density=N0)
    B = np.asarray(B, dtype=float)
    result = B * np.log1p(P / (B * N0)) / np.log(2)
    return float(result) if result.ndim == 0 else result


def wideband_limit(P, N0):
    """Capacity as B -> infinity: (P / N0) log2(e)."""
    _require_positive(power=P, noise_density=N0)
    return P / N0 * LOG2_E


def power_for_rate(B, R, N0):
    """Received power that sustains rate R over bandwidth B: B N0 (2^(R/B) - 1)."""
    _require_positive(bandwidth=B, noise_density=N0)
    if np.any(np.asarray(R) < 0):
        raise DomainError("rate must be non-negative")
    B = np.asarray(B, dtype=float)
    result = B * N0 * np.expm1(np.asarray(R) / B * np.log(2))
    return float(result) if result.ndim == 0 else result


def calibrate_noise_density(P, B, R):
    """N0 such that capacity(B, P, N0) == R, e.g. 10 W over 20 MHz for 60 Mbit/s."""
    _require_positive(power=P, bandwidth=B, rate=R)
    snr = np.expm1(R / B * np.log(2))
    return P / (B * snr)


def pilot_limited_throughput(B, rho0, B0):
    """Approximate throughput B log2(1 + rho0 B0^2 / B^2) when pilots set the estimate quality."""
    _require_positive(bandwidth=B, reference_snr=rho0, reference_bandwidth=B0)
    B = np.asarray(B, dtype=float)
    result = B * np.log1p(rho0 * (B0 / B) ** 2) / np.log(2)
    return float(result) if result.ndim == 0 else result


def optimal_pilot_bandwidth(rho0, B0):
    """
    Bandwidth maximizing the pilot-limited throughput.

    Golden-section search over log B; the optimum sits near B0 sqrt(rho0) / 2.
    """
    _require_positive(reference_snr=rho0, reference_bandwidth=B0)
    scale = B0 * np.sqrt(rho0)
    result = minimize_scalar(
        lambda x: -pilot_limited_throughput(np.exp(x), rho0, B0),
        bracket=(np.log(scale / 10), np.log(scale / 2), np.log(10 * scale)),
        method="golden",
        tol=1e-10,
    )
    return float(np.exp(result.x))


def bandwidth_sweep(P, N0, bandwidths, rho0=None, B0=None, rate_per_hz=None):
    """
    Tabulate the tradeoff over a list of bandwidths.

    Columns: bandwidth_hz, capacity_bps, wideband_limit_bps, and, when given,
    pilot_limited_bps (needs rho0 and B0) and required_power_w for a rate that
    grows in proportion to the bandwidth (rate_per_hz * B).
    """
    bandwidths = np.asarray(bandwidths, dtype=float)
    table = pd.DataFrame({
        "bandwidth_hz": bandwidths,
        "capacity_bps": capacity(bandwidths, P, N0),
        "wideband_limit_bps": np.full(bandwidths.shape, wideband_limit(P, N0)),
    })
    if rho0 is not None and B0 is not None:
        table["pilot_limited_bps"] = pilot_limited_throughput(bandwidths, rho0, B0)
    if rate_per_hz is not None:
        table["required_power_w"] = power_for_rate(bandwidths, rate_per_hz * bandwidths, N0)
    return table
