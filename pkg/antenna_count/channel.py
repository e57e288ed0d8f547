"""
Line-of-Sight Channel
---------------------
Friis free-space path gain, LoS channel matrices with exact per-element phase,
receiver noise power, and channel orthogonality diagnostics.
Project: LoS Massive MIMO Antenna Count
"""

from dataclasses import dataclass

import numpy as np
from scipy.constants import k as BOLTZMANN

from .config import AMPLITUDE_MODES, SPEED_OF_LIGHT
from .errors import ConfigurationError, DomainError

REFERENCE_TEMPERATURE = 290.0  # K


@dataclass(frozen=True)
class ChannelMatrix:
    """Complex (M, K) amplitude gains between array elements and terminals."""

    entries: np.ndarray
    carrier_wavelength: float

    @property
    def shape(self):
        return self.entries.shape


@dataclass(frozen=True)
class NoiseModel:
    bandwidth: float
    noise_figure: float
    temperature: float = REFERENCE_TEMPERATURE

    @property
    def noise_power(self):
        return noise_power(self.bandwidth, self.noise_figure, self.temperature)


def path_gain(d, wavelength):
    """
    Friis power gain (lambda / (4 pi d))^2 between 0 dBi antennas.

    Works elementwise on arrays of distances.
    """
    d = np.asarray(d, dtype=float)
    if np.any(d <= 0):
        raise DomainError("distance must be positive")
    gain = (wavelength / (4 * np.pi * d)) ** 2
    return float(gain) if gain.ndim == 0 else gain


def fspl_db(distance_m, frequency_hz):
    """Free-space path loss in dB: 20 log10(4 pi d f / c)."""
    if distance_m <= 0 or frequency_hz <= 0:
        raise DomainError("distance and frequency must be positive")
    return 20.0 * np.log10(4 * np.pi * distance_m * frequency_hz / SPEED_OF_LIGHT)


def link_budget_antenna_ratio(f_1, f_2):
    """Antenna multiplier that keeps the path-loss link budget when moving from f_1 to f_2."""
    if f_1 <= 0 or f_2 <= 0:
        raise DomainError("carrier frequencies must be positive")
    return (f_2 / f_1) ** 2


def noise_power(B, NF, T=REFERENCE_TEMPERATURE):
    """Thermal noise power k_B * T * B * 10^(NF/10) in Watt."""
    if not B > 0 or not T > 0:
        raise DomainError("bandwidth and temperature must be positive")
    return BOLTZMANN * T * B * 10 ** (NF / 10)


def _distances(points_a, points_b):
    diff = points_a[:, np.newaxis, :] - points_b[np.newaxis, :, :]
    return np.sqrt(np.einsum("mkc,mkc->mk", diff, diff))


def los_channel(array, terminals, amplitude_mode="center"):
    """
    LoS channel from every array element to every terminal.

    Phase is -2 pi d_mk / lambda with the exact element-to-terminal distance.
    In "center" mode the amplitude lambda / (4 pi d_k) uses the distance from
    the array center and is common to a column; "per_element" uses d_mk.

    Returns
    -------
    ChannelMatrix of shape (M, K)
    """
    if amplitude_mode not in AMPLITUDE_MODES:
        raise ConfigurationError(f"unknown amplitude mode '{amplitude_mode}'", key="amplitude_mode")
    wavelength = array.carrier_wavelength
    d_mk = _distances(array.elements, terminals.positions)
    if np.any(d_mk <= 0):
        raise DomainError("terminal coincides with an array element")

    # reduce before scaling so the phase keeps full precision at long range
    phase = np.exp(-2j * np.pi * np.mod(d_mk / wavelength, 1.0))
    if amplitude_mode == "center":
        d_k = _distances(array.center[np.newaxis, :], terminals.positions)[0]
        amplitude = wavelength / (4 * np.pi * d_k)
        entries = phase * amplitude[np.newaxis, :]
    else:
        entries = phase * (wavelength / (4 * np.pi * d_mk))
    return ChannelMatrix(entries=entries, carrier_wavelength=wavelength)


def center_path_gains(array, terminals):
    """beta_k from the array center to each terminal."""
    d_k = _distances(array.center[np.newaxis, :], terminals.positions)[0]
    return path_gain(d_k, array.carrier_wavelength)


def channel_correlation(G):
    """
    Normalized inner products |g_i^H g_j| / (||g_i|| ||g_j||).

    Accepts a ChannelMatrix or a plain (M, K) array.
    """
    entries = G.entries if isinstance(G, ChannelMatrix) else np.asarray(G)
    norms = np.linalg.norm(entries, axis=0)
    gram = entries.conj().T @ entries
    return np.abs(gram) / np.outer(norms, norms)


def max_pairwise_correlation(G):
    """Largest off-diagonal channel correlation; 0 for a single terminal."""
    corr = channel_correlation(G)
    if corr.shape[0] < 2:
        return 0.0
    return float(corr[~np.eye(corr.shape[0], dtype=bool)].max())
