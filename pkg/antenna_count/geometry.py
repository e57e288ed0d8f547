"""
Array and Cell Geometry
-----------------------
Base-station array element positions (circular, linear, rectangular), the
single and seven-cell layouts, and uniform terminal placement inside cells.
Project: LoS Massive MIMO Antenna Count
"""

import math
from dataclasses import dataclass

import numpy as np

from .config import ARRAY_SHAPES, SPEED_OF_LIGHT
from .errors import ConfigurationError


@dataclass(frozen=True)
class ArrayLayout:
    """
    Base-station antenna elements.

    Attributes
    ----------
    elements : numpy.ndarray
        (M, 3) element positions in meters.
    shape : str
        circular, linear or rectangular.
    carrier_wavelength : float
        Wavelength in meters; element spacing is half of it.
    center : numpy.ndarray
        (3,) array center in meters.
    """

    elements: np.ndarray
    shape: str
    carrier_wavelength: float
    center: np.ndarray

    @property
    def M(self):
        return self.elements.shape[0]

    @property
    def diameter(self):
        return array_diameter(self.M, SPEED_OF_LIGHT / self.carrier_wavelength, self.shape)


@dataclass(frozen=True)
class TerminalPlacement:
    """Terminal positions (K, 3) in meters and the serving cell of each."""

    positions: np.ndarray
    cell_index: np.ndarray

    @property
    def K(self):
        return self.positions.shape[0]

    def in_cell(self, cell):
        """Placement restricted to the terminals of one cell."""
        mask = self.cell_index == cell
        return TerminalPlacement(self.positions[mask], self.cell_index[mask])


@dataclass(frozen=True)
class CellLayout:
    """Cell centers (n_cells, 2) and the common cell radius in meters."""

    centers: np.ndarray
    radius: float

    @property
    def n_cells(self):
        return self.centers.shape[0]


def rectangular_grid(M):
    """
    Factor M into rows x cols for a horizontal strip.

    rows is the smallest divisor of M above one, so an even M gives a two-row
    strip; the long side (cols) runs along x like the linear array.
    """
    if M < 1:
        raise ConfigurationError(f"antenna count must be at least 1, got {M}", key="M")
    if M == 1:
        return 1, 1
    if is_prime(M):
        raise ConfigurationError(
            f"rectangular array needs M = rows x cols with rows, cols >= 2; {M} is prime",
            key="M",
        )
    rows = next(d for d in range(2, math.isqrt(M) + 1) if M % d == 0)
    return rows, M // rows


def is_prime(M):
    return M >= 2 and all(M % d for d in range(2, math.isqrt(M) + 1))


def valid_antenna_count(M, shape):
    """Whether `shape` can hold exactly M elements."""
    if M < 1:
        return False
    return shape != "rectangular" or M == 1 or not is_prime(M)


def array_diameter(M, f_c, shape="circular"):
    """
    Largest extent of the array in meters.

    circular: M*lambda/(2*pi); linear: (M-1)*lambda/2; rectangular: grid diagonal.
    """
    wavelength = SPEED_OF_LIGHT / f_c
    if shape == "circular":
        return M * wavelength / (2 * np.pi)
    if shape == "linear":
        return (M - 1) * wavelength / 2
    if shape == "rectangular":
        rows, cols = rectangular_grid(M)
        return math.hypot(rows - 1, cols - 1) * wavelength / 2
    raise ConfigurationError(f"unknown array shape '{shape}'", key="array_shape")


def build_array(shape, M, f_c, center=(0.0, 0.0), height=30.0):
    """
    Build a half-wavelength-spaced base-station array.

    Parameters
    ----------
    shape : str
        circular, linear or rectangular.
    M : int
        Number of antenna elements.
    f_c : float
        Carrier frequency in Hz.
    center : sequence of float
        Horizontal (x, y) position of the array center in meters.
    height : float
        Array height over ground in meters.

    Returns
    -------
    ArrayLayout
    """
    if shape not in ARRAY_SHAPES:
        raise ConfigurationError(f"unknown array shape '{shape}'", key="array_shape")
    if M < 1:
        raise ConfigurationError(f"antenna count must be at least 1, got {M}", key="M")
    if not f_c > 0:
        raise ConfigurationError("carrier frequency must be positive", key="carrier_frequency")

    wavelength = SPEED_OF_LIGHT / f_c
    spacing = wavelength / 2
    center3 = np.array([center[0], center[1], height], dtype=float)

    if shape == "circular":
        radius = M * wavelength / (4 * np.pi)
        angles = 2 * np.pi * np.arange(M) / M
        offsets = np.column_stack([radius * np.cos(angles), radius * np.sin(angles), np.zeros(M)])
    elif shape == "linear":
        x = (np.arange(M) - (M - 1) / 2) * spacing
        offsets = np.column_stack([x, np.zeros(M), np.zeros(M)])
    else:
        rows, cols = rectangular_grid(M)
        x = (np.arange(cols) - (cols - 1) / 2) * spacing
        y = (np.arange(rows) - (rows - 1) / 2) * spacing
        xx, yy = np.meshgrid(x, y)
        offsets = np.column_stack([xx.ravel(), yy.ravel(), np.zeros(M)])

    return ArrayLayout(
        elements=center3 + offsets,
        shape=shape,
        carrier_wavelength=wavelength,
        center=center3,
    )


def place_terminals(rng, K, cell, R, h_t, cell_index=0):
    """
    Place K terminals uniformly at random inside a disc.

    The radial coordinate is R*sqrt(u) so that positions are uniform over the
    disc area; u < 1 keeps every terminal strictly inside.

    Parameters
    ----------
    rng : numpy.random.Generator
        Seeded generator; draws K radii then K angles.
    K : int
        Number of terminals.
    cell : sequence of float
        Horizontal (x, y) cell center in meters.
    R : float
        Cell radius in meters.
    h_t : float
        Terminal height in meters.
    """
    if K < 1:
        raise ConfigurationError(f"terminal count must be at least 1, got {K}", key="K")
    r = R * np.sqrt(rng.random(K))
    theta = 2 * np.pi * rng.random(K)
    positions = np.column_stack(
        [cell[0] + r * np.cos(theta), cell[1] + r * np.sin(theta), np.full(K, float(h_t))]
    )
    return TerminalPlacement(positions=positions, cell_index=np.full(K, cell_index, dtype=int))


def place_all_terminals(rng, K, cells, h_t):
    """K terminals per cell, drawn cell by cell in index order."""
    placements = [
        place_terminals(rng, K, center, cells.radius, h_t, cell_index=c)
        for c, center in enumerate(cells.centers)
    ]
    return TerminalPlacement(
        positions=np.vstack([p.positions for p in placements]),
        cell_index=np.concatenate([p.cell_index for p in placements]),
    )


def build_seven_cells(R, intersite):
    """One cell at the origin and six neighbours at distance `intersite`, 60 degrees apart."""
    if not intersite > 0:
        raise ConfigurationError("intersite distance must be positive", key="intersite")
    angles = np.deg2rad(60.0 * np.arange(6))
    ring = intersite * np.column_stack([np.cos(angles), np.sin(angles)])
    return CellLayout(centers=np.vstack([np.zeros((1, 2)), ring]), radius=float(R))


def build_cells(layout, R, intersite):
    if layout == "single":
        return CellLayout(centers=np.zeros((1, 2)), radius=float(R))
    if layout == "seven_cell":
        return build_seven_cells(R, intersite)
    raise ConfigurationError(f"unknown layout '{layout}'", key="layout")


def cell_arrays(cfg, cells):
    """One base-station array per cell, centered above the cell center."""
    return [
        build_array(cfg.array_shape, cfg.M, cfg.require_carrier(), center=center, height=cfg.bs_height)
        for center in cells.centers
    ]
