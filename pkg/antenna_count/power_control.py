"""
Max-Min Power Control
---------------------
Closed-form single-cell max-min SINR allocations for ZF uplink and downlink,
and the system-wide multi-cell problem solved by bisection on the common SINR
with a monotone minimal-power fixed point as the feasibility test.

Terminal k's post-ZF noise enhancement is ||w_k||^2 = [(G^H G)^-1]_kk, so its
SINR is p_k / (||w_k||^2 * (sigma^2 + sum_j X[k, j] p_j)) where X is the
cross-gain matrix (C on the uplink, D on the downlink).
Project: LoS Massive MIMO Antenna Count
"""

import logging
from dataclasses import dataclass

import numpy as np

logger = logging.getLogger(__name__)

BISECTION_TOLERANCE = 1e-4
BISECTION_MAX_STEPS = 200
FIXED_POINT_MAX_ITER = 500
FIXED_POINT_TOLERANCE = 1e-10


@dataclass(frozen=True)
class PowerAllocation:
    """
    Attributes
    ----------
    per_terminal_power : numpy.ndarray
        Uplink transmit powers p_k or downlink power shares q_k in Watt.
    achieved_sinr : float
        Common max-min SINR (linear).
    binding : str
        Active constraint at the optimum.
    link : str
        "uplink" or "downlink".
    bisection_steps : int
        0 for closed-form solutions.
    """

    per_terminal_power: np.ndarray
    achieved_sinr: float
    binding: str
    link: str
    bisection_steps: int = 0

    @property
    def achieved_sinr_db(self):
        return float(10 * np.log10(self.achieved_sinr))


# Per-terminal SINR --------------------------------------------------------


def link_sinrs(powers, w_norm_sq, cross, sigma2):
    """SINR of every terminal for given powers; `cross` may be None (no coupling)."""
    powers = np.asarray(powers, dtype=float)
    interference = np.zeros_like(powers) if cross is None else np.asarray(cross) @ powers
    return powers / (np.asarray(w_norm_sq) * (sigma2 + interference))


def uplink_sinrs(p, w_norm_sq, C, sigma2):
    return link_sinrs(p, w_norm_sq, C, sigma2)


def downlink_sinrs(q, w_norm_sq, D, sigma2):
    return link_sinrs(q, w_norm_sq, D, sigma2)


# Single cell --------------------------------------------------------------


def maxmin_uplink_single(diag, sigma2, P_max):
    """
    Closed-form max-min uplink: the terminal with the largest ||w_k||^2 sends
    at P_max and every other terminal backs off to the same SINR.
    """
    inv = diag.inv_gram_diag
    worst = int(np.argmax(inv))
    sinr = P_max / (sigma2 * inv[worst])
    powers = sinr * sigma2 * inv
    powers[worst] = P_max
    return PowerAllocation(
        per_terminal_power=powers,
        achieved_sinr=float(sinr),
        binding=f"terminal {worst} at P_max",
        link="uplink",
    )


def maxmin_downlink_single(diag, sigma2, P_dl):
    """Closed-form max-min downlink: the whole pool P_dl is shared in proportion to ||w_k||^2."""
    inv = diag.inv_gram_diag
    sinr = P_dl / (sigma2 * np.sum(inv))
    return PowerAllocation(
        per_terminal_power=sinr * sigma2 * inv,
        achieved_sinr=float(sinr),
        binding="downlink power pool",
        link="downlink",
    )


# Multi cell ---------------------------------------------------------------


def minimal_power_iterates(t, w_norm_sq, cross, sigma2, start=None):
    """
    Standard-interference-function iteration for SINR target t.

    Yields p0 = 0 (or `start`), then p_{n+1} = t * ||w||^2 * (sigma^2 + X p_n).
    From zero the iterates are componentwise nondecreasing and converge to the
    minimal power vector meeting the target, or grow without bound.
    """
    w_norm_sq = np.asarray(w_norm_sq, dtype=float)
    cross = np.asarray(cross, dtype=float)
    p = np.zeros_like(w_norm_sq) if start is None else np.asarray(start, dtype=float)
    while True:
        yield p
        p = t * w_norm_sq * (sigma2 + cross @ p)


def _uplink_budget(P_max):
    return lambda p: float(np.max(p)) / P_max


def _cell_pool_budget(cell_index, pools):
    """Budget use of the most loaded cell; `pools` is the power pool of each cell."""
    cell_index = np.asarray(cell_index)
    return lambda q: float(np.max(np.bincount(cell_index, weights=q) / pools))


def _downlink_budget(cell_index, P_dl):
    return _cell_pool_budget(cell_index, P_dl)


def _feasible(t, w_norm_sq, cross, sigma2, budget):
    """
    Run the fixed point at target t.

    Returns (feasible, iterate, iterations). Iterates only grow, so the first
    iterate that breaks the budget settles infeasibility. Near the
    interference limit the contraction is too slow for the iteration cap; the
    limit is then decided directly from the linear fixed-point equation.
    """
    previous = None
    for n, p in enumerate(minimal_power_iterates(t, w_norm_sq, cross, sigma2)):
        usage = budget(p)
        if usage > 1.0:
            return False, p, n
        if previous is not None and np.max(p - previous) <= FIXED_POINT_TOLERANCE * np.max(p):
            return True, p, n
        if n >= FIXED_POINT_MAX_ITER:
            logger.debug("fixed point not converged at t=%.6g after %d iterations", t, n)
            if _spectral_radius(t, w_norm_sq, cross) >= 1.0:
                return False, p, n
            limit = _exact_fixed_point(t, w_norm_sq, cross, sigma2)
            return budget(limit) <= 1.0, limit, n
        previous = p


def _spectral_radius(t, w_norm_sq, cross):
    return float(np.max(np.abs(np.linalg.eigvals(t * w_norm_sq[:, np.newaxis] * cross))))


def _exact_fixed_point(t, w_norm_sq, cross, sigma2):
    """Solve (I - t diag(||w||^2) X) p = t ||w||^2 sigma^2 directly."""
    K = len(w_norm_sq)
    A = np.eye(K) - t * w_norm_sq[:, np.newaxis] * cross
    return np.linalg.solve(A, t * w_norm_sq * sigma2)


def _perron_limit(w_norm_sq, cross, budget, link):
    """
    Interference-limited solution for sigma^2 = 0: the common SINR is the
    reciprocal Perron root of diag(||w||^2) X and powers follow its eigenvector.
    """
    eigenvalues, eigenvectors = np.linalg.eig(w_norm_sq[:, np.newaxis] * cross)
    index = int(np.argmax(eigenvalues.real))
    rho = float(eigenvalues[index].real)
    if rho <= 0:
        return PowerAllocation(
            per_terminal_power=np.zeros_like(w_norm_sq),
            achieved_sinr=np.inf,
            binding="no interference",
            link=link,
        )
    vector = np.abs(eigenvectors[:, index].real)
    return PowerAllocation(
        per_terminal_power=vector / budget(vector),
        achieved_sinr=1.0 / rho,
        binding="interference limited",
        link=link,
    )


def _coupled_maxmin(w_norm_sq, cross, sigma2, t_hi, budget, link, binding):
    if sigma2 == 0:
        return _perron_limit(w_norm_sq, cross, budget, link)

    t_lo = 0.0
    steps = 0
    ok, _, _ = _feasible(t_hi, w_norm_sq, cross, sigma2, budget)
    if ok:
        t_lo = t_hi
    while t_hi - t_lo > BISECTION_TOLERANCE * t_hi and steps < BISECTION_MAX_STEPS:
        t = 0.5 * (t_lo + t_hi)
        ok, _, _ = _feasible(t, w_norm_sq, cross, sigma2, budget)
        if ok:
            t_lo = t
        else:
            t_hi = t
        steps += 1
    logger.debug("%s bisection: t in [%.6g, %.6g] after %d steps", link, t_lo, t_hi, steps)

    powers = _exact_fixed_point(t_lo, w_norm_sq, cross, sigma2)
    return PowerAllocation(
        per_terminal_power=powers,
        achieved_sinr=float(t_lo),
        binding=binding(powers),
        link=link,
        bisection_steps=steps,
    )


def maxmin_uplink_multicell(w_norm_sq, C, sigma2, P_max, cell_index=None):
    """
    System-wide max-min uplink SINR over all cells.

    Without `cell_index` every terminal is capped at P_max. With it the
    terminals of a cell share a pool of (terminals in the cell) * P_max, the
    uplink counterpart of the downlink power pool.

    Parameters
    ----------
    w_norm_sq : numpy.ndarray
        (K,) ||w_k||^2 of each terminal's ZF receiver in its serving cell.
    C : numpy.ndarray
        (K, K) cross gains |v_k^H g_j|^2 for unit-norm receivers v_k; zero for
        same-cell pairs.
    sigma2 : float
        Base-station noise power in Watt.
    P_max : float
        Per-terminal power cap in Watt.
    """
    w_norm_sq = np.asarray(w_norm_sq, dtype=float)
    C = np.asarray(C, dtype=float)
    if cell_index is not None:
        return _pooled_uplink(w_norm_sq, C, np.asarray(cell_index), sigma2, P_max)
    if not np.any(C):
        worst = int(np.argmax(w_norm_sq))
        sinr = P_max / (sigma2 * w_norm_sq[worst])
        powers = sinr * sigma2 * w_norm_sq
        powers[worst] = P_max
        return PowerAllocation(powers, float(sinr), f"terminal {worst} at P_max", "uplink")

    t_hi = P_max / (sigma2 * np.max(w_norm_sq)) if sigma2 > 0 else np.inf
    return _coupled_maxmin(
        w_norm_sq,
        C,
        sigma2,
        t_hi,
        _uplink_budget(P_max),
        "uplink",
        lambda p: f"terminal {int(np.argmax(p))} at P_max",
    )


def _pooled_uplink(w_norm_sq, C, cell_index, sigma2, P_max):
    pools = P_max * np.bincount(cell_index)
    totals = np.bincount(cell_index, weights=w_norm_sq)
    t_hi = np.min(pools / (sigma2 * totals)) if sigma2 > 0 else np.inf
    if not np.any(C):
        return PowerAllocation(t_hi * sigma2 * w_norm_sq, float(t_hi), "uplink power pool", "uplink")
    return _coupled_maxmin(
        w_norm_sq,
        C,
        sigma2,
        t_hi,
        _cell_pool_budget(cell_index, pools),
        "uplink",
        lambda p: f"cell {int(np.argmax(np.bincount(cell_index, weights=p) / pools))} power pool",
    )


def maxmin_downlink_multicell(w_norm_sq, D, cell_index, sigma2, P_dl):
    """
    System-wide max-min downlink SINR with a power pool of P_dl per cell.

    D[k, j] = |g_k^H a_j|^2 is the gain from terminal j's precoder in its cell
    to terminal k; zero for same-cell pairs.
    """
    w_norm_sq = np.asarray(w_norm_sq, dtype=float)
    D = np.asarray(D, dtype=float)
    cell_index = np.asarray(cell_index)
    totals = np.array([np.sum(w_norm_sq[cell_index == c]) for c in np.unique(cell_index)])

    if not np.any(D):
        sinr = np.min(P_dl / (sigma2 * totals))
        return PowerAllocation(sinr * sigma2 * w_norm_sq, float(sinr), "downlink power pool", "downlink")

    budget = _downlink_budget(cell_index, P_dl)
    t_hi = np.min(P_dl / (sigma2 * totals)) if sigma2 > 0 else np.inf
    return _coupled_maxmin(
        w_norm_sq,
        D,
        sigma2,
        t_hi,
        budget,
        "downlink",
        lambda q: f"cell {int(np.argmax(np.bincount(cell_index, weights=q)))} power pool",
    )
