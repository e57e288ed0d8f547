"""
Monte-Carlo Driver
------------------
Repeated random terminal placements, per-realization max-min SINRs, empirical
CDFs with percentile queries, and the search for the smallest antenna count
that reaches a 95%-likely SINR target.

Every trial t draws from its own generator derived from (seed, t), so results
do not depend on execution order or on the number of worker processes.
Project: LoS Massive MIMO Antenna Count
"""

import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .channel import link_budget_antenna_ratio, los_channel, max_pairwise_correlation
from .config import worker_count
from .errors import DegenerateTrialsError, DomainError, SingularChannelError, UnattainableTargetError
from .geometry import (
    TerminalPlacement,
    array_diameter,
    build_cells,
    cell_arrays,
    place_all_terminals,
    valid_antenna_count,
)
from .power_control import (
    maxmin_downlink_multicell,
    maxmin_downlink_single,
    maxmin_uplink_multicell,
    maxmin_uplink_single,
)
from .zf_core import zf_diagnostics, zf_precoders

logger = logging.getLogger(__name__)

LINKS = ("uplink", "downlink")
DEGENERATE_FRACTION_LIMIT = 0.01
MAX_REDRAWS_PER_TRIAL = 100
CHUNKS_PER_WORKER = 4


@dataclass(frozen=True)
class CdfSummary:
    """
    Empirical distribution of the per-realization max-min SINR.

    Attributes
    ----------
    sorted_samples : numpy.ndarray
        SINR values in dB, ascending.
    n_trials : int
    n_degenerate_redraws : int
        Placements redrawn because the channel was singular.
    link : str
    label : str
        Scenario label the samples belong to.
    """

    sorted_samples: np.ndarray
    n_trials: int
    n_degenerate_redraws: int = 0
    link: str = "uplink"
    label: str = ""

    @property
    def cum_prob(self):
        """Empirical CDF value i/n of the i-th smallest sample (1-based)."""
        return np.arange(1, self.n_trials + 1) / self.n_trials

    def percentile(self, q):
        return percentile(self, q)

    def spectral_efficiency(self, q):
        """log2(1 + SINR) in bit/s/Hz at percentile q."""
        return float(np.log2(1 + 10 ** (self.percentile(q) / 10)))

    def interquartile_range(self):
        return self.percentile(0.75) - self.percentile(0.25)


@dataclass(frozen=True)
class SearchResult:
    """Smallest antenna count whose q-quantile SINR reaches the target."""

    M_star: int
    target_sinr: float
    percentile: float
    bracket: tuple
    trials_per_eval: int
    link: str = "uplink"
    achieved_sinr: float = math.nan
    confirm_trials: int = 0

    def diameter(self, f_c, shape="circular"):
        return array_diameter(self.M_star, f_c, shape)


def percentile(cdf, q):
    """
    Quantile q of the samples by linear interpolation between order statistics
    at 1-based rank q*(n-1)+1.
    """
    if not 0 < q < 1:
        raise DomainError(f"quantile must lie in (0, 1), got {q}")
    if cdf.n_trials < 2:
        raise DomainError("percentile needs at least two samples")
    return float(np.quantile(cdf.sorted_samples, q, method="linear"))


def trial_rng(seed, trial):
    """Independent generator for one trial."""
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(trial,)))


# One realization ----------------------------------------------------------


def _single_cell_realization(cfg, cells, arrays, rng):
    terminals = place_all_terminals(rng, cfg.K, cells, cfg.terminal_height)
    diag = zf_diagnostics(los_channel(arrays[0], terminals, cfg.amplitude_mode))
    uplink = maxmin_uplink_single(diag, cfg.uplink_noise_power, cfg.P_ul_max)
    downlink = maxmin_downlink_single(diag, cfg.downlink_noise_power, cfg.P_dl)
    return uplink.achieved_sinr, downlink.achieved_sinr


def cross_gains(cfg, arrays, terminals):
    """
    Noise enhancements ||w_k||^2 and uplink cross gains C for all terminals.

    C[k, j] = |a_k^H g_j|^2 where a_k is terminal k's unit-norm ZF vector in
    its own cell and g_j the channel from foreign terminal j to that cell's
    array. By reciprocity the downlink matrix is D = C^T.
    """
    K_total = terminals.K
    w_norm_sq = np.empty(K_total)
    C = np.zeros((K_total, K_total))
    for c, array in enumerate(arrays):
        own = terminals.cell_index == c
        own_channel = los_channel(array, terminals.in_cell(c), cfg.amplitude_mode)
        diag = zf_diagnostics(own_channel)
        w_norm_sq[own] = diag.inv_gram_diag
        if len(arrays) == 1:
            continue
        precoders, _ = zf_precoders(own_channel, diag)
        foreign = ~own
        foreign_channel = los_channel(
            array,
            TerminalPlacement(terminals.positions[foreign], terminals.cell_index[foreign]),
            cfg.amplitude_mode,
        )
        C[np.ix_(own, foreign)] = np.abs(precoders.conj().T @ foreign_channel.entries) ** 2
    return w_norm_sq, C


def _multicell_realization(cfg, cells, arrays, rng):
    terminals = place_all_terminals(rng, cfg.K, cells, cfg.terminal_height)
    w_norm_sq, C = cross_gains(cfg, arrays, terminals)
    pooled = terminals.cell_index if cfg.effective_uplink_budget == "per_cell" else None
    uplink = maxmin_uplink_multicell(w_norm_sq, C, cfg.uplink_noise_power, cfg.P_ul_max, pooled)
    downlink = maxmin_downlink_multicell(
        w_norm_sq, C.T, terminals.cell_index, cfg.downlink_noise_power, cfg.P_dl
    )
    return uplink.achieved_sinr, downlink.achieved_sinr


def _run_chunk(cfg, seed, trials, multicell):
    """Run a block of trials; returns (uplink, downlink, redraws) per trial."""
    cells = build_cells(cfg.layout if multicell else "single", cfg.cell_radius, cfg.effective_intersite)
    arrays = cell_arrays(cfg, cells)
    realization = _multicell_realization if multicell else _single_cell_realization
    results = []
    for trial in trials:
        rng = trial_rng(seed, int(trial))
        redraws = 0
        while True:
            try:
                uplink, downlink = realization(cfg, cells, arrays, rng)
                break
            except SingularChannelError as exc:
                redraws += 1
                logger.debug("trial %d: %s, redrawing placement", trial, exc)
                if redraws > MAX_REDRAWS_PER_TRIAL:
                    raise DegenerateTrialsError(redraws, 1, MAX_REDRAWS_PER_TRIAL) from exc
        results.append((uplink, downlink, redraws))
    return results


def _run_chunk_args(args):
    return _run_chunk(*args)


def _execute(cfg, n, seed, multicell, workers):
    if n < 1:
        raise DomainError(f"trial count must be at least 1, got {n}")
    cfg.require_carrier()
    seed = cfg.seed if seed is None else seed
    workers = worker_count() if workers is None else workers

    logger.info("running %d %s trials of %s (seed %d, %d workers)",
                n, "multi-cell" if multicell else "single-cell", cfg.scenario_label, seed, workers)
    if workers <= 1 or n == 1:
        rows = _run_chunk(cfg, seed, range(n), multicell)
    else:
        chunks = [c for c in np.array_split(np.arange(n), workers * CHUNKS_PER_WORKER) if c.size]
        with ProcessPoolExecutor(max_workers=workers) as executor:
            parts = executor.map(_run_chunk_args, [(cfg, seed, c.tolist(), multicell) for c in chunks])
            rows = [row for part in parts for row in part]

    values = np.array(rows, dtype=float)
    redraws = int(values[:, 2].sum())
    if redraws > DEGENERATE_FRACTION_LIMIT * n:
        raise DegenerateTrialsError(redraws, n, math.floor(DEGENERATE_FRACTION_LIMIT * n))
    if redraws:
        logger.info("%d degenerate placements redrawn", redraws)

    label = cfg.scenario_label
    return {
        link: CdfSummary(
            sorted_samples=np.sort(10 * np.log10(values[:, column])),
            n_trials=n,
            n_degenerate_redraws=redraws,
            link=link,
            label=label,
        )
        for column, link in enumerate(LINKS)
    }


def run_trials(cfg, n=None, seed=None, workers=None):
    """
    Single-cell Monte-Carlo run with closed-form max-min power control.

    Returns
    -------
    dict
        {"uplink": CdfSummary, "downlink": CdfSummary}
    """
    n = cfg.n_trials if n is None else n
    if cfg.layout != "single":
        return run_multicell(cfg, n, seed, workers)
    return _execute(cfg, n, seed, multicell=False, workers=workers)


def run_multicell(cfg, n=None, seed=None, workers=None):
    """
    Multi-cell Monte-Carlo run with system-wide max-min power control over
    the cells of cfg.layout; one common SINR per realization and link.
    """
    n = cfg.n_trials if n is None else n
    return _execute(cfg, n, seed, multicell=True, workers=workers)


# Antenna-count search -----------------------------------------------------


def _bisect(failing, passing, passes):
    """Smallest passing M in (failing, passing]; returns (failing, passing) with a gap of one."""
    while passing - failing > 1:
        mid = (failing + passing) // 2
        if passes(mid):
            passing = mid
        else:
            failing = mid
    return failing, passing


def _snap_up(M, shape, M_max):
    """Smallest count >= M that `shape` can hold, else the largest one <= M_max."""
    for candidate in range(M, M_max + 1):
        if valid_antenna_count(candidate, shape):
            return candidate
    return next(c for c in range(M_max, 0, -1) if valid_antenna_count(c, shape))


def find_min_antennas(cfg, target, q=0.05, n=None, seed=None, link="uplink", workers=None):
    """
    Smallest M whose q-quantile SINR on `link` reaches `target` dB.

    Exponential bracketing M = K, 2K, 4K, ... then binary search with
    cfg.search_trials trials per evaluation, all on common random numbers.
    The result is re-verified with n trials at M* and M*-1 and moved if the
    noisier search landed on the wrong side of the threshold.
    Counts the array shape cannot hold (a prime M for a rectangular array)
    are never returned; each is evaluated as the next count the shape can hold.
    """
    n = cfg.n_trials if n is None else n
    seed = cfg.seed if seed is None else seed
    K = cfg.K
    M_max = cfg.max_antennas
    shape = cfg.array_shape
    if target == -math.inf:
        M_min = _snap_up(K, shape, M_max)
        return SearchResult(M_min, target, q, (K - 1, M_min), 0, link, math.inf, 0)

    cache = {}

    def quantile_at(M, trials):
        # counts the array shape cannot hold are evaluated at the next one it can
        M = _snap_up(M, shape, M_max)
        if (M, trials) not in cache:
            try:
                summaries = run_trials(cfg.with_overrides(M=M), trials, seed, workers)
                cache[M, trials] = summaries[link].percentile(q)
            except DegenerateTrialsError as exc:
                logger.warning("M=%d treated as failing: %s", M, exc)
                cache[M, trials] = -math.inf
            logger.debug("M=%d, %d trials: %.2f dB", M, trials, cache[M, trials])
        return cache[M, trials]

    def grow(failing, passing, step, trials):
        # M < K never passes; K - 1 stands for "no failing count evaluated"
        while quantile_at(passing, trials) < target:
            if passing >= M_max:
                raise UnattainableTargetError(target, M_max, quantile_at(passing, trials))
            failing, passing = passing, min(passing + step, M_max)
            step *= 2
        return _bisect(failing, passing, lambda M: quantile_at(M, trials) >= target)

    search_trials = min(cfg.search_trials, n)
    failing, passing = grow(K - 1, K, K, search_trials)
    passing = _snap_up(passing, shape, M_max)
    logger.info("search bracket for %.1f dB: (%d, %d] at %d trials", target, failing, passing, search_trials)

    if n > search_trials:
        step = max(1, passing // 16)
        if quantile_at(passing, n) < target:
            failing, passing = grow(passing, min(passing + step, M_max), step, n)
        elif passing > K and quantile_at(passing - 1, n) >= target:
            passing -= 1
            failing = max(K - 1, passing - step)
            while failing >= K and quantile_at(failing, n) >= target:
                passing, step = failing, 2 * step
                failing = max(K - 1, passing - step)
            failing, passing = _bisect(failing, passing, lambda M: quantile_at(M, n) >= target)
        else:
            failing = passing - 1

    passing = _snap_up(passing, shape, M_max)
    return SearchResult(
        M_star=passing,
        target_sinr=target,
        percentile=q,
        bracket=(failing, passing),
        trials_per_eval=search_trials,
        link=link,
        achieved_sinr=quantile_at(passing, max(n, search_trials)),
        confirm_trials=n if n > search_trials else 0,
    )


# Orthogonality and antenna-ratio diagnostics ------------------------------


def run_orthogonality(cfg, n=None, seed=None):
    """Sorted per-realization maximum pairwise channel correlation (single cell)."""
    n = cfg.n_trials if n is None else n
    seed = cfg.seed if seed is None else seed
    cells = build_cells("single", cfg.cell_radius, cfg.effective_intersite)
    array = cell_arrays(cfg, cells)[0]
    samples = np.empty(n)
    for trial in range(n):
        terminals = place_all_terminals(trial_rng(seed, trial), cfg.K, cells, cfg.terminal_height)
        samples[trial] = max_pairwise_correlation(los_channel(array, terminals, cfg.amplitude_mode))
    return np.sort(samples)


def antenna_ratio(pcs_M, mmwave_M, f_pcs, f_mmwave, shape="circular"):
    """Realised antenna and diameter ratios next to the path-loss-only predictions."""
    path_loss_ratio = link_budget_antenna_ratio(f_pcs, f_mmwave)
    return {
        "antenna_ratio": mmwave_M / pcs_M,
        "path_loss_ratio": path_loss_ratio,
        "path_loss_antennas": pcs_M * path_loss_ratio,
        "diameter_ratio": array_diameter(pcs_M, f_pcs, shape) / array_diameter(mmwave_M, f_mmwave, shape),
        "wavelength_ratio": f_mmwave / f_pcs,
    }
