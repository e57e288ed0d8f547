"""
Error Types
-----------
Exceptions raised by the antenna-count simulator.
Project: LoS Massive MIMO Antenna Count
"""


class AntennaCountError(Exception):
    """Base class for every error raised by this package."""


class ConfigurationError(AntennaCountError, ValueError):
    """Invalid scenario configuration, config document, or array constraint."""

    def __init__(self, message, key=None, line=None):
        location = []
        if line is not None:
            location.append(f"line {line}")
        if key is not None:
            location.append(f"key '{key}'")
        if location:
            message = f"{', '.join(location)}: {message}"
        super().__init__(message)
        self.key = key
        self.line = line


class DomainError(AntennaCountError, ValueError):
    """A physical quantity is outside its domain (e.g. a nonpositive distance)."""


class SingularChannelError(AntennaCountError):
    """The Gram matrix of a channel realization is numerically rank deficient."""

    def __init__(self, pivot_index, pivot=None):
        detail = f" (pivot {pivot:.3e})" if pivot is not None else ""
        super().__init__(f"singular channel Gram matrix at pivot {pivot_index}{detail}")
        self.pivot_index = pivot_index
        self.pivot = pivot


class DegenerateTrialsError(AntennaCountError):
    """Too many Monte-Carlo realizations had to be redrawn."""

    def __init__(self, n_redraws, n_trials, limit):
        super().__init__(
            f"{n_redraws} degenerate redraws over {n_trials} trials exceeds the limit of {limit}"
        )
        self.n_redraws = n_redraws
        self.n_trials = n_trials
        self.limit = limit


class UnattainableTargetError(AntennaCountError):
    """The SINR target is not reached even at the configured antenna ceiling."""

    def __init__(self, target_db, max_antennas, reached_db=None):
        reached = f" (reached {reached_db:.2f} dB)" if reached_db is not None else ""
        super().__init__(
            f"target {target_db:.2f} dB not attainable with up to {max_antennas} antennas{reached}"
        )
        self.target_db = target_db
        self.max_antennas = max_antennas
        self.reached_db = reached_db
