"""
Scenario Configuration
----------------------
Default system parameters, the flat ``key = value`` config format with unit
suffixes, and the worker-count environment setting.
Project: LoS Massive MIMO Antenna Count
"""

import os
import re
from dataclasses import asdict, dataclass, replace
from typing import Optional

from .errors import ConfigurationError

SPEED_OF_LIGHT = 299792458.0  # m/s
PCS_CARRIER = 1.9e9  # Hz
MMWAVE_CARRIER = 60e9  # Hz

WORKERS_ENV = "ANTENNA_COUNT_WORKERS"

ARRAY_SHAPES = ("circular", "linear", "rectangular")
LAYOUTS = ("single", "seven_cell")
AMPLITUDE_MODES = ("center", "per_element")
UPLINK_BUDGETS = ("auto", "per_terminal", "per_cell")

# seven-cell base stations sit this many cell radii apart unless `intersite` is set
INTERSITE_RADII = 3.5

# Unit suffix tables (lower-case) per physical dimension
_FREQUENCY_UNITS = {"": 1.0, "hz": 1.0, "khz": 1e3, "mhz": 1e6, "ghz": 1e9}
_POWER_UNITS = {"": 1.0, "w": 1.0, "mw": 1e-3}
_LENGTH_UNITS = {"": 1.0, "m": 1.0, "km": 1e3}
_DECIBEL_UNITS = {"": 1.0, "db": 1.0}
_TEMPERATURE_UNITS = {"": 1.0, "k": 1.0}

UNIT_TABLES = {
    "frequency": _FREQUENCY_UNITS,
    "power": _POWER_UNITS,
    "length": _LENGTH_UNITS,
    "decibel": _DECIBEL_UNITS,
    "temperature": _TEMPERATURE_UNITS,
}

# key -> kind; kinds are a unit table name, "count", or "choice"
_KEY_KINDS = {
    "carrier_frequency": "frequency",
    "M": "count",
    "K": "count",
    "array_shape": "choice",
    "cell_radius": "length",
    "bs_height": "length",
    "terminal_height": "length",
    "P_dl": "power",
    "P_ul_max": "power",
    "bandwidth": "frequency",
    "noise_figure_bs": "decibel",
    "noise_figure_terminal": "decibel",
    "layout": "choice",
    "intersite": "length",
    "uplink_budget": "choice",
    "n_trials": "count",
    "seed": "count",
    "amplitude_mode": "choice",
    "temperature": "temperature",
    "search_trials": "count",
    "max_antennas": "count",
}

_CHOICES = {
    "array_shape": ARRAY_SHAPES,
    "layout": LAYOUTS,
    "amplitude_mode": AMPLITUDE_MODES,
    "uplink_budget": UPLINK_BUDGETS,
}

_NUMBER = re.compile(r"^([-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?)\s*([A-Za-z]*)$")
_LINE = re.compile(r"^([A-Za-z_][A-Za-z0-9_]*)\s*=\s*(.*?)\s*$")


@dataclass(frozen=True)
class ScenarioConfig:
    """
    Full experiment description.

    Defaults are the Massive MIMO system parameters of the single-cell case
    study (18 terminals, 250 m cell, 30 m base station, 2 W / 200 mW, 50 MHz,
    9 dB noise figures). The carrier frequency has no default and must be set
    before a simulation runs. Seven-cell runs place the base stations
    3.5 cell radii apart and pool the uplink power of each cell unless
    `intersite` and `uplink_budget` say otherwise.
    """

    carrier_frequency: Optional[float] = None
    M: int = 128
    K: int = 18
    array_shape: str = "circular"
    cell_radius: float = 250.0
    bs_height: float = 30.0
    terminal_height: float = 1.5
    P_dl: float = 2.0
    P_ul_max: float = 0.2
    bandwidth: float = 50e6
    noise_figure_bs: float = 9.0
    noise_figure_terminal: float = 9.0
    layout: str = "single"
    intersite: Optional[float] = None
    uplink_budget: str = "auto"
    n_trials: int = 2000
    seed: int = 1
    amplitude_mode: str = "center"
    temperature: float = 290.0
    search_trials: int = 500
    max_antennas: int = 32768

    def __post_init__(self):
        validate_config(self)

    # Derived quantities -------------------------------------------------

    def require_carrier(self):
        """Return the carrier frequency, raising if it was never set."""
        if self.carrier_frequency is None:
            raise ConfigurationError("carrier frequency is mandatory", key="carrier_frequency")
        return self.carrier_frequency

    @property
    def wavelength(self):
        return SPEED_OF_LIGHT / self.require_carrier()

    @property
    def effective_intersite(self):
        return self.intersite if self.intersite is not None else INTERSITE_RADII * self.cell_radius

    @property
    def effective_uplink_budget(self):
        """per_terminal caps each terminal at P_ul_max; per_cell pools K * P_ul_max per cell."""
        if self.uplink_budget != "auto":
            return self.uplink_budget
        return "per_cell" if self.layout == "seven_cell" else "per_terminal"

    @property
    def uplink_noise(self):
        """Receiver noise at the base station."""
        from .channel import NoiseModel

        return NoiseModel(self.bandwidth, self.noise_figure_bs, self.temperature)

    @property
    def downlink_noise(self):
        """Receiver noise at a terminal."""
        from .channel import NoiseModel

        return NoiseModel(self.bandwidth, self.noise_figure_terminal, self.temperature)

    @property
    def uplink_noise_power(self):
        return self.uplink_noise.noise_power

    @property
    def downlink_noise_power(self):
        return self.downlink_noise.noise_power

    @property
    def band_name(self):
        f_c = self.require_carrier()
        if f_c == PCS_CARRIER:
            return "PCS"
        if f_c == MMWAVE_CARRIER:
            return "mmWave"
        return f"{f_c / 1e9:g}GHz"

    @property
    def scenario_label(self):
        return f"{self.band_name}-M{self.M}-{self.array_shape}-{self.layout}"

    def with_overrides(self, **changes):
        """Copy with some fields replaced (validated again)."""
        return replace(self, **changes)

    def to_dict(self):
        """Field values with the intersite distance and uplink budget resolved."""
        values = asdict(self)
        values["intersite"] = self.effective_intersite
        values["uplink_budget"] = self.effective_uplink_budget
        return values


def validate_config(cfg):
    """
    Check every ScenarioConfig invariant.

    Raises
    ------
    ConfigurationError naming the offending key.
    """
    if cfg.carrier_frequency is not None and not cfg.carrier_frequency > 0:
        raise ConfigurationError("must be positive", key="carrier_frequency")

    for key in ("M", "K", "n_trials", "search_trials", "max_antennas"):
        value = getattr(cfg, key)
        if isinstance(value, bool) or not isinstance(value, int):
            raise ConfigurationError("must be an integer", key=key)
        if value < 1:
            raise ConfigurationError("must be at least 1", key=key)

    if isinstance(cfg.seed, bool) or not isinstance(cfg.seed, int):
        raise ConfigurationError("must be an integer", key="seed")
    if not 0 <= cfg.seed < 2**64:
        raise ConfigurationError("must be an unsigned 64-bit integer", key="seed")

    for key in ("cell_radius", "bs_height", "P_dl", "P_ul_max", "bandwidth", "temperature"):
        if not getattr(cfg, key) > 0:
            raise ConfigurationError("must be positive", key=key)
    if cfg.terminal_height < 0:
        raise ConfigurationError("must be non-negative", key="terminal_height")
    if cfg.intersite is not None and not cfg.intersite > 0:
        raise ConfigurationError("must be positive", key="intersite")

    for key, allowed in _CHOICES.items():
        if getattr(cfg, key) not in allowed:
            raise ConfigurationError(f"must be one of {', '.join(allowed)}", key=key)

    if cfg.M < cfg.K:
        raise ConfigurationError(
            f"zero-forcing needs at least as many antennas as terminals (M={cfg.M} < K={cfg.K})",
            key="M",
        )
    if cfg.max_antennas < cfg.K:
        raise ConfigurationError("must be at least K", key="max_antennas")


def parse_quantity(text, kind, key=None, line=None):
    """
    Parse ``"60 GHz"``, ``"200 mW"``, ``"250"`` ... into an SI float.

    Parameters
    ----------
    text : str
        Number with an optional unit suffix.
    kind : str
        One of the UNIT_TABLES keys.
    """
    match = _NUMBER.match(text.strip())
    if match is None:
        raise ConfigurationError(f"cannot parse number from '{text}'", key=key, line=line)
    number, unit = match.groups()
    table = UNIT_TABLES[kind]
    scale = table.get(unit.lower())
    if scale is None:
        allowed = ", ".join(u for u in table if u) or "none"
        raise ConfigurationError(
            f"unit '{unit}' not accepted (expected {allowed})", key=key, line=line
        )
    return float(number) * scale


def _parse_value(key, raw, line):
    kind = _KEY_KINDS[key]
    if kind == "choice":
        if raw not in _CHOICES[key]:
            raise ConfigurationError(
                f"'{raw}' is not one of {', '.join(_CHOICES[key])}", key=key, line=line
            )
        return raw
    if kind == "count":
        try:
            return int(raw, 10)
        except ValueError:
            raise ConfigurationError(f"'{raw}' is not an integer", key=key, line=line) from None
    return parse_quantity(raw, kind, key=key, line=line)


def parse_config(text):
    """
    Parse a flat key-value config document into a validated ScenarioConfig.

    Omitted keys take their defaults; unknown or repeated keys are
    rejected.
    """
    values = {}
    for number, raw_line in enumerate(text.splitlines(), start=1):
        content = raw_line.split("#", 1)[0].strip()
        if not content:
            continue
        match = _LINE.match(content)
        if match is None:
            raise ConfigurationError(f"expected 'key = value', got '{content}'", line=number)
        key, raw = match.groups()
        if key not in _KEY_KINDS:
            raise ConfigurationError("unknown key", key=key, line=number)
        if key in values:
            raise ConfigurationError("given more than once", key=key, line=number)
        if not raw:
            raise ConfigurationError("missing value", key=key, line=number)
        values[key] = _parse_value(key, raw, number)
    return ScenarioConfig(**values)


def load_config(path):
    """Read and parse a config file; ``None`` yields the defaults."""
    if path is None:
        return ScenarioConfig()
    with open(path, "r", encoding="utf-8") as f:
        return parse_config(f.read())


def worker_count(environ=None):
    """Worker processes for trial execution, from ANTENNA_COUNT_WORKERS."""
    environ = os.environ if environ is None else environ
    raw = environ.get(WORKERS_ENV, "").strip()
    if not raw:
        return 1
    try:
        workers = int(raw)
    except ValueError:
        raise ConfigurationError(f"'{raw}' is not an integer", key=WORKERS_ENV) from None
    if workers < 1:
        raise ConfigurationError("must be at least 1", key=WORKERS_ENV)
    return workers
