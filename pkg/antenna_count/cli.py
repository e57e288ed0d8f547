"""
Command-Line Interface
----------------------
Runs the Monte-Carlo experiments, the antenna-count search, the array-shape
comparison and the bandwidth calculator, and writes CSV / JSON / text results.

Usage (from project root):
    python -m antenna_count simulate --carrier 1.9GHz
    python -m antenna_count find-antennas --carrier 60GHz --targets 5,10
    python -m antenna_count bandwidth
Project: LoS Massive MIMO Antenna Count
"""

import argparse
import logging
import os
import sys

import numpy as np
import pandas as pd

from . import __version__
from .bandwidth import (
    bandwidth_sweep,
    calibrate_noise_density,
    optimal_pilot_bandwidth,
    pilot_limited_throughput,
    power_for_rate,
    wideband_limit,
)
from .config import PCS_CARRIER, load_config, parse_quantity
from .errors import (
    ConfigurationError,
    DegenerateTrialsError,
    DomainError,
    UnattainableTargetError,
)
from .geometry import array_diameter
from .montecarlo import LINKS, antenna_ratio, find_min_antennas, run_multicell, run_orthogonality, run_trials
from .reports import (
    cdf_frame,
    link_statistics,
    report_path,
    summary_dict,
    write_cdf_csv,
    write_json,
    write_table_csv,
    write_text_report,
)

logger = logging.getLogger(__name__)

OUTPUT_DIR = "output"
DEFAULT_TARGETS = (5.0, 10.0, 15.0, 20.0, 25.0, 30.0)
REFERENCE_ANTENNAS = 128
GEOMETRY_SHAPES = ("circular", "rectangular", "linear")

EXIT_OK = 0
EXIT_IO = 1
EXIT_CONFIG = 2
EXIT_UNATTAINABLE = 3
EXIT_DEGENERATE = 4


class Console:
    """Banner-style progress output; silent under --quiet."""

    def __init__(self, quiet=False, stream=None):
        self.quiet = quiet
        self.stream = stream if stream is not None else sys.stdout

    def _print(self, text=""):
        if not self.quiet:
            print(text, file=self.stream)

    def banner(self, title):
        self._print("\n" + "=" * 60)
        self._print(title.upper())
        self._print("=" * 60)

    def ok(self, message):
        self._print(f"✓ {message}")

    def rows(self, rows, width=30):
        for name, value in rows.items():
            if isinstance(value, float):
                value = f"{value:,.2f}"
            self._print(f"  {name:.<{width}} {value:>12}")

    def text(self, text):
        self._print(text)


def fail(message, code):
    print(f"✗ {message}", file=sys.stderr)
    return code


def default_out(command, cfg):
    return os.path.join(OUTPUT_DIR, f"{command.replace('-', '_')}_{cfg.scenario_label}.csv")


def parse_targets(text):
    try:
        targets = [float(part) for part in text.split(",") if part.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"'{text}' is not a comma-separated list of dB values") from None
    if not targets:
        raise argparse.ArgumentTypeError("at least one target is needed")
    return targets


def resolve_config(args):
    """Config file (or defaults) with the command-line overrides applied."""
    cfg = load_config(args.config)
    overrides = {}
    if args.carrier is not None:
        overrides["carrier_frequency"] = parse_quantity(args.carrier, "frequency", key="carrier_frequency")
    if args.antennas is not None:
        overrides["M"] = args.antennas
    if args.seed is not None:
        overrides["seed"] = args.seed
    if args.trials is not None:
        overrides["n_trials"] = args.trials
    return cfg.with_overrides(**overrides) if overrides else cfg


def _scenario_rows(cfg):
    return {
        "Scenario": cfg.scenario_label,
        "Carrier (GHz)": cfg.require_carrier() / 1e9,
        "Antennas (M)": cfg.M,
        "Terminals per cell (K)": cfg.K,
        "Array diameter (m)": array_diameter(cfg.M, cfg.carrier_frequency, cfg.array_shape),
        "Trials": cfg.n_trials,
        "Seed": cfg.seed,
    }


def _link_rows(stats):
    return {
        "5% SINR (dB)": stats["p05"],
        "Median SINR (dB)": stats["p50"],
        "95% SINR (dB)": stats["p95"],
        "5% rate (bit/s/Hz)": stats["spectral_efficiency_p05"],
        "Degenerate redraws": stats["n_degenerate_redraws"],
    }


# Commands -------------------------------------------------------------------


def cmd_simulate(cfg, out_path, console=None, multicell=False):
    """Max-min SINR CDFs for both links; CSV plus JSON summary and text report."""
    console = console or Console(quiet=True)
    command = "simulate-multicell" if multicell else "simulate"
    console.banner(f"{command} {cfg.scenario_label}")

    summaries = run_multicell(cfg) if multicell else run_trials(cfg)
    console.ok(f"{cfg.n_trials} trials completed")

    write_cdf_csv(cdf_frame(summaries), out_path)
    summary = summary_dict(summaries, cfg, cfg.seed, command)
    json_path = write_json(summary, report_path(out_path, "_summary.json"))

    sections = {"Scenario": _scenario_rows(cfg)}
    for link in LINKS:
        rows = _link_rows(summary["links"][link])
        sections[f"{link} max-min SINR"] = rows
        console.text(f"\n{link.capitalize()}:")
        console.rows(rows)
    text_path = write_text_report(f"{command} report", sections, report_path(out_path, "_report.txt"))

    console.ok(f"CDF saved to: {out_path}")
    console.ok(f"Summary saved to: {json_path}")
    console.ok(f"Report saved to: {text_path}")
    return EXIT_OK


def cmd_find_antennas(cfg, targets, out_path, console=None, link="uplink",
                      reference=(PCS_CARRIER, REFERENCE_ANTENNAS)):
    """
    Smallest M per SINR target at the 95%-likely (5th percentile) level.

    Writes `target_db,M,array_diameter_m`; a target that cannot be reached up
    to cfg.max_antennas leaves an empty row and makes the exit code nonzero.
    The text report sets each M against `reference` (carrier, antennas) and
    the antenna count a pure path-loss scaling would ask for.
    """
    ref_carrier, ref_M = reference
    console = console or Console(quiet=True)
    f_c = cfg.require_carrier()
    console.banner(f"antenna count search {cfg.band_name} ({link})")

    rows = []
    report_rows = {}
    ratio_rows = {}
    unattainable = 0
    for target in targets:
        try:
            result = find_min_antennas(cfg, target, link=link)
        except UnattainableTargetError as exc:
            unattainable += 1
            logger.warning("%s", exc)
            rows.append({"target_db": target, "M": None, "array_diameter_m": None})
            report_rows[f"{target:g} dB"] = f"> {cfg.max_antennas}"
            console.text(f"⚠ {target:g} dB: not reached with {cfg.max_antennas} antennas")
            continue
        diameter = result.diameter(f_c, cfg.array_shape)
        rows.append({"target_db": target, "M": result.M_star, "array_diameter_m": diameter})
        report_rows[f"{target:g} dB"] = f"M={result.M_star} ({diameter:.2f} m)"
        console.ok(f"{target:g} dB: M = {result.M_star}, diameter {diameter:.2f} m")
        ratios = antenna_ratio(ref_M, result.M_star, ref_carrier, f_c, cfg.array_shape)
        ratio_rows[f"{target:g} dB"] = (
            f"x{ratios['antenna_ratio']:.2f} antennas (path loss alone: x{ratios['path_loss_ratio']:.1f}), "
            f"diameter ratio {ratios['diameter_ratio']:.2f}"
        )

    table = pd.DataFrame(rows, columns=["target_db", "M", "array_diameter_m"])
    write_table_csv(table, out_path)
    sections = {"Scenario": _scenario_rows(cfg), f"Required antennas ({link})": report_rows}
    if ratio_rows:
        sections[f"Against {ref_M} antennas at {ref_carrier / 1e9:g} GHz"] = ratio_rows
    write_text_report("antenna count report", sections, report_path(out_path, "_report.txt"))
    console.ok(f"Table saved to: {out_path}")
    return EXIT_UNATTAINABLE if unattainable else EXIT_OK


def cmd_geometry_compare(cfg, out_path, console=None, shapes=GEOMETRY_SHAPES):
    """Uplink CDFs of the same M arranged as circular, rectangular and linear arrays."""
    console = console or Console(quiet=True)
    console.banner(f"array geometry comparison {cfg.band_name} M={cfg.M}")

    frames = []
    sections = {}
    for shape in shapes:
        shaped = cfg.with_overrides(array_shape=shape)
        uplink = run_trials(shaped)["uplink"]
        frames.append(cdf_frame([uplink], scenario=shape))
        correlation = np.median(run_orthogonality(shaped))
        stats = link_statistics(uplink)
        sections[shape] = {
            "5% uplink SINR (dB)": stats["p05"],
            "Median uplink SINR (dB)": stats["p50"],
            "Median max correlation": float(correlation),
            "Diameter (m)": array_diameter(cfg.M, cfg.require_carrier(), shape),
        }
        console.ok(f"{shape}: 5% uplink SINR {stats['p05']:.2f} dB")

    write_cdf_csv(pd.concat(frames, ignore_index=True), out_path)
    write_text_report("array geometry report", sections, report_path(out_path, "_report.txt"))
    console.ok(f"CDF saved to: {out_path}")
    return EXIT_OK


def cmd_bandwidth(args, console=None):
    """Capacity, required power and pilot-limited throughput as bandwidth grows."""
    console = console or Console(quiet=True)
    P = parse_quantity(args.power, "power", key="power")
    B0 = parse_quantity(args.ref_bandwidth, "frequency", key="ref_bandwidth")
    R0 = args.rate
    N0 = calibrate_noise_density(P, B0, R0)
    rho0 = P / (B0 * N0)
    B_wide = args.scale * B0

    console.banner("bandwidth / power tradeoff")
    headline = {
        "Noise density (W/Hz)": f"{N0:.4e}",
        "Reference SNR": rho0,
        f"Power for {args.scale:g}x rate (W)": power_for_rate(B_wide, args.scale * R0, N0),
        f"Power for {args.rate_scale:g}x rate (W)": power_for_rate(B_wide, args.rate_scale * R0, N0),
        "Wideband limit (Mbit/s)": wideband_limit(P, N0) / 1e6,
    }
    B_star = optimal_pilot_bandwidth(rho0, B0)
    headline["Pilot-limited optimum (MHz)"] = B_star / 1e6
    headline["Pilot-limited peak (Mbit/s)"] = pilot_limited_throughput(B_star, rho0, B0) / 1e6
    console.rows(headline)

    bandwidths = B0 * np.logspace(-1, 3, 9)
    rate_per_hz = args.rate_scale * R0 / B_wide
    table = bandwidth_sweep(P, N0, bandwidths, rho0=rho0, B0=B0, rate_per_hz=rate_per_hz)
    console.text("\n" + table.to_string(index=False, float_format=lambda v: f"{v:.4g}"))

    if args.out:
        write_table_csv(table, args.out)
        console.ok(f"Sweep saved to: {args.out}")
    return EXIT_OK


# Argument parsing -------------------------------------------------------------


def _simulate(args, console):
    cfg = resolve_config(args)
    return cmd_simulate(cfg, args.out or default_out("simulate", cfg), console)


def _simulate_multicell(args, console):
    cfg = resolve_config(args).with_overrides(layout="seven_cell")
    return cmd_simulate(cfg, args.out or default_out("simulate-multicell", cfg), console, multicell=True)


def _find_antennas(args, console):
    cfg = resolve_config(args)
    out = args.out or default_out(f"find-antennas-{args.link}", cfg)
    if args.reference_antennas < 1:
        raise ConfigurationError("must be at least 1", key="--reference-antennas")
    reference = (parse_quantity(args.reference_carrier, "frequency", key="--reference-carrier"),
                 args.reference_antennas)
    return cmd_find_antennas(cfg, args.targets, out, console, link=args.link, reference=reference)


def _geometry_compare(args, console):
    cfg = resolve_config(args)
    out = args.out or os.path.join(OUTPUT_DIR, f"geometry_compare_{cfg.band_name}-M{cfg.M}.csv")
    return cmd_geometry_compare(cfg, out, console)


def _bandwidth(args, console):
    return cmd_bandwidth(args, console)


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", help="output CSV path (default under output/)")
    common.add_argument("--quiet", action="store_true", help="warnings and errors only")
    common.add_argument("--verbose", action="store_true", help="debug logging")

    scenario = argparse.ArgumentParser(add_help=False)
    scenario.add_argument("--config", help="flat 'key = value' scenario file")
    scenario.add_argument("--seed", type=int, help="master seed (unsigned 64-bit)")
    scenario.add_argument("--trials", type=int, help="Monte-Carlo trials")
    scenario.add_argument("--carrier", help="carrier frequency, e.g. 60GHz")
    scenario.add_argument("--antennas", type=int, help="base-station antennas M")

    parser = argparse.ArgumentParser(
        prog="antenna_count",
        description="LoS Massive MIMO antenna count simulator",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    commands = parser.add_subparsers(dest="command", required=True)

    simulate = commands.add_parser("simulate", parents=[common, scenario],
                                   help="single-cell (or configured layout) SINR CDFs")
    simulate.set_defaults(handler=_simulate)

    multicell = commands.add_parser("simulate-multicell", parents=[common, scenario],
                                    help="seven-cell system-wide max-min SINR CDFs")
    multicell.set_defaults(handler=_simulate_multicell)

    find = commands.add_parser("find-antennas", parents=[common, scenario],
                               help="smallest M reaching each 95%%-likely SINR target")
    find.add_argument("--targets", type=parse_targets, default=list(DEFAULT_TARGETS),
                      help="comma-separated SINR targets in dB")
    find.add_argument("--link", choices=LINKS, default="uplink")
    find.add_argument("--reference-carrier", default="1.9GHz",
                      help="carrier of the baseline array the report compares against")
    find.add_argument("--reference-antennas", type=int, default=REFERENCE_ANTENNAS,
                      help="antenna count of the baseline array")
    find.set_defaults(handler=_find_antennas)

    geometry = commands.add_parser("geometry-compare", parents=[common, scenario],
                                   help="circular vs rectangular vs linear arrays")
    geometry.set_defaults(handler=_geometry_compare)

    bandwidth = commands.add_parser("bandwidth", parents=[common],
                                    help="bandwidth / power tradeoff calculator")
    bandwidth.add_argument("--power", default="10W", help="reference radiated power")
    bandwidth.add_argument("--ref-bandwidth", default="20MHz", help="reference bandwidth")
    bandwidth.add_argument("--rate", type=float, default=60e6, help="reference rate in bit/s")
    bandwidth.add_argument("--scale", type=float, default=50.0, help="bandwidth multiplier")
    bandwidth.add_argument("--rate-scale", type=float, default=25.0, help="rate multiplier")
    bandwidth.set_defaults(handler=_bandwidth)
    return parser


def configure_logging(args):
    if args.verbose:
        level = logging.DEBUG
    elif args.quiet:
        level = logging.WARNING
    else:
        level = logging.INFO
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s")


def main(argv=None):
    args = build_parser().parse_args(argv)
    configure_logging(args)
    console = Console(quiet=args.quiet)
    try:
        return args.handler(args, console)
    except (ConfigurationError, DomainError) as exc:
        return fail(exc, EXIT_CONFIG)
    except UnattainableTargetError as exc:
        return fail(exc, EXIT_UNATTAINABLE)
    except DegenerateTrialsError as exc:
        return fail(exc, EXIT_DEGENERATE)
    except OSError as exc:
        return fail(exc, EXIT_IO)


if __name__ == "__main__":
    sys.exit(main())
