#!/usr/bin/env python3
"""
CLIMATE ALLOCATION SIMULATOR - Command line front end

Subcommands:
    run       one scenario, trace CSV plus config echo
    compare   several schemes over identical weather, summary plus traces
    sweep     one scheme over a list of parameter values

Examples:
    python simulate.py run --scheme market-a --alpha 64 --out results/market_a.csv
    python simulate.py compare --schemes control-a,market-a,control-b --out results
    python simulate.py sweep --scheme control-a --parameter resource --values 130,140,150,160
    python simulate.py run --config scenarios/control_a_unlimited_24h.json --per-office

Exit codes: 0 all files written, 1 run or I/O failure, 2 configuration error.
"""

# Fix Python path to allow imports from parent directory
import sys
import os
sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))

import argparse
import json
import logging
from dataclasses import replace
from pathlib import Path
from typing import Dict, List, Optional, Sequence

import pandas as pd

from config.scenario_config import ScenarioConfig, SchemeKind, get_log_level, read_config_file
from core.errors import ClimateSimError, ConfigError
from integration.simulation_engine import (
    SWEEP_PARAMETERS, Comparison, SimTrace, run_comparison, run_scenario, run_sweep,
)

logger = logging.getLogger("ClimateSim.cli")

DEFAULT_COMPARE_SCHEMES = (
    "control-a", "market-a", "market-a-no-money", "market-a-no-temperature",
    "market-a-no-auction", "control-b", "market-b-unbounded",
)

# command line flag -> configuration key
FLAG_KEYS = {
    'scheme': 'scheme',
    'alpha': 'alpha',
    'beta': 'beta',
    'resource': 'resource',
    'offices': 'offices',
    'seed': 'seed',
    'start_minute': 'start_minute',
    'duration': 'duration',
    'setpoint': 'setpoint',
    'measurement': 'measurement',
}


# ============================================================================
#  CONFIGURATION
# ============================================================================

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('--config', type=Path, help='JSON scenario file (flags override it)')
    common.add_argument('--scheme', help='allocation scheme, e.g. control-a, market-a, market-b-bounded')
    common.add_argument('--alpha', type=float, help='HC market strength')
    common.add_argument('--beta', type=float, help='controller / equilibrium market gain')
    common.add_argument('--resource', help="cooling power at the pipe head, number or 'unlimited'")
    common.add_argument('--offices', type=int, help='number of offices')
    common.add_argument('--seed', type=int, help='seed of the weather and scheme streams')
    common.add_argument('--start-minute', dest='start_minute', type=int, help='first minute since midnight')
    common.add_argument('--duration', type=int, help='run length in minutes')
    common.add_argument('--setpoint', type=float, help='setpoint of every office, °C')
    common.add_argument('--measurement', choices=('implicit', 'delayed'), help='controller timing')
    common.add_argument('--per-office', dest='per_office', action='store_true',
                        help='add one temperature column per office')
    common.add_argument('--log-level', dest='log_level', help='DEBUG, INFO, WARNING, ERROR')

    parser = argparse.ArgumentParser(description="Building climate allocation simulator")
    sub = parser.add_subparsers(dest='command', required=True)

    run = sub.add_parser('run', parents=[common], help='run one scenario')
    run.add_argument('--out', type=Path, default=Path('trace.csv'), help='trace CSV path')

    compare = sub.add_parser('compare', parents=[common], help='compare schemes over identical weather')
    compare.add_argument('--schemes', default=','.join(DEFAULT_COMPARE_SCHEMES),
                         help='comma separated scheme names')
    compare.add_argument('--window', help='summary window FROM:TO in minutes since midnight')
    compare.add_argument('--out', type=Path, default=Path('results'), help='output directory')

    sweep = sub.add_parser('sweep', parents=[common], help='vary one parameter')
    sweep.add_argument('--parameter', required=True, choices=SWEEP_PARAMETERS)
    sweep.add_argument('--values', required=True, help='comma separated values')
    sweep.add_argument('--out', type=Path, default=Path('results'), help='output directory')
    return parser


def parse_config(args: argparse.Namespace) -> ScenarioConfig:
    """
    Merge defaults, the optional config file and flag overrides

    Raises:
        ConfigError: bad file contents or flag values, naming the key
    """
    data: Dict = read_config_file(args.config) if getattr(args, 'config', None) else {}
    for flag, key in FLAG_KEYS.items():
        value = getattr(args, flag, None)
        if value is not None:
            data[key] = value
    return ScenarioConfig.from_dict(data)


def parse_window(text: Optional[str]):
    if not text:
        return None
    try:
        start, end = (int(part) for part in text.split(':'))
    except ValueError:
        raise ConfigError(f"expected FROM:TO, got '{text}'", key="window")
    return start, end


# ============================================================================
#  OUTPUT
# ============================================================================

def emit_csv(frame: pd.DataFrame, path: Path) -> Path:
    """UTF-8, comma separated, 9 significant digits, LF line endings"""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    frame.to_csv(path, index=False, float_format="%.9g", lineterminator="\n", encoding="utf-8")
    return path


def emit_config_echo(config: ScenarioConfig, csv_path: Path) -> Path:
    """Write the config next to its trace so it can be re-run as is"""
    path = Path(csv_path).with_suffix('.json')
    path.write_text(json.dumps(config.to_dict(), indent=2) + "\n", encoding="utf-8")
    return path


def emit_trace(trace: SimTrace, path: Path, per_office: bool = False) -> Path:
    emit_csv(trace.to_frame(per_office), path)
    emit_config_echo(trace.config, path)
    return path


def emit_comparison(comparison: Comparison, out_dir: Path, per_office: bool = False) -> Path:
    """summary.csv plus one trace (and config echo) per scheme"""
    out_dir = Path(out_dir)
    for trace in comparison.traces:
        emit_trace(trace, out_dir / f"{trace.scheme_name}.csv", per_office)
    return emit_csv(comparison.table, out_dir / "summary.csv")


def print_summary(table: pd.DataFrame, title: str):
    print("\n" + "=" * 70)
    print(title)
    print("=" * 70)
    best = table['window_mean_stddev'].min()
    for _, row in table.iterrows():
        label = row['scheme'] if 'value' not in row else f"{row['scheme']} {row['parameter']}={row['value']}"
        ratio = row['window_mean_stddev'] / best if best > 0 else float('nan')
        print(f"  {label:<40} stddev {row['window_mean_stddev']:.5f} °C  (x{ratio:.1f} of best)")
    print("=" * 70 + "\n")


# ============================================================================
#  SUBCOMMANDS
# ============================================================================

def cmd_run(args: argparse.Namespace) -> int:
    config = parse_config(args)
    trace = run_scenario(config)
    path = emit_trace(trace, args.out, args.per_office)
    print(f"✅ {config.scheme.value}: window mean stddev {trace.window_mean():.5f} °C -> {path}")
    return 0


def cmd_compare(args: argparse.Namespace) -> int:
    base = parse_config(args)
    schemes: List[SchemeKind] = [SchemeKind.parse(name) for name in args.schemes.split(',') if name.strip()]
    configs = [replace(base, scheme=kind) for kind in schemes]
    comparison = run_comparison(configs, window=parse_window(args.window))
    path = emit_comparison(comparison, args.out, args.per_office)
    print_summary(comparison.table, f"COMPARISON (seed {base.seed}, window {comparison.window})")
    print(f"✅ summary -> {path}")
    return 0


def cmd_sweep(args: argparse.Namespace) -> int:
    base = parse_config(args)
    values = [v.strip() for v in args.values.split(',') if v.strip()]
    if not values:
        raise ConfigError("no values given", key="values")
    traces, table = run_sweep(base, args.parameter, values)
    out_dir = Path(args.out)
    for value, trace in zip(values, traces):
        emit_trace(trace, out_dir / f"{trace.scheme_name}_{args.parameter}_{value}.csv", args.per_office)
    path = emit_csv(table, out_dir / f"sweep_{base.scheme.value}_{args.parameter}.csv")
    print_summary(table, f"SWEEP {base.scheme.value} over {args.parameter}")
    print(f"✅ summary -> {path}")
    return 0


COMMANDS = {'run': cmd_run, 'compare': cmd_compare, 'sweep': cmd_sweep}


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=get_log_level(args.log_level),
        format='%(asctime)s - %(name)s - %(levelname)s - %(message)s',
    )
    try:
        return COMMANDS[args.command](args)
    except ConfigError as exc:
        print(f"❌ configuration error: {exc}", file=sys.stderr)
        return 2
    except (ClimateSimError, OSError) as exc:
        print(f"❌ {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
