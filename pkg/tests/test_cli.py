"""
COMMAND LINE TESTS

Config precedence, exit codes and the CSV / config echo outputs of
simulate.py.
"""

import json
from pathlib import Path

import pandas as pd
import pytest

from config.scenario_config import ScenarioConfig, SchemeKind
from simulate import build_parser, main, parse_config, parse_window

SMALL = ['--offices', '8', '--duration', '30']


def _parse(argv):
    return parse_config(build_parser().parse_args(argv))


# =========================================================================
# CONFIGURATION
# =========================================================================

def test_defaults():
    print("\n" + "=" * 70)
    print("⚙️  TESTING DEFAULT CONFIGURATION")
    print("=" * 70)

    config = _parse(['run'])
    b = config.building
    assert b.n_offices == 100 and b.eta == 0.5
    assert b.thermal_resistance == 10.0 and b.thermal_capacitance == 10.0
    assert b.resource_input.limit == 140.0
    assert config.beta == 10.0 and config.seed == 0
    assert config.start_minute == 900 and config.duration_minutes == 240
    assert config.setpoints == 20.0
    assert config.scheme is SchemeKind.CONTROL_A
    print("  ✅ empty config gives the documented defaults")


def test_flags_override_file(tmp_path):
    path = tmp_path / "scenario.json"
    path.write_text(json.dumps({"scheme": "MarketA_NoMoney", "seed": 5, "beta": 3, "offices": 8}))
    config = _parse(['run', '--config', str(path), '--seed', '7', '--resource', 'unlimited'])
    assert config.seed == 7, "flag must win over the file"
    assert config.beta == 3.0 and config.building.n_offices == 8
    assert config.scheme is SchemeKind.MARKET_A_NO_MONEY
    assert config.building.resource_input.limit is None


def test_parse_window():
    assert parse_window("900:1140") == (900, 1140)
    assert parse_window(None) is None


@pytest.mark.parametrize("payload,key", [
    ({"colour": "blue"}, "colour"),
    ({"scheme": "market-c"}, "scheme"),
    ({"eta": 1.5}, "eta"),
    ({"resource": -3}, "resource"),
    ({"setpoint": [20.0, 21.0]}, "setpoint"),
])
def test_bad_config_exits_with_key(tmp_path, capsys, payload, key):
    path = tmp_path / "bad.json"
    path.write_text(json.dumps(payload))
    code = main(['run', '--config', str(path), '--out', str(tmp_path / "t.csv")])
    assert code == 2
    assert key in capsys.readouterr().err, f"error message must name '{key}'"
    assert not (tmp_path / "t.csv").exists()


def test_malformed_and_missing_files(tmp_path, capsys):
    broken = tmp_path / "broken.json"
    broken.write_text("{\"seed\": ")
    assert main(['run', '--config', str(broken)]) == 2
    assert "malformed JSON" in capsys.readouterr().err

    assert main(['run', '--config', str(tmp_path / "missing.json")]) == 1


# =========================================================================
# OUTPUTS
# =========================================================================

def test_run_writes_trace_and_echo(tmp_path):
    print("\n" + "=" * 70)
    print("📄 TESTING TRACE OUTPUT")
    print("=" * 70)

    out = tmp_path / "trace.csv"
    assert main(['run', '--scheme', 'control-b'] + SMALL + ['--out', str(out)]) == 0

    lines = out.read_text(encoding="utf-8").split("\n")
    assert lines[0] == "minute,scheme,stddev,mean_deviation,price"
    assert lines[-1] == "", "file must end with a line feed"
    assert len(lines) - 1 == 31
    assert lines[1].startswith("900,control-b,") and lines[1].endswith(","), "no price, empty cell"
    assert "\r" not in out.read_text(encoding="utf-8")

    echo = json.loads(out.with_suffix('.json').read_text(encoding="utf-8"))
    assert echo["scheme"] == "control-b" and echo["offices"] == 8
    assert "simulator_version" in echo
    reloaded = ScenarioConfig.load(out.with_suffix('.json'))
    assert reloaded.to_dict() == echo, "config echo must reproduce the scenario"
    print(f"  ✅ {len(lines) - 2} data rows, config echo round-trips")


def test_full_length_run_and_byte_identical_output(tmp_path):
    first, second = tmp_path / "a.csv", tmp_path / "b.csv"
    args = ['run', '--scheme', 'market-a', '--offices', '8', '--per-office']
    assert main(args + ['--out', str(first)]) == 0
    assert main(args + ['--out', str(second)]) == 0

    assert first.read_bytes() == second.read_bytes(), "same seed must give identical bytes"
    frame = pd.read_csv(first)
    assert len(frame) == 240
    assert len(first.read_text(encoding="utf-8").splitlines()) == 241
    assert list(frame.columns[-2:]) == ["T_6", "T_7"]


def test_compare_writes_summary_and_traces(tmp_path, capsys):
    out_dir = tmp_path / "results"
    code = main(['compare', '--schemes', 'control-a,market-a', '--window', '905:925']
                + SMALL + ['--out', str(out_dir)])
    assert code == 0
    for name in ("summary.csv", "control-a.csv", "control-a.json", "market-a.csv", "market-a.json"):
        assert (out_dir / name).exists(), f"{name} missing"

    summary = pd.read_csv(out_dir / "summary.csv")
    assert list(summary['scheme']) == ['control-a', 'market-a']
    assert 'window_mean_stddev' in summary.columns
    assert "COMPARISON" in capsys.readouterr().out


def test_sweep_writes_one_trace_per_value(tmp_path):
    out_dir = tmp_path / "sweep"
    code = main(['sweep', '--scheme', 'control-a', '--parameter', 'resource', '--values', '10,unlimited',
                 '--offices', '8', '--duration', '10', '--out', str(out_dir)])
    assert code == 0
    assert (out_dir / "control-a_resource_10.csv").exists()
    assert (out_dir / "control-a_resource_unlimited.csv").exists()
    table = pd.read_csv(out_dir / "sweep_control-a_resource.csv")
    assert list(table['value'].astype(str)) == ['10', 'unlimited']


def test_shipped_scenarios_load():
    scenario_dir = Path(__file__).resolve().parent.parent / "scenarios"
    paths = sorted(scenario_dir.glob("*.json"))
    assert paths, "no scenario files found"
    for path in paths:
        config = ScenarioConfig.load(path)
        assert config.scheme in SchemeKind, f"{path.name} did not parse"
