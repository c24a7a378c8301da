import json
import os
from fractions import Fraction

import numpy as np
import pandas as pd
import pytest

import run_toric
from config import RunConfig, load_config, save_config
from errors import ConfigError
from fibration import big_class_obstruction_expected

ROOT = os.path.dirname(os.path.abspath(__file__))


def config_path(name):
    return os.path.join(ROOT, name)


def run_cli(command, config, out_dir, *extra):
    return run_toric.main([command, '--config', config_path(config), '--output-dir', str(out_dir), *extra])


def read_report(out_dir, command):
    with open(os.path.join(out_dir, f"{command.replace('-', '_')}_report.json")) as f:
        return json.load(f)


# =========================================
# Config loading
# =========================================


def test_shipped_configs_load():
    for name in ('cp1_round_config.json', 'cp2_config.json', 'weighted_interval_config.json',
                 'destabilized_interval_config.json', 'non_delzant_config.json', 'calabi_dream_config.json',
                 'big_class_config.json'):
        cfg = load_config(config_path(name))
        assert cfg.name


def test_rational_strings_and_floats_are_exact():
    cfg = RunConfig.from_dict({'polytope': {'preset': 'interval', 'alpha': '1/3', 'beta': 0.5}})
    assert cfg.polytope.alpha == Fraction(1, 3)
    assert cfg.polytope.beta == Fraction(1, 2)


def test_round_trip(tmp_path):
    cfg = load_config(config_path('big_class_config.json'))
    path = tmp_path / 'copy.json'
    save_config(cfg, str(path))
    again = load_config(str(path))
    assert again.to_dict() == cfg.to_dict()
    assert again.scenario.sweep[0] == [Fraction(1, 10)]


def test_big_class_config_sits_in_obstructed_regime():
    scenario = load_config(config_path('big_class_config.json')).scenario
    assert scenario.genus == 3
    assert scenario.sweep == [[Fraction(1, 10)], [Fraction(1, 5)], [5]]
    degrees = tuple(p for factor in scenario.factors for p in factor.p)
    assert big_class_obstruction_expected(scenario.genus, degrees)


@pytest.mark.parametrize('data,field', [
    ({'solver': {'grid_points': 4}}, 'solver.grid_points'),
    ({'solver': {'futaki_sign': 'other'}}, 'solver.futaki_sign'),
    ({'scan': {'directions': 0}}, 'scan.directions'),
    ({'polytope': {'normals': [[1.5], [-1]], 'offsets': [0, 1]}}, 'polytope.normals[0]'),
    ({'polytope': {'preset': 'sphere'}}, 'polytope.preset'),
    ({'fibration': {'factors': []}, 'weights': {'v': {'0': 1}, 'w': {'0': 4}}}, 'weights'),
    ({'fibration': {'factors': [{'p': [1], 'd': 0}]}}, 'fibration.factors[0].d'),
    ({'weights': {'v': {'0': 'x'}, 'w': {'0': 1}}}, 'weights.v.0'),
    ({'scenario': {'fiber': {'preset': 'interval'}, 'factors': [{'p': [1]}], 'sweep': [[1, 2]]}}, 'scenario.sweep[0]'),
])
def test_invalid_configs_name_the_field(data, field):
    with pytest.raises(ConfigError) as err:
        RunConfig.from_dict(data)
    assert err.value.field == field
    assert str(err.value).startswith(f"{field}: ")


# =========================================
# CLI commands and exit codes
# =========================================


def test_certify_round_interval(tmp_path):
    assert run_cli('certify', 'cp1_round_config.json', tmp_path) == 0
    report = read_report(tmp_path, 'certify')
    assert report['verdict'] == 'EXISTS'
    assert set(report) >= {'command', 'name', 'verdict', 'evidence', 'residuals', 'timing'}
    profile = pd.read_csv(tmp_path / 'certify_profile.csv')
    assert list(profile.columns) == ['x', 'phi', 'q']


def test_extremal_reports_rational_coefficients(tmp_path):
    assert run_cli('extremal', 'weighted_interval_config.json', tmp_path) == 0
    evidence = read_report(tmp_path, 'extremal')['evidence']
    assert evidence['xi_ext'] == ['120/37']
    assert evidence['c_ext'] == '84/37'
    assert evidence['volume'].startswith('5/2')


def test_non_delzant_exits_with_error(tmp_path):
    assert run_cli('check-delzant', 'non_delzant_config.json', tmp_path) == 1
    evidence = read_report(tmp_path, 'check_delzant')['evidence']
    assert evidence['vertex'] == [0, '1/2']
    assert evidence['determinant'] == 2


def test_destabilizer_exits_with_two(tmp_path):
    assert run_cli('stability-scan', 'destabilized_interval_config.json', tmp_path, '--offsets', '21') == 2
    assert (tmp_path / 'stability_scan_samples.csv').exists()


def test_futaki_of_configured_crease(tmp_path):
    assert run_cli('futaki', 'destabilized_interval_config.json', tmp_path) == 2
    evidence = read_report(tmp_path, 'futaki')['evidence']
    assert evidence['futaki'] == '-1/2'


def test_mabuchi_profile_table(tmp_path):
    assert run_cli('mabuchi', 'weighted_interval_config.json', tmp_path) == 0
    rows = pd.read_csv(tmp_path / 'mabuchi_profile.csv')
    assert list(rows['t']) == [0, 0.5, 1, 1.5, 2]
    assert rows['mabuchi'].notna().all()


def test_missing_section_is_an_error(tmp_path):
    cfg_path = tmp_path / 'bare.json'
    cfg_path.write_text(json.dumps({'name': 'bare', 'polytope': {'preset': 'interval'}}))
    code = run_toric.main(['extremal', '--config', str(cfg_path), '--output-dir', str(tmp_path)])
    assert code == 1
    assert read_report(tmp_path, 'extremal')['verdict'] == 'ERROR'


def test_bad_override_is_rejected(tmp_path):
    assert run_cli('solve-1d', 'cp1_round_config.json', tmp_path, '--grid-points', '4') == 1


def _report_refine(cfg):
    return 'OK', {'refine': cfg.scan.refine}, {}, {}


@pytest.mark.parametrize("flags,expected", [((), True), (('--no-refine',), False), (('--refine',), True)])
def test_refine_flags(tmp_path, monkeypatch, flags, expected):
    monkeypatch.setitem(run_toric.HANDLERS, 'stability-scan', _report_refine)
    assert run_cli('stability-scan', 'destabilized_interval_config.json', tmp_path, *flags) == 0
    assert read_report(tmp_path, 'stability_scan')['evidence']['refine'] is expected


def test_refine_flags_are_exclusive(tmp_path):
    with pytest.raises(SystemExit):
        run_cli('stability-scan', 'destabilized_interval_config.json', tmp_path, '--refine', '--no-refine')


def test_numeric_failure_still_writes_report(tmp_path, monkeypatch):
    def singular(cfg):
        raise np.linalg.LinAlgError('singular')

    monkeypatch.setitem(run_toric.HANDLERS, 'stability-scan', singular)
    assert run_cli('stability-scan', 'destabilized_interval_config.json', tmp_path) == 1
    report = read_report(tmp_path, 'stability_scan')
    assert report['verdict'] == 'ERROR'
    assert report['evidence'] == {'error': 'singular', 'type': 'LinAlgError'}
