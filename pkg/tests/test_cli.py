import csv
import io
import json
import os
from fractions import Fraction

import pytest

from contour_model import SystemParams, canonical_state
from contour_dynamics import find_limit_cycle
from contour_theory import spectrum_grid
from contour_verify import is_crossed_deadlock

ROOT = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
CONFIGS = os.path.join(ROOT, 'configs')

PARAMS_7 = ['--n', '7', '--d', '2', '--l1', '2', '--l2', '6']


def run(cli, capsys, *argv):
    code = cli.main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


# ============================================================
# 종료 코드
# ============================================================

def test_invalid_params_exit_1(cli, capsys):
    code, _, err = run(cli, capsys, 'classify', '--n', '10', '--d', '6', '--l1', '2', '--l2', '2')
    assert code == 1
    assert '[ERROR]' in err


def test_empty_sweep_range_exit_1(cli, capsys):
    code, out, _ = run(cli, capsys, 'sweep', '--n-min', '3', '--n-max', '2')
    assert code == 1
    assert out == ''


def test_argument_error_exit_1(cli, capsys):
    with pytest.raises(SystemExit) as exc:
        cli.main(['classify', '--n', '10'])
    assert exc.value.code == 1


def test_inadmissible_state_exit_2(cli, capsys):
    code, _, err = run(cli, capsys, 'simulate', '--n', '10', '--d', '3', '--l1', '2', '--l2', '2',
                       '--x1', '0', '--x2', '0')
    assert code == 2
    assert '[ERROR]' in err


def test_strict_sweep_exit_3(cli, capsys):
    code, _, err = run(cli, capsys, 'sweep', '--n-min', '7', '--n-max', '7', '--rows', 'none', '--strict')
    assert code == 3
    assert 'PeriodMismatch' in err


def test_non_strict_sweep_exit_0(cli, capsys):
    code, out, _ = run(cli, capsys, 'sweep', '--n-min', '7', '--n-max', '7', '--rows', 'none')
    assert code == 0
    data = json.loads(out)
    assert data['instances'] == []
    assert data['totals']['discrepancies']['PeriodMismatch'] > 0


# ============================================================
# simulate / cycle / classify
# ============================================================

def test_classify_text(cli, capsys):
    code, out, _ = run(cli, capsys, 'classify', '--n', '10', '--d', '3', '--l1', '4', '--l2', '7')
    assert code == 0
    assert out == 'cluster-motion T=11 v=10/11\n'


def test_classify_json(cli, capsys):
    _, out, _ = run(cli, capsys, 'classify', '--n', '10', '--d', '3', '--l1', '8', '--l2', '9', '--json')
    data = json.loads(out)
    assert data['predicted'] == {'mode': 'Collapse', 'period': 1, 'v': {'num': 0, 'den': 1}}


def test_simulate_csv_rows(cli, capsys):
    code, out, _ = run(cli, capsys, 'simulate', '--n', '4', '--d', '2', '--l1', '1', '--l2', '1',
                       '--x1', '3', '--x2', '3', '--steps', '5', '--format', 'csv')
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == 't,x1,x2,moved1,moved2,H1,H2'
    assert lines[1] == '0,3,3,false,false,0,0'
    assert lines[2] == '1,0,3,true,false,1,0'
    assert len(lines) == 7


def test_simulate_defaults_to_canonical(cli, capsys):
    _, out, _ = run(cli, capsys, 'simulate', '--n', '4', '--d', '2', '--l1', '1', '--l2', '1')
    data = json.loads(out)
    assert data['x0'] == {'x1': 3, 'x2': 1}
    assert data['steps'] == 16
    assert len(data['rows']) == 17


def test_simulate_reduces_coordinates(cli, capsys):
    _, out, _ = run(cli, capsys, 'simulate', '--n', '4', '--d', '2', '--l1', '1', '--l2', '1',
                    '--x1', '7', '--x2', '-1', '--steps', '0')
    assert json.loads(out)['x0'] == {'x1': 3, 'x2': 3}


def test_cycle_json(cli, capsys):
    code, out, _ = run(cli, capsys, 'cycle', *PARAMS_7, '--x1', '2', '--x2', '0')
    assert code == 0
    data = json.loads(out)
    assert (data['transient'], data['period']) == (1, 9)
    assert data['moves'] == [7, 7]
    assert data['velocity'][0] == {'num': 7, 'den': 9, 'decimal': '0.777778'}
    assert data['empirical_mode'] == 'Intermediate'
    assert len(data['cycle_states']) == 9


def test_cycle_csv(cli, capsys):
    _, out, _ = run(cli, capsys, 'cycle', *PARAMS_7, '--x1', '2', '--x2', '0', '--format', 'csv')
    rows = list(csv.DictReader(io.StringIO(out)))
    assert len(rows) == 1
    row = rows[0]
    assert (row['period'], row['a1'], row['v1_num'], row['v1_den']) == ('9', '7', '7', '9')
    assert row['empirical'] == 'Intermediate'


def test_census_text(cli, capsys):
    _, out, _ = run(cli, capsys, 'census', '--n', '10', '--d', '3', '--l1', '4', '--l2', '8')
    assert out == 'deadlocks: (2,9)\ncollapse_possible: false\n'


# ============================================================
# diagram
# ============================================================

def _ascii_cell(text, l1, l2):
    return text.splitlines()[l1 - 1][l2 - 1]


def test_diagram_ascii_theory(cli, capsys):
    _, out, _ = run(cli, capsys, 'diagram', '--n', '20', '--d', '5', '--format', 'ascii')
    lines = out.splitlines()
    assert len(lines) == 19 and all(len(line) == 19 for line in lines)
    assert _ascii_cell(out, 10, 10) == '.'
    assert _ascii_cell(out, 16, 16) == '#'
    assert _ascii_cell(out, 6, 15) == '+'


def test_diagram_small_cells(cli, capsys):
    _, out, _ = run(cli, capsys, 'diagram', '--n', '4', '--d', '2', '--format', 'ascii')
    assert _ascii_cell(out, 3, 3) == '#'
    _, out, _ = run(cli, capsys, 'diagram', '--n', '12', '--d', '3', '--source', 'simulation',
                    '--format', 'ascii')
    assert _ascii_cell(out, 1, 1) == '.'


def test_diagram_formats_agree(cli, capsys):
    base = ['diagram', '--n', '9', '--d', '3', '--source', 'simulation']
    _, as_json, _ = run(cli, capsys, *base, '--format', 'json')
    _, as_csv, _ = run(cli, capsys, *base, '--format', 'csv')
    _, as_ascii, _ = run(cli, capsys, *base, '--format', 'ascii')

    json_cells = {(c['l1'], c['l2']): (c['mode'], c['v_num'], c['v_den']) for c in json.loads(as_json)['cells']}
    csv_cells = {(int(r['l1']), int(r['l2'])): (r['mode'], int(r['v_num']), int(r['v_den']))
                 for r in csv.DictReader(io.StringIO(as_csv))}
    assert json_cells == csv_cells
    for (l1, l2), (mode, _, _) in json_cells.items():
        assert _ascii_cell(as_ascii, l1, l2) == mode


def test_simulation_diagram_matches_theory(cli):
    n, d = 12, 3
    theory = spectrum_grid(n, d)
    for cell in cli.diagram_cells(n, d, 'simulation'):
        predicted = theory[(cell.l1, cell.l2)]
        expected = cli.MODE_CHARS[predicted.region]
        if cell.mode == expected:
            if cell.mode == '+':
                assert 0 < cell.v_num <= cell.v_den
            continue
        # 정규 초기 상태에서 교차 교착에 빠지는 경우만 허용
        params = SystemParams(n, d, cell.l1, cell.l2)
        assert expected == '+' and cell.mode == '#'
        cycle = find_limit_cycle(params, canonical_state(params))
        assert is_crossed_deadlock(params, cycle.cycle_states[0])


def test_diagram_config_preset(cli, capsys):
    code, out, _ = run(cli, capsys, 'diagram', '--config', os.path.join(CONFIGS, 'diagram-n20-theory.json'))
    assert code == 0
    assert _ascii_cell(out, 6, 15) == '+'


def test_diagram_flag_overrides_preset(cli, capsys):
    _, out, _ = run(cli, capsys, 'diagram', '--config', os.path.join(CONFIGS, 'diagram-n20-theory.json'),
                    '--format', 'json')
    assert json.loads(out)['n'] == 20


def test_unreadable_preset_exit_1(cli, capsys, tmp_path):
    code, _, _ = run(cli, capsys, 'diagram', '--config', str(tmp_path / 'missing.json'))
    assert code == 1


# ============================================================
# sweep
# ============================================================

def test_sweep_json_csv_consistent(cli, capsys):
    _, as_json, _ = run(cli, capsys, 'sweep', '--n-min', '4', '--n-max', '5')
    _, as_csv, _ = run(cli, capsys, 'sweep', '--n-min', '4', '--n-max', '5', '--format', 'csv')
    instances = json.loads(as_json)['instances']
    rows = list(csv.DictReader(io.StringIO(as_csv)))
    assert len(instances) == len(rows)
    for inst, row in zip(instances, rows):
        assert (inst['params']['n'], inst['x0']['x1'], inst['x0']['x2']) == \
            (int(row['n']), int(row['x1']), int(row['x2']))
        assert (inst['params']['d'], inst['params']['l1'], inst['params']['l2']) == \
            (int(row['d']), int(row['l1']), int(row['l2']))
        assert (inst['transient'], inst['period']) == (int(row['transient']), int(row['period']))
        assert inst['moves'] == [int(row['a1']), int(row['a2'])]
        v1, v2 = inst['velocity']
        assert (v1['num'], v1['den']) == (int(row['v1_num']), int(row['v1_den']))
        assert (v2['num'], v2['den']) == (int(row['v2_num']), int(row['v2_den']))
        assert inst['empirical_mode'] == row['empirical']
        assert inst['predicted']['mode'] == row['predicted']
        assert ('true' if inst['agree'] else 'false') == row['agree']
        assert (inst['discrepancy_kind'] or '') == row['discrepancy']


def test_sweep_region_rates(cli, capsys):
    _, out, _ = run(cli, capsys, 'sweep', '--n-min', '7', '--n-max', '7', '--rows', 'none')
    regions = json.loads(out)['regions']
    assert regions['free']['rate'] == {'num': 1, 'den': 1}
    for region in regions.values():
        rate = Fraction(region['rate']['num'], region['rate']['den'])
        assert rate == Fraction(region['agreements'], region['instances'])
    assert regions['cluster']['rate']['num'] < regions['cluster']['rate']['den']


def test_sweep_output_independent_of_threads(cli, capsys, monkeypatch, tmp_path):
    outputs = []
    for threads in ('1', '2'):
        monkeypatch.setenv(cli.THREADS_ENV, threads)
        out = tmp_path / f'sweep-{threads}.json'
        assert cli.main(['sweep', '--n-min', '2', '--n-max', '7', '--out', str(out)]) == 0
        outputs.append(out.read_bytes())
    capsys.readouterr()
    assert outputs[0] == outputs[1]


def test_sweep_discrepancy_rows_only(cli, capsys):
    _, out, _ = run(cli, capsys, 'sweep', '--n-min', '7', '--n-max', '7', '--rows', 'discrepancies')
    data = json.loads(out)
    assert data['instances']
    assert all(not inst['agree'] for inst in data['instances'])


# ============================================================
# golden / 설정
# ============================================================

def test_golden_command_passes(cli, capsys):
    code, out, _ = run(cli, capsys, 'golden')
    assert code == 0
    assert 'PASS   thm1-case1-from-l1' in out
    assert 'XFAIL  thm2-case1-from-l1' in out


def test_golden_deviation_exit_3(cli, capsys, tmp_path):
    (tmp_path / 'wrong.json').write_text(json.dumps({'traces': [
        {'id': 'wrong', 'params': {'n': 4, 'd': 2, 'l1': 1, 'l2': 1},
         'checkpoints': [[0, [3, 3]], [1, [3, 0]]]},
    ]}), encoding='utf-8')
    code, out, _ = run(cli, capsys, 'golden', '--golden-dir', str(tmp_path), '--json')
    assert code == 3
    assert json.loads(out)[0]['status'] == 'FAIL'


def test_golden_skipped_entry_exit_3(cli, capsys, tmp_path):
    (tmp_path / 'mixed.json').write_text(json.dumps({'traces': [
        {'id': 'good', 'params': {'n': 4, 'd': 2, 'l1': 1, 'l2': 1},
         'checkpoints': [[0, [3, 3]], [1, [0, 3]]]},
        {'id': 'typo', 'params': {'n': 4, 'd': 2, 'l1': 1, 'l2': 1},
         'expect': 'hodl', 'checkpoints': [[0, [3, 3]], [2, [9, 9]]]},
    ]}), encoding='utf-8')
    (tmp_path / 'broken.json').write_text('{', encoding='utf-8')
    code, out, err = run(cli, capsys, 'golden', '--golden-dir', str(tmp_path))
    assert code == 3
    assert 'PASS   good' in out
    assert err.count('[WARN]') == 2
    assert 'mixed.json#typo' in err and 'broken.json' in err


@pytest.mark.parametrize('environ, expected', [
    ({}, -1),
    ({'CONTOUR_DUO_THREADS': '2'}, 2),
    ({'CONTOUR_DUO_THREADS': '0'}, -1),
    ({'CONTOUR_DUO_THREADS': 'many'}, -1),
])
def test_resolve_workers(cli, capsys, environ, expected):
    assert cli.resolve_workers(environ) == expected


@pytest.mark.parametrize('value, expected', [
    (0, '0.000000'),
    (1, '1.000000'),
    ((10, 11), '0.909091'),
    ((1, 3), '0.333333'),
    ((2, 3), '0.666667'),
])
def test_decimal_string(cli, value, expected):
    fraction = Fraction(*value) if isinstance(value, tuple) else Fraction(value)
    assert cli.decimal_string(fraction) == expected
