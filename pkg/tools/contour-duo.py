#!/usr/bin/env python3
"""
contour-duo: 두 윤곽 클러스터 시스템 시뮬레이터 / 극한 사이클 분석기 / 정리 검증기

사용법:
  python -X utf8 tools/contour-duo.py simulate --n 4 --d 2 --l1 1 --l2 1 --x1 3 --x2 3 --steps 5
  python -X utf8 tools/contour-duo.py cycle    --n 7 --d 2 --l1 2 --l2 6 --x1 2 --x2 0 --format csv
  python -X utf8 tools/contour-duo.py classify --n 10 --d 3 --l1 4 --l2 7
  python -X utf8 tools/contour-duo.py diagram  --n 20 --d 5 --source theory --format ascii
  python -X utf8 tools/contour-duo.py sweep    --n-min 4 --n-max 8 --states all --strict
  python -X utf8 tools/contour-duo.py sweep    --config configs/sweep-n12.json --out output/sweep.json
  python -X utf8 tools/contour-duo.py golden
  python -X utf8 tools/contour-duo.py census   --n 10 --d 3 --l1 4 --l2 8

종료 코드:
  0 정상, 1 잘못된 파라미터/범위, 2 허용되지 않는 초기 상태, 3 --strict 불일치 또는 골든 트레이스 이탈

환경 변수:
  CONTOUR_DUO_THREADS  스윕 작업자 수 상한 (기본: 전체 코어)
"""

import sys
import os
import io
import csv
import json
import argparse
from dataclasses import dataclass
from fractions import Fraction

sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))
from contour_model import (
    InadmissibleStateError, InvalidParamsError, SystemParams, SystemState,
    canonical_state, require_admissible,
)
from contour_dynamics import ModeKind, classify_empirical, find_limit_cycle, simulate
from contour_theory import PredictionKind, collapse_possible, predict, predicted_period, spectrum_grid
from contour_verify import (
    InitialStatePolicy, brute_force_deadlocks, check_golden, closed_form_deadlocks,
    deadlock_census, golden_traces, replay_golden, sweep,
)

# Windows 터미널 한글 출력 보장
if sys.platform == 'win32':
    sys.stdout = io.TextIOWrapper(sys.stdout.buffer, encoding='utf-8', errors='replace')
    sys.stderr = io.TextIOWrapper(sys.stderr.buffer, encoding='utf-8', errors='replace')

EXIT_OK = 0
EXIT_INVALID_PARAMS = 1
EXIT_INADMISSIBLE = 2
EXIT_DISCREPANCY = 3

THREADS_ENV = 'CONTOUR_DUO_THREADS'

SWEEP_CSV_COLUMNS = [
    'n', 'd', 'l1', 'l2', 'x1', 'x2', 'transient', 'period', 'a1', 'a2',
    'v1_num', 'v1_den', 'v2_num', 'v2_den', 'empirical', 'predicted', 'agree', 'discrepancy',
]
CYCLE_CSV_COLUMNS = [
    'n', 'd', 'l1', 'l2', 'x1', 'x2', 'transient', 'period', 'a1', 'a2',
    'v1_num', 'v1_den', 'v2_num', 'v2_den', 'empirical',
]
TRAJECTORY_CSV_COLUMNS = ['t', 'x1', 'x2', 'moved1', 'moved2', 'H1', 'H2']
DIAGRAM_CSV_COLUMNS = ['l1', 'l2', 'mode', 'v_num', 'v_den']

MODE_CHARS = {'free': '.', 'cluster': '+', 'collapse': '#'}


def log(level, message):
    print(f'[{level}] {message}', file=sys.stderr)


class _Parser(argparse.ArgumentParser):
    """인자 오류는 잘못된 파라미터(종료 코드 1)로 취급. 2는 허용 불가 상태 전용"""

    def error(self, message):
        self.print_usage(sys.stderr)
        log('ERROR', message)
        sys.exit(EXIT_INVALID_PARAMS)


# ============================================================
# 설정
# ============================================================

def resolve_workers(environ=None):
    environ = os.environ if environ is None else environ
    raw = environ.get(THREADS_ENV)
    if raw is None or raw.strip() == '':
        return -1
    try:
        value = int(raw)
    except ValueError:
        value = 0
    if value < 1:
        log('WARN', f'{THREADS_ENV}={raw!r} 무시 (양의 정수 아님), 전체 코어 사용')
        return -1
    return value


def apply_preset(args, defaults):
    """--config 프리셋 JSON을 읽어 명시되지 않은 플래그만 채운 뒤 기본값 적용"""
    if getattr(args, 'config', None):
        try:
            with open(args.config, 'r', encoding='utf-8') as f:
                preset = json.load(f)
        except (OSError, json.JSONDecodeError) as e:
            raise InvalidParamsError(f'cannot read preset {args.config}: {e}')
        if not isinstance(preset, dict):
            raise InvalidParamsError(f'preset {args.config} must be a JSON object')
        for key, value in preset.items():
            key = key.replace('-', '_')
            if key.startswith('_'):
                continue
            if not hasattr(args, key):
                log('WARN', f'프리셋 키 무시: {key}')
                continue
            if getattr(args, key) is None:
                setattr(args, key, value)
    for key, value in defaults.items():
        if getattr(args, key, None) is None:
            setattr(args, key, value)


# ============================================================
# 직렬화 헬퍼
# ============================================================

def decimal_string(value, places=6):
    """정확한 반올림 소수 문자열 (부동소수점 미사용)"""
    scaled = Fraction(value) * 10 ** places
    rounded = (2 * scaled.numerator + scaled.denominator) // (2 * scaled.denominator)
    whole, frac = divmod(rounded, 10 ** places)
    return f'{whole}.{frac:0{places}d}'


def ratio_json(value):
    return {'num': value.numerator, 'den': value.denominator, 'decimal': decimal_string(value)}


def state_json(state):
    return {'x1': state.x1, 'x2': state.x2}


def prediction_json(prediction):
    return {
        'mode': prediction.label,
        'period': predicted_period(prediction),
        'v': {'num': prediction.velocity.numerator, 'den': prediction.velocity.denominator},
    }


def instance_json(row):
    return {
        'params': row.params.as_dict(),
        'x0': state_json(row.x0),
        'transient': row.transient,
        'period': row.period,
        'moves': [row.moves1, row.moves2],
        'velocity': [ratio_json(row.v1), ratio_json(row.v2)],
        'empirical_mode': row.empirical.label,
        'predicted': prediction_json(row.predicted),
        'agree': row.agree,
        'discrepancy_kind': row.discrepancy_kind.value if row.discrepancy_kind else None,
    }


def instance_csv_row(row):
    p = row.params
    return [
        p.n, p.d, p.l1, p.l2, row.x0.x1, row.x0.x2, row.transient, row.period,
        row.moves1, row.moves2, row.v1.numerator, row.v1.denominator,
        row.v2.numerator, row.v2.denominator, row.empirical.label, row.predicted.label,
        'true' if row.agree else 'false',
        row.discrepancy_kind.value if row.discrepancy_kind else '',
    ]


def to_json(data):
    return json.dumps(data, ensure_ascii=False, indent=2) + '\n'


def to_csv(columns, rows):
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator='\n')
    writer.writerow(columns)
    writer.writerows(rows)
    return buf.getvalue()


def emit(text, out=None):
    if out:
        parent = os.path.dirname(os.path.abspath(out))
        os.makedirs(parent, exist_ok=True)
        with open(out, 'w', encoding='utf-8', newline='') as f:
            f.write(text)
        log('INFO', f'저장: {out}')
    else:
        sys.stdout.write(text)


# ============================================================
# 공통 인자 해석
# ============================================================

def params_from_args(args):
    return SystemParams(args.n, args.d, args.l1, args.l2)


def state_from_args(args, params):
    default = canonical_state(params)
    x1 = default.x1 if args.x1 is None else args.x1
    x2 = default.x2 if args.x2 is None else args.x2
    state = SystemState.reduced(params, x1, x2)
    require_admissible(params, state)
    return state


def add_params_flags(parser):
    parser.add_argument('--n', type=int, required=True, help='윤곽당 셀 수')
    parser.add_argument('--d', type=int, required=True, help='노드 2 위치 (셀 d-1과 d 사이)')
    parser.add_argument('--l1', type=int, required=True, help='클러스터 1 길이')
    parser.add_argument('--l2', type=int, required=True, help='클러스터 2 길이')


def add_state_flags(parser):
    parser.add_argument('--x1', type=int, default=None, help='클러스터 1 선두 셀 (기본: n-1)')
    parser.add_argument('--x2', type=int, default=None, help='클러스터 2 선두 셀 (기본: d-1)')


# ============================================================
# simulate / cycle / classify
# ============================================================

def cmd_simulate(args):
    params = params_from_args(args)
    x0 = state_from_args(args, params)
    steps = params.n * params.n if args.steps is None else args.steps
    if steps < 0:
        raise InvalidParamsError(f'--steps must be >= 0, got {steps}')
    trajectory = simulate(params, x0, steps)

    rows = []
    for t, state in enumerate(trajectory.states):
        moved1, moved2 = trajectory.moved_at(t)
        rows.append({
            't': t, 'x1': state.x1, 'x2': state.x2,
            'moved1': moved1, 'moved2': moved2,
            'H1': trajectory.moves1[t], 'H2': trajectory.moves2[t],
        })

    if args.format == 'csv':
        text = to_csv(TRAJECTORY_CSV_COLUMNS, [
            [r['t'], r['x1'], r['x2'], str(r['moved1']).lower(), str(r['moved2']).lower(), r['H1'], r['H2']]
            for r in rows
        ])
    else:
        text = to_json({'params': params.as_dict(), 'x0': state_json(x0), 'steps': steps, 'rows': rows})
    emit(text, args.out)
    return EXIT_OK


def cmd_cycle(args):
    params = params_from_args(args)
    x0 = state_from_args(args, params)
    cycle = find_limit_cycle(params, x0)
    mode = classify_empirical(cycle)

    if args.format == 'csv':
        text = to_csv(CYCLE_CSV_COLUMNS, [[
            params.n, params.d, params.l1, params.l2, x0.x1, x0.x2,
            cycle.transient_len, cycle.period, cycle.moves1, cycle.moves2,
            cycle.v1.numerator, cycle.v1.denominator, cycle.v2.numerator, cycle.v2.denominator,
            mode.label,
        ]])
    else:
        text = to_json({
            'params': params.as_dict(),
            'x0': state_json(x0),
            'transient': cycle.transient_len,
            'period': cycle.period,
            'moves': [cycle.moves1, cycle.moves2],
            'velocity': [ratio_json(cycle.v1), ratio_json(cycle.v2)],
            'empirical_mode': mode.label,
            'cycle_states': [state_json(s) for s in cycle.cycle_states],
        })
    emit(text, args.out)
    return EXIT_OK


def cmd_classify(args):
    params = params_from_args(args)
    prediction = predict(params)
    if args.json:
        emit(to_json({'params': params.as_dict(), 'predicted': prediction_json(prediction)}))
    else:
        emit(prediction.describe() + '\n')
    return EXIT_OK


# ============================================================
# diagram
# ============================================================

@dataclass(frozen=True)
class DiagramCell:
    l1: int
    l2: int
    mode: str
    v_num: int
    v_den: int


_EMPIRICAL_REGIONS = {
    ModeKind.FREE_MOVEMENT: 'free',
    ModeKind.INTERMEDIATE: 'cluster',
    ModeKind.COLLAPSE: 'collapse',
}


def diagram_cells(n, d, source):
    cells = []
    if source == 'theory':
        grid = spectrum_grid(n, d)
        for (l1, l2), prediction in sorted(grid.cells.items()):
            v = prediction.velocity
            cells.append(DiagramCell(l1, l2, MODE_CHARS[prediction.region], v.numerator, v.denominator))
        return cells

    for l1 in range(1, n):
        for l2 in range(1, n):
            params = SystemParams(n, d, l1, l2)
            cycle = find_limit_cycle(params, canonical_state(params))
            mode = classify_empirical(cycle)
            if cycle.v1 != cycle.v2:
                log('WARN', f'l1={l1} l2={l2}: v1={cycle.v1} != v2={cycle.v2}, v1 기록')
            cells.append(DiagramCell(l1, l2, MODE_CHARS[_EMPIRICAL_REGIONS[mode.kind]],
                                     cycle.v1.numerator, cycle.v1.denominator))
    return cells


def render_ascii(n, cells):
    """행 = l1 오름차순, 열 = l2 오름차순"""
    chars = {(c.l1, c.l2): c.mode for c in cells}
    lines = [''.join(chars[(l1, l2)] for l2 in range(1, n)) for l1 in range(1, n)]
    return '\n'.join(lines) + '\n'


def cmd_diagram(args):
    apply_preset(args, {'source': 'theory', 'format': 'json'})
    if args.n is None or args.d is None:
        raise InvalidParamsError('--n and --d are required')
    if args.source not in ('theory', 'simulation'):
        raise InvalidParamsError(f'unknown source {args.source!r}')
    n, d = int(args.n), int(args.d)
    SystemParams(n, d, 1, 1)
    cells = diagram_cells(n, d, args.source)

    if args.format == 'ascii':
        text = render_ascii(n, cells)
    elif args.format == 'csv':
        text = to_csv(DIAGRAM_CSV_COLUMNS, [[c.l1, c.l2, c.mode, c.v_num, c.v_den] for c in cells])
    elif args.format == 'json':
        text = to_json({
            'n': n, 'd': d, 'source': args.source,
            'cells': [{'l1': c.l1, 'l2': c.l2, 'mode': c.mode, 'v_num': c.v_num, 'v_den': c.v_den}
                      for c in cells],
        })
    else:
        raise InvalidParamsError(f'unknown format {args.format!r}')
    emit(text, args.out)
    return EXIT_OK


# ============================================================
# sweep
# ============================================================

def _selected_rows(report, rows_mode):
    if rows_mode == 'none':
        return []
    if rows_mode == 'discrepancies':
        return report.discrepancies()
    return list(report.instances)


def sweep_json(report, rows_mode='all'):
    return {
        'range': {'n_min': report.n_min, 'n_max': report.n_max},
        'policy': report.policy.value,
        'totals': report.totals,
        'regions': report.regions,
        'metrics': report.metrics,
        'initial_state_dependence': [p.as_dict() for p in report.initial_state_dependence],
        'instances': [instance_json(r) for r in _selected_rows(report, rows_mode)],
    }


def cmd_sweep(args):
    apply_preset(args, {'states': 'all', 'format': 'json', 'rows': 'all', 'strict': False})
    if args.n_min is None or args.n_max is None:
        raise InvalidParamsError('--n-min and --n-max are required')
    if args.states not in ('all', 'canonical'):
        raise InvalidParamsError(f'unknown initial-state policy {args.states!r}')
    if args.format not in ('json', 'csv'):
        raise InvalidParamsError(f'sweep supports json or csv, got {args.format!r}')
    if args.rows not in ('all', 'discrepancies', 'none'):
        raise InvalidParamsError(f'unknown rows selection {args.rows!r}')

    policy = InitialStatePolicy(args.states)
    report = sweep(int(args.n_min), int(args.n_max), policy, workers=resolve_workers())

    totals = report.totals
    log('INFO', f'sweep n={report.n_min}..{report.n_max} ({policy.value}): '
                f'{totals["instances"]} instances, {totals["agreements"]} agree')
    for kind, count in totals['discrepancies'].items():
        if count:
            log('WARN', f'{kind}: {count}')

    if args.format == 'csv':
        text = to_csv(SWEEP_CSV_COLUMNS, [instance_csv_row(r) for r in _selected_rows(report, args.rows)])
    else:
        text = to_json(sweep_json(report, args.rows))
    emit(text, args.out)

    if args.strict and report.discrepancies():
        return EXIT_DISCREPANCY
    return EXIT_OK


# ============================================================
# golden / census
# ============================================================

def golden_status(trace):
    holds = check_golden(trace)
    if trace.expect_hold:
        return 'PASS' if holds else 'FAIL'
    if holds:
        return 'XPASS'
    return 'XFAIL' if replay_golden(trace) == trace.simulated else 'FAIL'


def cmd_golden(args):
    skipped = []
    traces = golden_traces(args.golden_dir, skipped)
    for location, reason in skipped:
        log('WARN', f'골든 트레이스 건너뜀: {location} ({reason})')
    if not traces:
        log('WARN', '골든 트레이스가 없습니다')
    results = [(trace, golden_status(trace)) for trace in traces]

    if args.json:
        emit(to_json([
            {'id': t.trace_id, 'source': t.source, 'params': t.params.as_dict(), 'status': status}
            for t, status in results
        ]))
    else:
        emit(''.join(f'{status:<6} {t.trace_id:<24} ({t.source})\n' for t, status in results))

    if skipped or any(status in ('FAIL', 'XPASS') for _, status in results):
        return EXIT_DISCREPANCY
    return EXIT_OK


def cmd_census(args):
    params = params_from_args(args)
    census = deadlock_census(params)
    data = {
        'params': params.as_dict(),
        'census': [state_json(s) for s in census],
        'closed_form': [state_json(s) for s in closed_form_deadlocks(params)],
        'brute_force': [state_json(s) for s in brute_force_deadlocks(params)],
        'collapse_possible': collapse_possible(params),
        'predicted': predict(params).kind is PredictionKind.COLLAPSE,
    }
    if args.json:
        emit(to_json(data))
    else:
        states = ', '.join(f'({s.x1},{s.x2})' for s in census) or '-'
        emit(f'deadlocks: {states}\ncollapse_possible: {str(data["collapse_possible"]).lower()}\n')
    return EXIT_OK


# ============================================================
# 메인
# ============================================================

def build_parser():
    parser = _Parser(prog='contour-duo', description='두 윤곽 클러스터 시스템 시뮬레이터 / 검증기')
    sub = parser.add_subparsers(dest='command', required=True)

    p = sub.add_parser('simulate', help='궤적 출력')
    add_params_flags(p)
    add_state_flags(p)
    p.add_argument('--steps', type=int, default=None, help='스텝 수 (기본: n^2)')
    p.add_argument('--format', choices=['json', 'csv'], default='json')
    p.add_argument('--out', default=None)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser('cycle', help='극한 사이클 / 평균 속도')
    add_params_flags(p)
    add_state_flags(p)
    p.add_argument('--format', choices=['json', 'csv'], default='json')
    p.add_argument('--out', default=None)
    p.set_defaults(func=cmd_cycle)

    p = sub.add_parser('classify', help='이론 예측')
    add_params_flags(p)
    p.add_argument('--json', action='store_true', help='JSON 출력')
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser('diagram', help='속도 모드 상 다이어그램')
    p.add_argument('--n', type=int, default=None)
    p.add_argument('--d', type=int, default=None)
    p.add_argument('--source', choices=['theory', 'simulation'], default=None)
    p.add_argument('--format', choices=['json', 'csv', 'ascii'], default=None)
    p.add_argument('--out', default=None)
    p.add_argument('--config', default=None, help='프리셋 JSON')
    p.set_defaults(func=cmd_diagram)

    p = sub.add_parser('sweep', help='예측 vs 시뮬레이션 전수 비교')
    p.add_argument('--n-min', dest='n_min', type=int, default=None)
    p.add_argument('--n-max', dest='n_max', type=int, default=None)
    p.add_argument('--states', choices=['all', 'canonical'], default=None)
    p.add_argument('--format', choices=['json', 'csv'], default=None)
    p.add_argument('--rows', choices=['all', 'discrepancies', 'none'], default=None)
    p.add_argument('--strict', action='store_true', default=None, help='불일치가 있으면 종료 코드 3')
    p.add_argument('--out', default=None)
    p.add_argument('--config', default=None, help='프리셋 JSON')
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser('golden', help='증명 수열 골든 트레이스 확인')
    p.add_argument('--golden-dir', dest='golden_dir', default=None)
    p.add_argument('--json', action='store_true')
    p.set_defaults(func=cmd_golden)

    p = sub.add_parser('census', help='교착 상태 조사')
    add_params_flags(p)
    p.add_argument('--json', action='store_true')
    p.set_defaults(func=cmd_census)

    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except InadmissibleStateError as e:
        log('ERROR', f'허용되지 않는 상태: {e}')
        return EXIT_INADMISSIBLE
    except InvalidParamsError as e:
        log('ERROR', f'잘못된 파라미터: {e}')
        return EXIT_INVALID_PARAMS


if __name__ == '__main__':
    sys.exit(main())
