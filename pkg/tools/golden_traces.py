"""
golden/*.json 에서 증명 수열 체크포인트(골든 트레이스)를 읽어오는 공유 모듈.

사용법:
    from golden_traces import load_golden_traces
    traces = load_golden_traces()
    # traces[0].trace_id, traces[0].checkpoints, traces[0].expect_hold

파일 형식:
    {"traces": [{"id": ..., "source": ..., "params": {n, d, l1, l2},
                 "expect": "hold" | "fail",
                 "checkpoints": [[t, [x1, x2]], ...],
                 "simulated": [[t, [x1, x2]], ...]}]}   # expect=fail 일 때만
"""

from __future__ import annotations

import os
import json
import glob
from dataclasses import dataclass

from contour_model import SystemParams, SystemState


@dataclass(frozen=True)
class GoldenTrace:
    trace_id: str
    source: str
    params: SystemParams
    checkpoints: tuple[tuple[int, SystemState], ...]
    expect_hold: bool = True
    simulated: tuple[tuple[int, SystemState], ...] | None = None

    @property
    def x0(self) -> SystemState:
        return self.checkpoints[0][1]


def default_golden_dir():
    # tools/ 디렉토리 기준으로 프로젝트 루트 탐색
    tools_dir = os.path.dirname(os.path.abspath(__file__))
    return os.path.join(os.path.dirname(tools_dir), 'golden')


def _parse_checkpoints(raw):
    points = tuple((int(t), SystemState(int(x[0]), int(x[1]))) for t, x in raw)
    times = [t for t, _ in points]
    if not times or times[0] != 0:
        raise ValueError('checkpoints must start at t=0')
    if any(b <= a for a, b in zip(times, times[1:])):
        raise ValueError('checkpoint times must be strictly increasing')
    return points


def _parse_trace(entry):
    params = SystemParams(**{k: int(entry['params'][k]) for k in ('n', 'd', 'l1', 'l2')})
    checkpoints = _parse_checkpoints(entry['checkpoints'])
    expect = entry.get('expect', 'hold')
    if expect not in ('hold', 'fail'):
        raise ValueError(f'expect must be hold or fail, got {expect!r}')
    expect_hold = expect == 'hold'
    simulated = None
    if not expect_hold:
        simulated = _parse_checkpoints(entry['simulated'])
        if [t for t, _ in simulated] != [t for t, _ in checkpoints]:
            raise ValueError('simulated checkpoints must use the same times')
    return GoldenTrace(
        trace_id=str(entry['id']),
        source=str(entry.get('source', '')),
        params=params,
        checkpoints=checkpoints,
        expect_hold=expect_hold,
        simulated=simulated,
    )


def load_golden_traces(golden_dir=None, skipped=None):
    """
    golden/*.json 의 트레이스를 파일명, 파일 내 순서대로 반환한다.

    파싱할 수 없는 파일이나 항목은 건너뛰고, skipped 리스트가 주어지면
    (위치, 사유)를 추가한다. 위치는 '파일명' 또는 '파일명#id'.
    """
    if golden_dir is None:
        golden_dir = default_golden_dir()
    if skipped is None:
        skipped = []

    traces = []
    for path in sorted(glob.glob(os.path.join(golden_dir, '*.json'))):
        name = os.path.basename(path)
        try:
            with open(path, 'r', encoding='utf-8') as f:
                data = json.load(f)
            entries = data.get('traces', [])
        except (json.JSONDecodeError, OSError, AttributeError) as e:
            skipped.append((name, str(e) or type(e).__name__))
            continue
        for i, entry in enumerate(entries):
            try:
                traces.append(_parse_trace(entry))
            except (KeyError, TypeError, ValueError, IndexError, AttributeError) as e:
                label = entry.get('id', i) if isinstance(entry, dict) else i
                skipped.append((f'{name}#{label}', f'{type(e).__name__}: {e}'))
    return traces
