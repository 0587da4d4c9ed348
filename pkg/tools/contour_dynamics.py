"""
궤적 생성, 극한 사이클 추출, 평균 속도 A_i/T 계산, 경험적 모드 분류.

속도는 항상 Fraction(기약분수)으로 다룬다. 부동소수점은 쓰지 않는다.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from enum import Enum
from fractions import Fraction

from contour_model import (
    SystemParams, SystemState, StepOutcome,
    admissible_states, require_admissible, step,
)

# 기약분수, 정확 비교
ExactRatio = Fraction


# ============================================================
# 타입
# ============================================================

@dataclass(frozen=True)
class Trajectory:
    params: SystemParams
    states: tuple[SystemState, ...]
    moves1: tuple[int, ...]   # H_1(t)
    moves2: tuple[int, ...]   # H_2(t)

    def __len__(self):
        return len(self.states)

    def moved_at(self, t: int) -> tuple[bool, bool]:
        """t-1 → t 전이에서 각 클러스터가 움직였는지 (t=0이면 둘 다 False)"""
        if t == 0:
            return (False, False)
        return (self.moves1[t] > self.moves1[t - 1], self.moves2[t] > self.moves2[t - 1])


@dataclass(frozen=True)
class CycleInfo:
    transient_len: int
    period: int
    cycle_states: tuple[SystemState, ...]
    moves1: int
    moves2: int
    v1: ExactRatio
    v2: ExactRatio


class ModeKind(Enum):
    FREE_MOVEMENT = 'FreeMovement'
    INTERMEDIATE = 'Intermediate'
    COLLAPSE = 'Collapse'


@dataclass(frozen=True)
class EmpiricalMode:
    kind: ModeKind
    period: int
    v1: ExactRatio
    v2: ExactRatio

    @property
    def label(self) -> str:
        return self.kind.value


@dataclass(frozen=True)
class Attractor:
    cycle: CycleInfo
    basin_size: int


# ============================================================
# 시뮬레이션
# ============================================================

def simulate(params: SystemParams, x0: SystemState, steps: int) -> Trajectory:
    require_admissible(params, x0)
    if steps < 0:
        raise ValueError(f'steps must be >= 0, got {steps}')
    states = [x0]
    h1 = [0]
    h2 = [0]
    state = x0
    for _ in range(steps):
        outcome = step(params, state)
        state = outcome.next
        states.append(state)
        h1.append(h1[-1] + outcome.moved1)
        h2.append(h2[-1] + outcome.moved2)
    return Trajectory(params, tuple(states), tuple(h1), tuple(h2))


def average_velocities(cycle: CycleInfo) -> tuple[ExactRatio, ExactRatio]:
    return (Fraction(cycle.moves1, cycle.period), Fraction(cycle.moves2, cycle.period))


def _cycle_from_states(transient_len, cycle_states, outcomes):
    a1 = sum(outcomes[s].moved1 for s in cycle_states)
    a2 = sum(outcomes[s].moved2 for s in cycle_states)
    period = len(cycle_states)
    return CycleInfo(
        transient_len=transient_len,
        period=period,
        cycle_states=tuple(cycle_states),
        moves1=a1,
        moves2=a2,
        v1=Fraction(a1, period),
        v2=Fraction(a2, period),
    )


def find_limit_cycle(params: SystemParams, x0: SystemState) -> CycleInfo:
    """첫 방문 시각을 기록하다가 처음 반복되는 상태에서 사이클을 자른다"""
    require_admissible(params, x0)
    first_visit: dict[SystemState, int] = {}
    path: list[SystemState] = []
    outcomes: dict[SystemState, StepOutcome] = {}
    state = x0
    # 상태 공간이 n^2 이하이므로 n^2 + 1 스텝 안에 반드시 반복
    for t in range(params.n * params.n + 1):
        if state in first_visit:
            start = first_visit[state]
            return _cycle_from_states(start, path[start:], outcomes)
        first_visit[state] = t
        path.append(state)
        outcome = step(params, state)
        outcomes[state] = outcome
        state = outcome.next
    raise RuntimeError(f'no repetition within n^2+1 steps for {params} from {x0}')


def is_deadlock(params: SystemParams, state: SystemState) -> bool:
    outcome = step(params, state)
    return not outcome.moved1 and not outcome.moved2


def classify_empirical(cycle: CycleInfo) -> EmpiricalMode:
    if cycle.moves1 == cycle.period and cycle.moves2 == cycle.period:
        kind = ModeKind.FREE_MOVEMENT
    elif cycle.moves1 == 0 and cycle.moves2 == 0:
        kind = ModeKind.COLLAPSE
    else:
        kind = ModeKind.INTERMEDIATE
    return EmpiricalMode(kind, cycle.period, cycle.v1, cycle.v2)


# ============================================================
# 전 상태 공간 분석 (끌개/유역)
# ============================================================

def transition_table(params: SystemParams) -> dict[SystemState, StepOutcome]:
    return {s: step(params, s) for s in admissible_states(params)}


def attractor_census(params: SystemParams) -> tuple[list[Attractor], dict[SystemState, tuple[int, int]]]:
    """
    모든 허용 상태에서 출발한 궤적이 도달하는 끌개(극한 사이클)를 모은다.

    Returns:
        (attractors, basin). basin[state] = (끌개 인덱스, 사이클까지의 과도 길이).
        끌개의 cycle_states는 사전순 최소 상태부터 시작하도록 회전되어 있다.
    """
    table = transition_table(params)
    basin: dict[SystemState, tuple[int, int]] = {}
    cycles: list[CycleInfo] = []
    sizes: list[int] = []

    for start in table:
        if start in basin:
            continue
        path: list[SystemState] = []
        seen: dict[SystemState, int] = {}
        state = start
        while state not in basin and state not in seen:
            seen[state] = len(path)
            path.append(state)
            state = table[state].next

        if state in seen:
            k = seen[state]
            loop = path[k:]
            pivot = loop.index(min(loop))
            loop = loop[pivot:] + loop[:pivot]
            index = len(cycles)
            cycles.append(_cycle_from_states(0, loop, table))
            sizes.append(0)
            for s in loop:
                basin[s] = (index, 0)
            tail = path[:k]
            base = 0
        else:
            index, base = basin[state]
            tail = path

        for i, s in enumerate(reversed(tail)):
            basin[s] = (index, base + i + 1)

    for index, _ in basin.values():
        sizes[index] += 1
    attractors = [Attractor(cycle, size) for cycle, size in zip(cycles, sizes)]
    return attractors, basin


def cycle_for(attractors: list[Attractor], basin: dict[SystemState, tuple[int, int]],
              x0: SystemState) -> CycleInfo:
    index, transient = basin[x0]
    return replace(attractors[index].cycle, transient_len=transient)
