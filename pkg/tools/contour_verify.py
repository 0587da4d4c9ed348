"""
시뮬레이션 vs 닫힌 형식 예측 전수 비교, 골든 트레이스 재현, 교착 상태 조사.

모든 불일치는 정확히 하나의 분류(DiscrepancyKind)를 갖는다.
우선순위: CrossedDeadlock > ModeMismatch > PeriodMismatch > VelocityMismatch
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction

from joblib import Parallel, delayed

from contour_model import (
    ClusterId, InvalidParamsError, SystemParams, SystemState,
    admissible_states, at_node, canonical_state, is_blocked, occupies_node,
)
from contour_dynamics import (
    EmpiricalMode, ModeKind,
    attractor_census, classify_empirical, cycle_for, find_limit_cycle,
    simulate, transition_table,
)
from contour_theory import ModePrediction, PredictionKind, lemma2_states, predict, predicted_period
from golden_traces import GoldenTrace, load_golden_traces


class DiscrepancyKind(Enum):
    CROSSED_DEADLOCK = 'CrossedDeadlock'
    MODE_MISMATCH = 'ModeMismatch'
    PERIOD_MISMATCH = 'PeriodMismatch'
    VELOCITY_MISMATCH = 'VelocityMismatch'


class InitialStatePolicy(Enum):
    ALL_ADMISSIBLE = 'all'
    CANONICAL = 'canonical'


_MATCHING_PREDICTION = {
    ModeKind.FREE_MOVEMENT: PredictionKind.FREE_MOVEMENT,
    ModeKind.INTERMEDIATE: PredictionKind.CLUSTER_MOTION,
    ModeKind.COLLAPSE: PredictionKind.COLLAPSE,
}

REGIONS = ('free', 'cluster', 'collapse')


@dataclass(frozen=True)
class InstanceReport:
    params: SystemParams
    x0: SystemState
    transient: int
    period: int
    moves1: int
    moves2: int
    v1: Fraction
    v2: Fraction
    empirical: EmpiricalMode
    predicted: ModePrediction
    discrepancy_kind: DiscrepancyKind | None
    # 중간 모드 사이클에서만 의미 있음 (보조정리 2의 네 상태 중 하나를 지나는지)
    lemma2_hit: bool | None = None

    @property
    def agree(self) -> bool:
        return self.discrepancy_kind is None

    @property
    def sort_key(self) -> tuple:
        p = self.params
        return (p.n, p.d, p.l1, p.l2, self.x0.x1, self.x0.x2)


@dataclass(frozen=True)
class SweepReport:
    n_min: int
    n_max: int
    policy: InitialStatePolicy
    instances: tuple[InstanceReport, ...]
    totals: dict = field(hash=False)
    regions: dict = field(hash=False)
    metrics: dict = field(hash=False)
    initial_state_dependence: tuple[SystemParams, ...] = ()

    def discrepancies(self) -> list[InstanceReport]:
        return [r for r in self.instances if not r.agree]


# ============================================================
# 교착 상태
# ============================================================

def is_crossed_deadlock(params: SystemParams, state: SystemState) -> bool:
    """각 클러스터가 서로 다른 노드에 있고, 그 노드를 상대 클러스터가 점유"""
    node1 = at_node(params, state, ClusterId.C1)
    node2 = at_node(params, state, ClusterId.C2)
    if node1 is None or node2 is None or node1 is node2:
        return False
    return (occupies_node(params, state, ClusterId.C2, node1)
            and occupies_node(params, state, ClusterId.C1, node2))


def deadlock_census(params: SystemParams) -> list[SystemState]:
    return [
        s for s in admissible_states(params)
        if is_blocked(params, s, ClusterId.C1) and is_blocked(params, s, ClusterId.C2)
    ]


def brute_force_deadlocks(params: SystemParams) -> list[SystemState]:
    """전이표에서 고정점을 직접 찾는 독립 오라클"""
    return sorted(s for s, outcome in transition_table(params).items() if outcome.next == s)


def closed_form_deadlocks(params: SystemParams) -> list[SystemState]:
    n, d = params.n, params.d
    found = []
    if params.l2 >= n - d + 1 and params.l1 >= d + 1:
        found.append(SystemState(d - 1, n - 1))
    if params.l1 >= n - d + 1 and params.l2 >= d + 1:
        found.append(SystemState(n - 1, d - 1))
    return sorted(found)


# ============================================================
# 단일 인스턴스 비교
# ============================================================

def _discrepancy(params, cycle, empirical, predicted):
    if (empirical.kind is ModeKind.COLLAPSE
            and predicted.kind is not PredictionKind.COLLAPSE
            and is_crossed_deadlock(params, cycle.cycle_states[0])):
        return DiscrepancyKind.CROSSED_DEADLOCK
    if _MATCHING_PREDICTION[empirical.kind] is not predicted.kind:
        return DiscrepancyKind.MODE_MISMATCH
    if cycle.period != predicted_period(predicted):
        return DiscrepancyKind.PERIOD_MISMATCH
    if cycle.v1 != predicted.velocity or cycle.v2 != predicted.velocity:
        return DiscrepancyKind.VELOCITY_MISMATCH
    return None


def _report(params, x0, cycle, predicted, lemma2):
    empirical = classify_empirical(cycle)
    lemma2_hit = None
    if empirical.kind is ModeKind.INTERMEDIATE:
        on_cycle = set(cycle.cycle_states)
        lemma2_hit = any(s in on_cycle for s in lemma2)
    return InstanceReport(
        params=params,
        x0=x0,
        transient=cycle.transient_len,
        period=cycle.period,
        moves1=cycle.moves1,
        moves2=cycle.moves2,
        v1=cycle.v1,
        v2=cycle.v2,
        empirical=empirical,
        predicted=predicted,
        discrepancy_kind=_discrepancy(params, cycle, empirical, predicted),
        lemma2_hit=lemma2_hit,
    )


def verify_instance(params: SystemParams, x0: SystemState) -> InstanceReport:
    cycle = find_limit_cycle(params, x0)
    return _report(params, x0, cycle, predict(params), lemma2_states(params))


def _verify_block(params, policy):
    """한 파라미터 조합의 모든 행과 끌개 개수 (canonical 정책이면 개수는 None)"""
    if policy is InitialStatePolicy.CANONICAL:
        return [verify_instance(params, canonical_state(params))], None
    predicted = predict(params)
    lemma2 = lemma2_states(params)
    attractors, basin = attractor_census(params)
    rows = [
        _report(params, x0, cycle_for(attractors, basin, x0), predicted, lemma2)
        for x0 in sorted(basin)
    ]
    return rows, len(attractors)


def verify_params(params: SystemParams,
                  policy: InitialStatePolicy = InitialStatePolicy.ALL_ADMISSIBLE) -> list[InstanceReport]:
    rows, _ = _verify_block(params, policy)
    return rows


# ============================================================
# 스윕
# ============================================================

def parameter_grid(n_min: int, n_max: int) -> list[SystemParams]:
    if n_min < 2 or n_min > n_max:
        raise InvalidParamsError(f'invalid sweep range n={n_min}..{n_max}')
    return [
        SystemParams(n, d, l1, l2)
        for n in range(n_min, n_max + 1)
        for d in range(1, n // 2 + 1)
        for l1 in range(1, n)
        for l2 in range(1, n)
    ]


def _summarize(n_min, n_max, policy, rows, attractor_counts):
    discrepancies = {kind.value: 0 for kind in DiscrepancyKind}
    regions = {name: {'instances': 0, 'agreements': 0} for name in REGIONS}
    lemma2 = {'intermediate_cycles': 0, 'covered': 0}
    asymmetric = lemma1 = theorem1 = theorem3 = 0
    velocities_by_params: dict[SystemParams, set] = {}

    for row in rows:
        region = regions[row.predicted.region]
        region['instances'] += 1
        if row.agree:
            region['agreements'] += 1
        else:
            discrepancies[row.discrepancy_kind.value] += 1
            if row.predicted.kind is PredictionKind.FREE_MOVEMENT:
                theorem1 += 1
            elif row.predicted.kind is PredictionKind.COLLAPSE:
                theorem3 += 1
        if row.empirical.kind is ModeKind.INTERMEDIATE:
            lemma2['intermediate_cycles'] += 1
            lemma2['covered'] += bool(row.lemma2_hit)
        if row.empirical.kind is ModeKind.FREE_MOVEMENT and row.params.l1 + row.params.l2 > row.params.n:
            lemma1 += 1
        if row.v1 != row.v2:
            asymmetric += 1
        velocities_by_params.setdefault(row.params, set()).add((row.v1, row.v2))

    for region in regions.values():
        # 비율은 기약분수, 행이 없는 영역은 None
        if region['instances']:
            rate = Fraction(region['agreements'], region['instances'])
            region['rate'] = {'num': rate.numerator, 'den': rate.denominator}
        else:
            region['rate'] = None
    agreements = sum(r['agreements'] for r in regions.values())
    counts = [c for c in attractor_counts if c is not None]
    metrics = {
        'lemma2_coverage': lemma2,
        'velocity_asymmetry': asymmetric,
        'lemma1_violations': lemma1,
        'theorem1_violations': theorem1,
        'theorem3_violations': theorem3,
        'max_attractors': max(counts) if counts else None,
        'params_with_multiple_attractors': sum(1 for c in counts if c > 1),
    }
    dependent = tuple(sorted(p for p, seen in velocities_by_params.items() if len(seen) > 1))
    return SweepReport(
        n_min=n_min,
        n_max=n_max,
        policy=policy,
        instances=tuple(rows),
        totals={
            'instances': len(rows),
            'agreements': agreements,
            'discrepancies': discrepancies,
        },
        regions=regions,
        metrics=metrics,
        initial_state_dependence=dependent,
    )


def sweep(n_min: int, n_max: int,
          policy: InitialStatePolicy = InitialStatePolicy.ALL_ADMISSIBLE,
          workers: int = 1) -> SweepReport:
    """
    범위 안의 모든 유효 (n, d, l1, l2)와 허용 초기 상태를 전수 비교한다.

    작업자 수는 결과에 영향을 주지 않는다 (행은 마지막에 정렬).
    """
    grid = parameter_grid(n_min, n_max)
    blocks = Parallel(n_jobs=workers)(delayed(_verify_block)(p, policy) for p in grid)
    rows = sorted((row for block_rows, _ in blocks for row in block_rows), key=lambda r: r.sort_key)
    return _summarize(n_min, n_max, policy, rows, [count for _, count in blocks])


# ============================================================
# 골든 트레이스
# ============================================================

def golden_traces(golden_dir=None, skipped=None) -> list[GoldenTrace]:
    return load_golden_traces(golden_dir, skipped)


def replay_golden(trace: GoldenTrace) -> tuple[tuple[int, SystemState], ...]:
    horizon = trace.checkpoints[-1][0]
    trajectory = simulate(trace.params, trace.x0, horizon)
    return tuple((t, trajectory.states[t]) for t, _ in trace.checkpoints)


def check_golden(trace: GoldenTrace) -> bool:
    """원문 체크포인트가 시뮬레이션과 정확히 일치하는지"""
    return replay_golden(trace) == trace.checkpoints
