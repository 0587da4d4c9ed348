"""
닫힌 형식 예측: 자유 이동 / 클러스터 운동 / 붕괴 세 영역과 속도 스펙트럼 격자.

시뮬레이션은 절대 참조하지 않는다. 예측과 실측의 비교는 contour_verify가 맡는다.
라벨 대칭성을 위해 모든 판정은 lmin = min(l1, l2), lmax = max(l1, l2)로 정규화한 뒤 수행한다.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction

from contour_model import SystemParams, SystemState


class PredictionKind(Enum):
    FREE_MOVEMENT = 'FreeMovement'
    CLUSTER_MOTION = 'ClusterMotion'
    COLLAPSE = 'Collapse'


_SHORT_LABELS = {
    PredictionKind.FREE_MOVEMENT: 'free',
    PredictionKind.CLUSTER_MOTION: 'cluster-motion',
    PredictionKind.COLLAPSE: 'collapse',
}

_REGIONS = {
    PredictionKind.FREE_MOVEMENT: 'free',
    PredictionKind.CLUSTER_MOTION: 'cluster',
    PredictionKind.COLLAPSE: 'collapse',
}


@dataclass(frozen=True)
class ModePrediction:
    kind: PredictionKind
    period: int
    velocity: Fraction

    @property
    def label(self) -> str:
        return self.kind.value

    @property
    def region(self) -> str:
        return _REGIONS[self.kind]

    def describe(self) -> str:
        short = _SHORT_LABELS[self.kind]
        if self.kind is PredictionKind.CLUSTER_MOTION:
            return f'{short} T={self.period} v={self.velocity.numerator}/{self.velocity.denominator}'
        return f'{short} v={self.velocity}'


@dataclass(frozen=True)
class SpectrumGrid:
    n: int
    d: int
    cells: dict[tuple[int, int], ModePrediction] = field(hash=False)

    def __getitem__(self, key: tuple[int, int]) -> ModePrediction:
        return self.cells[key]


def _ordered(params):
    return min(params.l1, params.l2), max(params.l1, params.l2)


def free_movement_possible(params: SystemParams) -> bool:
    """부등식 l1 + l2 > n 의 부정"""
    return params.l1 + params.l2 <= params.n


def collapse_possible(params: SystemParams) -> bool:
    lmin, _ = _ordered(params)
    return lmin > params.n - params.d


def predicted_period(prediction: ModePrediction) -> int:
    return prediction.period


def predict(params: SystemParams) -> ModePrediction:
    total = params.l1 + params.l2
    if free_movement_possible(params):
        # 자유 이동 사이클에서는 두 클러스터가 한 바퀴 도는 n 스텝이 주기
        return ModePrediction(PredictionKind.FREE_MOVEMENT, params.n, Fraction(1))
    if collapse_possible(params):
        return ModePrediction(PredictionKind.COLLAPSE, 1, Fraction(0))
    return ModePrediction(PredictionKind.CLUSTER_MOTION, total, Fraction(params.n, total))


def lemma2_states(params: SystemParams) -> list[SystemState]:
    """지연이 끝나는 순간 시스템이 놓이는 네 상태 (덧셈은 mod n)"""
    n, d = params.n, params.d
    return [
        SystemState(params.l1 % n, 0),
        SystemState(0, params.l2 % n),
        SystemState((d + params.l1) % n, d),
        SystemState(d, (d + params.l2) % n),
    ]


def theorem1_case(params: SystemParams) -> int | None:
    """
    자유 이동 증명의 네 경우 중 어느 것에 해당하는지.

    원문 오타 정규화:
      - 4번 경우의 "l_1+l_2 <= 1" 은 l1 + l2 <= n 으로 읽는다.
      - 3번 경우의 "(0, 1-l_1)" 은 (0, n - l1) 으로 읽는다.
      - 2번 경우의 "A(t_0+n+l_2)" 는 t0 + n - l2 로 읽는다.
    """
    if not free_movement_possible(params):
        return None
    lmin, lmax = _ordered(params)
    n, d = params.n, params.d
    if lmin > d:
        return 4
    if lmax <= d:
        return 1
    if lmax < n - d:
        return 2
    return 3


def theorem2_case(params: SystemParams) -> int | None:
    """
    클러스터 운동 증명의 세 경우.

    원문 오타 정규화: 1번 경우의 "l_1+l_2 > 1" 은 l1 + l2 > n,
    "addition modulo 1" 은 modulo n 으로 읽는다.
    """
    if free_movement_possible(params) or collapse_possible(params):
        return None
    lmin, lmax = _ordered(params)
    n, d = params.n, params.d
    if lmin <= d:
        return 1
    if lmax <= n - d:
        return 2
    return 3


def spectrum_grid(n: int, d: int) -> SpectrumGrid:
    # 1x1 파라미터로 (n, d) 유효성만 먼저 확인
    SystemParams(n, d, 1, 1)
    cells = {}
    for l1 in range(1, n):
        for l2 in range(1, n):
            cells[(l1, l2)] = predict(SystemParams(n, d, l1, l2))
    return SpectrumGrid(n, d, cells)
