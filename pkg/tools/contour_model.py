"""
두 윤곽(contour) 공방향 클러스터 시스템의 핵심 모델.

각 윤곽에는 n개의 셀이 있고, 클러스터 i는 l_i개의 인접 입자로 이루어진다.
노드 1은 셀 n-1과 0 사이, 노드 2는 셀 d-1과 d 사이에 있다.
한 시각 t의 상태는 두 클러스터 선두 입자의 셀 번호 (x1, x2)이다.

사용법:
    from contour_model import SystemParams, SystemState, step
    params = SystemParams(n=10, d=3, l1=4, l2=7)
    outcome = step(params, SystemState(9, 2))
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum


# ============================================================
# 예외
# ============================================================

class ModelError(ValueError):
    """모델 입력 오류의 공통 부모"""


class InvalidParamsError(ModelError):
    """n, d, l1, l2 조합이 유효하지 않음"""


class InadmissibleStateError(ModelError):
    """상태가 범위를 벗어났거나 한 노드를 두 클러스터가 동시에 점유"""


# ============================================================
# 식별자
# ============================================================

class ClusterId(Enum):
    C1 = 1
    C2 = 2

    @property
    def other(self) -> ClusterId:
        return ClusterId.C2 if self is ClusterId.C1 else ClusterId.C1


class NodeId(Enum):
    NODE1 = 1
    NODE2 = 2

    def entry_cell(self, params: SystemParams) -> int:
        """노드 직전 셀 (선두 입자가 여기 있으면 '노드에 있다')"""
        return params.n - 1 if self is NodeId.NODE1 else params.d - 1

    def exit_cell(self, params: SystemParams) -> int:
        return 0 if self is NodeId.NODE1 else params.d


# ============================================================
# 파라미터 / 상태
# ============================================================

@dataclass(frozen=True, order=True)
class SystemParams:
    n: int
    d: int
    l1: int
    l2: int

    def __post_init__(self):
        for name in ('n', 'd', 'l1', 'l2'):
            value = getattr(self, name)
            if not isinstance(value, int) or isinstance(value, bool):
                raise InvalidParamsError(f'{name} must be an integer, got {value!r}')
        if self.n < 2:
            raise InvalidParamsError(f'n must be >= 2, got {self.n}')
        if self.d < 1 or 2 * self.d > self.n:
            raise InvalidParamsError(f'd must satisfy 1 <= d <= n/2, got d={self.d}, n={self.n}')
        for name in ('l1', 'l2'):
            value = getattr(self, name)
            if not 1 <= value <= self.n - 1:
                raise InvalidParamsError(f'{name} must satisfy 1 <= {name} <= n-1, got {value}')

    def length(self, cluster: ClusterId) -> int:
        return self.l1 if cluster is ClusterId.C1 else self.l2

    def as_dict(self) -> dict:
        return {'n': self.n, 'd': self.d, 'l1': self.l1, 'l2': self.l2}


@dataclass(frozen=True, order=True)
class SystemState:
    x1: int
    x2: int

    @classmethod
    def reduced(cls, params: SystemParams, x1: int, x2: int) -> SystemState:
        return cls(x1 % params.n, x2 % params.n)

    def of(self, cluster: ClusterId) -> int:
        return self.x1 if cluster is ClusterId.C1 else self.x2

    def as_tuple(self) -> tuple[int, int]:
        return (self.x1, self.x2)


@dataclass(frozen=True)
class StepOutcome:
    next: SystemState
    moved1: bool
    moved2: bool

    def moved(self, cluster: ClusterId) -> bool:
        return self.moved1 if cluster is ClusterId.C1 else self.moved2


# ============================================================
# 기하 술어
# ============================================================

def covered_cells(params: SystemParams, cluster: ClusterId, state: SystemState) -> frozenset[int]:
    """클러스터 입자가 놓인 셀 집합 {(x_i - k) mod n : 0 <= k < l_i}"""
    head = state.of(cluster)
    return frozenset((head - k) % params.n for k in range(params.length(cluster)))


def at_node(params: SystemParams, state: SystemState, cluster: ClusterId) -> NodeId | None:
    head = state.of(cluster)
    if head == params.n - 1:
        return NodeId.NODE1
    if head == params.d - 1:
        return NodeId.NODE2
    return None


def occupies_node(params: SystemParams, state: SystemState, cluster: ClusterId, node: NodeId) -> bool:
    """노드 양쪽 셀이 모두 이 클러스터로 덮여 있으면 점유"""
    # 선두가 출구 셀에서 k칸 앞이면 꼬리가 입구 셀에 닿는 조건은 k <= l - 2
    offset = (state.of(cluster) - node.exit_cell(params)) % params.n
    return offset <= params.length(cluster) - 2


def _state_in_range(params, state):
    return 0 <= state.x1 < params.n and 0 <= state.x2 < params.n


def is_admissible(params: SystemParams, state: SystemState) -> bool:
    if not _state_in_range(params, state):
        return False
    for node in NodeId:
        if (occupies_node(params, state, ClusterId.C1, node)
                and occupies_node(params, state, ClusterId.C2, node)):
            return False
    return True


def require_admissible(params: SystemParams, state: SystemState) -> None:
    if not _state_in_range(params, state):
        raise InadmissibleStateError(
            f'state {state.as_tuple()} is outside 0..{params.n - 1}')
    for node in NodeId:
        if (occupies_node(params, state, ClusterId.C1, node)
                and occupies_node(params, state, ClusterId.C2, node)):
            raise InadmissibleStateError(
                f'state {state.as_tuple()} has {node.name} occupied by both clusters')


def admissible_states(params: SystemParams) -> list[SystemState]:
    return [
        SystemState(x1, x2)
        for x1 in range(params.n)
        for x2 in range(params.n)
        if is_admissible(params, SystemState(x1, x2))
    ]


# ============================================================
# 이동 규칙
# ============================================================

def _blocked(params, state, cluster):
    node = at_node(params, state, cluster)
    if node is None:
        return False
    other = cluster.other
    # 점유 차단이 먼저, 같은 노드 동시 도착이면 클러스터 1만 이동
    if occupies_node(params, state, other, node):
        return True
    return cluster is ClusterId.C2 and at_node(params, state, other) is node


def is_blocked(params: SystemParams, state: SystemState, cluster: ClusterId) -> bool:
    require_admissible(params, state)
    return _blocked(params, state, cluster)


def step(params: SystemParams, state: SystemState) -> StepOutcome:
    """시각 t 스냅샷으로 두 클러스터의 차단 여부를 정한 뒤 동시에 적용"""
    require_admissible(params, state)
    moved1 = not _blocked(params, state, ClusterId.C1)
    moved2 = not _blocked(params, state, ClusterId.C2)
    n = params.n
    nxt = SystemState(
        (state.x1 + 1) % n if moved1 else state.x1,
        (state.x2 + 1) % n if moved2 else state.x2,
    )
    return StepOutcome(nxt, moved1, moved2)


def canonical_state(params: SystemParams) -> SystemState:
    """스윕/다이어그램용 결정적 시작 상태 (n-1, d-1)"""
    return SystemState(params.n - 1, params.d - 1)
