"""Error maturation/reset and safety-reaction evaluation.

Per error: Clear -> Maturing while the condition holds, Set once it has held
for at least the maturation time, Resetting while it is absent after Set, and
Clear again once absent for at least the reset time. Both boundaries are
inclusive. The reset condition is the absence of the error condition.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Mapping

from ..function_model import ErrorSpec, SafetyReaction


class ErrorStatus(str, Enum):
    CLEAR = "Clear"
    MATURING = "Maturing"
    SET = "Set"
    RESETTING = "Resetting"


class UnknownErrorError(KeyError):
    pass


def ms_to_us(ms: float) -> int:
    return int(round(ms * 1000))


@dataclass
class ErrorState:
    spec: ErrorSpec
    status: ErrorStatus = ErrorStatus.CLEAR
    condition_since: int | None = None
    reset_since: int | None = None

    @property
    def is_set(self) -> bool:
        return self.status in (ErrorStatus.SET, ErrorStatus.RESETTING)

    @property
    def maturation_us(self) -> int:
        return ms_to_us(self.spec.maturation_time)

    @property
    def reset_us(self) -> int:
        return ms_to_us(self.spec.reset_time)


def initial_states(specs: Iterable[ErrorSpec]) -> dict[str, ErrorState]:
    return {spec.name: ErrorState(spec) for spec in specs}


def _step(state: ErrorState, condition: bool, t_us: int) -> None:
    s = state.status
    if s is ErrorStatus.CLEAR:
        if condition:
            state.condition_since = t_us
            state.status = ErrorStatus.SET if state.maturation_us == 0 else ErrorStatus.MATURING
    elif s is ErrorStatus.MATURING:
        if not condition:
            state.status = ErrorStatus.CLEAR
            state.condition_since = None
        elif t_us - state.condition_since >= state.maturation_us:
            state.status = ErrorStatus.SET
    elif s is ErrorStatus.SET:
        if not condition:
            state.reset_since = t_us
            state.status = ErrorStatus.CLEAR if state.reset_us == 0 else ErrorStatus.RESETTING
            if state.status is ErrorStatus.CLEAR:
                state.condition_since = state.reset_since = None
    else:  # RESETTING
        if condition:
            state.status = ErrorStatus.SET
            state.reset_since = None
        elif t_us - state.reset_since >= state.reset_us:
            state.status = ErrorStatus.CLEAR
            state.condition_since = state.reset_since = None


def evaluate_errors(
    states: Mapping[str, ErrorState], conditions: Mapping[str, bool], t_us: int
) -> list[str]:
    """Advance every error to time ``t_us``; returns names whose status changed.

    Errors missing from ``conditions`` see a false condition. An error that
    lists a Set dependency keeps its condition asserted, and an error whose
    dependency became Set during this pass is Set immediately (one hop).
    """
    for name in conditions:
        if name not in states:
            raise UnknownErrorError(name)
    before = {name: st.status for name, st in states.items()}
    was_set = {name for name, st in states.items() if st.is_set}

    for name, st in states.items():
        held = any(states[d].is_set for d in st.spec.dependencies or [] if d in states and d in was_set)
        _step(st, bool(conditions.get(name, False)) or held, t_us)

    newly_set = {name for name, st in states.items() if st.status is ErrorStatus.SET and name not in was_set}
    for name, st in states.items():
        if st.is_set:
            continue
        if any(d in newly_set for d in st.spec.dependencies or []):
            st.status = ErrorStatus.SET
            st.condition_since = t_us
            st.reset_since = None

    return [name for name, st in states.items() if st.status is not before[name]]


def evaluate_safety(
    reactions: Iterable[SafetyReaction], error_states: Mapping[str, ErrorState]
) -> dict[str, bool]:
    """A reaction is active when any error in its list is Set."""
    return {r.name: any(error_states[e].is_set for e in r.error_list) for r in reactions}
