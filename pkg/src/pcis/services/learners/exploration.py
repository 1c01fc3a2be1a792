"""
Exploration schedules for epsilon-greedy proposals.
"""

import math

from src.pcis.constants import ScheduleKind
from src.pcis.core.exceptions import InvalidArgumentError
from src.pcis.core.schema.config.config import ExplorationModel


def epsilon_at(schedule: ExplorationModel, t: int) -> float:
    """
    Exploration rate after t executed steps.

    exponential: eps_min + (eps_max - eps_min) exp(-t / tau)
    linear: eps_max -> eps_min over tau_or_span steps, then held at eps_min
    :param schedule: Schedule settings.
    :param t: Step count, t >= 0.
    :return: Rate in [eps_min, eps_max].
    """
    if t < 0:
        raise InvalidArgumentError(f"Step count must be nonnegative, got {t}.")
    span = schedule.eps_max - schedule.eps_min
    if schedule.kind == ScheduleKind.EXPONENTIAL:
        return schedule.eps_min + span * math.exp(-t / schedule.tau_or_span)
    progress = min(t / schedule.tau_or_span, 1.0)
    return schedule.eps_max - span * progress
