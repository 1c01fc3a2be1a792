"""
Exploration Schedule Unit Tests.
"""

import math

import pytest

from src.pcis.constants import ScheduleKind
from src.pcis.core.exceptions import InvalidArgumentError
from src.pcis.core.schema.config.config import ExplorationModel
from src.pcis.services.learners.exploration import epsilon_at


class TestEpsilonSchedule:
    def test_exponential_schedule(self, exploration):
        """
        Test eps(t) = eps_min + (eps_max - eps_min) exp(-t / tau).
        :param exploration: Exponential schedule fixture (1.0 -> 0.01, tau 1000).
        """
        assert epsilon_at(exploration, 0) == pytest.approx(1.0)
        assert epsilon_at(exploration, 1000) == pytest.approx(0.01 + 0.99 * math.exp(-1.0))
        assert epsilon_at(exploration, 10**7) == pytest.approx(0.01)

    def test_linear_schedule_holds_at_minimum(self):
        schedule = ExplorationModel(
            kind=ScheduleKind.LINEAR, eps_max=0.5, eps_min=0.01, tau_or_span=4000
        )
        assert epsilon_at(schedule, 0) == 0.5
        assert epsilon_at(schedule, 2000) == pytest.approx(0.255)
        assert epsilon_at(schedule, 4000) == pytest.approx(0.01)
        assert epsilon_at(schedule, 9000) == pytest.approx(0.01)

    def test_schedule_is_nonincreasing(self, exploration):
        rates = [epsilon_at(exploration, t) for t in range(0, 5000, 250)]
        assert rates == sorted(rates, reverse=True)

    def test_rejects_negative_step(self, exploration):
        with pytest.raises(InvalidArgumentError):
            epsilon_at(exploration, -1)

    def test_model_rejects_reversed_range(self):
        with pytest.raises(ValueError):
            ExplorationModel(eps_max=0.1, eps_min=0.5)
