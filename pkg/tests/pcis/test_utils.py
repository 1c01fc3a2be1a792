"""
PCIS Utils Unit Tests.
"""

import math

import pytest
from pydantic import ValidationError

from src.pcis.core.schema.config.config import ExplorationModel, ScheduleModel
from src.pcis.utils import (
    binomial_sigma,
    config_hash,
    coverage_threshold,
    format_float,
    format_validation_errors,
)


class TestFormatValidationErrors:
    def test_messages_carry_the_field_location(self):
        """
        Test that every pydantic error is reported as 'location: message'.
        """
        with pytest.raises(ValidationError) as exc_info:
            ScheduleModel(t_grow=0, t_cert=-1)
        detail = format_validation_errors(exc_info.value)["detail"]
        assert "t_grow:" in detail and "t_cert:" in detail
        assert detail.count(";") == 1


class TestConfigHash:
    def test_hash_is_stable_and_sensitive(self):
        first = config_hash(ExplorationModel())
        assert first == config_hash(ExplorationModel())
        assert len(first) == 64
        assert first != config_hash(ExplorationModel(eps_max=0.4))


class TestNumbers:
    @pytest.mark.parametrize("value", [0.1, 1 / 3, 2.1 / 199, 1e-300, -0.0])
    def test_format_float_parses_back_exactly(self, value):
        assert float(format_float(value)) == value

    def test_binomial_sigma(self):
        assert binomial_sigma(0.9, 300) == pytest.approx(math.sqrt(0.09 / 300))
        assert binomial_sigma(0.9, 0) == math.inf

    def test_coverage_threshold(self):
        """
        Test the 3-sigma acceptance threshold at eta = 0.9 over 300 trials.
        """
        assert coverage_threshold(0.9, 300) == pytest.approx(0.8480, abs=1e-4)
        assert coverage_threshold(0.9, 0) == -math.inf
