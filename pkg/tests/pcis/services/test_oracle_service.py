"""
Oracle Service Unit Tests.
"""

import numpy as np
import pytest

from src.pcis.constants import DatasetTag
from src.pcis.core.exceptions import InvalidArgumentError
from src.pcis.core.schema.config.config import FiniteMdpSpecModel
from src.pcis.core.schema.mdp import FiniteMdpModel
from src.pcis.services.lattice_service import LatticeService
from src.pcis.services.oracle_service import OracleService
from tests.utils import chain_model, closed_model


class TestExactDp:
    def test_chain_probability(self):
        """
        Test p_0 = 0.81 for a 0.9 self-loop chain over two steps.
        """
        model = chain_model(0.9)
        values = OracleService.exact_dp(model, model.safe_states, 2)
        np.testing.assert_allclose(values, [0.81, 0.81])

    def test_fixture_probabilities(self, fixture_model):
        """
        Test the exact two-step probabilities of the 4-state fixture.
        :param fixture_model: 4-state fixture model.
        """
        values = OracleService.exact_dp(fixture_model, fixture_model.safe_states, 2)
        np.testing.assert_allclose(values, [1.0, 0.9801, 0.49, 0.0], atol=1e-12)

    def test_table_starts_from_indicator(self, fixture_model):
        omega = np.array([True, True, False, False])
        table = OracleService.exact_dp_table(fixture_model, omega, 3)
        assert table.shape == (4, 4)
        np.testing.assert_array_equal(table[3], omega.astype(float))
        assert np.all(table[:, ~omega] == 0.0)

    def test_values_decrease_with_horizon(self, fixture_model):
        short = OracleService.exact_dp(fixture_model, fixture_model.safe_states, 1)
        long = OracleService.exact_dp(fixture_model, fixture_model.safe_states, 4)
        assert np.all(long <= short + 1e-12)

    def test_rejects_bad_subsets(self, fixture_model):
        with pytest.raises(InvalidArgumentError):
            OracleService.exact_dp(fixture_model, np.ones(3, dtype=bool), 2)
        with pytest.raises(InvalidArgumentError):
            OracleService.exact_dp(fixture_model, fixture_model.safe_states, 0)

    def test_rejects_omega_outside_safe_states(self):
        model = chain_model(0.9, state_count=3)
        restricted = FiniteMdpModel(kernel=model.kernel, safe_states=np.array([True, True, False]))
        with pytest.raises(InvalidArgumentError, match="subset of the safe states"):
            OracleService.exact_dp(restricted, np.ones(3, dtype=bool), 1)


class TestExactOperator:
    def test_fixture_exact_operator(self, fixture_model):
        exact = OracleService.exact_q_operator(fixture_model, fixture_model.safe_states, 2, 0.2)
        np.testing.assert_array_equal(exact, [True, True, False, False])

    def test_maximal_pcis_of_fixture(self, fixture_model):
        maximal = OracleService.maximal_pcis(fixture_model, 2, 0.2)
        np.testing.assert_array_equal(maximal, [True, True, False, False])

    def test_maximal_pcis_of_closed_model_is_everything(self):
        assert OracleService.maximal_pcis(closed_model(), 3, 0.01).all()

    def test_maximal_pcis_can_be_empty(self):
        assert not OracleService.maximal_pcis(chain_model(0.5), 2, 0.1).any()

    def test_maximal_pcis_is_fixed_point_on_random_models(self):
        """
        Test on 50 random models that the maximal PCIS is a fixed point of the exact
        operator and that applying the search again changes nothing.
        """
        rng = np.random.default_rng(42)
        for trial in range(50):
            spec = FiniteMdpSpecModel(
                state_count=int(rng.integers(2, 7)), action_count=int(rng.integers(1, 4))
            )
            model = OracleService.random_model(spec, rng)
            horizon = 1 + trial % 3
            maximal = OracleService.maximal_pcis(model, horizon, 0.2)

            image = OracleService.exact_q_operator(model, maximal, horizon, 0.2)
            np.testing.assert_array_equal(image, maximal)
            full_image = OracleService.exact_q_operator(model, model.safe_states, horizon, 0.2)
            assert np.all(maximal <= full_image)


class TestSampling:
    def test_random_model_is_stochastic_and_seeded(self):
        """
        Test that random models have probability rows and depend only on the stream.
        """
        spec = FiniteMdpSpecModel(state_count=5, action_count=3)
        first = OracleService.random_model(spec, np.random.default_rng(8))
        second = OracleService.random_model(spec, np.random.default_rng(8))

        assert first.kernel.shape == (5, 3, 6)
        np.testing.assert_allclose(first.kernel.sum(axis=2), 1.0, atol=1e-12)
        np.testing.assert_array_equal(first.kernel, second.kernel)
        assert first.safe_states.all()

    def test_sample_transitions_follow_kernel(self, fixture_model, rng):
        """
        Test that one-step samples reproduce the kernel frequencies and use the sink coordinate.
        :param fixture_model: 4-state fixture model.
        :param rng: Random stream fixture.
        """
        data = OracleService.sample_transitions(fixture_model, 40_000, rng, DatasetTag.GROW)
        assert len(data) == 40_000 and data.tag == DatasetTag.GROW

        states, actions = data.states[:, 0].astype(int), data.actions
        successors = data.next_states[:, 0].astype(int)
        picked = (states == 2) & (actions == 0)
        assert np.mean(successors[picked] == 2) == pytest.approx(0.7, abs=0.03)
        assert np.all(successors[states == 3] == fixture_model.sink_index)

    def test_sample_transitions_is_reproducible(self, fixture_model):
        first = OracleService.sample_transitions(fixture_model, 100, np.random.default_rng(5))
        second = OracleService.sample_transitions(fixture_model, 100, np.random.default_rng(5))
        np.testing.assert_array_equal(first.next_states, second.next_states)

    def test_sample_no_transitions(self, fixture_model, rng):
        data = OracleService.sample_transitions(fixture_model, 0, rng, DatasetTag.CERTIFICATION)
        assert len(data) == 0 and data.tag == DatasetTag.CERTIFICATION
        with pytest.raises(InvalidArgumentError):
            OracleService.sample_transitions(fixture_model, -1, rng)

    def test_to_lattice_mask(self, fixture_model):
        grid = LatticeService.tabular_grid(fixture_model.state_count)
        mask = OracleService.to_lattice_mask(grid, np.array([True, False, True, False]))
        assert list(mask.indices) == [0, 2]
