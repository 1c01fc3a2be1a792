"""
MountainCar Service Unit Tests.
"""

import math

import numpy as np
import pytest

from src.pcis.core.exceptions import InvalidArgumentError
from src.pcis.core.schema.environment import MountainCarConfig
from src.pcis.services.environments.mountain_car_service import MountainCarEnv, mc_reset, mc_step


class TestMountainCarDynamics:
    def test_step_matches_closed_form(self, mc_config):
        """
        Test one push-right step from (-0.5, 0) against the unclipped update.
        :param mc_config: MountainCar configuration fixture.
        """
        result = mc_step(np.array([-0.5, 0.0]), 2, mc_config)
        velocity = 0.001 - 0.0025 * math.cos(-1.5)
        assert result.observation[1] == pytest.approx(velocity, abs=1e-12)
        assert result.observation[0] == pytest.approx(-0.5 + velocity, abs=1e-12)
        assert result.reward == -1.0
        assert not result.terminal and not result.unsafe_exit

    def test_no_velocity_clipping(self, mc_config):
        """
        Test that velocities beyond 0.07 are kept and reported as unsafe exits.
        """
        result = mc_step(np.array([-0.6, 0.0699]), 2, mc_config)
        assert result.observation[1] > 0.07
        assert result.unsafe_exit

    def test_no_position_clipping_or_reset_at_left_edge(self, mc_config):
        result = mc_step(np.array([-1.499, -0.01]), 0, mc_config)
        assert result.observation[0] < -1.5
        assert result.unsafe_exit and not result.terminal

    def test_goal_is_terminal_with_zero_reward(self, mc_config):
        result = mc_step(np.array([0.49, 0.02]), 2, mc_config)
        assert result.observation[0] >= 0.5
        assert result.terminal
        assert result.reward == 0.0

    def test_goal_needs_minimum_velocity(self):
        config = MountainCarConfig(goal_min_velocity=0.05)
        assert not mc_step(np.array([0.49, 0.02]), 2, config).terminal

    def test_rejects_invalid_action(self, mc_config):
        with pytest.raises(InvalidArgumentError):
            mc_step(np.array([0.0, 0.0]), 3, mc_config)

    def test_reset_draws_from_initial_region(self, mc_config, rng):
        """
        Test that 10^4 resets land in [-0.6, -0.4] at rest with a mean position within
        0.01 of -0.5.
        """
        positions = []
        for _ in range(10_000):
            observation = mc_reset(rng, mc_config).observation
            assert -0.6 <= observation[0] <= -0.4
            assert observation[1] == 0.0
            positions.append(observation[0])
        assert abs(np.mean(positions) + 0.5) <= 0.01

    def test_no_push_at_zero_gravity_point_keeps_velocity(self, mc_config):
        """
        Test that at x = pi / 6, where cos(3x) = 0, the no-push action leaves v unchanged.
        """
        result = mc_step(np.array([math.pi / 6, 0.01]), 1, mc_config)
        assert result.observation[1] == pytest.approx(0.01, abs=1e-15)
        assert result.observation[0] == pytest.approx(math.pi / 6 + 0.01, abs=1e-15)

    def test_no_push_equilibrium_at_rest(self, mc_config):
        """
        Test that (pi / 6, 0) under the no-push action is an equilibrium. The point is a hilltop,
        so the check runs over 100 steps, before rounding noise can grow.
        """
        state = np.array([math.pi / 6, 0.0])
        for _ in range(100):
            result = mc_step(state, 1, mc_config)
            state = result.observation
            assert not result.unsafe_exit
        assert state[0] == pytest.approx(math.pi / 6, abs=1e-12)
        assert state[1] == pytest.approx(0.0, abs=1e-12)


class TestMountainCarEnv:
    def test_step_before_reset_is_rejected(self, mc_config, rng):
        with pytest.raises(InvalidArgumentError):
            MountainCarEnv(mc_config, rng).step(1)

    def test_environment_tracks_state(self, mc_config):
        """
        Test that two instances on equal streams produce identical trajectories.
        """
        first = MountainCarEnv(mc_config, np.random.default_rng(0))
        second = MountainCarEnv(mc_config, np.random.default_rng(0))
        np.testing.assert_array_equal(first.reset().observation, second.reset().observation)
        for action in (0, 1, 2, 2, 0):
            np.testing.assert_array_equal(
                first.step(action).observation, second.step(action).observation
            )
        np.testing.assert_array_equal(first.state, second.state)

    def test_config_rejects_initial_region_outside_box(self):
        with pytest.raises(ValueError):
            MountainCarConfig(init_position_range=(-2.0, -0.4))
        with pytest.raises(ValueError):
            MountainCarConfig(init_position_range=(-0.4, -0.6))
