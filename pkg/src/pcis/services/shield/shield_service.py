"""
Shield Service Module containing the runtime action filter, receding-horizon stage
management, seed shields and the monotone shield update.
"""

import numpy as np

from src.pcis.constants import SeedActionRule, SeedShieldKind
from src.pcis.core.exceptions import ConfigurationError, InvalidArgumentError
from src.pcis.core.logger import logger
from src.pcis.core.schema.config.config import SeedShieldModel
from src.pcis.core.schema.lattice import LatticeGrid, LatticeMask
from src.pcis.core.schema.operator import CertificationOutcome
from src.pcis.core.schema.shield import ShieldState
from src.pcis.services.lattice_service import LatticeService


class ShieldService:
    """
    Shield Service used to filter learner proposals against the accepted shield.
    """

    @staticmethod
    def in_shield(shield: ShieldState, state: np.ndarray) -> bool:
        """
        True if the continuous state belongs to omega_hat (box and quantized membership).
        """
        return bool(LatticeService.membership(shield.omega_hat, np.asarray(state, dtype=float)))

    @staticmethod
    def shield_filter(
        shield: ShieldState, state: np.ndarray, proposal: int, value_estimates: np.ndarray
    ) -> tuple[int, bool]:
        """
        Pass the proposal through when it is safe at the current stage, otherwise substitute
        the safe action with the highest value estimate (ties to the lowest index).
        :param shield: Accepted shield, the caller has checked state is inside omega_hat.
        :param state: Current state.
        :param proposal: Learner proposal.
        :param value_estimates: (|U|,) learner action values.
        :return: (executed action, intervened).
        """
        action_count = shield.action_sets.shape[2]
        if not 0 <= proposal < action_count:
            raise InvalidArgumentError(f"Proposal {proposal} outside [0, {action_count}).")

        index = LatticeService.quantize(shield.omega_hat.grid, np.asarray(state, dtype=float))
        safe = shield.action_sets[shield.stage_pointer, index]
        if safe[proposal]:
            return proposal, False

        if not safe.any():
            shield.anomaly_count += 1
            fallback = int(shield.continuation[shield.stage_pointer, index])
            logger.warning(
                "[Shield]: Empty safe-action set at lattice point %d, stage %d. "
                "Using continuation action %d.",
                index,
                shield.stage_pointer,
                fallback,
            )
            return fallback, True

        masked = np.where(safe, np.asarray(value_estimates, dtype=float), -np.inf)
        return int(np.argmax(masked)), True

    @staticmethod
    def advance_stage(shield: ShieldState) -> ShieldState:
        """
        Move the stage pointer after an executed step, cycling modulo N.
        """
        shield.stage_pointer = (shield.stage_pointer + 1) % shield.horizon
        return shield

    @staticmethod
    def reset_stage(shield: ShieldState) -> ShieldState:
        shield.stage_pointer = 0
        return shield

    @staticmethod
    def accept(
        shield: ShieldState, outcome: CertificationOutcome, monotone_guard: bool = True
    ) -> bool:
        """
        Replace the shield by a certified tentative set and its certification action maps.
        Empty tentative sets are never deployed; with the monotone guard the new set must
        contain the current one.
        :param shield: Current shield, updated in place on acceptance.
        :param outcome: Certification verdict.
        :param monotone_guard: Require omega_hat to be contained in the tentative set.
        :return: True if the shield was replaced.
        """
        if not outcome.accepted or outcome.omega_tent.is_empty():
            return False
        if monotone_guard and not shield.omega_hat.is_subset_of(outcome.omega_tent):
            logger.info(
                "[Shield]: Certified set of %d points does not contain the current shield, kept.",
                outcome.omega_tent.count,
            )
            return False

        shield.omega_hat = outcome.omega_tent
        shield.action_sets = outcome.result.action_sets
        shield.continuation = outcome.result.continuation
        shield.stage_pointer = 0
        shield.update_index += 1
        logger.info(
            "[Shield]: Accepted update %d with %d points.",
            shield.update_index,
            shield.omega_hat.count,
        )
        return True

    @staticmethod
    def seed_shield(
        grid: LatticeGrid,
        seed: SeedShieldModel,
        safe_mask: LatticeMask,
        action_count: int,
        horizon: int,
    ) -> ShieldState:
        """
        Build the initial shield from configuration.

        box: lattice points inside the configured box; full_lattice: the whole safe lattice.
        stop_preserving: on every point only the actions that push against the velocity
        (last coordinate) are allowed, every action at rest; all: every action.
        :raises ConfigurationError: If the seed set is empty or the rule does not fit the state.
        """
        if seed.kind == SeedShieldKind.BOX:
            omega = LatticeService.box_mask(grid, seed.lower, seed.upper).intersection(safe_mask)
        else:
            omega = safe_mask
        if omega.is_empty():
            raise ConfigurationError("The seed shield set is empty.")

        allowed = np.ones((grid.size, action_count), dtype=bool)
        if seed.action_rule == SeedActionRule.STOP_PRESERVING:
            if grid.dimension < 2 or action_count != 3:
                raise ConfigurationError(
                    "stop_preserving seeds need a velocity coordinate and three actions."
                )
            velocity = grid.points[:, -1]
            allowed[velocity > 0.0] = [True, False, False]
            allowed[velocity < 0.0] = [False, False, True]
        allowed &= omega.bits[:, None]

        action_sets = np.repeat(allowed[None, :, :], horizon, axis=0)
        continuation = np.repeat(np.argmax(allowed, axis=1)[None, :], horizon, axis=0)
        logger.info("[Shield]: Seed shield with %d lattice points.", omega.count)
        return ShieldState(
            omega_hat=omega,
            action_sets=action_sets,
            continuation=continuation,
            horizon=horizon,
        )
