"""
Training Service Module containing shielded training with grow / certify splitting:
grow rollouts feed the learner and the cumulative grow dataset, ConInv proposes a
tentative shield, fresh certification rollouts on an independent stream certify it,
and certified sets replace the shield.
"""

import dataclasses
from collections.abc import Callable

import numpy as np

from src.pcis.constants import CertificationPolicyKind, DatasetTag, RngStream
from src.pcis.core.exceptions import ContractViolationError, InvalidArgumentError
from src.pcis.core.logger import logger
from src.pcis.core.schema.config.config import ScheduleModel, ShieldModel
from src.pcis.core.schema.environment import EnvState
from src.pcis.core.schema.lattice import LatticeMask
from src.pcis.core.schema.shield import (
    IntervalRecord,
    ReturnCurvePoint,
    RunRecord,
    RunSummary,
    ShieldState,
    StepRecord,
)
from src.pcis.core.schema.transitions import Transition, TransitionBuffer, TransitionDataset
from src.pcis.services.environments.base_environment import Environment
from src.pcis.services.lattice_service import LatticeService
from src.pcis.services.learners.base_learner import ProposalLearner
from src.pcis.services.operator_service import PcisOperatorService
from src.pcis.services.rng_service import RngService
from src.pcis.services.shield.shield_service import ShieldService

RESET_ATTEMPTS = 100


class CertificationPolicy:
    """
    Fixed certification protocol: uniform over the stage-0 safe actions of the tentative
    set at the quantized state when that set is nonempty, uniform over U otherwise.
    """

    def __init__(
        self,
        kind: CertificationPolicyKind,
        action_count: int,
        tentative: LatticeMask | None = None,
        action_sets: np.ndarray | None = None,
    ):
        self.kind = kind
        self.action_count = action_count
        self.tentative = tentative
        self.action_sets = action_sets

    def __call__(self, state: np.ndarray, rng: np.random.Generator) -> int:
        tentative = self.kind == CertificationPolicyKind.TENTATIVE_SAFE_UNIFORM
        if tentative and self.tentative is not None:
            if LatticeService.membership(self.tentative, state):
                index = LatticeService.quantize(self.tentative.grid, state)
                safe = np.flatnonzero(self.action_sets[0, index])
                if safe.size:
                    return int(rng.choice(safe))
        return int(rng.integers(self.action_count))


class TrainingService:
    """
    Training Service running one seeded training run, shielded or as the unshielded baseline.
    """

    def __init__(
        self,
        operator_service: PcisOperatorService,
        safe_mask: LatticeMask,
        schedule: ScheduleModel,
        shield_config: ShieldModel,
        environment_factory: Callable[[np.random.Generator], Environment],
    ):
        """
        Constructor for the training service.
        :param operator_service: Operator on the experiment lattice.
        :param safe_mask: Lattice representation of the safe set X_S.
        :param schedule: Interval lengths and budgets.
        :param shield_config: Guard and certification protocol settings.
        :param environment_factory: Builds a fresh environment instance on a given stream.
        """
        self.operator_service = operator_service
        self.safe_mask = safe_mask
        self.schedule = schedule
        self.shield_config = shield_config
        self.environment_factory = environment_factory

    def run_shielded_training(
        self,
        learner: ProposalLearner,
        shield_seed: ShieldState | None,
        rng_service: RngService,
        shielded: bool = True,
    ) -> RunRecord:
        """
        Alternate T_grow shielded steps, ConInv on the cumulative grow data, T_cert fresh
        certification steps and a single certification evaluation, until the step or
        interval budget is spent (or the goal is reached with stop_on_goal).
        :param learner: Proposal learner, updated only with executed grow transitions.
        :param shield_seed: Nonempty initial shield, ignored when shielded is False.
        :param rng_service: Named streams of this run.
        :param shielded: False runs the unfiltered baseline.
        :return: The run record.
        """
        record = RunRecord(seed=rng_service.master_seed, shielded=shielded)
        if self.schedule.step_budget == 0 or self.schedule.interval_budget == 0:
            return record

        if shielded and (shield_seed is None or shield_seed.omega_hat.is_empty()):
            raise ContractViolationError("Shielded training needs a nonempty seed shield.")
        shield = dataclasses.replace(shield_seed) if shielded else None

        env = self.environment_factory(rng_service.stream(RngStream.ENVIRONMENT))
        explore_rng = rng_service.stream(RngStream.EXPLORATION)
        grow_buffer = TransitionBuffer(tag=DatasetTag.GROW, state_dimension=env.state_dimension)

        rollout = _Rollout(env, learner, shield, explore_rng, record)
        rollout.restart()

        cumulative_return, executed = 0.0, 0
        for interval in range(self.schedule.interval_budget):
            if executed >= self.schedule.step_budget:
                break
            steps = min(self.schedule.t_grow, self.schedule.step_budget - executed)
            stats = rollout.run(steps, grow_buffer, self.schedule.stop_on_goal)
            executed += stats.executed
            cumulative_return += stats.interval_return

            tentative_size, accepted = 0, False
            if shielded and not (stats.goal_reached and self.schedule.stop_on_goal):
                tentative_size, accepted, cert_unsafe = self._update_shield(
                    shield, grow_buffer.to_dataset(), rng_service, interval
                )
                stats.cert_unsafe_steps = cert_unsafe
                if accepted:
                    rollout.on_shield_update()

            record.intervals.append(
                IntervalRecord(
                    interval_index=interval,
                    interval_return=stats.interval_return,
                    cumulative_return=cumulative_return,
                    executed_steps=stats.executed,
                    unsafe_steps=stats.unsafe_steps,
                    cert_unsafe_steps=stats.cert_unsafe_steps,
                    goal_reached=stats.goal_reached,
                    omega_hat_size=shield.omega_hat.count if shielded else 0,
                    tentative_size=tentative_size,
                    accepted=accepted,
                )
            )
            if shielded:
                record.shield_snapshots.append(shield.omega_hat)
            logger.info(
                "[Training]: Seed %d interval %d: return %.1f, unsafe %d, |shield| %d%s.",
                record.seed,
                interval,
                stats.interval_return,
                stats.unsafe_steps,
                shield.omega_hat.count if shielded else 0,
                ", goal reached" if stats.goal_reached else "",
            )
            if stats.goal_reached and self.schedule.stop_on_goal:
                break

        record.learner_weights = learner.weights
        record.filter_anomalies = shield.anomaly_count if shielded else 0
        return record

    def collect_certification_data(
        self,
        env: Environment,
        policy: CertificationPolicy,
        t_cert: int,
        rng: np.random.Generator,
    ) -> TransitionDataset:
        """
        Collect T_cert transitions from fresh resets under a fixed certification policy.
        :param env: Environment instance used by nothing else.
        :param policy: The certification protocol.
        :param t_cert: Number of transitions.
        :param rng: Policy stream, disjoint from every grow stream.
        :return: Dataset tagged CERTIFICATION.
        """
        return self.collect_rollouts(env, policy, t_cert, rng, DatasetTag.CERTIFICATION)

    def collect_rollouts(
        self,
        env: Environment,
        policy: CertificationPolicy,
        count: int,
        rng: np.random.Generator,
        tag: DatasetTag,
    ) -> TransitionDataset:
        """
        Roll a fixed policy from fresh resets, episodes capped at cert_episode_length steps
        and ended by the goal or an unsafe exit.
        :return: count transitions carrying the given tag.
        """
        buffer = TransitionBuffer(tag=tag, state_dimension=env.state_dimension)
        while len(buffer) < count:
            state = env.reset()
            for _ in range(self.schedule.cert_episode_length):
                if len(buffer) >= count:
                    break
                action = policy(state.observation, rng)
                result = env.step(action)
                buffer.append(
                    Transition(
                        state=state.observation,
                        action=action,
                        reward=result.reward,
                        next_state=result.observation,
                        terminal=result.terminal or result.unsafe_exit,
                        tag=tag,
                    )
                )
                if result.terminal or result.unsafe_exit:
                    break
                state = result
        return buffer.to_dataset()

    @staticmethod
    def summarize_runs(records: list[RunRecord]) -> RunSummary:
        """
        Aggregate the runs of one arm: fully-safe and goal-reaching rates and the
        across-seed mean and sd of every interval return.
        :param records: Runs of the same arm, at least one.
        :return: The arm summary.
        """
        if not records:
            raise InvalidArgumentError("Cannot summarize an empty list of runs.")
        shielded = {record.shielded for record in records}
        if len(shielded) != 1:
            raise InvalidArgumentError("Shielded and unshielded runs are summarized separately.")

        curve = []
        longest = max(len(record.intervals) for record in records)
        for index in range(longest):
            rows = [r.intervals[index] for r in records if len(r.intervals) > index]
            returns = np.array([row.interval_return for row in rows])
            curve.append(
                ReturnCurvePoint(
                    interval_index=index,
                    runs=len(rows),
                    mean_return=float(returns.mean()),
                    sd_return=float(returns.std(ddof=1)) if len(rows) > 1 else 0.0,
                    mean_omega_hat_size=float(np.mean([row.omega_hat_size for row in rows])),
                )
            )

        count = len(records)
        return RunSummary(
            shielded=shielded.pop(),
            seeds=tuple(record.seed for record in records),
            fully_safe_rate=sum(record.fully_safe for record in records) / count,
            goal_rate=sum(record.goal_reached for record in records) / count,
            total_unsafe_steps=sum(record.unsafe_steps for record in records),
            total_cert_unsafe_steps=sum(
                row.cert_unsafe_steps for record in records for row in record.intervals
            ),
            total_filter_anomalies=sum(record.filter_anomalies for record in records),
            curve=curve,
        )

    def _update_shield(
        self,
        shield: ShieldState,
        grow_data: TransitionDataset,
        rng_service: RngService,
        interval: int,
    ) -> tuple[int, bool, int]:
        omega_tent, grow_result = self.operator_service.con_inv(grow_data, self.safe_mask)

        policy = CertificationPolicy(
            kind=self.shield_config.certification_policy,
            action_count=grow_result.action_count,
            tentative=omega_tent,
            action_sets=grow_result.action_sets,
        )
        cert_env = self.environment_factory(rng_service.stream(RngStream.CERTIFICATION, interval))
        cert_data = self.collect_certification_data(
            cert_env,
            policy,
            self.schedule.t_cert,
            rng_service.stream(RngStream.CERTIFICATION_POLICY, interval),
        )
        cert_unsafe = 0
        if len(cert_data):
            inside = LatticeService.membership(self.safe_mask, cert_data.next_states)
            cert_unsafe = int(np.count_nonzero(~inside))

        outcome = self.operator_service.certify_shield(cert_data, omega_tent)
        accepted = ShieldService.accept(shield, outcome, self.shield_config.monotone_guard)
        return omega_tent.count, accepted, cert_unsafe


class _IntervalStats:
    def __init__(self):
        self.executed = 0
        self.interval_return = 0.0
        self.unsafe_steps = 0
        self.cert_unsafe_steps = 0
        self.goal_reached = False


class _Rollout:
    """
    Grow-phase rollout state carried across intervals: the current state, the executed
    action chosen for it and whether the filter is active in this episode.
    """

    def __init__(
        self,
        env: Environment,
        learner: ProposalLearner,
        shield: ShieldState | None,
        rng: np.random.Generator,
        record: RunRecord,
    ):
        self.env = env
        self.learner = learner
        self.shield = shield
        self.rng = rng
        self.record = record
        self.steps = 0
        self.filter_active = shield is not None
        self.state: EnvState | None = None
        self.action = 0
        self.proposal = 0

    def restart(self) -> None:
        """
        Reset into the shield. After RESET_ATTEMPTS draws outside omega_hat the episode
        runs unfiltered.
        """
        self.learner.start_episode()
        self.state = self.env.reset()
        if self.shield is not None:
            ShieldService.reset_stage(self.shield)
            attempts = 1
            while not ShieldService.in_shield(self.shield, self.state.observation):
                if attempts >= RESET_ATTEMPTS:
                    logger.warning(
                        "[Training]: No reset inside the shield after %d attempts, "
                        "running this episode unfiltered.",
                        attempts,
                    )
                    break
                self.state = self.env.reset()
                attempts += 1
            self.filter_active = ShieldService.in_shield(self.shield, self.state.observation)
        self.proposal, self.action = self._choose(self.state.observation)

    def on_shield_update(self) -> None:
        """
        A new shield is in place: restart the stage cycle and filter the pending proposal
        against it. A current state outside the new shield ends the episode.
        """
        observation = self.state.observation
        if not ShieldService.in_shield(self.shield, observation):
            logger.debug("[Training]: State left behind by the shield update, resetting.")
            self.restart()
            return

        ShieldService.reset_stage(self.shield)
        self.filter_active = True
        self.action, _ = ShieldService.shield_filter(
            self.shield, observation, self.proposal, self.learner.value_estimates(observation)
        )

    def run(self, steps: int, grow_buffer: TransitionBuffer, stop_on_goal: bool) -> _IntervalStats:
        stats = _IntervalStats()
        for _ in range(steps):
            observation = self.state.observation
            result = self.env.step(self.action)
            self.steps += 1
            stats.executed += 1
            stats.interval_return += result.reward
            stats.unsafe_steps += int(result.unsafe_exit)
            stats.goal_reached |= result.terminal

            in_omega = self.shield is not None and ShieldService.in_shield(self.shield, observation)
            self.record.trajectory.append(
                StepRecord(
                    step=self.steps,
                    observation=tuple(float(v) for v in observation),
                    action_proposed=self.proposal,
                    action_executed=self.action,
                    reward=result.reward,
                    in_omega=in_omega,
                    unsafe_exit=result.unsafe_exit,
                )
            )

            episode_over = result.terminal or result.unsafe_exit
            transition = Transition(
                state=observation,
                action=self.action,
                reward=result.reward,
                next_state=result.observation,
                terminal=episode_over,
                tag=DatasetTag.GROW,
            )
            grow_buffer.append(transition)
            if self.shield is not None:
                ShieldService.advance_stage(self.shield)

            leaving_shield = (
                not episode_over
                and self.shield is not None
                and self.filter_active
                and not ShieldService.in_shield(self.shield, result.observation)
            )
            if episode_over:
                self.learner.update(transition)
                if result.terminal and stop_on_goal:
                    break
                self.restart()
            elif leaving_shield:
                bootstrap = self.learner.propose_action(result.observation, self.rng, self.steps)
                self.learner.update(transition, bootstrap)
                self.restart()
            else:
                next_proposal, next_action = self._choose(result.observation)
                self.learner.update(transition, next_action)
                self.state = result
                self.proposal, self.action = next_proposal, next_action
        return stats

    def _choose(self, observation: np.ndarray) -> tuple[int, int]:
        proposal = self.learner.propose_action(observation, self.rng, self.steps)
        if self.shield is None or not self.filter_active:
            return proposal, proposal
        action, _ = ShieldService.shield_filter(
            self.shield, observation, proposal, self.learner.value_estimates(observation)
        )
        return proposal, action
