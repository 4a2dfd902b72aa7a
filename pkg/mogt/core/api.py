# -*- coding: utf-8 -*-
#
# Copyright (C) 2021 MOGT Developers
#
# This program is free software; you can redistribute it and/or modify
# it under the terms of the GNU General Public License as published by
# the Free Software Foundation; either version 3 of the License, or
# (at your option) any later version.
#
# This program is distributed in the hope that it will be useful,
# but WITHOUT ANY WARRANTY; without even the implied warranty of
# MERCHANTABILITY or FITNESS FOR A PARTICULAR PURPOSE. See the
# GNU General Public License for more details.
#
# You should have received a copy of the GNU General Public License
# along with this program. If not, see <http://www.gnu.org/licenses/>.
#

import dataclasses
import logging
import typing

from . import settings
from .errors import InvalidValueError, NotFoundError, UnreachableGoalError
from .grasps import (compute_ppg,
                     compute_ppg_table,
                     generate_pregrasp_grid,
                     select_bepg as select_bepg_data,
                     select_cppg as select_cppg_data,
                     select_end_grasp as select_end_grasp_data)
from .hand import select_mcpg as select_mcpg_data
from .log import RunLog
from .mdp import build_transfer_mdp
from .models import Operation, OutcomeDistribution, PreGrasp
from .reader import read_trials
from .sensors import Estimator
from .simulator import (AggregateReport,
                        EpisodeExpectation,
                        Routine,
                        effective_actions,
                        exact_episode_expectation,
                        monte_carlo,
                        naive,
                        plan_policy,
                        single_object_environment,
                        single_object_policy)


logger = logging.getLogger(__name__)


SINGLE = 'single'
NAIVE = 'naive'
MDP = 'mdp'
POLICY_FILE = 'file'
IDEAL_ROUTINE = 'ideal'

POLICIES = (SINGLE, NAIVE, MDP, POLICY_FILE)


@dataclasses.dataclass(frozen=True)
class McpgSelection:
    pregrasp: PreGrasp
    volume: float
    candidates: int
    distribution: typing.Optional[OutcomeDistribution] = None


@dataclasses.dataclass(frozen=True)
class SimulationResult:
    """Monte Carlo report of a policy plus its exact expectation.

    `expectation` is `None` when the target cannot be reached under
    the policy.
    """
    policy: str
    routine: str
    target_n: int
    report: AggregateReport
    expectation: typing.Optional[EpisodeExpectation]


@dataclasses.dataclass(frozen=True)
class ComparisonRow:
    approach: str
    routine: str
    mean_transfers: float
    mean_lifts: float
    stderr_transfers: float
    stderr_lifts: float
    reduction_vs_single_pct: float
    lift_reduction_vs_single_pct: float
    success_rate: float
    failures: int


@dataclasses.dataclass(frozen=True)
class ComparisonReport:
    target_n: int
    episodes: int
    seed: int
    rows: typing.Tuple[ComparisonRow, ...]

    def row(self, approach, routine):
        for row in self.rows:
            if row.approach == approach and row.routine == routine:
                return row
        raise NotFoundError(entity='Row {} {}'.format(approach, routine))


def ppg_table(ctx, trials_path):
    """PPG and AGP of every pre-grasp of a trial log.

    :param ctx: context from where this method is called
    :param trials_path: path to the trial log

    :returns: list of `(pregrasp, ppg, agp)` tuples sorted by id
    """
    runlog = RunLog.open('ppg_table', ctx)

    trialset = read_trials(trials_path)
    try:
        table = compute_ppg_table(trialset)
    except ValueError as e:
        raise InvalidValueError(msg=str(e))

    runlog.log_operation(Operation.OpType.EVALUATE, 'ppg', {'trials': trials_path}, target=str(trials_path))
    runlog.close()

    return table


def select_cppg(ctx, trials_path, targets, evaluation_path=None,
                keep_fraction=settings.FILTER_KEEP_FRACTION, max_k=settings.ELBOW_MAX_K):
    """Select one clustered-probability-based pre-grasp per target quantity.

    :param ctx: context from where this method is called; its seed
        drives the clustering
    :param trials_path: path to the grid trial log
    :param targets: list of target quantities
    :param evaluation_path: optional trial log to evaluate the centroids

    :returns: list of `Selection`, in the order of `targets`

    :raises InvalidValueError: when an argument is not valid
    :raises EmptySelectionError: when no pre-grasp survives the filter
    """
    if not targets:
        raise InvalidValueError(msg="'targets' cannot be empty")
    seed = _seed(ctx, command='cppg')

    runlog = RunLog.open('select_cppg', ctx)

    trialset = read_trials(trials_path)
    evaluation = read_trials(evaluation_path) if evaluation_path else None

    selections = []
    for target_q in targets:
        try:
            selection = select_cppg_data(trialset, target_q, seed=seed, evaluation=evaluation,
                                         keep_fraction=keep_fraction, max_k=max_k)
        except (TypeError, ValueError) as e:
            raise InvalidValueError(msg=str(e))
        runlog.log_operation(Operation.OpType.SELECT, 'cppg',
                             {'trials': trials_path, 'target': target_q, 'seed': seed},
                             target=str(selection.pregrasp.id))
        selections.append(selection)

    runlog.close()

    return selections


def select_bepg(ctx, trials_path, evaluation_path=None,
                keep_fraction=settings.FILTER_KEEP_FRACTION, max_k=settings.ELBOW_MAX_K):
    """Select the best expectation pre-grasp of a trial log.

    :raises InvalidValueError: when an argument is not valid
    :raises EmptySelectionError: when no pre-grasp survives the filter
    """
    seed = _seed(ctx, command='bepg')
    runlog = RunLog.open('select_bepg', ctx)

    trialset = read_trials(trials_path)
    evaluation = read_trials(evaluation_path) if evaluation_path else None

    try:
        selection = select_bepg_data(trialset, seed=seed, evaluation=evaluation,
                                     keep_fraction=keep_fraction, max_k=max_k)
    except (TypeError, ValueError) as e:
        raise InvalidValueError(msg=str(e))

    runlog.log_operation(Operation.OpType.SELECT, 'bepg',
                         {'trials': trials_path, 'seed': seed},
                         target=str(selection.pregrasp.id))
    runlog.close()

    return selection


def select_mcpg(ctx, trials_path=None, spread_step=settings.SPREAD_STEP, finger_step=settings.FINGER_STEP):
    """Select the maximum capability pre-grasp.

    Candidates are the pre-grasps tested in `trials_path` or, when no
    trial log is given, the whole pre-grasp grid.
    """
    runlog = RunLog.open('select_mcpg', ctx)

    try:
        if trials_path:
            trialset = read_trials(trials_path)
            candidates = trialset.tested_pregrasps()
        else:
            trialset = None
            candidates = generate_pregrasp_grid(spread_step, finger_step)
        pregrasp, volume = select_mcpg_data(candidates)
    except (TypeError, ValueError) as e:
        raise InvalidValueError(msg=str(e))

    distribution = None
    if trialset is not None:
        distribution = compute_ppg(trialset.trials_for(pregrasp.id), trialset.m_max)

    runlog.log_operation(Operation.OpType.SELECT, 'mcpg',
                         {'trials': trials_path, 'spread_step': spread_step, 'finger_step': finger_step},
                         target=str(pregrasp.id))
    runlog.close()

    return McpgSelection(pregrasp, volume, len(candidates), distribution)


def select_end_grasp(ctx, trials_path, pregrasp_id, target_q, steps=settings.SYNERGY_STEPS):
    """Select the end-grasp and flexion synergy of a pre-grasp.

    :raises InvalidValueError: when the context has no seed
    :raises NotFoundError: when the pre-grasp is unknown or none of its
        trials held `target_q` objects
    """
    seed = _seed(ctx, command='endgrasp')
    runlog = RunLog.open('select_end_grasp', ctx)

    trialset = read_trials(trials_path)
    try:
        synergy = select_end_grasp_data(trialset, pregrasp_id, target_q, seed=seed, steps=steps)
    except (TypeError, ValueError) as e:
        raise InvalidValueError(msg=str(e))

    runlog.log_operation(Operation.OpType.SELECT, 'end-grasp',
                         {'trials': trials_path, 'pregrasp_id': pregrasp_id, 'target': target_q},
                         target=str(pregrasp_id))
    runlog.close()

    return synergy


def solve(ctx, config):
    """Compute the optimal transfer policy of an experiment.

    The MDP is built on the lift distributions of the configured routine
    and solved by value iteration.

    :returns: tuple with the `TransferMdp` and its `Solution`

    :raises NotConvergedError: when value iteration does not converge
    :raises DivergenceError: when the undiscounted problem may diverge
    """
    runlog = RunLog.open('solve', ctx)

    env = config.environment()
    try:
        mdp = build_transfer_mdp(config.target_n, effective_actions(env), config.reward_params,
                                 mode=config.overshoot_mode)
    except (TypeError, ValueError) as e:
        raise InvalidValueError(msg=str(e))
    runlog.log_operation(Operation.OpType.BUILD, 'mdp',
                         {'target': config.target_n, 'mode': str(config.overshoot_mode),
                          'routine': str(env.routine)},
                         target=config.source)

    solution = plan_policy(config.target_n, env, params=config.reward_params,
                           discount=config.discount, epsilon=config.epsilon,
                           max_iterations=config.max_iterations, mode=config.overshoot_mode)
    runlog.log_operation(Operation.OpType.SOLVE, 'policy',
                         {'discount': config.discount, 'iterations': solution.iterations},
                         target=config.source)
    runlog.close()

    return mdp, solution


def simulate(ctx, config, policy=MDP, policy_map=None, routine=None):
    """Evaluate a policy by Monte Carlo and by its exact expectation.

    :param ctx: context from where this method is called; its seed, when
        set, overrides the seed of the config
    :param config: `ExperimentConfig`
    :param policy: one of `single`, `naive`, `mdp` or `file`
    :param policy_map: `Policy` to evaluate when `policy` is `file`
    :param routine: routine to simulate; defaults to the config's

    :returns: a `SimulationResult`
    """
    if policy not in POLICIES:
        raise InvalidValueError(msg="'policy' must be one of {}; {} given".format(', '.join(POLICIES), policy))
    if policy == POLICY_FILE and policy_map is None:
        raise InvalidValueError(msg="a policy file is required by the 'file' policy")
    config.require_stochastic(seed=ctx.seed)

    runlog = RunLog.open('simulate', ctx)
    result = _simulate(runlog, config, policy, policy_map, _seed(ctx, config), routine)
    runlog.close()

    return result


def compare(ctx, config):
    """Compare the single-object, naive and MDP approaches.

    The naive and MDP approaches run under both routines; the
    single-object baseline runs once in its idealized environment.

    :returns: a `ComparisonReport`
    """
    config.require_stochastic(seed=ctx.seed)
    seed = _seed(ctx, config)

    runlog = RunLog.open('compare', ctx)

    runs = [_simulate(runlog, config, SINGLE, None, seed, None)]
    for approach in (NAIVE, MDP):
        for routine in Routine:
            runs.append(_simulate(runlog, config, approach, None, seed, routine))

    n = config.target_n
    rows = []
    for run in runs:
        report = run.report
        rows.append(ComparisonRow(approach='mdp-mogt' if run.policy == MDP else run.policy,
                                  routine=run.routine,
                                  mean_transfers=report.mean_transfers,
                                  mean_lifts=report.mean_lifts,
                                  stderr_transfers=report.std_errors['transfers'],
                                  stderr_lifts=report.std_errors['lifts'],
                                  reduction_vs_single_pct=reduction_pct(n, report.mean_transfers),
                                  lift_reduction_vs_single_pct=reduction_pct(n, report.mean_lifts),
                                  success_rate=report.success_rate,
                                  failures=report.failures))

    runlog.log_operation(Operation.OpType.COMPARE, 'report', {'target': n, 'seed': seed}, target=config.source)
    runlog.close()

    return ComparisonReport(target_n=n, episodes=config.episodes, seed=seed, rows=tuple(rows))


def reduction_pct(target_n, mean):
    """Reduction of `mean` with respect to the `target_n` single-object steps"""

    return 100.0 * (target_n - mean) / target_n


def _simulate(runlog, config, policy, policy_map, seed, routine):
    n = config.target_n

    if policy == SINGLE:
        env = single_object_environment()
        rule = single_object_policy
        routine_name = IDEAL_ROUTINE
    else:
        env = config.environment(routine)
        routine_name = str(env.routine)

    try:
        if policy == NAIVE:
            rule = naive(n, config.capacity)
        elif policy == MDP:
            rule = plan_policy(n, env, params=config.reward_params, discount=config.discount,
                               epsilon=config.epsilon, max_iterations=config.max_iterations).policy
        elif policy == POLICY_FILE:
            rule = policy_map

        for state in range(n):
            action = env.action(rule(state))
            if env.routine == Routine.MODEL:
                Estimator.for_action(action)
    except KeyError as e:
        raise InvalidValueError(msg="policy does not cover state {}".format(e))
    except ValueError as e:
        raise InvalidValueError(msg=str(e))

    report = monte_carlo(rule, n, env, config.episodes, seed)
    try:
        expectation = exact_episode_expectation(rule, n, env)
    except UnreachableGoalError as exc:
        logger.warning("no exact expectation for the %s policy: %s", policy, exc)
        expectation = None

    if expectation is not None:
        _check_agreement(policy, routine_name, report, expectation)

    runlog.log_operation(Operation.OpType.SIMULATE, 'policy',
                         {'routine': routine_name, 'episodes': config.episodes, 'seed': seed},
                         target=policy)

    return SimulationResult(policy=policy, routine=routine_name, target_n=n,
                            report=report, expectation=expectation)


def _check_agreement(policy, routine, report, expectation):
    for metric in ('transfers', 'lifts'):
        mean = getattr(report, 'mean_' + metric)
        delta = abs(mean - getattr(expectation, metric))
        stderr = report.std_errors[metric]
        if delta > 3 * stderr and delta > 1e-9:
            logger.warning("%s/%s: Monte Carlo mean %s %.6f is %.3g away from the exact value",
                           policy, routine, metric, mean, delta)


def _seed(ctx, config=None, command=None):
    if ctx.seed is not None:
        return ctx.seed
    if config is not None and config.seed is not None:
        return config.seed
    raise InvalidValueError(msg="'seed' is required by '{}'".format(command))
