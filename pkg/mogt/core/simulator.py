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

"""Monte Carlo and exact evaluation of transfer policies.

An episode repeats grasp, lift and transfer steps until the receiving
bin holds the target quantity. Every step runs a grasp attempt: the
number of objects in the hand is drawn from the action distribution and,
under the `MODEL` routine, the hand is only lifted when the voting rule
confirms it; otherwise the hand re-grasps. After `max_regrasps` re-grasps
the current grasp is lifted anyway. Lifted objects are deposited unless
they would exceed the target, in which case they go back to the pile.
"""

import dataclasses
import enum
import logging
import math
import typing

import numpy
from scipy.stats import binom

from . import settings
from .mdp import (Policy,
                  build_transfer_mdp,
                  exact_policy_stats,
                  expected_totals,
                  value_iteration)
from .models import GraspAction, OutcomeDistribution, OvershootMode, RewardParams
from .sensors import Estimator, SensorModel, trigger_probability, voting_decide
from .utils import (validate_non_negative_int,
                    validate_positive_int,
                    validate_probability)


logger = logging.getLogger(__name__)


SINGLE_OBJECT_ACTION = 'grasp-1'
MAX_ACTION = 'grasp-max'


@enum.unique
class Routine(enum.Enum):
    SFR = 'sfr'
    MODEL = 'model'

    def __str__(self):
        return self.value


@dataclasses.dataclass(frozen=True)
class EnvironmentConfig:
    """Stochastic environment an episode runs against"""

    actions: typing.Tuple[GraspAction, ...]
    sensor: SensorModel = dataclasses.field(default_factory=SensorModel.perfect)
    routine: Routine = Routine.MODEL
    max_regrasps: int = settings.MAX_REGRASPS
    timesteps_per_attempt: int = settings.TIMESTEPS_PER_ATTEMPT
    drop_on_lift_prob: float = settings.DROP_ON_LIFT_PROB
    episode_cap: int = settings.EPISODE_CAP
    target_anytime: bool = False

    def __post_init__(self):
        actions = tuple(self.actions)
        if not actions:
            raise ValueError("'actions' cannot be empty")
        ids = [action.id for action in actions]
        if len(set(ids)) != len(ids):
            raise ValueError("action ids must be unique; {} given".format(ids))
        object.__setattr__(self, 'actions', actions)
        object.__setattr__(self, 'routine', Routine(self.routine))

        validate_non_negative_int('max_regrasps', self.max_regrasps)
        validate_positive_int('timesteps_per_attempt', self.timesteps_per_attempt)
        validate_probability('drop_on_lift_prob', self.drop_on_lift_prob)
        validate_positive_int('episode_cap', self.episode_cap)

    @property
    def action_ids(self):
        return tuple(action.id for action in self.actions)

    def action(self, action_id):
        for action in self.actions:
            if action.id == action_id:
                return action
        raise ValueError("unknown action '{}'".format(action_id))

    @property
    def distributions(self):
        return {action.id: action.distribution for action in self.actions}


class AttemptResult(typing.NamedTuple):
    lifted_quantity: int
    regrasps: int
    triggered: bool


class TraceRecord(typing.NamedTuple):
    state: int
    action: str
    lifted_quantity: int
    deposited: bool


@dataclasses.dataclass(frozen=True)
class EpisodeResult:
    transfers: int
    lifts: int
    regrasps: int
    final_count: int
    target: int
    action_trace: typing.Tuple[TraceRecord, ...]
    forced_lifts: int = 0

    @property
    def success(self):
        return self.final_count == self.target


@dataclasses.dataclass(frozen=True)
class AggregateReport:
    """Averages of the episodes run by `monte_carlo`.

    `std_errors` holds the standard error of the mean of `transfers`,
    `lifts` and `regrasps`.
    """
    episodes: int
    mean_transfers: float
    mean_lifts: float
    mean_regrasps: float
    std_errors: typing.Mapping[str, float]
    success_rate: float
    failures: int
    forced_lifts: int


@dataclasses.dataclass(frozen=True)
class EpisodeExpectation:
    transfers: float
    lifts: float
    regrasps: float


def sample_grasp_outcome(distribution, rng):
    """Draw the number of grasped objects by inverse CDF"""

    cdf = numpy.cumsum(distribution.as_array())
    index = int(numpy.searchsorted(cdf, rng.random(), side='right'))
    # rounding may leave the last cumulative value under 1
    return min(index, distribution.max_quantity)


def simulate_attempt(action, env, rng):
    """Grasp until the hand is lifted.

    :param action: `GraspAction` being executed
    :param env: environment configuration
    :param rng: numpy random generator

    :returns: an `AttemptResult`; `triggered` is `False` when the lift
        was forced after the last re-grasp
    """
    estimator = Estimator.for_action(action) if env.routine == Routine.MODEL else None

    regrasps = 0
    while True:
        count = sample_grasp_outcome(action.distribution, rng)
        if env.routine == Routine.SFR:
            triggered = True
            break

        nonzero, target = env.sensor.sample_readings(estimator, count, env.timesteps_per_attempt, rng)
        triggered = voting_decide(nonzero, target, target_anytime=env.target_anytime) is not None
        if triggered or regrasps == env.max_regrasps:
            break
        regrasps += 1

    if count and env.drop_on_lift_prob > 0:
        count -= int(rng.binomial(count, env.drop_on_lift_prob))

    return AttemptResult(count, regrasps, triggered)


def run_episode(policy, target_n, env, rng):
    """Run one transfer episode.

    :param policy: callable mapping the number of transferred objects
        to an action id
    :param target_n: number of objects to transfer
    :param env: environment configuration
    :param rng: numpy random generator

    :returns: an `EpisodeResult`; the episode stops without reaching the
        target after `env.episode_cap` lifts
    """
    validate_non_negative_int('target_n', target_n)

    current = transfers = lifts = regrasps = forced = 0
    trace = []
    while current != target_n:
        if lifts >= env.episode_cap:
            logger.debug("episode stopped after %s lifts with %s of %s objects",
                         lifts, current, target_n)
            break

        action = env.action(policy(current))
        attempt = simulate_attempt(action, env, rng)
        lifts += 1
        regrasps += attempt.regrasps
        forced += 0 if attempt.triggered else 1

        deposited = 0 < attempt.lifted_quantity <= target_n - current
        trace.append(TraceRecord(current, action.id, attempt.lifted_quantity, deposited))
        if deposited:
            transfers += 1
            current += attempt.lifted_quantity

    return EpisodeResult(transfers=transfers,
                         lifts=lifts,
                         regrasps=regrasps,
                         final_count=current,
                         target=target_n,
                         action_trace=tuple(trace),
                         forced_lifts=forced)


def naive_policy(current, target_n, capacity_q=settings.NAIVE_CAPACITY):
    """Grasp as many objects as possible, then the exact remainder.

    Remainders between 4 and the capacity have no exact action, so
    they are grasped three at a time.
    """
    validate_non_negative_int('current', current)
    validate_positive_int('capacity_q', capacity_q)
    if current >= target_n:
        raise ValueError("'current' must be lower than the target; {} given".format(current))

    remaining = target_n - current
    if remaining >= capacity_q:
        return MAX_ACTION
    return 'grasp-{}'.format(min(remaining, 3))


def naive(target_n, capacity_q=settings.NAIVE_CAPACITY):
    """Naive policy for every non-goal state"""

    return Policy.from_callable(range(target_n), lambda s: naive_policy(s, target_n, capacity_q))


def single_object_policy(current=None):
    return SINGLE_OBJECT_ACTION


def single_object_environment():
    """Idealized environment of the single-object baseline"""

    action = GraspAction(SINGLE_OBJECT_ACTION, 1, OutcomeDistribution.point_mass(1))
    return EnvironmentConfig(actions=(action,),
                             sensor=SensorModel.perfect(),
                             routine=Routine.SFR,
                             max_regrasps=0)


def monte_carlo(policy, target_n, env, episodes, seed):
    """Run independent episodes and average their metrics.

    Episode `i` draws from a generator seeded with `(seed, i)`, so
    results do not depend on the order episodes are run.

    :returns: an `AggregateReport`
    """
    validate_positive_int('episodes', episodes)
    validate_non_negative_int('seed', seed)

    metrics = numpy.zeros((episodes, 3))
    successes = forced = 0
    for index in range(episodes):
        rng = numpy.random.default_rng([seed, index])
        result = run_episode(policy, target_n, env, rng)
        metrics[index] = (result.transfers, result.lifts, result.regrasps)
        successes += result.success
        forced += result.forced_lifts

    means = metrics.mean(axis=0)
    if episodes > 1:
        errors = metrics.std(axis=0, ddof=1) / math.sqrt(episodes)
    else:
        errors = numpy.zeros(3)

    failures = episodes - successes
    if failures:
        logger.warning("%s of %s episodes reached the cap of %s lifts", failures, episodes, env.episode_cap)
    if forced:
        logger.info("%s lifts were forced after %s re-grasps", forced, env.max_regrasps)

    return AggregateReport(episodes=episodes,
                           mean_transfers=float(means[0]),
                           mean_lifts=float(means[1]),
                           mean_regrasps=float(means[2]),
                           std_errors={'transfers': float(errors[0]),
                                       'lifts': float(errors[1]),
                                       'regrasps': float(errors[2])},
                           success_rate=successes / episodes,
                           failures=failures,
                           forced_lifts=forced)


def attempt_statistics(action, env):
    """Exact lift distribution and expected re-grasps of one attempt.

    :returns: tuple with the `OutcomeDistribution` of the lifted quantity
        and the expected number of re-grasps
    """
    probs = action.distribution.as_array()
    if env.routine == Routine.SFR:
        lifted, expected_regrasps = probs, 0.0
    else:
        estimator = Estimator.for_action(action)
        triggers = numpy.array([
            trigger_probability(env.sensor.firing_probability(Estimator.NONZERO, count),
                                env.sensor.firing_probability(estimator, count),
                                env.timesteps_per_attempt,
                                target_anytime=env.target_anytime)
            for count in range(len(probs))
        ])

        # probability of an attempt not triggering the lift
        rho = float(numpy.dot(probs, 1.0 - triggers))
        m = env.max_regrasps
        tries = float(m) if math.isclose(rho, 1.0) else (1.0 - rho ** m) / (1.0 - rho)
        lifted = probs * (triggers * tries + rho ** m)
        expected_regrasps = math.fsum(rho ** i for i in range(1, m + 1))

    if env.drop_on_lift_prob > 0:
        lifted = _thin(lifted, env.drop_on_lift_prob)

    return OutcomeDistribution.from_counts(lifted), expected_regrasps


def effective_lift_distribution(action, env):
    """Distribution of the number of objects lifted by one attempt"""

    return attempt_statistics(action, env)[0]


def effective_actions(env):
    """Actions with their distributions replaced by the lift distributions"""

    return tuple(action.with_distribution(effective_lift_distribution(action, env))
                 for action in env.actions)


def exact_episode_expectation(policy, target_n, env):
    """Expected transfers, lifts and re-grasps of an episode.

    Lift distributions are computed in closed form and the absorption
    equations of the resulting chain are solved. The episode cap is
    not taken into account.

    :raises UnreachableGoalError: when the target cannot be reached
        under `policy`
    """
    validate_non_negative_int('target_n', target_n)
    if target_n == 0:
        return EpisodeExpectation(0.0, 0.0, 0.0)

    stats = [attempt_statistics(action, env) for action in env.actions]
    actions = [action.with_distribution(dist) for action, (dist, _) in zip(env.actions, stats)]
    mdp = build_transfer_mdp(target_n, actions, RewardParams(target_n),
                             mode=OvershootMode.EXECUTION_CONSISTENT)

    if not isinstance(policy, Policy):
        policy = Policy.from_callable(range(target_n), policy)

    totals = exact_policy_stats(mdp, policy)
    regrasp_steps = numpy.repeat([[r] for _, r in stats], mdp.n_states, axis=1)
    regrasps = expected_totals(mdp, policy, regrasp_steps)

    return EpisodeExpectation(transfers=totals.expected_deposits[0],
                              lifts=totals.expected_actions[0],
                              regrasps=float(regrasps[0]))


def plan_policy(target_n, env, params=None, discount=settings.DISCOUNT,
                epsilon=settings.EPSILON, max_iterations=settings.MAX_ITERATIONS,
                mode=OvershootMode.EXECUTION_CONSISTENT):
    """Solve the transfer MDP on the lift distributions of `env`.

    :returns: the value iteration `Solution`
    """
    params = params if params is not None else RewardParams(target_n)
    mdp = build_transfer_mdp(target_n, effective_actions(env), params, mode=mode)
    return value_iteration(mdp, discount=discount, epsilon=epsilon, max_iterations=max_iterations)


def _thin(lifted, drop_prob):
    """Lift distribution after every object is dropped with `drop_prob`"""

    kept = numpy.zeros_like(lifted)
    for count, mass in enumerate(lifted):
        if mass:
            kept[:count + 1] += mass * binom.pmf(numpy.arange(count + 1), count, 1.0 - drop_prob)
    return kept
