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

"""Pick-transfer Markov decision process.

States are the number of objects in the receiving bin, from `0` to the
target `n`. The target state is absorbing. Rewards are attached to the
landing state of every transition and the value of absorbing states
is fixed to zero.
"""

import dataclasses
import itertools
import logging
import typing

import numpy
import scipy.linalg

from . import settings
from .errors import DivergenceError, NotConvergedError, UnreachableGoalError
from .models import GraspAction, OvershootMode, RewardParams
from .utils import (validate_non_negative_int,
                    validate_positive_int,
                    validate_real)


logger = logging.getLogger(__name__)


def reward(s_prime, params):
    """Reward of landing on state `s_prime`.

    :param s_prime: number of objects in the receiving bin after the step
    :param params: reward parameters

    :returns: the shortfall `-(n - s')` (scaled by the shortfall weight)
        when the target is not reached, the goal reward when it is hit
        and the overshoot penalty when it is exceeded
    """
    validate_non_negative_int('s_prime', s_prime)

    n = params.target_n
    if s_prime < n:
        return -params.shortfall_weight * (n - s_prime)
    elif s_prime == n:
        return params.goal_reward
    else:
        return params.overshoot_penalty


@dataclasses.dataclass(frozen=True)
class TransferMdp:
    """Finite MDP of the pick-transfer process.

    Arrays are indexed by action first and state second:
    `transition[a, s, s']` is the probability of landing on `s'`,
    `reward[a, s]` the expected immediate reward, `deposit[a, s]` the
    probability of the step adding objects to the receiving bin and
    `edge_reward[a, s, s']` the largest reward attached to the edge
    (`-inf` when the edge does not exist).
    """
    target_n: int
    actions: typing.Tuple[GraspAction, ...]
    reward_params: RewardParams
    overshoot_mode: OvershootMode
    transition: numpy.ndarray
    reward: numpy.ndarray
    deposit: numpy.ndarray
    edge_reward: numpy.ndarray

    @property
    def n_states(self):
        return self.transition.shape[1]

    @property
    def goal_state(self):
        return self.target_n

    @property
    def overshoot_state(self):
        if self.overshoot_mode == OvershootMode.PAPER_LITERAL:
            return self.target_n + 1
        return None

    @property
    def transient_states(self):
        return list(range(self.target_n))

    @property
    def terminal_states(self):
        terminals = [self.goal_state]
        if self.overshoot_state is not None:
            terminals.append(self.overshoot_state)
        return terminals

    @property
    def action_ids(self):
        return [action.id for action in self.actions]

    def action_index(self, action_id):
        for i, action in enumerate(self.actions):
            if action.id == action_id:
                return i
        raise ValueError("unknown action '{}'".format(action_id))

    def state_label(self, state):
        if state == self.overshoot_state:
            return 'overshoot'
        return str(state)


@dataclasses.dataclass(frozen=True)
class ValueFunction:
    """Value of every state"""

    values: typing.Dict[int, float]

    def __getitem__(self, state):
        return self.values[state]

    def as_array(self):
        return numpy.array([self.values[s] for s in sorted(self.values)])


@dataclasses.dataclass(frozen=True)
class Policy:
    """Action id to take on every non-terminal state"""

    action_for: typing.Dict[int, str]

    def __getitem__(self, state):
        return self.action_for[state]

    def __call__(self, state):
        return self.action_for[state]

    @classmethod
    def from_callable(cls, states, func):
        return cls({state: func(state) for state in states})


@dataclasses.dataclass(frozen=True)
class Solution:
    """Result of running value iteration"""

    value_function: ValueFunction
    policy: Policy
    discount: float
    iterations: int
    residual: float
    residual_history: typing.Tuple[float, ...]


@dataclasses.dataclass(frozen=True)
class PolicyStats:
    """Expected number of actions and deposits until absorption"""

    expected_actions: typing.Dict[int, float]
    expected_deposits: typing.Dict[int, float]


def build_transfer_mdp(target_n, actions, params, mode=OvershootMode.EXECUTION_CONSISTENT):
    """Build the pick-transfer MDP.

    Taking action `a` on state `s` and grasping `k` objects lands on
    `s + k`. Grasps exceeding the target are handled according to `mode`:
    in `EXECUTION_CONSISTENT` mode the objects go back to the pile, so the
    state does not change, but the overshoot penalty is still earned; in
    `PAPER_LITERAL` mode the process falls into an absorbing overshoot state.
    Every action is available on every non-terminal state.

    :param target_n: number of objects to transfer
    :param actions: list of `GraspAction`
    :param params: reward parameters
    :param mode: overshoot handling

    :returns: a `TransferMdp`

    :raises ValueError: when the action list is empty, action ids are
        repeated or a distribution does not normalize
    """
    validate_positive_int('target_n', target_n)
    if params.target_n != target_n:
        msg = "reward target {} does not match target {}".format(params.target_n, target_n)
        raise ValueError(msg)
    if not isinstance(mode, OvershootMode):
        mode = OvershootMode(mode)

    actions = tuple(actions)
    if not actions:
        raise ValueError("'actions' cannot be empty")
    ids = [action.id for action in actions]
    if len(set(ids)) != len(ids):
        raise ValueError("action ids must be unique; {} given".format(ids))
    for action in actions:
        total = sum(action.distribution.probs)
        if abs(total - 1.0) > settings.PROBABILITY_TOLERANCE:
            raise ValueError("distribution of '{}' does not normalize".format(action.id))

    n_states = target_n + 1
    overshoot = None
    if mode == OvershootMode.PAPER_LITERAL:
        overshoot = target_n + 1
        n_states += 1

    n_actions = len(actions)
    transition = numpy.zeros((n_actions, n_states, n_states))
    expected_reward = numpy.zeros((n_actions, n_states))
    deposit = numpy.zeros((n_actions, n_states))
    edge_reward = numpy.full((n_actions, n_states, n_states), -numpy.inf)

    for a, action in enumerate(actions):
        for s in range(target_n):
            for k, p in enumerate(action.distribution.probs):
                if p == 0.0:
                    continue
                landing = s + k
                if landing <= target_n:
                    s_prime = landing
                    r = reward(landing, params)
                    if k > 0:
                        deposit[a, s] += p
                else:
                    s_prime = s if overshoot is None else overshoot
                    r = params.overshoot_penalty
                transition[a, s, s_prime] += p
                expected_reward[a, s] += p * r
                edge_reward[a, s, s_prime] = max(edge_reward[a, s, s_prime], r)

        for t in range(target_n, n_states):
            transition[a, t, t] = 1.0
            edge_reward[a, t, t] = 0.0

    for array in (transition, expected_reward, deposit, edge_reward):
        array.setflags(write=False)

    logger.debug("built MDP: n=%s actions=%s mode=%s", target_n, ids, mode)

    return TransferMdp(target_n=target_n,
                       actions=actions,
                       reward_params=params,
                       overshoot_mode=mode,
                       transition=transition,
                       reward=expected_reward,
                       deposit=deposit,
                       edge_reward=edge_reward)


def q_values(mdp, values, discount):
    """Bellman backup of every (action, state) pair.

    :returns: array with shape `(n_actions, n_states)`
    """
    values = _as_array(mdp, values)
    return mdp.reward + discount * (mdp.transition @ values)


def bellman_residual(mdp, values, discount):
    """Max-norm distance between `values` and its Bellman backup"""

    values = _as_array(mdp, values)
    backup = q_values(mdp, values, discount).max(axis=0)
    backup[mdp.terminal_states] = 0.0
    return float(numpy.max(numpy.abs(backup - values)))


def has_nonnegative_cycle(mdp):
    """Check whether a cycle of non-negative total reward is reachable.

    Cycles are searched among the non-terminal states reachable from
    the empty bin, using any action, by a max-plus Floyd-Warshall pass
    over the edge rewards.
    """
    n = mdp.target_n
    weights = mdp.edge_reward[:, :n, :n].max(axis=0)

    reachable = {0}
    queue = [0]
    while queue:
        s = queue.pop(0)
        for s_prime in numpy.flatnonzero(numpy.isfinite(weights[s])):
            s_prime = int(s_prime)
            if s_prime not in reachable:
                reachable.add(s_prime)
                queue.append(s_prime)

    states = sorted(reachable)
    best = weights[numpy.ix_(states, states)].copy()
    for k in range(len(states)):
        best = numpy.maximum(best, best[:, k, None] + best[None, k, :])

    return bool(numpy.any(numpy.diag(best) >= 0))


def value_iteration(mdp, discount=settings.DISCOUNT, epsilon=settings.EPSILON,
                    max_iterations=settings.MAX_ITERATIONS):
    """Solve the MDP by synchronous value iteration.

    Sweeps stop once the max-norm change between consecutive value
    functions is below `epsilon`. The returned policy is greedy with
    respect to the final values; ties are broken by the lowest action
    index.

    :param mdp: a `TransferMdp`
    :param discount: discount factor in (0, 1]
    :param epsilon: convergence threshold
    :param max_iterations: maximum number of sweeps

    :returns: a `Solution`

    :raises ValueError: when any parameter is out of range
    :raises DivergenceError: when `discount` is 1 and a cycle with
        non-negative reward is reachable
    :raises NotConvergedError: when the threshold is not met after
        `max_iterations` sweeps
    """
    validate_real('discount', discount)
    validate_real('epsilon', epsilon)
    validate_positive_int('max_iterations', max_iterations)
    if discount <= 0 or discount > 1:
        raise ValueError("'discount' must be in (0, 1]; {} given".format(discount))
    if epsilon <= 0:
        raise ValueError("'epsilon' must be greater than 0")

    if discount == 1 and has_nonnegative_cycle(mdp):
        msg = "undiscounted value iteration diverges: a cycle with non-negative reward is reachable"
        raise DivergenceError(msg=msg)

    terminals = mdp.terminal_states
    values = numpy.zeros(mdp.n_states)
    history = []
    residual = numpy.inf

    for iteration in range(1, max_iterations + 1):
        updated = q_values(mdp, values, discount).max(axis=0)
        updated[terminals] = 0.0
        residual = float(numpy.max(numpy.abs(updated - values)))
        history.append(residual)
        values = updated
        if residual < epsilon:
            break
    else:
        raise NotConvergedError(iterations=max_iterations, residual=residual, epsilon=epsilon)

    logger.info("value iteration converged in %s sweeps; residual %.3g", iteration, residual)

    return Solution(value_function=_value_function(values),
                    policy=greedy_policy(mdp, values, discount),
                    discount=discount,
                    iterations=iteration,
                    residual=residual,
                    residual_history=tuple(history))


def greedy_policy(mdp, values, discount):
    """Policy taking, on every state, the action with the best backup"""

    q = q_values(mdp, values, discount)
    action_for = {}
    for s in mdp.transient_states:
        best = q[:, s].max()
        a = int(numpy.flatnonzero(q[:, s] >= best - settings.TIE_TOLERANCE)[0])
        action_for[s] = mdp.actions[a].id
    return Policy(action_for)


def evaluate_policy(mdp, policy, discount=settings.DISCOUNT):
    """Exact discounted value of following `policy`.

    :raises UnreachableGoalError: when the problem is undiscounted and
        some state never gets absorbed under `policy`
    """
    validate_real('discount', discount)
    if discount <= 0 or discount > 1:
        raise ValueError("'discount' must be in (0, 1]; {} given".format(discount))

    indices = _policy_indices(mdp, policy)
    n = mdp.target_n
    rows = numpy.arange(n)
    transition = mdp.transition[indices, rows, :]
    rewards = mdp.reward[indices, rows]

    if discount == 1:
        stuck = _non_absorbing_states(mdp, transition, mdp.terminal_states)
        if stuck:
            raise UnreachableGoalError(states=stuck)

    system = numpy.eye(n) - discount * transition[:, :n]
    solved = scipy.linalg.solve(system, rewards)

    values = numpy.zeros(mdp.n_states)
    values[:n] = solved
    return _value_function(values)


def exact_policy_stats(mdp, policy):
    """Expected number of actions and deposits until the goal.

    Solves the absorption equations `E[s] = 1 + sum p(s, pi(s), s') E[s']`
    and their analogue counting state-advancing transitions.

    :raises UnreachableGoalError: when the goal cannot be reached from
        some state under `policy`
    """
    n = mdp.target_n
    actions = expected_totals(mdp, policy, numpy.ones((len(mdp.actions), mdp.n_states)))
    deposits = expected_totals(mdp, policy, mdp.deposit)

    return PolicyStats(expected_actions={s: float(actions[s]) for s in range(n + 1)},
                       expected_deposits={s: float(deposits[s]) for s in range(n + 1)})


def expected_totals(mdp, policy, step_values):
    """Expected sum of per-step quantities until the goal.

    :param step_values: array `(n_actions, n_states)` with the expected
        quantity gathered by taking each action on each state

    :returns: array with the expected total per state; zero on
        absorbing states
    """
    indices = _policy_indices(mdp, policy)
    n = mdp.target_n
    rows = numpy.arange(n)
    transition = mdp.transition[indices, rows, :]

    stuck = _non_absorbing_states(mdp, transition, [mdp.goal_state])
    if stuck:
        raise UnreachableGoalError(states=stuck)

    system = numpy.eye(n) - transition[:, :n]
    solved = scipy.linalg.solve(system, numpy.asarray(step_values)[indices, rows])

    totals = numpy.zeros(mdp.n_states)
    totals[:n] = solved
    return totals


def enumerate_policies(mdp):
    """Generate every stationary deterministic policy"""

    for choice in itertools.product(mdp.action_ids, repeat=mdp.target_n):
        yield Policy(dict(enumerate(choice)))


def _policy_indices(mdp, policy):
    indices = []
    for s in mdp.transient_states:
        try:
            action_id = policy[s]
        except KeyError:
            raise ValueError("policy does not cover state {}".format(s))
        indices.append(mdp.action_index(action_id))
    return numpy.array(indices, dtype=int)


def _non_absorbing_states(mdp, transition, targets):
    """Non-terminal states that cannot reach any of `targets`"""

    n = mdp.target_n
    reaching = set(targets)
    changed = True
    while changed:
        changed = False
        for s in range(n):
            if s in reaching:
                continue
            if any(transition[s, t] > 0 for t in reaching):
                reaching.add(s)
                changed = True
    return [s for s in range(n) if s not in reaching]


def _as_array(mdp, values):
    if isinstance(values, ValueFunction):
        values = values.as_array()
    values = numpy.asarray(values, dtype=float)
    if values.shape != (mdp.n_states,):
        raise ValueError("values must have {} entries".format(mdp.n_states))
    return values


def _value_function(values):
    return ValueFunction({s: float(v) for s, v in enumerate(values)})
