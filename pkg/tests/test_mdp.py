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

import unittest

import numpy

from mogt.core.errors import DivergenceError, NotConvergedError, UnreachableGoalError
from mogt.core.mdp import (Policy,
                           bellman_residual,
                           build_transfer_mdp,
                           enumerate_policies,
                           evaluate_policy,
                           exact_policy_stats,
                           has_nonnegative_cycle,
                           q_values,
                           reward,
                           value_iteration)
from mogt.core.models import GraspAction, OutcomeDistribution, OvershootMode, RewardParams


TARGET_MISMATCH_ERROR = "reward target 5 does not match target 4"
EMPTY_ACTIONS_ERROR = "'actions' cannot be empty"
DUPLICATED_ACTIONS_ERROR = "action ids must be unique"
DISCOUNT_RANGE_ERROR = r"'discount' must be in \(0, 1\]; 1.5 given"
POLICY_COVERAGE_ERROR = "policy does not cover state 1"
UNKNOWN_ACTION_ERROR = "unknown action 'grasp-9'"


def action(action_id, probs, quantity=None):
    return GraspAction(action_id, quantity, OutcomeDistribution(tuple(probs)))


def random_actions(rng, count, max_quantity):
    actions = []
    for i in range(count):
        probs = rng.dirichlet(numpy.ones(max_quantity + 1))
        probs = probs / probs.sum()
        actions.append(GraspAction('grasp-{}'.format(i + 1), i + 1, OutcomeDistribution(tuple(probs))))
    return actions


def sample_episodes(target_n, probs, episodes, rng):
    """Actions and deposits of episodes repeating one grasp until the target.

    Grasps exceeding the target leave the state unchanged.
    """
    state = numpy.zeros(episodes, dtype=int)
    actions = numpy.zeros(episodes)
    deposits = numpy.zeros(episodes)

    active = numpy.flatnonzero(state < target_n)
    while len(active):
        grasped = rng.choice(len(probs), size=len(active), p=probs)
        landing = state[active] + grasped
        moved = (grasped > 0) & (landing <= target_n)

        actions[active] += 1
        deposits[active[moved]] += 1
        state[active[moved]] = landing[moved]
        active = numpy.flatnonzero(state < target_n)

    return actions, deposits


class TestReward(unittest.TestCase):
    """Unit tests for reward"""

    def test_reward_table(self):
        """Check the reward of every landing state for a target of 10"""

        params = RewardParams(10)
        expected = [-10, -9, -8, -7, -6, -5, -4, -3, -2, -1,
                    100000, -1000, -1000, -1000, -1000, -1000]

        rewards = [reward(s, params) for s in range(16)]
        self.assertListEqual(rewards, expected)

    def test_shortfall_weight(self):
        """Check the shortfall term is scaled"""

        params = RewardParams(4, shortfall_weight=0.5)
        self.assertEqual(reward(1, params), -1.5)


class TestBuildTransferMdp(unittest.TestCase):
    """Unit tests for build_transfer_mdp"""

    def setUp(self):
        """Load initial values"""

        self.actions = [action('grasp-1', (0.2, 0.6, 0.2), 1),
                        action('grasp-max', (0.06, 0.16, 0.16, 0.42, 0.20))]

    def test_transitions_normalize(self):
        """Check every row of the transition table sums to 1"""

        for mode in OvershootMode:
            mdp = build_transfer_mdp(4, self.actions, RewardParams(4), mode=mode)
            numpy.testing.assert_allclose(mdp.transition.sum(axis=2), 1.0, atol=1e-9)
            self.assertTrue(numpy.all(mdp.transition >= 0))

    def test_goal_absorbing(self):
        """Check the goal state loops on itself with zero reward"""

        mdp = build_transfer_mdp(4, self.actions, RewardParams(4))

        for a in range(len(self.actions)):
            self.assertEqual(mdp.transition[a, 4, 4], 1.0)
            self.assertEqual(mdp.reward[a, 4], 0.0)

    def test_execution_consistent_overshoot(self):
        """Check overshooting grasps keep the state and earn the penalty"""

        actions = [action('grasp-3', (0.0, 0.0, 0.0, 1.0), 3)]
        mdp = build_transfer_mdp(4, actions, RewardParams(4))

        self.assertEqual(mdp.n_states, 5)
        self.assertIsNone(mdp.overshoot_state)
        self.assertEqual(mdp.transition[0, 0, 3], 1.0)
        self.assertEqual(mdp.reward[0, 0], -1.0)
        self.assertEqual(mdp.transition[0, 3, 3], 1.0)
        self.assertEqual(mdp.reward[0, 3], -1000.0)
        self.assertEqual(mdp.deposit[0, 3], 0.0)

    def test_paper_literal_overshoot(self):
        """Check overshooting grasps fall into the absorbing overshoot state"""

        actions = [action('grasp-3', (0.0, 0.0, 0.0, 1.0), 3)]
        mdp = build_transfer_mdp(4, actions, RewardParams(4), mode=OvershootMode.PAPER_LITERAL)

        self.assertEqual(mdp.n_states, 6)
        self.assertEqual(mdp.overshoot_state, 5)
        self.assertEqual(mdp.state_label(5), 'overshoot')
        self.assertListEqual(mdp.terminal_states, [4, 5])
        self.assertEqual(mdp.transition[0, 3, 5], 1.0)
        self.assertEqual(mdp.transition[0, 5, 5], 1.0)
        self.assertEqual(mdp.reward[0, 3], -1000.0)

    def test_arrays_read_only(self):
        """Check the MDP arrays cannot be modified"""

        mdp = build_transfer_mdp(4, self.actions, RewardParams(4))
        with self.assertRaises(ValueError):
            mdp.transition[0, 0, 0] = 1.0

    def test_invalid(self):
        """Check invalid MDP definitions"""

        with self.assertRaisesRegex(ValueError, TARGET_MISMATCH_ERROR):
            build_transfer_mdp(4, self.actions, RewardParams(5))
        with self.assertRaisesRegex(ValueError, EMPTY_ACTIONS_ERROR):
            build_transfer_mdp(4, [], RewardParams(4))
        with self.assertRaisesRegex(ValueError, DUPLICATED_ACTIONS_ERROR):
            build_transfer_mdp(4, self.actions + self.actions[:1], RewardParams(4))

    def test_unknown_action(self):
        """Check if it fails when looking for an unknown action"""

        mdp = build_transfer_mdp(4, self.actions, RewardParams(4))
        self.assertEqual(mdp.action_index('grasp-max'), 1)
        with self.assertRaisesRegex(ValueError, UNKNOWN_ACTION_ERROR):
            mdp.action_index('grasp-9')


class TestValueIteration(unittest.TestCase):
    """Unit tests for value_iteration"""

    def test_deterministic_single_grasps(self):
        """Check a deterministic grasp-1 is used on every state"""

        actions = [action('grasp-1', (0.0, 1.0), 1)]
        mdp = build_transfer_mdp(2, actions, RewardParams(2))

        solution = value_iteration(mdp)

        self.assertDictEqual(solution.policy.action_for, {0: 'grasp-1', 1: 'grasp-1'})
        self.assertEqual(solution.value_function[2], 0.0)
        self.assertAlmostEqual(solution.value_function[1], 100000.0, places=4)
        self.assertAlmostEqual(solution.value_function[0], -1.0 + 0.95 * 100000.0, places=4)

    def test_exact_grasp_preferred(self):
        """Check the exact grasp is chosen when a larger one would overshoot"""

        actions = [action('grasp-max', (0.0, 0.0, 0.0, 0.0, 1.0)),
                   action('grasp-2', (0.0, 0.0, 1.0), 2)]
        mdp = build_transfer_mdp(6, actions, RewardParams(6))

        solution = value_iteration(mdp)

        self.assertEqual(solution.policy[0], 'grasp-max')
        self.assertEqual(solution.policy[4], 'grasp-2')
        self.assertEqual(solution.policy[5], 'grasp-max')

    def test_ties_lowest_index(self):
        """Check ties are broken by the lowest action index"""

        actions = [action('grasp-a', (0.0, 1.0), 1), action('grasp-b', (0.0, 1.0), 1)]
        mdp = build_transfer_mdp(3, actions, RewardParams(3))

        solution = value_iteration(mdp)

        self.assertListEqual(list(solution.policy.action_for.values()), ['grasp-a'] * 3)

    def test_residual_history(self):
        """Check the residual history ends below epsilon"""

        actions = [action('grasp-1', (0.2, 0.6, 0.2), 1),
                   action('grasp-max', (0.06, 0.16, 0.16, 0.42, 0.20))]
        mdp = build_transfer_mdp(10, actions, RewardParams(10))

        solution = value_iteration(mdp, epsilon=1e-6)

        self.assertEqual(len(solution.residual_history), solution.iterations)
        self.assertLess(solution.residual, 1e-6)
        self.assertEqual(solution.residual_history[-1], solution.residual)
        self.assertLess(solution.iterations, 10000)
        self.assertLess(bellman_residual(mdp, solution.value_function, 0.95), 1e-5)

    def test_residual_history_monotone(self):
        """Check the residual never grows from one sweep to the next"""

        rng = numpy.random.default_rng(77)

        for n in (1, 4, 10):
            for mode in OvershootMode:
                mdp = build_transfer_mdp(n, random_actions(rng, 3, 4), RewardParams(n), mode=mode)

                history = value_iteration(mdp, epsilon=1e-9).residual_history

                for previous, current in zip(history, history[1:]):
                    self.assertLessEqual(current, previous + 1e-9, msg="n={} mode={}".format(n, mode))

    def test_greedy_consistency(self):
        """Check the policy action attains the best backup on every state"""

        rng = numpy.random.default_rng(78)

        for n in (1, 3, 8):
            for mode in OvershootMode:
                mdp = build_transfer_mdp(n, random_actions(rng, 4, 3), RewardParams(n), mode=mode)
                solution = value_iteration(mdp)

                q = q_values(mdp, solution.value_function, solution.discount)
                for s in mdp.transient_states:
                    chosen = q[mdp.action_index(solution.policy[s]), s]
                    self.assertGreaterEqual(chosen, q[:, s].max() - 1e-9)

    def test_optimal_against_enumeration(self):
        """Check the solved policy is at least as good as every stationary policy"""

        rng = numpy.random.default_rng(1234)

        for n in range(1, 7):
            for n_actions in (1, 2, 3):
                for mode in OvershootMode:
                    actions = random_actions(rng, n_actions, 3)
                    mdp = build_transfer_mdp(n, actions, RewardParams(n), mode=mode)

                    solution = value_iteration(mdp, epsilon=1e-9)
                    solved = evaluate_policy(mdp, solution.policy).as_array()

                    for policy in enumerate_policies(mdp):
                        values = evaluate_policy(mdp, policy).as_array()
                        self.assertTrue(numpy.all(solved >= values - 1e-6),
                                        msg="n={} actions={} mode={}".format(n, n_actions, mode))

    def test_reward_scale_invariance(self):
        """Check scaling every reward term keeps the policy"""

        rng = numpy.random.default_rng(99)
        actions = random_actions(rng, 3, 4)
        params = RewardParams(8)

        policy = value_iteration(build_transfer_mdp(8, actions, params), epsilon=1e-9).policy
        scaled = value_iteration(build_transfer_mdp(8, actions, params.scaled(10.0)),
                                 epsilon=1e-8).policy

        self.assertDictEqual(policy.action_for, scaled.action_for)

    def test_undiscounted(self):
        """Check undiscounted problems converge when every cycle costs"""

        actions = [action('grasp-1', (0.5, 0.5), 1)]
        mdp = build_transfer_mdp(3, actions, RewardParams(3))

        solution = value_iteration(mdp, discount=1.0, epsilon=1e-9)
        self.assertEqual(solution.policy[0], 'grasp-1')

    def test_divergence_guard(self):
        """Check undiscounted problems with free cycles are rejected"""

        actions = [action('grasp-1', (0.5, 0.5), 1)]
        mdp = build_transfer_mdp(3, actions, RewardParams(3, shortfall_weight=0.0))

        self.assertTrue(has_nonnegative_cycle(mdp))
        with self.assertRaises(DivergenceError):
            value_iteration(mdp, discount=1.0)

    def test_not_converged(self):
        """Check if it fails when the iterations are exhausted"""

        actions = [action('grasp-1', (0.5, 0.5), 1)]
        mdp = build_transfer_mdp(5, actions, RewardParams(5))

        with self.assertRaises(NotConvergedError) as context:
            value_iteration(mdp, max_iterations=2)

        self.assertEqual(context.exception.iterations, 2)
        self.assertGreater(context.exception.residual, 1e-6)

    def test_invalid_discount(self):
        """Check if it fails when the discount is out of range"""

        mdp = build_transfer_mdp(2, [action('grasp-1', (0.0, 1.0), 1)], RewardParams(2))
        with self.assertRaisesRegex(ValueError, DISCOUNT_RANGE_ERROR):
            value_iteration(mdp, discount=1.5)

    def test_paper_literal_terminal_values(self):
        """Check terminal states keep a zero value"""

        actions = [action('grasp-max', (0.0, 0.0, 0.5, 0.5))]
        mdp = build_transfer_mdp(4, actions, RewardParams(4), mode=OvershootMode.PAPER_LITERAL)

        solution = value_iteration(mdp)

        self.assertEqual(solution.value_function[4], 0.0)
        self.assertEqual(solution.value_function[5], 0.0)
        self.assertListEqual(sorted(solution.policy.action_for), [0, 1, 2, 3])


class TestPolicyEvaluation(unittest.TestCase):
    """Unit tests for evaluate_policy and exact_policy_stats"""

    def test_evaluate_policy(self):
        """Check the exact discounted value of a deterministic chain"""

        mdp = build_transfer_mdp(2, [action('grasp-1', (0.0, 1.0), 1)], RewardParams(2))
        policy = Policy({0: 'grasp-1', 1: 'grasp-1'})

        values = evaluate_policy(mdp, policy)

        self.assertAlmostEqual(values[1], 100000.0, places=6)
        self.assertAlmostEqual(values[0], 94999.0, places=6)
        self.assertEqual(values[2], 0.0)

    def test_policy_coverage(self):
        """Check if it fails when the policy misses a state"""

        mdp = build_transfer_mdp(2, [action('grasp-1', (0.0, 1.0), 1)], RewardParams(2))
        with self.assertRaisesRegex(ValueError, POLICY_COVERAGE_ERROR):
            evaluate_policy(mdp, Policy({0: 'grasp-1'}))

    def test_exact_stats_chain(self):
        """Check expected actions and deposits of a deterministic chain"""

        mdp = build_transfer_mdp(3, [action('grasp-1', (0.0, 1.0), 1)], RewardParams(3))
        stats = exact_policy_stats(mdp, Policy.from_callable(range(3), lambda s: 'grasp-1'))

        self.assertAlmostEqual(stats.expected_actions[0], 3.0, places=10)
        self.assertAlmostEqual(stats.expected_deposits[0], 3.0, places=10)
        self.assertEqual(stats.expected_actions[3], 0.0)

    def test_exact_stats_geometric(self):
        """Check expected actions of a grasp succeeding half of the times"""

        mdp = build_transfer_mdp(1, [action('grasp-1', (0.5, 0.5), 1)], RewardParams(1))
        stats = exact_policy_stats(mdp, Policy({0: 'grasp-1'}))

        self.assertAlmostEqual(stats.expected_actions[0], 2.0, places=10)
        self.assertAlmostEqual(stats.expected_deposits[0], 1.0, places=10)

    def test_exact_stats_against_sampling(self):
        """Check expected actions and deposits against sampled episodes"""

        probs = (0.25, 0.5, 0.25)
        mdp = build_transfer_mdp(2, [action('grasp-max', probs)], RewardParams(2))
        stats = exact_policy_stats(mdp, Policy({0: 'grasp-max', 1: 'grasp-max'}))

        self.assertAlmostEqual(stats.expected_actions[0], 8 / 3, places=10)
        self.assertAlmostEqual(stats.expected_deposits[0], 5 / 3, places=10)

        actions, deposits = sample_episodes(2, probs, 10 ** 6, numpy.random.default_rng(2))

        for samples, expected in ((actions, stats.expected_actions[0]),
                                  (deposits, stats.expected_deposits[0])):
            stderr = samples.std(ddof=1) / numpy.sqrt(len(samples))
            self.assertLess(abs(samples.mean() - expected), 3 * stderr)

    def test_unreachable_goal(self):
        """Check if it fails when the goal is never reached"""

        mdp = build_transfer_mdp(2, [action('grasp-0', (1.0,))], RewardParams(2))
        policy = Policy({0: 'grasp-0', 1: 'grasp-0'})

        with self.assertRaises(UnreachableGoalError) as context:
            exact_policy_stats(mdp, policy)
        self.assertListEqual(context.exception.states, [0, 1])

        with self.assertRaises(UnreachableGoalError):
            evaluate_policy(mdp, policy, discount=1.0)

    def test_enumerate_policies(self):
        """Check every stationary policy is generated once"""

        actions = [action('grasp-1', (0.0, 1.0), 1), action('grasp-2', (0.0, 0.0, 1.0), 2)]
        mdp = build_transfer_mdp(3, actions, RewardParams(3))

        policies = [tuple(p.action_for[s] for s in range(3)) for p in enumerate_policies(mdp)]

        self.assertEqual(len(policies), 8)
        self.assertEqual(len(set(policies)), 8)


if __name__ == '__main__':
    unittest.main()
