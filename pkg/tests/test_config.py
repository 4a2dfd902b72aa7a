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

import os
import shutil
import tempfile
import unittest

from mogt.core.config import load_config, parse_config
from mogt.core.errors import InvalidValueError, NotFoundError, ParseError
from mogt.core.models import OvershootMode
from mogt.core.sensors import Estimator, EstimatorRates
from mogt.core.simulator import Routine


MINIMAL = """
target: 3
actions:
  - id: grasp-1
    quantity: 1
    distribution: [0.2, 0.8]
"""

UNKNOWN_FIELD_ERROR = "<string>: unknown fields colour"
MISSING_TARGET_ERROR = "<string>: 'target' is required"
ACTION_SOURCES_ERROR = "<string>: action 'grasp-1' needs exactly one of 'distribution', 'distributions' or 'trials'"
MISSING_DISTRIBUTIONS_ERROR = "<string>: action 'grasp-1' misses distributions for model"
UNKNOWN_SIMULATION_ERROR = "<string>: unknown 'simulation' fields max_regrasp"
ANYTIME_ERROR = "<string>: 'target_anytime' must be a boolean"
DUPLICATED_ACTIONS_ERROR = r"<string>: action ids must be unique"
SCHEMA_VERSION_ERROR = "<string>: unsupported 'schema_version' 2"
TRIAL_FILE_ERROR = "Trial file missing.tsv not found"
CONFIG_FILE_ERROR = "Config file .+nothing.yml not found"
SEED_REQUIRED_ERROR = "<string>: 'seed' is required to simulate"
EPISODES_REQUIRED_ERROR = "<string>: 'episodes' is required to simulate"
DECODE_ERROR = "line 3: invalid UTF-8 data at byte \d+: invalid start byte"


def datafile(name):
    return os.path.join(os.path.dirname(os.path.abspath(__file__)), 'data', name)


def experiments_file(name):
    root = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
    return os.path.join(root, 'config', 'experiments', name)


class TestLoadConfig(unittest.TestCase):
    """Unit tests for load_config"""

    def test_calibrated_experiment(self):
        """Check the shipped experiment is loaded"""

        config = load_config(experiments_file('transfer.yml'))

        self.assertEqual(config.target_n, 10)
        self.assertEqual(config.seed, 2021)
        self.assertEqual(config.episodes, 10000)
        self.assertEqual(config.capacity, 4)
        self.assertEqual(config.discount, 0.95)
        self.assertEqual(config.overshoot_mode, OvershootMode.EXECUTION_CONSISTENT)
        self.assertEqual(config.routine, Routine.MODEL)
        self.assertEqual(config.reward_params.goal_reward, 100000.0)
        self.assertEqual(config.sensor.rates[Estimator.NONZERO], EstimatorRates(0.951, 1 - 0.951))

        self.assertListEqual([spec.id for spec in config.actions],
                             ['grasp-1', 'grasp-2', 'grasp-3', 'grasp-max'])
        self.assertListEqual([spec.target_quantity for spec in config.actions], [1, 2, 3, None])

        env = config.environment()
        self.assertEqual(env.routine, Routine.MODEL)
        self.assertEqual(env.max_regrasps, 10)
        self.assertEqual(env.timesteps_per_attempt, 20)
        self.assertEqual(env.episode_cap, 200)
        self.assertTupleEqual(env.action('grasp-max').distribution.probs, (0.06, 0.16, 0.16, 0.42, 0.20))

    def test_trials_action(self):
        """Check distributions are estimated from trial files"""

        config = load_config(datafile('experiment.yml'))

        dist = config.environment().action('grasp-max').distribution
        self.assertEqual(dist.probability(0), 0.5)
        self.assertEqual(dist.probability(3), 0.5)
        self.assertEqual(config.routine, Routine.SFR)
        self.assertEqual(config.environment().max_regrasps, 5)

    def test_file_not_found(self):
        """Check if it fails when the file does not exist"""

        with self.assertRaisesRegex(NotFoundError, CONFIG_FILE_ERROR):
            load_config(datafile('nothing.yml'))

    def test_invalid_encoding(self):
        """Check undecodable bytes raise a parse error citing the line"""

        tmpdir = tempfile.mkdtemp()
        self.addCleanup(shutil.rmtree, tmpdir)
        path = os.path.join(tmpdir, 'latin.yml')
        with open(path, 'wb') as fd:
            fd.write(b"# grasps\n# of the\n# b\xffn\n" + MINIMAL.encode('utf-8'))

        with self.assertRaisesRegex(ParseError, DECODE_ERROR) as context:
            load_config(path)

        self.assertEqual(context.exception.line, 3)
        self.assertEqual(context.exception.source, path)


class TestParseConfig(unittest.TestCase):
    """Unit tests for parse_config"""

    def test_defaults(self):
        """Check the default values of optional fields"""

        config = parse_config(MINIMAL)

        self.assertEqual(config.source, '<string>')
        self.assertIsNone(config.seed)
        self.assertIsNone(config.episodes)
        self.assertEqual(config.capacity, 4)
        self.assertEqual(config.epsilon, 1e-6)
        self.assertEqual(config.routine, Routine.MODEL)
        self.assertEqual(config.sensor.rates[Estimator.TWO], EstimatorRates(1.0, 0.0))
        self.assertEqual(config.reward_params.overshoot_penalty, -1000.0)
        self.assertFalse(config.target_anytime)

    def test_routine_distributions(self):
        """Check actions can have a distribution per routine"""

        text = """
target: 3
routine: model
actions:
  - id: grasp-1
    quantity: 1
    distributions:
      sfr: [0.2, 0.8]
      model: [0.0, 1.0]
"""
        config = parse_config(text)

        self.assertEqual(config.actions_for(Routine.SFR)[0].distribution.probs, (0.2, 0.8))
        self.assertEqual(config.actions_for()[0].distribution.probs, (0.0, 1.0))
        self.assertEqual(config.environment('sfr').routine, Routine.SFR)

    def test_sensor_overrides(self):
        """Check single estimator rates can be overridden"""

        text = MINIMAL + """
sensor:
  preset: perfect
  rates:
    nonzero: {tpr: 0.9}
    geq2: {tpr: 0.8, fpr: 0.1}
"""
        config = parse_config(text)

        self.assertEqual(config.sensor.rates[Estimator.NONZERO], EstimatorRates(0.9, 0.0))
        self.assertEqual(config.sensor.rates[Estimator.GEQ2], EstimatorRates(0.8, 0.1))

    def test_trials_smoothing(self):
        """Check trial estimates can be smoothed"""

        text = """
target: 3
actions:
  - id: grasp-2
    quantity: 2
    trials: {file: trials_valid.tsv, pregrasp_id: 0, smoothing: add-one}
"""
        config = parse_config(text, basedir=os.path.dirname(datafile('trials_valid.tsv')))

        dist = config.actions_for()[0].distribution
        self.assertAlmostEqual(dist.probability(0), 1 / 9)
        self.assertAlmostEqual(dist.probability(2), 3 / 9)
        self.assertEqual(dist.max_quantity, 5)

    def test_yaml_error(self):
        """Check YAML errors cite the line"""

        with self.assertRaises(ParseError) as context:
            parse_config("target: 3\nseed: 1\nepisodes: 2\n  extra: 1\n")

        self.assertEqual(context.exception.line, 4)

    def test_invalid(self):
        """Check errors of invalid configurations"""

        action = "  - id: grasp-1\n    quantity: 1\n"
        cases = [
            (MINIMAL + "colour: blue\n", UNKNOWN_FIELD_ERROR),
            ("actions: []\n", MISSING_TARGET_ERROR),
            ("target: 3\nactions:\n" + action, ACTION_SOURCES_ERROR),
            ("target: 3\nactions:\n" + action + "    distribution: [0, 1]\n    trials: {}\n",
             ACTION_SOURCES_ERROR),
            ("target: 3\nactions:\n" + action + "    distributions: {sfr: [0, 1]}\n",
             MISSING_DISTRIBUTIONS_ERROR),
            (MINIMAL + "simulation: {max_regrasp: 3}\n", UNKNOWN_SIMULATION_ERROR),
            (MINIMAL + "simulation: {target_anytime: 'yes'}\n", ANYTIME_ERROR),
            (MINIMAL + action + "    distribution: [0, 1]\n", DUPLICATED_ACTIONS_ERROR),
            (MINIMAL + "schema_version: 2\n", SCHEMA_VERSION_ERROR),
        ]

        for text, error in cases:
            with self.assertRaisesRegex(InvalidValueError, error):
                parse_config(text)

    def test_invalid_values(self):
        """Check out of range values are rejected"""

        for extra in ("capacity: 0\n", "max_iterations: -1\n", "overshoot_mode: sometimes\n",
                      "reward: {overshoot_penalty: 5}\n", "sensor: {preset: noisy}\n"):
            with self.assertRaises(InvalidValueError):
                parse_config(MINIMAL + extra)

    def test_missing_trial_file(self):
        """Check if it fails when a trial file does not exist"""

        text = """
target: 3
actions:
  - id: grasp-1
    quantity: 1
    trials: {file: missing.tsv, pregrasp_id: 0}
"""
        with self.assertRaisesRegex(NotFoundError, TRIAL_FILE_ERROR):
            parse_config(text)

    def test_require_stochastic(self):
        """Check seed and episodes are required to simulate"""

        config = parse_config(MINIMAL)

        with self.assertRaisesRegex(InvalidValueError, SEED_REQUIRED_ERROR):
            config.require_stochastic()
        with self.assertRaisesRegex(InvalidValueError, EPISODES_REQUIRED_ERROR):
            config.require_stochastic(seed=3)

        config = parse_config(MINIMAL + "seed: 1\nepisodes: 10\n")
        config.require_stochastic()


if __name__ == '__main__':
    unittest.main()
