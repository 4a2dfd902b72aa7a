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

"""Experiment configuration files.

Experiments are described in YAML files. See `config/experiments/transfer.yml`
for a commented example of every field.
"""

import dataclasses
import logging
import os
import typing

import yaml

from . import settings
from .errors import InvalidValueError, NotFoundError, ParseError
from .grasps import Smoothing, estimate_distribution
from .models import GraspAction, OutcomeDistribution, OvershootMode, RewardParams
from .reader import read_trials
from .sensors import SensorModel
from .simulator import EnvironmentConfig, Routine
from .utils import (validate_name,
                    validate_non_negative_int,
                    validate_positive_int)


logger = logging.getLogger(__name__)


SCHEMA_VERSION = 1
MAX_QUANTITY = 'max'

_TOP_LEVEL_KEYS = {
    'schema_version', 'target', 'seed', 'episodes', 'capacity', 'discount',
    'epsilon', 'max_iterations', 'overshoot_mode', 'reward', 'routine',
    'simulation', 'sensor', 'actions',
}
_SIMULATION_KEYS = {
    'max_regrasps', 'timesteps_per_attempt', 'drop_on_lift_prob',
    'episode_cap', 'target_anytime',
}


@dataclasses.dataclass(frozen=True)
class ActionSpec:
    """Action of an experiment with one distribution per routine"""

    id: str
    target_quantity: typing.Optional[int]
    distributions: typing.Mapping[Routine, OutcomeDistribution]

    def action(self, routine):
        return GraspAction(self.id, self.target_quantity, self.distributions[routine])


@dataclasses.dataclass(frozen=True)
class ExperimentConfig:
    source: str
    target_n: int
    actions: typing.Tuple[ActionSpec, ...]
    reward_params: RewardParams
    seed: typing.Optional[int] = None
    episodes: typing.Optional[int] = None
    capacity: int = settings.NAIVE_CAPACITY
    discount: float = settings.DISCOUNT
    epsilon: float = settings.EPSILON
    max_iterations: int = settings.MAX_ITERATIONS
    overshoot_mode: OvershootMode = OvershootMode.EXECUTION_CONSISTENT
    routine: Routine = Routine.MODEL
    sensor: SensorModel = dataclasses.field(default_factory=SensorModel.perfect)
    max_regrasps: int = settings.MAX_REGRASPS
    timesteps_per_attempt: int = settings.TIMESTEPS_PER_ATTEMPT
    drop_on_lift_prob: float = settings.DROP_ON_LIFT_PROB
    episode_cap: int = settings.EPISODE_CAP
    target_anytime: bool = False

    def actions_for(self, routine=None):
        routine = Routine(routine) if routine is not None else self.routine
        return tuple(spec.action(routine) for spec in self.actions)

    def environment(self, routine=None):
        """Simulation environment of the experiment for `routine`"""

        routine = Routine(routine) if routine is not None else self.routine
        return EnvironmentConfig(actions=self.actions_for(routine),
                                 sensor=self.sensor,
                                 routine=routine,
                                 max_regrasps=self.max_regrasps,
                                 timesteps_per_attempt=self.timesteps_per_attempt,
                                 drop_on_lift_prob=self.drop_on_lift_prob,
                                 episode_cap=self.episode_cap,
                                 target_anytime=self.target_anytime)

    def require_stochastic(self, seed=None):
        """Check the fields needed by stochastic commands are set.

        :param seed: seed overriding the one of the config
        """
        if seed is None and self.seed is None:
            raise InvalidValueError(msg="{}: 'seed' is required to simulate".format(self.source))
        if self.episodes is None:
            raise InvalidValueError(msg="{}: 'episodes' is required to simulate".format(self.source))


def load_config(path):
    """Load an experiment configuration from a YAML file.

    :raises NotFoundError: when the file or a trial file does not exist
    :raises ParseError: when the file is not valid UTF-8 or YAML
    :raises InvalidValueError: when the contents do not follow the schema
    """
    if not os.path.isfile(path):
        raise NotFoundError(entity='Config file {}'.format(path))

    with open(path, 'rb') as fd:
        data = fd.read()

    try:
        text = data.decode('utf-8')
    except UnicodeDecodeError as exc:
        line = data.count(b'\n', 0, exc.start) + 1
        msg = "invalid UTF-8 data at byte {}: {}".format(exc.start, exc.reason)
        raise ParseError(source=str(path), line=line, msg=msg)

    return parse_config(text, source=str(path), basedir=os.path.dirname(os.path.abspath(path)))


def parse_config(text, source='<string>', basedir='.'):
    """Parse the YAML text of an experiment configuration"""

    try:
        data = yaml.safe_load(text)
    except yaml.MarkedYAMLError as exc:
        line = exc.problem_mark.line + 1 if exc.problem_mark else 1
        raise ParseError(source=source, line=line, msg=exc.problem or str(exc))
    except yaml.YAMLError as exc:
        raise ParseError(source=source, line=1, msg=str(exc))

    try:
        config = _build_config(data, source, basedir)
    except (TypeError, ValueError) as exc:
        raise InvalidValueError(msg="{}: {}".format(source, exc))

    logger.debug("config %s loaded: target %s, %s actions", source, config.target_n, len(config.actions))

    return config


def _build_config(data, source, basedir):
    if not isinstance(data, dict):
        raise ValueError("config must be a mapping")

    unknown = sorted(set(data) - _TOP_LEVEL_KEYS)
    if unknown:
        raise ValueError("unknown fields {}".format(', '.join(unknown)))

    version = data.get('schema_version', SCHEMA_VERSION)
    if version != SCHEMA_VERSION:
        raise ValueError("unsupported 'schema_version' {}".format(version))

    if 'target' not in data:
        raise ValueError("'target' is required")
    target_n = data['target']
    validate_positive_int('target', target_n)

    seed = data.get('seed')
    if seed is not None:
        validate_non_negative_int('seed', seed)
    episodes = data.get('episodes')
    if episodes is not None:
        validate_positive_int('episodes', episodes)

    reward = data.get('reward') or {}
    _check_keys('reward', reward, {'goal_reward', 'overshoot_penalty', 'shortfall_weight'})
    params = RewardParams(target_n=target_n,
                          goal_reward=float(reward.get('goal_reward', settings.GOAL_REWARD)),
                          overshoot_penalty=float(reward.get('overshoot_penalty', settings.OVERSHOOT_PENALTY)),
                          shortfall_weight=float(reward.get('shortfall_weight', settings.SHORTFALL_WEIGHT)))

    simulation = data.get('simulation') or {}
    _check_keys('simulation', simulation, _SIMULATION_KEYS)
    target_anytime = simulation.get('target_anytime', False)
    if not isinstance(target_anytime, bool):
        raise TypeError("'target_anytime' must be a boolean")

    actions = data.get('actions')
    if not actions or not isinstance(actions, list):
        raise ValueError("'actions' must be a non-empty list")
    specs = tuple(_build_action(entry, source, basedir) for entry in actions)
    ids = [spec.id for spec in specs]
    if len(set(ids)) != len(ids):
        raise ValueError("action ids must be unique; {} given".format(ids))

    config = ExperimentConfig(source=source,
                              target_n=target_n,
                              actions=specs,
                              reward_params=params,
                              seed=seed,
                              episodes=episodes,
                              capacity=data.get('capacity', settings.NAIVE_CAPACITY),
                              discount=float(data.get('discount', settings.DISCOUNT)),
                              epsilon=float(data.get('epsilon', settings.EPSILON)),
                              max_iterations=data.get('max_iterations', settings.MAX_ITERATIONS),
                              overshoot_mode=OvershootMode(data.get('overshoot_mode',
                                                                    OvershootMode.EXECUTION_CONSISTENT.value)),
                              routine=Routine(data.get('routine', Routine.MODEL.value)),
                              sensor=_build_sensor(data.get('sensor') or {}),
                              max_regrasps=simulation.get('max_regrasps', settings.MAX_REGRASPS),
                              timesteps_per_attempt=simulation.get('timesteps_per_attempt',
                                                                   settings.TIMESTEPS_PER_ATTEMPT),
                              drop_on_lift_prob=float(simulation.get('drop_on_lift_prob',
                                                                     settings.DROP_ON_LIFT_PROB)),
                              episode_cap=simulation.get('episode_cap', settings.EPISODE_CAP),
                              target_anytime=target_anytime)

    validate_positive_int('capacity', config.capacity)
    validate_positive_int('max_iterations', config.max_iterations)
    # builds the environment of every routine to validate it
    for routine in Routine:
        config.environment(routine)

    return config


def _build_action(entry, source, basedir):
    if not isinstance(entry, dict):
        raise ValueError("every action must be a mapping")
    _check_keys('action', entry, {'id', 'quantity', 'distribution', 'distributions', 'trials'})

    action_id = entry.get('id')
    validate_name(action_id)

    quantity = entry.get('quantity')
    if quantity == MAX_QUANTITY:
        quantity = None
    else:
        validate_positive_int('quantity', quantity)

    sources = [key for key in ('distribution', 'distributions', 'trials') if key in entry]
    if len(sources) != 1:
        msg = "action '{}' needs exactly one of 'distribution', 'distributions' or 'trials'".format(action_id)
        raise ValueError(msg)

    if 'distribution' in entry:
        distribution = OutcomeDistribution(tuple(entry['distribution']))
        distributions = {routine: distribution for routine in Routine}
    elif 'distributions' in entry:
        values = entry['distributions']
        _check_keys('distributions', values, {r.value for r in Routine})
        missing = [r.value for r in Routine if r.value not in values]
        if missing:
            raise ValueError("action '{}' misses distributions for {}".format(action_id, ', '.join(missing)))
        distributions = {r: OutcomeDistribution(tuple(values[r.value])) for r in Routine}
    else:
        distribution = _trials_distribution(action_id, entry['trials'], source, basedir)
        distributions = {routine: distribution for routine in Routine}

    return ActionSpec(action_id, quantity, distributions)


def _trials_distribution(action_id, spec, source, basedir):
    _check_keys('trials', spec, {'file', 'pregrasp_id', 'smoothing'})
    if 'file' not in spec or 'pregrasp_id' not in spec:
        raise ValueError("'trials' of action '{}' needs 'file' and 'pregrasp_id'".format(action_id))

    path = spec['file']
    if not os.path.isabs(path):
        path = os.path.join(basedir, path)
    if not os.path.isfile(path):
        raise NotFoundError(entity='Trial file {}'.format(spec['file']))

    trialset = read_trials(path)
    trials = trialset.trials_for(spec['pregrasp_id'])
    if not trials:
        raise ValueError("no trials for pre-grasp {} in {}".format(spec['pregrasp_id'], spec['file']))

    return estimate_distribution(trials, trialset.m_max, Smoothing(spec.get('smoothing', 'none')))


def _build_sensor(spec):
    _check_keys('sensor', spec, {'preset', 'rates'})
    sensor = SensorModel.preset(spec.get('preset', 'perfect'))
    rates = spec.get('rates') or {}
    for values in rates.values():
        _check_keys('rates', values, {'tpr', 'fpr'})
    return sensor.with_overrides(rates)


def _check_keys(name, mapping, allowed):
    if not isinstance(mapping, dict):
        raise ValueError("'{}' must be a mapping".format(name))
    unknown = sorted(set(mapping) - allowed)
    if unknown:
        raise ValueError("unknown '{}' fields {}".format(name, ', '.join(unknown)))
