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
import enum
import math
import typing

import numpy

from . import settings
from .utils import (validate_angle,
                    validate_name,
                    validate_non_negative_int,
                    validate_positive_int,
                    validate_probabilities,
                    validate_real)


class Operation:
    """Record of an atomic step performed during a run.

    An `Operation` object keeps the original arguments of the
    function performing the operation, serialized in JSON format.

    :param ouid: unique identifier for the operation.
    :param op_type: type of the operation.
    :param entity_type: type of the entity produced or consumed by
        the operation (e.g., 'mdp', 'policy', 'pregrasp').
    :param target: identifier for the main object of the operation.
    :param run: parent `Run` object.
    :param timestamp: datetime when this operation is performed.
    :param args: main input arguments, serialized in JSON format.
    """
    class OpType(enum.Enum):
        SELECT = 'SELECT'
        BUILD = 'BUILD'
        SOLVE = 'SOLVE'
        EVALUATE = 'EVALUATE'
        SIMULATE = 'SIMULATE'
        COMPARE = 'COMPARE'

        def __str__(self):
            return self.value

    def __init__(self, ouid, run, op_type, entity_type, target, timestamp, args):
        self.ouid = ouid
        self.run = run
        self.op_type = op_type
        self.entity_type = entity_type
        self.target = target
        self.timestamp = timestamp
        self.args = args

    def __str__(self):
        return '%s - %s - %s - %s - %s' % (self.ouid, self.run, self.op_type, self.entity_type, self.target)


class Run:
    """Record of a command execution.

    Every run must have a unique identifier (`ruid`) and the
    name of the function opening it (`name`).

    :param ruid: unique identifier for the run.
    :param name: name of the function opening the run.
    :param created_at: datetime when the run is opened.
    :param source: where the inputs of the run come from.
    """
    def __init__(self, ruid, name, created_at, source=None):
        self.ruid = ruid
        self.name = name
        self.created_at = created_at
        self.source = source
        self.closed_at = None
        self.is_closed = False
        self.operations = []

    def __str__(self):
        return '%s - %s' % (self.ruid, self.name)


@enum.unique
class OvershootMode(enum.Enum):
    """How the transfer MDP treats grasps exceeding the target"""

    EXECUTION_CONSISTENT = 'execution-consistent'
    PAPER_LITERAL = 'paper-literal'

    def __str__(self):
        return self.value


@dataclasses.dataclass(frozen=True)
class RewardParams:
    """Parameters of the transfer reward.

    Landing on the target earns `goal_reward`, landing above it costs
    `overshoot_penalty` and any state below it costs the shortfall
    `n - s'` scaled by `shortfall_weight`.
    """
    target_n: int
    goal_reward: float = settings.GOAL_REWARD
    overshoot_penalty: float = settings.OVERSHOOT_PENALTY
    shortfall_weight: float = settings.SHORTFALL_WEIGHT

    def __post_init__(self):
        validate_positive_int('target_n', self.target_n)
        validate_real('goal_reward', self.goal_reward)
        validate_real('overshoot_penalty', self.overshoot_penalty)
        validate_real('shortfall_weight', self.shortfall_weight)
        if self.goal_reward <= 0:
            raise ValueError("'goal_reward' must be greater than 0")
        if self.overshoot_penalty >= 0:
            raise ValueError("'overshoot_penalty' must be lower than 0")
        if self.shortfall_weight < 0:
            raise ValueError("'shortfall_weight' cannot be negative")

    def scaled(self, factor):
        """Return a copy with every reward term multiplied by `factor`"""

        if factor <= 0:
            raise ValueError("'factor' must be greater than 0")
        return dataclasses.replace(self,
                                   goal_reward=self.goal_reward * factor,
                                   overshoot_penalty=self.overshoot_penalty * factor,
                                   shortfall_weight=self.shortfall_weight * factor)


@dataclasses.dataclass(frozen=True)
class OutcomeDistribution:
    """Probabilities `p_0..p_m` of holding `0..m` objects."""

    probs: typing.Tuple[float, ...]

    def __post_init__(self):
        probs = tuple(float(p) for p in self.probs)
        validate_probabilities('probs', probs, tolerance=settings.PROBABILITY_TOLERANCE)
        object.__setattr__(self, 'probs', probs)

    @classmethod
    def from_counts(cls, counts):
        """Normalize a vector of non-negative counts"""

        counts = [float(c) for c in counts]
        total = math.fsum(counts)
        if total <= 0:
            raise ValueError("'counts' must add up to a positive number")
        return cls(tuple(c / total for c in counts))

    @classmethod
    def point_mass(cls, quantity):
        """Distribution always yielding `quantity` objects"""

        validate_non_negative_int('quantity', quantity)
        probs = [0.0] * (quantity + 1)
        probs[quantity] = 1.0
        return cls(tuple(probs))

    @property
    def max_quantity(self):
        return len(self.probs) - 1

    def probability(self, quantity):
        if 0 <= quantity < len(self.probs):
            return self.probs[quantity]
        return 0.0

    def padded(self, size):
        """Return the probabilities as an array of length `size`"""

        if size < len(self.probs):
            if any(p > 0 for p in self.probs[size:]):
                raise ValueError("distribution has mass beyond quantity {}".format(size - 1))
            return numpy.array(self.probs[:size])
        return numpy.pad(numpy.array(self.probs), (0, size - len(self.probs)))

    def as_array(self):
        return numpy.array(self.probs)

    def mean(self):
        return math.fsum(i * p for i, p in enumerate(self.probs))


@dataclasses.dataclass(frozen=True)
class GraspAction:
    """A multi-object grasp, lift and transfer action.

    `target_quantity` is the number of objects the grasp aims at;
    `None` stands for the maximum capability grasp.
    """
    id: str
    target_quantity: typing.Optional[int]
    distribution: OutcomeDistribution

    def __post_init__(self):
        validate_name(self.id)
        if self.target_quantity is not None:
            validate_positive_int('target_quantity', self.target_quantity)
        if not isinstance(self.distribution, OutcomeDistribution):
            msg = "'distribution' must be an OutcomeDistribution; {} given".format(
                self.distribution.__class__.__name__)
            raise TypeError(msg)

    @property
    def is_max(self):
        return self.target_quantity is None

    def with_distribution(self, distribution):
        return dataclasses.replace(self, distribution=distribution)


@dataclasses.dataclass(frozen=True)
class ObjectSpec:
    """Geometry of the objects being transferred"""

    shape: str = 'sphere'
    radius_m: float = settings.OBJECT_RADIUS_M
    mass_kg: float = settings.OBJECT_MASS_KG

    def __post_init__(self):
        if self.shape != 'sphere':
            raise ValueError("'shape' must be 'sphere'; {} given".format(self.shape))
        validate_real('radius_m', self.radius_m)
        validate_real('mass_kg', self.mass_kg)
        if self.radius_m <= 0:
            raise ValueError("'radius_m' must be greater than 0")
        if self.mass_kg <= 0:
            raise ValueError("'mass_kg' must be greater than 0")


@dataclasses.dataclass(frozen=True)
class PreGrasp:
    """Ready hand configuration: spread and finger base angles, in degrees"""

    id: int
    spread_deg: float
    finger_left_deg: float
    finger_right_deg: float

    def __post_init__(self):
        validate_non_negative_int('id', self.id)
        validate_angle('spread_deg', self.spread_deg, *settings.SPREAD_RANGE)
        validate_angle('finger_left_deg', self.finger_left_deg, *settings.FINGER_RANGE)
        validate_angle('finger_right_deg', self.finger_right_deg, *settings.FINGER_RANGE)

    @property
    def configuration(self):
        return (self.spread_deg, self.finger_left_deg, self.finger_right_deg)


@dataclasses.dataclass(frozen=True)
class GraspTrial:
    """Result of running the grasping routine once from a pre-grasp"""

    pregrasp_id: int
    end_config_deg: typing.Tuple[float, ...]
    outcome_count: int

    def __post_init__(self):
        validate_non_negative_int('pregrasp_id', self.pregrasp_id)
        validate_non_negative_int('outcome_count', self.outcome_count)
        end_config = tuple(float(a) for a in self.end_config_deg)
        object.__setattr__(self, 'end_config_deg', end_config)


class TrialSet:
    """Grasp trials together with the pre-grasps they were run from.

    :param pregrasps: iterable of `PreGrasp`
    :param trials: iterable of `GraspTrial`
    :param m_max: hand capacity; no trial can hold more objects

    :raises ValueError: when a trial references an unknown pre-grasp,
        exceeds the hand capacity or when end configurations have
        different dimensions
    """
    def __init__(self, pregrasps, trials, m_max=settings.HAND_CAPACITY):
        validate_positive_int('m_max', m_max)

        self.m_max = m_max
        self.pregrasps = {}
        for pregrasp in pregrasps:
            if pregrasp.id in self.pregrasps and self.pregrasps[pregrasp.id] != pregrasp:
                raise ValueError("pre-grasp {} has inconsistent configurations".format(pregrasp.id))
            self.pregrasps[pregrasp.id] = pregrasp

        self.trials = tuple(trials)
        self._by_pregrasp = {}
        dims = set()
        for trial in self.trials:
            if trial.pregrasp_id not in self.pregrasps:
                raise ValueError("trial references unknown pre-grasp {}".format(trial.pregrasp_id))
            if trial.outcome_count > m_max:
                msg = "'outcome_count' {} exceeds hand capacity {}".format(trial.outcome_count, m_max)
                raise ValueError(msg)
            dims.add(len(trial.end_config_deg))
            self._by_pregrasp.setdefault(trial.pregrasp_id, []).append(trial)

        if len(dims) > 1:
            raise ValueError("end configurations have different dimensions: {}".format(sorted(dims)))

    def __len__(self):
        return len(self.trials)

    def trials_for(self, pregrasp_id):
        return list(self._by_pregrasp.get(pregrasp_id, []))

    def tested_pregrasps(self):
        """Pre-grasps with at least one trial, sorted by id"""

        return [self.pregrasps[pid] for pid in sorted(self._by_pregrasp)]

    def spreads(self):
        return sorted({pg.spread_deg for pg in self.tested_pregrasps()})

