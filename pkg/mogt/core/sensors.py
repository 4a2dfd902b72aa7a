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

"""Stochastic stand-in for the grasped-quantity estimators.

Every estimator answers a yes/no question about the number of objects
in the hand at each timestep of a grasp attempt. Answers are independent
Bernoulli draws: an estimator fires with its true positive rate when the
question holds and with its false positive rate otherwise.

The voting rule lifts the hand once the non-zero estimator has fired on
`VOTING_STREAK` consecutive timesteps and the target estimator fires on
the last of them. With `target_anytime`, the target estimator may have
fired on any timestep up to that one.
"""

import dataclasses
import enum
import logging
import typing

import numpy

from . import settings
from .utils import validate_non_negative_int, validate_positive_int, validate_probability


logger = logging.getLogger(__name__)


NO_LIFT = None


@enum.unique
class Estimator(enum.Enum):
    NONZERO = 'nonzero'
    ONE = 'one'
    TWO = 'two'
    THREE = 'three'
    GEQ2 = 'geq2'

    def holds(self, count):
        """Whether the estimator question is true for `count` objects"""

        if self == Estimator.NONZERO:
            return count > 0
        if self == Estimator.GEQ2:
            return count >= 2
        return count == _EXACT_QUANTITIES[self]

    @classmethod
    def for_action(cls, action):
        """Target estimator checked before lifting with `action`"""

        if action.is_max:
            return cls.GEQ2
        for estimator, quantity in _EXACT_QUANTITIES.items():
            if quantity == action.target_quantity:
                return estimator
        msg = "no estimator for actions grasping {} objects".format(action.target_quantity)
        raise ValueError(msg)

    def __str__(self):
        return self.value


_EXACT_QUANTITIES = {
    Estimator.ONE: 1,
    Estimator.TWO: 2,
    Estimator.THREE: 3,
}


# Precision of the estimation models on simulated and on real grasps
SIMULATION_PRECISIONS = {
    Estimator.NONZERO: 0.951,
    Estimator.ONE: 0.8597,
    Estimator.TWO: 0.6718,
    Estimator.THREE: 0.4095,
    Estimator.GEQ2: 0.7897,
}

REAL_PRECISIONS = {
    Estimator.NONZERO: 0.9609,
    Estimator.ONE: 0.5172,
    Estimator.TWO: 0.5146,
    Estimator.THREE: 0.3824,
    Estimator.GEQ2: 0.8304,
}


@dataclasses.dataclass(frozen=True)
class EstimatorRates:
    true_positive_rate: float
    false_positive_rate: float

    def __post_init__(self):
        validate_probability('true_positive_rate', self.true_positive_rate)
        validate_probability('false_positive_rate', self.false_positive_rate)

    def firing_probability(self, holds):
        return self.true_positive_rate if holds else self.false_positive_rate


@dataclasses.dataclass(frozen=True)
class SensorModel:
    """True and false positive rates of every estimator"""

    rates: typing.Mapping[Estimator, EstimatorRates]

    def __post_init__(self):
        rates = {Estimator(e): r for e, r in self.rates.items()}
        missing = [str(e) for e in Estimator if e not in rates]
        if missing:
            raise ValueError("missing rates for estimators {}".format(', '.join(missing)))
        object.__setattr__(self, 'rates', rates)

    @classmethod
    def from_precisions(cls, precisions):
        """Use precision as true positive rate and its complement as false positive rate"""

        return cls({e: EstimatorRates(p, 1.0 - p) for e, p in precisions.items()})

    @classmethod
    def perfect(cls):
        return cls({e: EstimatorRates(1.0, 0.0) for e in Estimator})

    @classmethod
    def simulation(cls):
        return cls.from_precisions(SIMULATION_PRECISIONS)

    @classmethod
    def real(cls):
        return cls.from_precisions(REAL_PRECISIONS)

    @classmethod
    def preset(cls, name):
        presets = {
            'perfect': cls.perfect,
            'simulation': cls.simulation,
            'real': cls.real,
        }
        if name not in presets:
            raise ValueError("unknown sensor preset '{}'; valid presets are {}".format(
                name, ', '.join(sorted(presets))))
        return presets[name]()

    def with_overrides(self, overrides):
        """Replace some of the rates.

        :param overrides: map of estimator to a dict with optional
            `tpr` and `fpr` keys
        """
        rates = dict(self.rates)
        for estimator, values in overrides.items():
            estimator = Estimator(estimator)
            current = rates[estimator]
            rates[estimator] = EstimatorRates(values.get('tpr', current.true_positive_rate),
                                              values.get('fpr', current.false_positive_rate))
        return SensorModel(rates)

    def firing_probability(self, estimator, count):
        return self.rates[estimator].firing_probability(estimator.holds(count))

    def sample_readings(self, estimator, count, timesteps, rng):
        """Draw the non-zero and target estimator streams of one attempt"""

        nonzero = rng.random(timesteps) < self.firing_probability(Estimator.NONZERO, count)
        target = rng.random(timesteps) < self.firing_probability(estimator, count)
        return nonzero, target


def voting_decide(nonzero_stream, target_stream, target_anytime=False, streak=settings.VOTING_STREAK):
    """Timestep when the voting rule lifts the hand.

    :param nonzero_stream: readings of the non-zero estimator
    :param target_stream: readings of the target estimator
    :param target_anytime: accept a target reading on any timestep up to
        the end of the streak
    :param streak: consecutive non-zero readings required

    :returns: the 1-based timestep of the lift or `NO_LIFT`

    :raises ValueError: when the streams have different lengths
    """
    validate_positive_int('streak', streak)
    if len(nonzero_stream) != len(target_stream):
        msg = "streams must have the same length; {} != {}".format(len(nonzero_stream), len(target_stream))
        raise ValueError(msg)

    run = 0
    seen = False
    for t, (nonzero, target) in enumerate(zip(nonzero_stream, target_stream), start=1):
        run = run + 1 if nonzero else 0
        seen = seen or bool(target)
        confirmed = seen if target_anytime else bool(target)
        if run >= streak and confirmed:
            return t
    return NO_LIFT


def trigger_probability(nonzero_prob, target_prob, timesteps,
                        target_anytime=False, streak=settings.VOTING_STREAK):
    """Probability that the voting rule lifts within `timesteps`.

    Readings are independent with per-timestep firing probabilities
    `nonzero_prob` and `target_prob`. The distribution over streak
    lengths (capped at `streak - 1`) and, with `target_anytime`, over
    whether the target estimator already fired, is propagated step by
    step.
    """
    validate_probability('nonzero_prob', nonzero_prob)
    validate_probability('target_prob', target_prob)
    validate_non_negative_int('timesteps', timesteps)
    validate_positive_int('streak', streak)

    # state[run, seen]
    state = numpy.zeros((streak, 2))
    state[0, 0] = 1.0
    triggered = 0.0

    a, b = nonzero_prob, target_prob
    for _ in range(timesteps):
        updated = numpy.zeros_like(state)
        for run in range(streak):
            for seen in (0, 1):
                mass = state[run, seen]
                if mass == 0.0:
                    continue
                for fired, p_target in ((1, b), (0, 1.0 - b)):
                    seen_now = 1 if (seen or fired) else 0
                    confirmed = seen_now if target_anytime else fired
                    # non-zero estimator fires
                    if run == streak - 1 and confirmed:
                        triggered += mass * a * p_target
                    else:
                        updated[min(run + 1, streak - 1), seen_now] += mass * a * p_target
                    updated[0, seen_now] += mass * (1.0 - a) * p_target
        state = updated

    return triggered
