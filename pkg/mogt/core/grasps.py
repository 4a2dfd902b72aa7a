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

"""Pre-grasp statistics and selection pipelines.

The potential pre-grasp value (PPG) of a pre-grasp is the distribution
of the number of objects held after running the grasping routine from
it; the average grasp potential (AGP) is its expectation. The success
rate of a grasp type (SRG) is the same distribution computed over the
trials ending in an end-grasp cluster.
"""

import dataclasses
import enum
import logging
import math
import typing

import numpy

from . import settings
from .cluster import ElbowResult, cluster_with_elbow, nearest
from .errors import EmptySelectionError, NotFoundError
from .models import ObjectSpec, OutcomeDistribution, PreGrasp
from .utils import (validate_non_negative_int,
                    validate_positive_int,
                    validate_probability,
                    validate_real)


logger = logging.getLogger(__name__)


@enum.unique
class Smoothing(enum.Enum):
    NONE = 'none'
    ADD_ONE = 'add-one'

    def __str__(self):
        return self.value


@enum.unique
class CriterionKind(enum.Enum):
    TARGET_QUANTITY = 'target-quantity'
    AGP = 'agp'


@dataclasses.dataclass(frozen=True)
class Criterion:
    """Statistic used to rank pre-grasps"""

    kind: CriterionKind
    quantity: typing.Optional[int] = None

    def __post_init__(self):
        if self.kind == CriterionKind.TARGET_QUANTITY:
            validate_positive_int('quantity', self.quantity)
        elif self.quantity is not None:
            raise ValueError("'quantity' is only valid for target quantity criteria")

    @classmethod
    def target_quantity(cls, quantity):
        return cls(CriterionKind.TARGET_QUANTITY, quantity)

    @classmethod
    def agp(cls):
        return cls(CriterionKind.AGP)

    def statistic(self, distribution):
        if self.kind == CriterionKind.AGP:
            return compute_agp(distribution)
        return distribution.probability(self.quantity)

    def __str__(self):
        if self.kind == CriterionKind.AGP:
            return 'AGP'
        return 'p{}'.format(self.quantity)


@dataclasses.dataclass(frozen=True)
class Candidate:
    """Cluster centroid evaluated as a pre-grasp"""

    centroid: typing.Tuple[float, ...]
    pregrasp: PreGrasp
    distribution: OutcomeDistribution
    statistic: float


@dataclasses.dataclass(frozen=True)
class Selection:
    """Pre-grasp selected by a clustering pipeline.

    `pregrasp` is the tested pre-grasp nearest to the winning centroid;
    its trials provide `distribution`. `ranking` holds every centroid
    sorted by the criterion statistic.
    """
    name: str
    criterion: Criterion
    spread_deg: float
    threshold: float
    survivors: int
    elbow: ElbowResult
    ranking: typing.Tuple[Candidate, ...]
    object_spec: ObjectSpec

    @property
    def best(self):
        return self.ranking[0]

    @property
    def pregrasp(self):
        return self.best.pregrasp

    @property
    def distribution(self):
        return self.best.distribution

    @property
    def agp(self):
        return compute_agp(self.best.distribution)


@dataclasses.dataclass(frozen=True)
class FlexionSynergy:
    """Joint trajectory from a pre-grasp to its end-grasp.

    Besides the trajectory, it keeps the end-grasp clustering it was
    derived from: the size of every cluster of successful end-grasps and
    the SRG of every cluster over all the trials of the pre-grasp.
    """
    pregrasp: PreGrasp
    end_grasp: typing.Tuple[float, ...]
    trajectory: typing.Tuple[typing.Tuple[float, ...], ...]
    target_quantity: int
    cluster_index: int
    cluster_sizes: typing.Tuple[int, ...]
    srg: typing.Tuple[OutcomeDistribution, ...]
    elbow: ElbowResult


def generate_pregrasp_grid(spread_step=settings.SPREAD_STEP, finger_step=settings.FINGER_STEP,
                           spread_range=settings.SPREAD_RANGE, finger_range=settings.FINGER_RANGE):
    """Generate the uniform pre-grasp grid.

    The grid is the Cartesian product of spread, left finger and right
    finger angles, both ends included, ordered spread first.

    :param spread_step: spread angle step, in degrees
    :param finger_step: finger base angle step, in degrees

    :returns: list of `PreGrasp` with consecutive ids starting at 0

    :raises ValueError: when a step is not positive or does not divide
        its range evenly
    """
    spreads = _grid_axis('spread_step', spread_step, spread_range)
    fingers = _grid_axis('finger_step', finger_step, finger_range)

    grid = []
    for spread in spreads:
        for left in fingers:
            for right in fingers:
                grid.append(PreGrasp(len(grid), spread, left, right))
    return grid


def compute_ppg(trials, m_max=settings.HAND_CAPACITY):
    """Potential pre-grasp value of the trials run from one pre-grasp.

    :raises ValueError: when the list is empty or the trials come from
        different pre-grasps
    """
    trials = list(trials)
    if not trials:
        raise ValueError("'trials' cannot be empty")
    ids = {trial.pregrasp_id for trial in trials}
    if len(ids) > 1:
        raise ValueError("trials must share the pre-grasp; {} given".format(sorted(ids)))

    return _frequencies(trials, m_max)


def compute_agp(ppg):
    """Average grasp potential: expected number of grasped objects"""

    return math.fsum(i * p for i, p in enumerate(ppg.probs))


def compute_srg(trials, m_max=settings.HAND_CAPACITY):
    """Success rate of an end-grasp cluster for every number of objects"""

    trials = list(trials)
    if not trials:
        raise ValueError("end-grasp cluster cannot be empty")
    return _frequencies(trials, m_max)


def estimate_distribution(trials, m_max=settings.HAND_CAPACITY, smoothing=Smoothing.NONE):
    """Estimate an outcome distribution from grasp trials.

    :param trials: trials of one pre-grasp and routine
    :param m_max: largest number of objects
    :param smoothing: `Smoothing.ADD_ONE` adds a pseudo-count to
        every quantity from 0 to `m_max`
    """
    trials = list(trials)
    if not trials:
        raise ValueError("'trials' cannot be empty")
    smoothing = Smoothing(smoothing)

    counts = _counts(trials, m_max)
    if smoothing == Smoothing.ADD_ONE:
        counts = counts + 1
    return OutcomeDistribution.from_counts(counts)


def compute_ppg_table(trialset):
    """PPG and AGP of every tested pre-grasp.

    :returns: list of `(pregrasp, ppg, agp)` tuples sorted by id
    """
    table = []
    for pregrasp in trialset.tested_pregrasps():
        ppg = compute_ppg(trialset.trials_for(pregrasp.id), trialset.m_max)
        table.append((pregrasp, ppg, compute_agp(ppg)))
    return table


def select_best_spread(trialset, criterion):
    """Spread whose pre-grasps have the best average statistic.

    Ties go to the smallest spread.

    :raises ValueError: when there are no trials
    """
    if len(trialset) == 0:
        raise ValueError("'trials' cannot be empty")

    groups = {}
    for pregrasp, ppg, _ in compute_ppg_table(trialset):
        groups.setdefault(pregrasp.spread_deg, []).append(criterion.statistic(ppg))

    best_spread, best_mean = None, -math.inf
    for spread in sorted(groups):
        mean = math.fsum(groups[spread]) / len(groups[spread])
        if mean > best_mean:
            best_spread, best_mean = spread, mean

    logger.debug("best spread for %s is %s (mean %.6g)", criterion, best_spread, best_mean)

    return best_spread


def select_cppg(trialset, target_q, seed=0, evaluation=None, **options):
    """Select the clustered-probability-based pre-grasp for `target_q` objects.

    See `select_pregrasp` for the pipeline and the accepted options.
    """
    validate_positive_int('target_q', target_q)
    if target_q > trialset.m_max:
        raise ValueError("'target_q' cannot exceed the hand capacity {}".format(trialset.m_max))

    return select_pregrasp('cppg', trialset, Criterion.target_quantity(target_q),
                           seed=seed, evaluation=evaluation, **options)


def select_bepg(trialset, seed=0, evaluation=None, **options):
    """Select the best expectation pre-grasp.

    See `select_pregrasp` for the pipeline and the accepted options.
    """
    return select_pregrasp('bepg', trialset, Criterion.agp(),
                           seed=seed, evaluation=evaluation, **options)


def select_pregrasp(name, trialset, criterion, seed=0, evaluation=None,
                    keep_fraction=settings.FILTER_KEEP_FRACTION,
                    min_statistic=settings.FILTER_MIN_STATISTIC,
                    max_k=settings.ELBOW_MAX_K,
                    object_spec=ObjectSpec()):
    """Select a pre-grasp by spread, filtering and clustering.

    The pipeline picks the spread with the best average statistic,
    keeps the top `keep_fraction` of its pre-grasps whose statistic is
    above `min_statistic`, clusters their configurations with k-means
    (elbow-selected `k`) and evaluates every centroid with the trials
    of its nearest tested pre-grasp, taken from `evaluation` when given.
    The centroid with the best statistic wins.

    :param name: name of the selection (e.g., 'cppg')
    :param trialset: `TrialSet` with the grid trials
    :param criterion: `Criterion` ranking the pre-grasps
    :param seed: seed for the clustering
    :param evaluation: optional `TrialSet` to evaluate the centroids

    :returns: a `Selection`

    :raises EmptySelectionError: when no pre-grasp survives the filter
    """
    validate_non_negative_int('seed', seed)
    validate_probability('keep_fraction', keep_fraction)
    validate_real('min_statistic', min_statistic)
    if keep_fraction == 0:
        raise ValueError("'keep_fraction' must be greater than 0")

    spread = select_best_spread(trialset, criterion)
    scored = [(criterion.statistic(ppg), pregrasp)
              for pregrasp, ppg, _ in compute_ppg_table(trialset)
              if pregrasp.spread_deg == spread]
    scored.sort(key=lambda item: (-item[0], item[1].id))

    kept = scored[:max(1, math.ceil(len(scored) * keep_fraction))]
    threshold = max(kept[-1][0], min_statistic)
    survivors = [pregrasp for statistic, pregrasp in kept if statistic > min_statistic]
    if not survivors:
        raise EmptySelectionError(criterion=str(criterion), threshold=_format_number(threshold))

    logger.info("%s: spread %s, %s of %s pre-grasps kept (threshold %.6g)",
                name, spread, len(survivors), len(scored), threshold)

    elbow = cluster_with_elbow([pg.configuration for pg in survivors], seed=seed, max_k=max_k)

    evaluation = evaluation if evaluation is not None else trialset
    tested = evaluation.tested_pregrasps()
    if not tested:
        raise ValueError("evaluation trials cannot be empty")
    closest = nearest(elbow.best.centroids, [pg.configuration for pg in tested])

    candidates = []
    for index, centroid in enumerate(elbow.best.centroids):
        pregrasp = tested[closest[index]]
        distribution = compute_ppg(evaluation.trials_for(pregrasp.id), evaluation.m_max)
        candidates.append((index, Candidate(centroid=tuple(float(c) for c in centroid),
                                            pregrasp=pregrasp,
                                            distribution=distribution,
                                            statistic=criterion.statistic(distribution))))
    candidates.sort(key=lambda item: (-item[1].statistic, item[0]))

    selection = Selection(name=name,
                          criterion=criterion,
                          spread_deg=spread,
                          threshold=threshold,
                          survivors=len(survivors),
                          elbow=elbow,
                          ranking=tuple(candidate for _, candidate in candidates),
                          object_spec=object_spec)

    logger.info("%s: selected pre-grasp %s (%s=%.6g)", name, selection.pregrasp.id,
                criterion, selection.best.statistic)

    return selection


def select_end_grasp(trialset, pregrasp_id, target_q, seed=0,
                     steps=settings.SYNERGY_STEPS, max_k=settings.ELBOW_MAX_K):
    """Select the end-grasp of a pre-grasp and its flexion synergy.

    End configurations of the trials holding `target_q` objects are
    clustered with k-means (elbow-selected `k`); the centroid of the most
    populated cluster is the end-grasp. The SRG of every cluster is
    computed over all the trials of the pre-grasp, each one assigned to
    its nearest centroid.

    :param trialset: `TrialSet` with end configurations
    :param pregrasp_id: pre-grasp the trials were run from
    :param target_q: number of objects the grasp aims at
    :param seed: seed for the clustering
    :param steps: number of interpolation steps of the synergy

    :returns: a `FlexionSynergy`

    :raises NotFoundError: when the pre-grasp is unknown or none of its
        trials held `target_q` objects
    """
    validate_positive_int('target_q', target_q)
    validate_positive_int('steps', steps)

    if pregrasp_id not in trialset.pregrasps:
        raise NotFoundError(entity='Pre-grasp {}'.format(pregrasp_id))
    pregrasp = trialset.pregrasps[pregrasp_id]

    trials = trialset.trials_for(pregrasp_id)
    successes = [trial for trial in trials if trial.outcome_count == target_q]
    if not successes:
        raise NotFoundError(entity='Trial of pre-grasp {} holding {} objects'.format(pregrasp_id, target_q))
    if len(successes[0].end_config_deg) != len(pregrasp.configuration):
        msg = "end configurations must have {} joints; {} given".format(
            len(pregrasp.configuration), len(successes[0].end_config_deg))
        raise ValueError(msg)

    elbow = cluster_with_elbow([trial.end_config_deg for trial in successes], seed=seed, max_k=max_k)
    sizes = elbow.best.sizes()
    chosen = int(numpy.argmax(sizes))
    end_grasp = tuple(float(a) for a in elbow.best.centroids[chosen])

    closest = nearest([trial.end_config_deg for trial in trials], elbow.best.centroids)
    srg = []
    for index in range(elbow.k):
        members = [trial for trial, c in zip(trials, closest) if c == index]
        srg.append(compute_srg(members, trialset.m_max))

    logger.info("end-grasp of pre-grasp %s for %s objects: cluster %s of %s (%s members)",
                pregrasp_id, target_q, chosen, elbow.k, sizes[chosen])

    return FlexionSynergy(pregrasp=pregrasp,
                          end_grasp=end_grasp,
                          trajectory=interpolate_synergy(pregrasp.configuration, end_grasp, steps),
                          target_quantity=target_q,
                          cluster_index=chosen,
                          cluster_sizes=tuple(int(s) for s in sizes),
                          srg=tuple(srg),
                          elbow=elbow)


def interpolate_synergy(start, end, steps=settings.SYNERGY_STEPS):
    """Linear joint-space path from `start` to `end`, both included"""

    validate_positive_int('steps', steps)
    start = numpy.asarray(start, dtype=float)
    end = numpy.asarray(end, dtype=float)
    if start.shape != end.shape:
        raise ValueError("configurations must have the same number of joints")

    path = [start + (end - start) * (i / steps) for i in range(steps)]
    path.append(end)
    return tuple(tuple(float(a) for a in point) for point in path)


def _grid_axis(name, step, bounds):
    validate_real(name, step)
    if step <= 0:
        raise ValueError("'{}' must be greater than 0".format(name))

    lower, upper = bounds
    intervals = (upper - lower) / step
    if abs(intervals - round(intervals)) > 1e-9:
        raise ValueError("'{}' must divide the range [{}, {}] evenly".format(name, lower, upper))
    return [float(v) for v in numpy.linspace(lower, upper, int(round(intervals)) + 1)]


def _counts(trials, m_max):
    validate_positive_int('m_max', m_max)
    counts = numpy.zeros(m_max + 1)
    for trial in trials:
        if trial.outcome_count > m_max:
            msg = "'outcome_count' {} exceeds hand capacity {}".format(trial.outcome_count, m_max)
            raise ValueError(msg)
        counts[trial.outcome_count] += 1
    return counts


def _frequencies(trials, m_max):
    return OutcomeDistribution.from_counts(_counts(trials, m_max))


def _format_number(value):
    return '{:.6g}'.format(value)
