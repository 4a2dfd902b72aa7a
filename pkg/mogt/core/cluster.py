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

import numpy
from scipy.spatial.distance import cdist

from . import settings
from .utils import validate_non_negative_int, validate_positive_int


logger = logging.getLogger(__name__)


@dataclasses.dataclass(frozen=True)
class ClusterResult:
    """Outcome of a k-means run.

    `inertia` is the sum of squared distances of the points to their
    assigned centroid and `distortion` its average over the points.
    `inertia_history` keeps the inertia after every assignment step.
    """
    k: int
    centroids: numpy.ndarray
    assignment: numpy.ndarray
    inertia: float
    distortion: float
    iterations: int
    inertia_history: typing.Tuple[float, ...]

    def members(self, index):
        return numpy.flatnonzero(self.assignment == index)

    def sizes(self):
        return numpy.bincount(self.assignment, minlength=self.k)


@dataclasses.dataclass(frozen=True)
class ElbowResult:
    """Clustering chosen by the elbow rule, with per-k diagnostics"""

    best: ClusterResult
    by_k: typing.Dict[int, ClusterResult]

    @property
    def k(self):
        return self.best.k


def kmeans(points, k, seed=0, max_iterations=settings.KMEANS_MAX_ITERATIONS):
    """Cluster `points` with Lloyd's algorithm.

    Centroids are initialized by greedy farthest-point selection starting
    from a point drawn with `seed`. Iterations stop when assignments no
    longer change or after `max_iterations`. Ties in the assignment go to
    the centroid with the lowest index.

    :param points: sequence of configuration vectors
    :param k: number of clusters
    :param seed: seed selecting the first centroid
    :param max_iterations: maximum number of Lloyd iterations

    :returns: a `ClusterResult`

    :raises ValueError: when `k` is lower than 1 or greater than the
        number of distinct points
    """
    validate_positive_int('k', k)
    validate_non_negative_int('seed', seed)
    validate_positive_int('max_iterations', max_iterations)

    data = _as_points(points)
    n_distinct = len(numpy.unique(data, axis=0))
    if k > n_distinct:
        msg = "'k' cannot exceed the number of distinct points; {} > {}".format(k, n_distinct)
        raise ValueError(msg)

    centroids = _farthest_point_init(data, k, seed)
    assignment, inertia = _assign(data, centroids)
    history = [inertia]

    iterations = 0
    for iterations in range(1, max_iterations + 1):
        centroids = _update(data, assignment, centroids)
        updated, inertia = _assign(data, centroids)
        history.append(inertia)
        if numpy.array_equal(updated, assignment):
            break
        assignment = updated
    else:
        logger.warning("k-means stopped after %s iterations without reaching a fixpoint", max_iterations)

    centroids.setflags(write=False)
    assignment.setflags(write=False)

    return ClusterResult(k=k,
                         centroids=centroids,
                         assignment=assignment,
                         inertia=inertia,
                         distortion=inertia / len(data),
                         iterations=iterations,
                         inertia_history=tuple(history))


def elbow_select_k(inertia_by_k):
    """Choose the number of clusters at the elbow of the inertia curve.

    The score of every `k` but the last is the change in the drop rate,
    `(I[k-1] - I[k]) - (I[k] - I[k+1])`; the first `k` scores zero. The
    `k` with the highest score wins and ties go to the smallest `k`.

    :param inertia_by_k: map of consecutive `k` values to inertia

    :raises ValueError: when fewer than three consecutive values are given
    """
    ks = sorted(inertia_by_k)
    if len(ks) < 3:
        raise ValueError("at least 3 values of 'k' are needed; {} given".format(len(ks)))
    if ks != list(range(ks[0], ks[0] + len(ks))):
        raise ValueError("values of 'k' must be consecutive; {} given".format(ks))

    best_k = ks[0]
    best_score = 0.0
    for i in range(1, len(ks) - 1):
        previous, current, following = (inertia_by_k[ks[j]] for j in (i - 1, i, i + 1))
        score = (previous - current) - (current - following)
        if score > best_score:
            best_k, best_score = ks[i], score

    return best_k


def cluster_with_elbow(points, seed=0, max_k=settings.ELBOW_MAX_K):
    """Run k-means for `k = 2..max_k` and keep the elbow clustering.

    When fewer than three values of `k` can be tried, the largest one
    is used; with three distinct points or less every point becomes
    its own cluster.

    :returns: an `ElbowResult`
    """
    data = _as_points(points)
    n_distinct = len(numpy.unique(data, axis=0))
    upper = min(max_k, n_distinct)

    if upper - 1 < 3:
        k = max(1, upper)
        logger.info("too few candidates for the elbow rule (%s distinct points); using k=%s", n_distinct, k)
        result = kmeans(data, k, seed=seed)
        return ElbowResult(best=result, by_k={k: result})

    by_k = {k: kmeans(data, k, seed=seed) for k in range(2, upper + 1)}
    k = elbow_select_k({k: result.inertia for k, result in by_k.items()})

    logger.debug("elbow selected k=%s from inertias %s", k,
                 {k: round(r.inertia, 6) for k, r in by_k.items()})

    return ElbowResult(best=by_k[k], by_k=by_k)


def nearest(points, targets):
    """Index of the nearest target of every point; ties go to the lowest index"""

    distances = cdist(_as_points(points), _as_points(targets), 'sqeuclidean')
    return distances.argmin(axis=1)


def _as_points(points):
    data = numpy.asarray(points, dtype=float)
    if data.ndim == 1:
        data = data.reshape(-1, 1)
    if data.ndim != 2 or len(data) == 0:
        raise ValueError("'points' must be a non-empty list of vectors")
    return data


def _farthest_point_init(data, k, seed):
    rng = numpy.random.default_rng(seed)
    chosen = [int(rng.integers(len(data)))]
    closest = cdist(data, data[chosen], 'sqeuclidean').min(axis=1)
    while len(chosen) < k:
        index = int(closest.argmax())
        chosen.append(index)
        closest = numpy.minimum(closest, cdist(data, data[[index]], 'sqeuclidean')[:, 0])
    return data[chosen].copy()


def _assign(data, centroids):
    distances = cdist(data, centroids, 'sqeuclidean')
    assignment = distances.argmin(axis=1)
    inertia = float(distances[numpy.arange(len(data)), assignment].sum())
    return assignment, inertia


def _update(data, assignment, centroids):
    updated = centroids.copy()
    for index in range(len(centroids)):
        members = data[assignment == index]
        # empty clusters keep their centroid
        if len(members):
            updated[index] = members.mean(axis=0)
    return updated
