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

"""Simplified three-finger hand used to rank pre-grasps by volume.

The palm is a disc on the XY plane with its normal along +Z. The right
finger sits opposite to the two left fingers, which rotate around the
palm with the spread joint. Every finger flexes in the vertical plane
holding its closing direction; a finger base angle of 0 points the
finger along the palm normal. The distal link flexion is coupled to the
proximal one.
"""

import dataclasses
import logging

import numpy
from scipy.spatial import ConvexHull, QhullError

from . import settings
from .utils import validate_positive_int, validate_real


logger = logging.getLogger(__name__)


@dataclasses.dataclass(frozen=True)
class HandGeometry:
    """Dimensions of the simplified hand, in meters and degrees"""

    palm_radius_m: float = settings.PALM_RADIUS_M
    proximal_link_m: float = settings.PROXIMAL_LINK_M
    distal_link_m: float = settings.DISTAL_LINK_M
    distal_coupling: float = settings.DISTAL_COUPLING
    finger_base_offset_deg: float = settings.FINGER_BASE_OFFSET_DEG
    max_spread_deg: float = settings.MAX_SPREAD_DEG
    palm_points: int = settings.PALM_POINTS

    def __post_init__(self):
        for name in ('palm_radius_m', 'proximal_link_m', 'distal_link_m'):
            validate_real(name, getattr(self, name))
            if getattr(self, name) <= 0:
                raise ValueError("'{}' must be greater than 0".format(name))
        validate_real('distal_coupling', self.distal_coupling)
        validate_real('finger_base_offset_deg', self.finger_base_offset_deg)
        validate_real('max_spread_deg', self.max_spread_deg)
        validate_positive_int('palm_points', self.palm_points)

    @property
    def dof(self):
        """Joints of a configuration: spread, left fingers and right finger"""

        return 3


def hand_points(pregrasp, hand=HandGeometry()):
    """Points bounding the in-grasp space of a pre-grasp.

    Palm disc points plus the ends of the proximal and distal links
    of the three fingers. Points are clipped at the palm plane, since
    the in-grasp space lies above it.

    :returns: array with shape `(palm_points + 6, 3)`
    """
    angles = numpy.linspace(0, 2 * numpy.pi, hand.palm_points, endpoint=False)
    palm = numpy.column_stack([hand.palm_radius_m * numpy.cos(angles),
                               hand.palm_radius_m * numpy.sin(angles),
                               numpy.zeros_like(angles)])

    spread = numpy.radians(pregrasp.spread_deg / settings.SPREAD_RANGE[1] * hand.max_spread_deg)
    offset = numpy.radians(hand.finger_base_offset_deg)

    # (base azimuth, closing direction azimuth, flexion)
    fingers = [
        (numpy.pi - offset - spread, -spread, pregrasp.finger_left_deg),
        (numpy.pi + offset + spread, spread, pregrasp.finger_left_deg),
        (0.0, numpy.pi, pregrasp.finger_right_deg),
    ]

    links = []
    for azimuth, heading, flexion in fingers:
        base = hand.palm_radius_m * numpy.array([numpy.cos(azimuth), numpy.sin(azimuth), 0.0])
        inward = numpy.array([numpy.cos(heading), numpy.sin(heading), 0.0])
        up = numpy.array([0.0, 0.0, 1.0])

        proximal = numpy.radians(flexion)
        distal = proximal * (1 + hand.distal_coupling)
        knuckle = base + hand.proximal_link_m * (numpy.sin(proximal) * inward + numpy.cos(proximal) * up)
        tip = knuckle + hand.distal_link_m * (numpy.sin(distal) * inward + numpy.cos(distal) * up)
        links.extend([knuckle, tip])

    points = numpy.vstack([palm, numpy.array(links)])
    points[:, 2] = numpy.clip(points[:, 2], 0.0, None)
    return points


def hull_volume(points):
    """Volume of the convex hull of a 3D point set.

    Degenerate sets (fewer than four points, coplanar or collinear
    points) have zero volume.
    """
    points = numpy.asarray(points, dtype=float)
    if points.ndim != 2 or points.shape[1] != 3:
        raise ValueError("'points' must be a list of 3D points")
    if len(points) < 4:
        return 0.0

    try:
        return float(ConvexHull(points).volume)
    except QhullError:
        return 0.0


def grasp_volume(pregrasp, hand=HandGeometry()):
    """In-grasp volume proxy of a pre-grasp"""

    return hull_volume(hand_points(pregrasp, hand))


def select_mcpg(pregrasps, hand=HandGeometry()):
    """Select the maximum capability pre-grasp.

    The pre-grasp with the largest in-grasp volume wins; ties go to
    the lowest id.

    :param pregrasps: list of `PreGrasp`
    :param hand: hand geometry

    :returns: tuple with the selected pre-grasp and its volume

    :raises ValueError: when the list is empty
    """
    pregrasps = sorted(pregrasps, key=lambda pg: pg.id)
    if not pregrasps:
        raise ValueError("'pregrasps' cannot be empty")

    best, best_volume = None, -1.0
    for pregrasp in pregrasps:
        volume = grasp_volume(pregrasp, hand)
        if volume > best_volume:
            best, best_volume = pregrasp, volume

    logger.info("MCPG is pre-grasp %s with volume %.6g m3", best.id, best_volume)

    return best, best_volume
