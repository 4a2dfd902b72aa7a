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

# Default parameters. Every value can be overwritten from the
# experiment configuration or the command line.

# Rewards
GOAL_REWARD = 100000.0
OVERSHOOT_PENALTY = -1000.0
SHORTFALL_WEIGHT = 1.0

# Solver
DISCOUNT = 0.95
EPSILON = 1e-6
MAX_ITERATIONS = 10000
TIE_TOLERANCE = 1e-9
PROBABILITY_TOLERANCE = 1e-9

# Hand and objects
HAND_CAPACITY = 5
NAIVE_CAPACITY = 4
OBJECT_RADIUS_M = 0.02
OBJECT_MASS_KG = 0.0027

# Pre-grasp grid, in degrees
SPREAD_RANGE = (0.0, 360.0)
FINGER_RANGE = (30.0, 90.0)
SPREAD_STEP = 20.0
FINGER_STEP = 3.0

# Hand geometry used by the in-grasp volume proxy
PALM_RADIUS_M = 0.025
PROXIMAL_LINK_M = 0.070
DISTAL_LINK_M = 0.056
DISTAL_COUPLING = 1.0 / 3.0
FINGER_BASE_OFFSET_DEG = 30.0
MAX_SPREAD_DEG = 90.0
PALM_POINTS = 8

# Selection pipelines
FILTER_KEEP_FRACTION = 0.25
FILTER_MIN_STATISTIC = 0.0
KMEANS_MAX_ITERATIONS = 300
ELBOW_MAX_K = 8
SYNERGY_STEPS = 20
TOP_CANDIDATES = 3

# Simulation
MAX_REGRASPS = 10
TIMESTEPS_PER_ATTEMPT = 20
DROP_ON_LIFT_PROB = 0.0
EPISODE_CAP = 200
VOTING_STREAK = 3

# Reports
REPORT_SCHEMA_VERSION = 1
FLOAT_PRECISION = 6
