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

import enum


@enum.unique
class ErrorCode(enum.Enum):
    """Error codes for MOGT.

    The values are also used as exit codes by the command line.
    """

    BASE_ERROR = 1
    VALUE_ERROR = 2
    PARSE_ERROR = 3
    NOT_FOUND_ERROR = 4
    NOT_CONVERGED_ERROR = 5
    DIVERGENCE_ERROR = 6
    UNREACHABLE_GOAL_ERROR = 7
    EMPTY_SELECTION_ERROR = 8
    EPISODE_CAP_ERROR = 9
    CLOSED_RUN_ERROR = 10
    OUTPUT_ERROR = 11


class BaseError(Exception):
    """Base class error.

    Derived classes can overwrite error message declaring
    'message' property.
    """
    code = ErrorCode.BASE_ERROR
    message = "MOGT unknown error"

    def __init__(self, **kwargs):
        super().__init__()
        self.msg = self.message % kwargs

    def __str__(self):
        return self.msg

    def __int__(self):
        return self.code.value


class InvalidValueError(BaseError):
    """Exception raised when a value is invalid"""

    code = ErrorCode.VALUE_ERROR
    message = "%(msg)s"


class ParseError(BaseError):
    """Exception raised when an input file cannot be parsed"""

    code = ErrorCode.PARSE_ERROR
    message = "%(source)s, line %(line)s: %(msg)s"

    def __init__(self, **kwargs):
        super().__init__(**kwargs)
        self.source = kwargs['source']
        self.line = kwargs['line']


class NotFoundError(BaseError):
    """Exception raised when an entity is not found"""

    code = ErrorCode.NOT_FOUND_ERROR
    message = "%(entity)s not found"


class NotConvergedError(BaseError):
    """Exception raised when value iteration does not converge"""

    code = ErrorCode.NOT_CONVERGED_ERROR
    message = "value iteration did not converge after %(iterations)s iterations; " \
              "residual %(residual).6g >= epsilon %(epsilon).6g"

    def __init__(self, **kwargs):
        super().__init__(**kwargs)
        self.iterations = kwargs['iterations']
        self.residual = kwargs['residual']
        self.epsilon = kwargs['epsilon']


class DivergenceError(BaseError):
    """Exception raised when an undiscounted problem may diverge"""

    code = ErrorCode.DIVERGENCE_ERROR
    message = "%(msg)s"


class UnreachableGoalError(BaseError):
    """Exception raised when the goal cannot be reached under a policy"""

    code = ErrorCode.UNREACHABLE_GOAL_ERROR
    message = "goal is unreachable from states %(states)s"

    def __init__(self, **kwargs):
        super().__init__(**kwargs)
        self.states = kwargs['states']


class EmptySelectionError(BaseError):
    """Exception raised when no candidate survives a selection filter"""

    code = ErrorCode.EMPTY_SELECTION_ERROR
    message = "no pre-grasp survived the %(criterion)s filter (threshold %(threshold)s)"

    def __init__(self, **kwargs):
        super().__init__(**kwargs)
        self.criterion = kwargs['criterion']
        self.threshold = kwargs['threshold']


class EpisodeCapError(BaseError):
    """Exception raised when simulated episodes hit the lift cap"""

    code = ErrorCode.EPISODE_CAP_ERROR
    message = "%(failures)s of %(episodes)s episodes reached the lift cap"

    def __init__(self, **kwargs):
        super().__init__(**kwargs)
        self.failures = kwargs['failures']
        self.episodes = kwargs['episodes']


class ClosedRunError(BaseError):
    """Exception raised when logging an operation on a closed run"""

    code = ErrorCode.CLOSED_RUN_ERROR
    message = "%(msg)s"


class OutputError(BaseError):
    """Exception raised when a report cannot be written"""

    code = ErrorCode.OUTPUT_ERROR
    message = "cannot write %(path)s: %(msg)s"
