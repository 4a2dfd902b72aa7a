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

import math
import re
import string


def validate_field(name, value, allow_none=False):
    """Validate a given string field following a set of rules.

    The conditions to validate `value` consists on checking if its value is `None`
    and if this is allowed or not; if its value is not an empty string or if it is
    not composed only by whitespaces and/or tabs.

    :param name: name of the field to validate
    :param value: value of the field to validate
    :param allow_none: `True` if `None` values are permitted, `False` otherwise

    :raises ValueError: when a condition to validate the string is not satisfied
    :raises TypeError: when the input value is not a string and not `None`
    """
    if value is None:
        if not allow_none:
            raise ValueError("'{}' cannot be None".format(name))
        else:
            return

    if not isinstance(value, str):
        msg = "field '{}' value must be a string; {} given".format(name, value.__class__.__name__)
        raise TypeError(msg)

    if value == '':
        raise ValueError("'{}' cannot be an empty string".format(name))

    m = re.match(r"^\s+$", value)
    if m:
        raise ValueError("'{}' cannot be composed by whitespaces only".format(name))


def validate_name(name):
    """Validate an identifier such as an action id.

    The conditions to validate `name` consists on:
     - Checking the conditions from `validate_field`.
     - Checking if the first character is alphanumeric.
     - Checking if the string contains whitespace characters.
     - Checking if the string punctuation characters, different from hyphens.

    :param name: string to validate

    :raises ValueError: when a condition to validate the string is not satisfied
    :raises TypeError: when the input value is not a string and not `None`
    """
    validate_field('name', name)

    if not name[0].isalnum():
        raise ValueError("'name' must start with an alphanumeric character")
    if any(c in string.whitespace for c in name):
        raise ValueError("'name' cannot contain whitespace characters")

    unaccepted_chars = string.punctuation.replace('-', '')
    if any(c in unaccepted_chars for c in name):
        raise ValueError("'name' cannot contain punctuation characters except hyphens")


def validate_positive_int(name, value):
    """Check `value` is an integer greater than zero."""

    validate_non_negative_int(name, value)
    if value == 0:
        raise ValueError("'{}' must be greater than 0".format(name))


def validate_non_negative_int(name, value):
    """Check `value` is an integer greater or equal than zero.

    Booleans are rejected even though they are `int` instances.
    """
    if isinstance(value, bool) or not isinstance(value, int):
        msg = "field '{}' value must be an int; {} given".format(name, value.__class__.__name__)
        raise TypeError(msg)
    if value < 0:
        raise ValueError("'{}' cannot be negative".format(name))


def validate_real(name, value):
    """Check `value` is a finite real number."""

    if isinstance(value, bool) or not isinstance(value, (int, float)):
        msg = "field '{}' value must be a number; {} given".format(name, value.__class__.__name__)
        raise TypeError(msg)
    if not math.isfinite(value):
        raise ValueError("'{}' must be a finite number".format(name))


def validate_probability(name, value):
    """Check `value` is a real number in [0, 1]."""

    validate_real(name, value)
    if value < 0 or value > 1:
        raise ValueError("'{}' must be in [0, 1]; {} given".format(name, value))


def validate_probabilities(name, values, tolerance=1e-9):
    """Check `values` is a non-empty probability vector.

    :param name: name of the field to validate
    :param values: sequence of probabilities
    :param tolerance: maximum allowed deviation of the sum from 1

    :raises ValueError: when the vector is empty, has entries out
        of [0, 1] or does not sum to 1
    """
    if len(values) == 0:
        raise ValueError("'{}' cannot be empty".format(name))
    for i, p in enumerate(values):
        validate_probability('{}[{}]'.format(name, i), p)

    total = math.fsum(values)
    if abs(total - 1.0) > tolerance:
        raise ValueError("'{}' must sum to 1; {} given".format(name, total))


def validate_angle(name, value, lower, upper):
    """Check `value` is an angle, in degrees, within [lower, upper]."""

    validate_real(name, value)
    if value < lower or value > upper:
        raise ValueError("'{}' must be in [{}, {}]; {} given".format(name, lower, upper, value))
