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

"""Read and write grasp trial logs.

A trial log is a UTF-8, tab-separated file. The first line is the header
with the columns in `TRIAL_LOG_COLUMNS`; every other non-blank line is a
trial. End configurations are comma-joined angles in degrees.
"""

import csv
import io
import logging
import os

from . import settings
from .errors import NotFoundError, ParseError
from .models import GraspTrial, PreGrasp, TrialSet


logger = logging.getLogger(__name__)


TRIAL_LOG_COLUMNS = ('pregrasp_id', 'spread_deg', 'finger_left_deg',
                     'finger_right_deg', 'end_config_deg', 'outcome_count')


def read_trials(path, m_max=settings.HAND_CAPACITY):
    """Read a trial log file.

    :param path: path to the trial log
    :param m_max: hand capacity

    :returns: a `TrialSet`

    :raises ParseError: when a line is malformed or is not valid UTF-8;
        the error cites the line number
    """
    if not os.path.isfile(path):
        raise NotFoundError(entity='Trial file {}'.format(path))

    with open(path, 'rb') as fd:
        return parse_trials(decode_lines(fd, str(path)), source=str(path), m_max=m_max)


def decode_lines(fd, source):
    """Decode the lines of a binary stream as UTF-8"""

    for lineno, raw in enumerate(fd, start=1):
        try:
            yield raw.decode('utf-8')
        except UnicodeDecodeError as exc:
            msg = "invalid UTF-8 data at byte {}: {}".format(exc.start, exc.reason)
            raise ParseError(source=source, line=lineno, msg=msg)


def parse_trials(stream, source='<stream>', m_max=settings.HAND_CAPACITY):
    """Parse trial log records from an iterable of text lines"""

    reader = csv.reader(stream, delimiter='\t', quoting=csv.QUOTE_NONE)
    records = _records(reader, source)

    header = next(records, None)
    if header is None:
        raise ParseError(source=source, line=1, msg="header line is missing")

    lineno, fields = header
    if tuple(fields) != TRIAL_LOG_COLUMNS:
        msg = "invalid header; expected columns {}".format(', '.join(TRIAL_LOG_COLUMNS))
        raise ParseError(source=source, line=lineno, msg=msg)

    pregrasps = {}
    trials = []
    for lineno, fields in records:
        pregrasp, trial = _parse_record(fields, source, lineno)
        if pregrasp.id in pregrasps and pregrasps[pregrasp.id] != pregrasp:
            msg = "pre-grasp {} has inconsistent configurations".format(pregrasp.id)
            raise ParseError(source=source, line=lineno, msg=msg)
        if trial.outcome_count > m_max:
            msg = "'outcome_count' {} exceeds hand capacity {}".format(trial.outcome_count, m_max)
            raise ParseError(source=source, line=lineno, msg=msg)
        pregrasps[pregrasp.id] = pregrasp
        trials.append((lineno, trial))

    dims = len(trials[0][1].end_config_deg) if trials else 0
    for lineno, trial in trials:
        if len(trial.end_config_deg) != dims:
            msg = "end configuration has {} angles; {} expected".format(len(trial.end_config_deg), dims)
            raise ParseError(source=source, line=lineno, msg=msg)

    logger.debug("%s trials of %s pre-grasps read from %s", len(trials), len(pregrasps), source)

    return TrialSet(pregrasps.values(), [trial for _, trial in trials], m_max=m_max)


def write_trials(trialset, stream):
    """Write a trial set as a trial log"""

    writer = csv.writer(stream, delimiter='\t', lineterminator='\n')
    writer.writerow(TRIAL_LOG_COLUMNS)
    for trial in trialset.trials:
        pregrasp = trialset.pregrasps[trial.pregrasp_id]
        writer.writerow([pregrasp.id,
                         _format_angle(pregrasp.spread_deg),
                         _format_angle(pregrasp.finger_left_deg),
                         _format_angle(pregrasp.finger_right_deg),
                         ','.join(_format_angle(a) for a in trial.end_config_deg),
                         trial.outcome_count])


def dumps_trials(trialset):
    stream = io.StringIO()
    write_trials(trialset, stream)
    return stream.getvalue()


def _records(reader, source):
    """Yield the line number and fields of every non-blank line"""

    try:
        for fields in reader:
            if any(f.strip() for f in fields):
                yield reader.line_num, [f.strip() for f in fields]
    except csv.Error as exc:
        raise ParseError(source=source, line=reader.line_num, msg=str(exc))


def _parse_record(fields, source, lineno):
    if len(fields) != len(TRIAL_LOG_COLUMNS):
        msg = "expected {} fields; {} given".format(len(TRIAL_LOG_COLUMNS), len(fields))
        raise ParseError(source=source, line=lineno, msg=msg)

    record = dict(zip(TRIAL_LOG_COLUMNS, fields))
    try:
        pregrasp = PreGrasp(id=_to_int(record, 'pregrasp_id'),
                            spread_deg=_to_float(record, 'spread_deg'),
                            finger_left_deg=_to_float(record, 'finger_left_deg'),
                            finger_right_deg=_to_float(record, 'finger_right_deg'))
        end_config = tuple(float(a) for a in record['end_config_deg'].split(','))
        trial = GraspTrial(pregrasp_id=pregrasp.id,
                           end_config_deg=end_config,
                           outcome_count=_to_int(record, 'outcome_count'))
    except (TypeError, ValueError) as exc:
        raise ParseError(source=source, line=lineno, msg=str(exc))

    return pregrasp, trial


def _to_int(record, name):
    try:
        return int(record[name])
    except ValueError:
        raise ValueError("'{}' must be an integer; '{}' given".format(name, record[name]))


def _to_float(record, name):
    try:
        return float(record[name])
    except ValueError:
        raise ValueError("'{}' must be a number; '{}' given".format(name, record[name]))


def _format_angle(value):
    return repr(float(value))
