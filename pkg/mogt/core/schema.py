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

"""Report layouts.

Every report is made of sections with a title, some key/value fields
and an optional table. Reports render either as a human readable
`table` or as tab-separated `rows` whose first column is the report
schema version. Floats always use a fixed number of decimals and no
timestamps are written, so equal inputs give byte-identical reports.
"""

import dataclasses
import io
import os
import typing

from . import settings
from .errors import NotFoundError, ParseError
from .mdp import Policy
from .utils import validate_name


TABLE = 'table'
ROWS = 'rows'
FORMATS = (TABLE, ROWS)

POLICY_COLUMNS = ('schema_version', 'state', 'value', 'action')


@dataclasses.dataclass
class Section:
    title: str
    fields: typing.List[typing.Tuple[str, typing.Any]] = dataclasses.field(default_factory=list)
    headers: typing.Tuple[str, ...] = ()
    rows: typing.List[typing.Tuple[typing.Any, ...]] = dataclasses.field(default_factory=list)


class Report:
    """Ordered list of report sections"""

    def __init__(self, sections=None):
        self.sections = list(sections or [])

    def add(self, section):
        self.sections.append(section)
        return section

    def render(self, fmt=TABLE):
        if fmt not in FORMATS:
            raise ValueError("'fmt' must be one of {}; {} given".format(', '.join(FORMATS), fmt))

        out = io.StringIO()
        for i, section in enumerate(self.sections):
            if i:
                out.write('\n')
            if fmt == TABLE:
                _render_table(section, out)
            else:
                _render_rows(section, out)
        return out.getvalue()


def format_value(value):
    if isinstance(value, bool):
        return 'true' if value else 'false'
    if isinstance(value, float):
        return '{:.{}f}'.format(value, settings.FLOAT_PRECISION)
    if value is None:
        return '-'
    if isinstance(value, (tuple, list)):
        return ','.join(format_value(v) for v in value)
    return str(value)


def ppg_report(table):
    report = Report()
    section = report.add(Section('ppg',
                                 headers=('pregrasp_id', 'spread_deg', 'finger_left_deg',
                                          'finger_right_deg', 'agp', 'ppg')))
    for pregrasp, ppg, agp in table:
        section.rows.append((pregrasp.id, pregrasp.spread_deg, pregrasp.finger_left_deg,
                             pregrasp.finger_right_deg, agp, ppg.probs))
    return report


def selection_report(selections, top=settings.TOP_CANDIDATES):
    """Report of CPPG or BEPG selections with their clustering diagnostics"""

    report = Report()
    for selection in selections:
        best = selection.best
        report.add(Section(selection.name, fields=[
            ('criterion', str(selection.criterion)),
            ('spread_deg', selection.spread_deg),
            ('threshold', selection.threshold),
            ('survivors', selection.survivors),
            ('k', selection.elbow.k),
            ('pregrasp_id', selection.pregrasp.id),
            ('configuration', selection.pregrasp.configuration),
            ('centroid', best.centroid),
            ('statistic', best.statistic),
            ('agp', selection.agp),
            ('distribution', selection.distribution.probs),
            ('object', '{} r={} m={}'.format(selection.object_spec.shape,
                                             format_value(selection.object_spec.radius_m),
                                             format_value(selection.object_spec.mass_kg))),
        ]))

        candidates = report.add(Section(selection.name + ' candidates',
                                        headers=('rank', 'pregrasp_id', 'centroid', 'statistic', 'agp')))
        for rank, candidate in enumerate(selection.ranking[:top], start=1):
            candidates.rows.append((rank, candidate.pregrasp.id, candidate.centroid,
                                    candidate.statistic, candidate.distribution.mean()))

        report.add(_elbow_section(selection.name + ' clustering', selection.elbow))
    return report


def mcpg_report(selection):
    distribution = selection.distribution.probs if selection.distribution else None
    agp = selection.distribution.mean() if selection.distribution else None
    return Report([Section('mcpg', fields=[
        ('candidates', selection.candidates),
        ('pregrasp_id', selection.pregrasp.id),
        ('configuration', selection.pregrasp.configuration),
        ('volume_m3', selection.volume),
        ('agp', agp),
        ('distribution', distribution),
    ])])


def synergy_report(synergy):
    report = Report()
    report.add(Section('end-grasp', fields=[
        ('pregrasp_id', synergy.pregrasp.id),
        ('target', synergy.target_quantity),
        ('k', synergy.elbow.k),
        ('cluster', synergy.cluster_index),
        ('end_grasp', synergy.end_grasp),
    ]))

    clusters = report.add(Section('end-grasp clusters', headers=('cluster', 'size', 'centroid', 'srg')))
    for index, (size, srg) in enumerate(zip(synergy.cluster_sizes, synergy.srg)):
        clusters.rows.append((index, size, tuple(float(a) for a in synergy.elbow.best.centroids[index]),
                              srg.probs))

    report.add(_elbow_section('end-grasp clustering', synergy.elbow))

    trajectory = report.add(Section('synergy', headers=('step', 'configuration')))
    for step, point in enumerate(synergy.trajectory):
        trajectory.rows.append((step, point))
    return report


def solution_report(mdp, solution):
    """Policy file contents: convergence diagnostics plus one row per state"""

    report = Report()
    section = report.add(Section('policy', fields=[
        ('target', mdp.target_n),
        ('mode', str(mdp.overshoot_mode)),
        ('discount', solution.discount),
        ('iterations', solution.iterations),
        ('residual', '{:.6e}'.format(solution.residual)),
    ], headers=POLICY_COLUMNS[1:]))

    for state in range(mdp.n_states):
        action = solution.policy.action_for.get(state)
        section.rows.append((mdp.state_label(state), solution.value_function[state], action))
    return report


def simulation_report(result):
    report = result.report
    section = Section('simulation', fields=[
        ('policy', result.policy),
        ('routine', result.routine),
        ('target', result.target_n),
        ('episodes', report.episodes),
        ('success_rate', report.success_rate),
        ('failures', report.failures),
        ('forced_lifts', report.forced_lifts),
    ], headers=('metric', 'mean', 'stderr', 'exact', 'delta'))

    for metric in ('transfers', 'lifts', 'regrasps'):
        mean = getattr(report, 'mean_' + metric)
        exact = getattr(result.expectation, metric) if result.expectation else None
        delta = mean - exact if exact is not None else None
        section.rows.append((metric, mean, report.std_errors[metric], exact, delta))
    return Report([section])


def comparison_report(comparison):
    section = Section('comparison', fields=[
        ('target', comparison.target_n),
        ('episodes', comparison.episodes),
        ('seed', comparison.seed),
    ], headers=('approach', 'routine', 'mean_transfers', 'mean_lifts', 'stderr_transfers',
                'stderr_lifts', 'reduction_vs_single_pct', 'lift_reduction_vs_single_pct',
                'success_rate', 'failures'))

    for row in comparison.rows:
        section.rows.append((row.approach, row.routine, row.mean_transfers, row.mean_lifts,
                             row.stderr_transfers, row.stderr_lifts, row.reduction_vs_single_pct,
                             row.lift_reduction_vs_single_pct, row.success_rate, row.failures))
    return Report([section])


def read_policy(path):
    """Read a policy file written in `rows` format"""

    if not os.path.isfile(path):
        raise NotFoundError(entity='Policy file {}'.format(path))

    with open(path, 'r', encoding='utf-8') as fd:
        return parse_policy(fd, source=str(path))


def parse_policy(stream, source='<stream>'):
    """Parse a policy from the `rows` rendering of a solution report.

    Comment lines, starting with `#`, and blank lines are skipped. Rows
    of terminal states, with no action, are ignored.

    :returns: a `Policy`

    :raises ParseError: when the header or a row is not valid
    """
    header_seen = False
    actions = {}
    for lineno, line in enumerate(stream, start=1):
        line = line.rstrip('\r\n')
        if not line.strip() or line.startswith('#'):
            continue

        fields = line.split('\t')
        if not header_seen:
            if tuple(fields) != POLICY_COLUMNS:
                msg = "invalid header; expected columns {}".format(', '.join(POLICY_COLUMNS))
                raise ParseError(source=source, line=lineno, msg=msg)
            header_seen = True
            continue

        if len(fields) != len(POLICY_COLUMNS):
            msg = "expected {} fields; {} given".format(len(POLICY_COLUMNS), len(fields))
            raise ParseError(source=source, line=lineno, msg=msg)
        if fields[0] != str(settings.REPORT_SCHEMA_VERSION):
            raise ParseError(source=source, line=lineno, msg="unsupported schema version {}".format(fields[0]))

        state, _, action = fields[1:]
        if action == format_value(None):
            continue
        try:
            state = int(state)
            validate_name(action)
        except (TypeError, ValueError) as exc:
            raise ParseError(source=source, line=lineno, msg=str(exc))
        if state in actions:
            raise ParseError(source=source, line=lineno, msg="state {} is repeated".format(state))
        actions[state] = action

    if not header_seen:
        raise ParseError(source=source, line=1, msg="header line is missing")

    return Policy(actions)


def _elbow_section(title, elbow):
    section = Section(title, headers=('k', 'inertia', 'distortion', 'iterations', 'selected'))
    for k in sorted(elbow.by_k):
        result = elbow.by_k[k]
        section.rows.append((k, result.inertia, result.distortion, result.iterations, k == elbow.k))
    return section


def _render_table(section, out):
    out.write('== {} ==\n'.format(section.title))
    for key, value in section.fields:
        out.write('{}: {}\n'.format(key, format_value(value)))
    if not section.headers:
        return

    cells = [list(section.headers)] + [[format_value(v) for v in row] for row in section.rows]
    widths = [max(len(row[i]) for row in cells) for i in range(len(section.headers))]
    for row in cells:
        out.write('  '.join(cell.ljust(width) for cell, width in zip(row, widths)).rstrip() + '\n')


def _render_rows(section, out):
    out.write('# {}\n'.format(section.title))
    for key, value in section.fields:
        out.write('# {}\t{}\n'.format(key, format_value(value)))
    if not section.headers:
        return

    version = str(settings.REPORT_SCHEMA_VERSION)
    out.write('\t'.join(('schema_version',) + tuple(section.headers)) + '\n')
    for row in section.rows:
        out.write('\t'.join([version] + [format_value(v) for v in row]) + '\n')
