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

"""Command line interface.

Usage: mogt [--seed N] [--out PATH] [--format {table,rows}] COMMAND ...

Commands:
    pregrasp  select pre-grasps and end-grasps from trial logs
    solve     compute the optimal transfer policy of an experiment
    simulate  evaluate a transfer policy by simulation
    compare   compare the single-object, naive and MDP approaches

Reports go to the standard output and, with `--out`, to a file. Logs go
to the standard error. The exit code is 0 on success and the code of the
error otherwise.
"""

import argparse
import logging
import sys

from .core import api, settings
from .core.config import load_config
from .core.context import MogtContext
from .core.errors import BaseError, EpisodeCapError, InvalidValueError, OutputError
from .core.schema import (FORMATS,
                          TABLE,
                          comparison_report,
                          mcpg_report,
                          ppg_report,
                          read_policy,
                          selection_report,
                          simulation_report,
                          solution_report,
                          synergy_report)
from .core.simulator import Routine


PREGRASP_METHODS = ('ppg', 'cppg', 'bepg', 'mcpg', 'endgrasp')
SEEDED_METHODS = ('cppg', 'bepg', 'endgrasp')
LOG_LEVELS = ('DEBUG', 'INFO', 'WARNING', 'ERROR')


def main(argv=None):
    """Run the command line and return its exit code"""

    parser = create_parser()
    args = parser.parse_args(argv)

    configure_logging(args.log_level, args.verbose)

    try:
        text, failure = args.func(args)
    except BaseError as exc:
        sys.stderr.write('mogt: error: {}\n'.format(exc))
        return int(exc)

    sys.stdout.write(text)
    if args.out:
        try:
            with open(args.out, 'w', encoding='utf-8', newline='\n') as fd:
                fd.write(text)
        except OSError as exc:
            error = OutputError(path=args.out, msg=exc.strerror or str(exc))
            sys.stderr.write('mogt: error: {}\n'.format(error))
            return int(error)

    if failure:
        sys.stderr.write('mogt: error: {}\n'.format(failure))
        return int(failure)

    return 0


def create_parser():
    # Global options may be given before or after the command
    common = argparse.ArgumentParser(add_help=False)
    _add_global_options(common, suppress=True)

    parser = argparse.ArgumentParser(prog='mogt',
                                     description="Multi-object grasping and transferring toolkit")
    _add_global_options(parser)
    subparsers = parser.add_subparsers(dest='command', metavar='COMMAND')
    subparsers.required = True

    pregrasp = subparsers.add_parser('pregrasp', parents=[common],
                                     help="select pre-grasps and end-grasps from trial logs")
    pregrasp.add_argument('method', choices=PREGRASP_METHODS)
    pregrasp.add_argument('--trials', help="trial log")
    pregrasp.add_argument('--evaluation', help="trial log used to evaluate cluster centroids")
    pregrasp.add_argument('--target', type=int, action='append', dest='targets',
                          help="target quantity; cppg accepts it several times")
    pregrasp.add_argument('--pregrasp-id', type=int, help="pre-grasp of the end-grasp")
    pregrasp.add_argument('--steps', type=int, default=settings.SYNERGY_STEPS,
                          help="interpolation steps of the flexion synergy")
    pregrasp.add_argument('--top', type=int, default=settings.TOP_CANDIDATES,
                          help="number of ranked candidates to report")
    pregrasp.add_argument('--keep-fraction', type=float, default=settings.FILTER_KEEP_FRACTION,
                          help="fraction of pre-grasps kept before clustering")
    pregrasp.add_argument('--max-k', type=int, default=settings.ELBOW_MAX_K,
                          help="largest number of clusters tried")
    pregrasp.add_argument('--spread-step', type=float, default=settings.SPREAD_STEP,
                          help="spread step of the mcpg grid, in degrees")
    pregrasp.add_argument('--finger-step', type=float, default=settings.FINGER_STEP,
                          help="finger step of the mcpg grid, in degrees")
    pregrasp.set_defaults(func=cmd_pregrasp)

    solve = subparsers.add_parser('solve', parents=[common],
                                  help="compute the optimal transfer policy of an experiment")
    solve.add_argument('config', help="experiment config file")
    solve.set_defaults(func=cmd_solve)

    simulate = subparsers.add_parser('simulate', parents=[common],
                                     help="evaluate a transfer policy by simulation")
    simulate.add_argument('config', help="experiment config file")
    simulate.add_argument('--policy', choices=api.POLICIES, default=api.MDP)
    simulate.add_argument('--policy-file', help="policy written by 'solve --format rows'")
    simulate.add_argument('--routine', choices=[str(r) for r in Routine],
                          help="grasping routine; defaults to the config's")
    simulate.set_defaults(func=cmd_simulate)

    compare = subparsers.add_parser('compare', parents=[common],
                                    help="compare the single-object, naive and MDP approaches")
    compare.add_argument('config', help="experiment config file")
    compare.set_defaults(func=cmd_compare)

    return parser


def configure_logging(level, verbose=False):
    logging.basicConfig(level=logging.DEBUG if verbose else getattr(logging, level),
                        stream=sys.stderr,
                        format='[%(asctime)s - %(name)s - %(levelname)s] - %(message)s')


def cmd_pregrasp(args):
    ctx = MogtContext(source=args.trials, seed=args.seed)

    if args.method != 'mcpg' and not args.trials:
        _usage_error("'--trials' is required by '{}'".format(args.method))
    if args.method in SEEDED_METHODS and args.seed is None:
        _usage_error("'--seed' is required by '{}'".format(args.method))

    if args.method == 'ppg':
        report = ppg_report(api.ppg_table(ctx, args.trials))
    elif args.method == 'cppg':
        if not args.targets:
            _usage_error("'--target' is required by 'cppg'")
        selections = api.select_cppg(ctx, args.trials, args.targets, evaluation_path=args.evaluation,
                                     keep_fraction=args.keep_fraction, max_k=args.max_k)
        report = selection_report(selections, top=args.top)
    elif args.method == 'bepg':
        selection = api.select_bepg(ctx, args.trials, evaluation_path=args.evaluation,
                                    keep_fraction=args.keep_fraction, max_k=args.max_k)
        report = selection_report([selection], top=args.top)
    elif args.method == 'mcpg':
        report = mcpg_report(api.select_mcpg(ctx, args.trials, args.spread_step, args.finger_step))
    else:
        if args.pregrasp_id is None or not args.targets or len(args.targets) > 1:
            _usage_error("'endgrasp' requires '--pregrasp-id' and one '--target'")
        synergy = api.select_end_grasp(ctx, args.trials, args.pregrasp_id, args.targets[0], steps=args.steps)
        report = synergy_report(synergy)

    return report.render(args.format), None


def cmd_solve(args):
    config = load_config(args.config)
    ctx = MogtContext(source=config.source, seed=args.seed)

    mdp, solution = api.solve(ctx, config)

    return solution_report(mdp, solution).render(args.format), None


def cmd_simulate(args):
    config = load_config(args.config)
    ctx = MogtContext(source=config.source, seed=args.seed)

    policy_map = None
    if args.policy == api.POLICY_FILE:
        if not args.policy_file:
            _usage_error("'--policy-file' is required by the 'file' policy")
        policy_map = read_policy(args.policy_file)

    result = api.simulate(ctx, config, policy=args.policy, policy_map=policy_map, routine=args.routine)
    failure = None
    if result.report.failures:
        failure = EpisodeCapError(failures=result.report.failures, episodes=result.report.episodes)

    return simulation_report(result).render(args.format), failure


def cmd_compare(args):
    config = load_config(args.config)
    ctx = MogtContext(source=config.source, seed=args.seed)

    comparison = api.compare(ctx, config)
    failures = sum(row.failures for row in comparison.rows)
    failure = None
    if failures:
        failure = EpisodeCapError(failures=failures, episodes=comparison.episodes * len(comparison.rows))

    return comparison_report(comparison).render(args.format), failure


def _add_global_options(parser, suppress=False):
    def default(value):
        return argparse.SUPPRESS if suppress else value

    parser.add_argument('--seed', type=int, default=default(None),
                        help="base seed; overrides the seed of the config")
    parser.add_argument('--out', default=default(None), help="also write the report to this file")
    parser.add_argument('--format', choices=FORMATS, default=default(TABLE), help="report layout")
    parser.add_argument('--log-level', choices=LOG_LEVELS, default=default('WARNING'))
    parser.add_argument('--verbose', action='store_true', default=default(False),
                        help="log debug messages")


def _usage_error(msg):
    raise InvalidValueError(msg=msg)


if __name__ == '__main__':
    sys.exit(main())
