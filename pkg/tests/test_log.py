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

import collections
import json
import unittest

from grimoirelab_toolkit.datetime import datetime_utcnow

from mogt.core.context import MogtContext
from mogt.core.errors import ClosedRunError
from mogt.core.log import RunLog
from mogt.core.models import Operation, Run


OPERATION_TYPE_EMPTY_ERROR = "'op_type' value must be a 'Operation.OpType'; str given"
OPERATION_TYPE_NONE_ERROR = "'op_type' value must be a 'Operation.OpType'; NoneType given"
OPERATION_ENTITY_EMPTY_ERROR = "'entity_type' cannot be an empty string"
OPERATION_ENTITY_NONE_ERROR = "'entity_type' cannot be None"
OPERATION_TARGET_EMPTY_ERROR = "'target' cannot be an empty string"
OPERATION_RUN_CLOSED_ERROR = "Log operation not allowed, run {ruid} is already closed"
RUN_NAME_EMPTY_ERROR = "'name' cannot be an empty string"
RUN_NAME_NONE_ERROR = "'name' cannot be None"
RUN_CTX_NONE_ERROR = "ctx value must be a MogtContext; NoneType given"
RUN_CTX_INVALID_ERROR = "ctx value must be a MogtContext; TestTuple given"
RUN_CTX_SOURCE_EMPTY_ERROR = "'ctx.source' cannot be an empty string"


class TestRunLogOpen(unittest.TestCase):
    """Unit tests for RunLog.open and RunLog.close"""

    def setUp(self):
        """Load initial values"""

        self.ctx = MogtContext(source='transfer.yml', seed=7)

    def test_open_run(self):
        """Check if a new run is opened"""

        timestamp = datetime_utcnow()

        runlog = RunLog.open('test', self.ctx)
        self.assertIsInstance(runlog, RunLog)

        run = runlog.run
        self.assertIsInstance(run, Run)
        self.assertEqual(run.name, 'test')
        self.assertEqual(run.source, 'transfer.yml')
        self.assertEqual(len(run.ruid), 32)
        self.assertGreaterEqual(run.created_at, timestamp)
        self.assertIsNone(run.closed_at)
        self.assertFalse(run.is_closed)
        self.assertListEqual(run.operations, [])

    def test_unique_ids(self):
        """Check every run gets its own identifier"""

        first = RunLog.open('test', self.ctx)
        second = RunLog.open('test', self.ctx)

        self.assertNotEqual(first.run.ruid, second.run.ruid)

    def test_close_run(self):
        """Check if the run gets closed"""

        runlog = RunLog.open('test', self.ctx)
        timestamp = datetime_utcnow()
        runlog.close()

        self.assertTrue(runlog.run.is_closed)
        self.assertGreaterEqual(runlog.run.closed_at, timestamp)

    def test_name_empty(self):
        """Check if it fails when `name` field is an empty string"""

        with self.assertRaisesRegex(ValueError, RUN_NAME_EMPTY_ERROR):
            RunLog.open('', self.ctx)

    def test_name_none(self):
        """Check if it fails when `name` field is `None`"""

        with self.assertRaisesRegex(ValueError, RUN_NAME_NONE_ERROR):
            RunLog.open(None, self.ctx)

    def test_context_none(self):
        """Check if it fails when `ctx` field is `None`"""

        with self.assertRaisesRegex(TypeError, RUN_CTX_NONE_ERROR):
            RunLog.open('test', None)

    def test_context_invalid(self):
        """Check if it fails when `ctx` field is not a MogtContext"""

        TestTuple = collections.namedtuple('TestTuple', ['source', 'seed'])
        ctx = TestTuple('transfer.yml', 0)
        with self.assertRaisesRegex(TypeError, RUN_CTX_INVALID_ERROR):
            RunLog.open('test', ctx)

    def test_context_without_source(self):
        """Check if runs can be opened when no input file is involved"""

        runlog = RunLog.open('test', MogtContext(source=None, seed=None))
        self.assertIsNone(runlog.run.source)

        with self.assertRaisesRegex(ValueError, RUN_CTX_SOURCE_EMPTY_ERROR):
            RunLog.open('test', MogtContext(source='', seed=None))


class TestLogOperation(unittest.TestCase):
    """Unit tests for RunLog.log_operation"""

    def setUp(self):
        """Load initial values"""

        self.ctx = MogtContext(source='transfer.yml', seed=7)
        self.runlog = RunLog.open('test', self.ctx)

    def test_log_operation(self):
        """Check if a new operation is logged"""

        timestamp = datetime_utcnow()
        args = {'target': 10, 'seed': 7}

        operation = self.runlog.log_operation(op_type=Operation.OpType.SOLVE,
                                              entity_type='policy',
                                              args=args,
                                              target='transfer.yml')

        self.assertIsInstance(operation, Operation)
        self.assertEqual(operation.op_type, Operation.OpType.SOLVE)
        self.assertEqual(operation.entity_type, 'policy')
        self.assertEqual(operation.target, 'transfer.yml')
        self.assertEqual(operation.run, self.runlog.run)
        self.assertGreaterEqual(operation.timestamp, timestamp)
        self.assertDictEqual(json.loads(operation.args), args)
        self.assertListEqual(self.runlog.run.operations, [operation])

    def test_args_serialized_sorted(self):
        """Check arguments are serialized with sorted keys"""

        operation = self.runlog.log_operation(op_type=Operation.OpType.SIMULATE,
                                              entity_type='policy',
                                              args={'seed': 1, 'episodes': 10},
                                              target='mdp')

        self.assertEqual(operation.args, '{"episodes": 10, "seed": 1}')

    def test_closed_run(self):
        """Check if it fails when the run is already closed"""

        self.runlog.close()

        expected = OPERATION_RUN_CLOSED_ERROR.format(ruid=self.runlog.run.ruid)
        with self.assertRaisesRegex(ClosedRunError, expected):
            self.runlog.log_operation(op_type=Operation.OpType.SOLVE,
                                      entity_type='policy',
                                      args={},
                                      target='transfer.yml')

    def test_operation_type_invalid(self):
        """Check if it fails when the operation type is not an OpType"""

        with self.assertRaisesRegex(TypeError, OPERATION_TYPE_EMPTY_ERROR):
            self.runlog.log_operation(op_type='SOLVE', entity_type='policy',
                                      args={}, target='transfer.yml')

        with self.assertRaisesRegex(TypeError, OPERATION_TYPE_NONE_ERROR):
            self.runlog.log_operation(op_type=None, entity_type='policy',
                                      args={}, target='transfer.yml')

    def test_entity_type_invalid(self):
        """Check if it fails when the entity type is not valid"""

        with self.assertRaisesRegex(ValueError, OPERATION_ENTITY_EMPTY_ERROR):
            self.runlog.log_operation(op_type=Operation.OpType.SOLVE, entity_type='',
                                      args={}, target='transfer.yml')

        with self.assertRaisesRegex(ValueError, OPERATION_ENTITY_NONE_ERROR):
            self.runlog.log_operation(op_type=Operation.OpType.SOLVE, entity_type=None,
                                      args={}, target='transfer.yml')

    def test_target_empty(self):
        """Check if it fails when the target is an empty string"""

        with self.assertRaisesRegex(ValueError, OPERATION_TARGET_EMPTY_ERROR):
            self.runlog.log_operation(op_type=Operation.OpType.SOLVE, entity_type='policy',
                                      args={}, target='')


if __name__ == '__main__':
    unittest.main()
