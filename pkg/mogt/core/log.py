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

import json
import logging
import uuid

from grimoirelab_toolkit.datetime import datetime_utcnow

from .context import MogtContext
from .errors import ClosedRunError
from .models import Operation, Run
from .utils import validate_field


logger = logging.getLogger(__name__)


class RunLog:
    """Class for logging the operations performed by a command.

    Every object of this class is created using the `open` class method,
    receiving as a parameter the name of the function opening the run,
    which creates a `Run` record.

    The method `log_operation` creates a new `Operation` linked to the run.
    It receives, among other parameters, the arguments of the function
    logging the operation in a Python dict object which will be converted
    to a serialized JSON. Operations are also emitted to the module logger,
    so they never end up in report files.

    The `close` method adds a `closed_at` timestamp and sets to `True`
    the `is_closed` flag.

    :param run: Run object generated with the class method `open`
    :param ctx: context of the function opening the run

    :raises ClosedRunError: When trying to log an operation on a closed run
    :raises TypeError: When the `op_type` is not an instance of `Operation.OpType` class
    """
    def __init__(self, run, ctx):
        self.run = run
        self.ctx = ctx

    @classmethod
    def open(cls, name, ctx):
        """Create a new run record.

        :param name: Name of the function opening the run
        :param ctx: Context of the function opening the run

        :returns: a new RunLog object containing the generated Run object
        """
        validate_field('name', name)
        if not isinstance(ctx, MogtContext):
            msg = "ctx value must be a MogtContext; {} given".format(ctx.__class__.__name__)
            raise TypeError(msg)
        validate_field('ctx.source', ctx.source, allow_none=True)

        run = Run(ruid=uuid.uuid4().hex,
                  name=name,
                  created_at=datetime_utcnow(),
                  source=ctx.source)

        logger.info("run %s opened; source=%s seed=%s", run, ctx.source, ctx.seed)

        return cls(run, ctx)

    def close(self):
        """Close the run adding a timestamp as closing date and setting a flag"""

        self.run.closed_at = datetime_utcnow()
        self.run.is_closed = True

        elapsed = (self.run.closed_at - self.run.created_at).total_seconds()
        logger.info("run %s closed; %s operations in %.3fs",
                    self.run, len(self.run.operations), elapsed)

    def log_operation(self, op_type, entity_type, args, target):
        """Create a new operation object and attach it to the run.

        :param op_type: Type of the operation which is recorded
        :param entity_type: Type of entity involved in the operation
        :param args: Input arguments of the function creating the operation
        :param target: Argument which the operation is directed to

        :raises ClosedRunError: When trying to log an operation on a closed run
        :raises TypeError: When the `op_type` is not an instance of `Operation.OpType` class

        :returns: a new Operation object
        """
        if self.run.is_closed:
            msg = 'Log operation not allowed, run {} is already closed'.format(self.run.ruid)
            raise ClosedRunError(msg=msg)

        validate_field('entity_type', entity_type)
        validate_field('target', target)
        if not isinstance(op_type, Operation.OpType):
            msg = "'op_type' value must be a 'Operation.OpType'; {} given".format(op_type.__class__.__name__)
            raise TypeError(msg)

        args_dump = json.dumps(args, sort_keys=True, default=str)

        operation = Operation(ouid=uuid.uuid4().hex, run=self.run, op_type=op_type,
                              entity_type=entity_type, target=target,
                              timestamp=datetime_utcnow(), args=args_dump)
        self.run.operations.append(operation)

        logger.debug("%s %s %s %s", op_type, entity_type, target, args_dump)

        return operation
