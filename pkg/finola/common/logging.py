#
# Copyright 2024 European Centre for Medium-Range Weather Forecasts (ECMWF)
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
#
# In applying this licence, ECMWF does not waive the privileges and immunities
# granted to it by virtue of its status as an intergovernmental organisation nor
# does it submit to any jurisdiction.
#

import datetime
import json
import logging
import socket

from .. import version

# extras copied into structured output, with the type they must have
RUN_FIELDS = {"run_id": str, "epoch": int}
MODES = ("json", "console", "prettyprint")
DEFAULT_MODE = "json"
DEFAULT_LEVEL = "INFO"


class LogFormatter(logging.Formatter):
    """Formats records as one JSON object per line (json), indented JSON (prettyprint)
    or a short human line (console). Run fields attached with `extra=` or a RunLogger
    are validated and carried in every mode."""

    def __init__(self, mode=DEFAULT_MODE):
        super().__init__()
        if mode not in MODES:
            raise ValueError("Unknown logging mode '{}', expected one of {}".format(mode, ", ".join(MODES)))
        self.mode = mode
        self.hostname = socket.gethostname()

    @staticmethod
    def timestamp(record):
        created = datetime.datetime.fromtimestamp(record.created, datetime.timezone.utc)
        return created.strftime("%Y-%m-%d %H:%M:%S,%f")[:-3]

    @staticmethod
    def run_fields(record):
        fields = {}
        for name, expected in RUN_FIELDS.items():
            if not hasattr(record, name):
                continue
            value = getattr(record, name)
            # bool passes isinstance(int)
            if not isinstance(value, expected) or isinstance(value, bool):
                raise TypeError("Log field '{}' must be of type '{}', got {!r}".format(name, expected.__name__, value))
            fields[name] = value
        return fields

    def format(self, record):
        fields = self.run_fields(record)
        if self.mode == "console":
            context = " ".join("{}={}".format(k, v) for k, v in fields.items())
            parts = [self.timestamp(record), record.levelname] + ([context] if context else []) + [record.getMessage()]
            return " | ".join(parts)

        result = {
            "asctime": self.timestamp(record),
            "hostname": getattr(record, "hostname", self.hostname),
            "process": record.process,
            "thread": record.thread,
            "name": record.name,
            "filename": record.filename,
            "lineno": record.lineno,
            "levelname": record.levelname,
            "message": record.getMessage(),
            "software": "finola",
            "swVersion": version.__version__,
        }
        result.update(fields)
        if self.mode == "prettyprint":
            return json.dumps(result, indent=2, ensure_ascii=False)
        return json.dumps(result)


class RunLogger(logging.LoggerAdapter):
    """Binds a run id to every record; `at_epoch` returns a copy that also carries the epoch."""

    def __init__(self, run_id, epoch=None, logger=None):
        extra = {"run_id": run_id}
        if epoch is not None:
            extra["epoch"] = epoch
        super().__init__(logger or logging.getLogger(), extra)

    def at_epoch(self, epoch):
        return RunLogger(self.extra["run_id"], epoch, self.logger)

    def process(self, msg, kwargs):
        kwargs["extra"] = {**self.extra, **kwargs.get("extra", {})}
        return msg, kwargs


def setup(config, source_name):
    """Install the finola handler on the root logger, replacing one installed by an earlier call."""
    logger = logging.getLogger()
    logger.name = source_name
    options = config.get("logging") or {}

    for handler in list(logger.handlers):
        if isinstance(handler.formatter, LogFormatter):
            logger.removeHandler(handler)

    handler = logging.StreamHandler()
    handler.setLevel(logging.DEBUG)
    handler.setFormatter(LogFormatter(options.get("mode", DEFAULT_MODE)))
    logger.addHandler(handler)
    logger.setLevel(options.get("level", DEFAULT_LEVEL))
    logger.debug("Logging initialized ({})".format(handler.formatter.mode))
