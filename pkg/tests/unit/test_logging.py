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

import json
import logging

import pytest

import finola.common.logging as mylogging


class Test:
    def setup_method(self, method):
        self.formatter = mylogging.LogFormatter(mode="json")
        self.record = self.make_record()

    def make_record(self, message="Test Message"):
        return logging.LogRecord("finola.tests.unit", logging.DEBUG, "world", 500, message, None, None)

    def test_root_logger_named_by_setup(self):
        assert logging.getLogger().name == "finola.tests.unit"

    def test_json_fields(self):
        result = json.loads(self.formatter.format(self.record))
        assert result["name"] == "finola.tests.unit"
        assert (result["filename"], result["lineno"]) == ("world", 500)
        assert (result["levelname"], result["message"]) == ("DEBUG", "Test Message")
        assert result["software"] == "finola"
        assert "run_id" not in result

    def test_json_run_fields(self):
        self.record.run_id = "hello"
        self.record.epoch = 3
        result = json.loads(self.formatter.format(self.record))
        assert (result["run_id"], result["epoch"]) == ("hello", 3)

    @pytest.mark.parametrize("field, value", [("run_id", 1234), ("epoch", "3"), ("epoch", True)])
    def test_run_field_types(self, field, value):
        setattr(self.record, field, value)
        with pytest.raises(TypeError):
            self.formatter.format(self.record)

    def test_unknown_extras_ignored(self):
        self.record.unknown_extra_arg = "hello"
        assert "unknown_extra_arg" not in json.loads(self.formatter.format(self.record))

    def test_console_format(self):
        formatter = mylogging.LogFormatter(mode="console")
        line = formatter.format(self.make_record("plain"))
        assert line.endswith("| DEBUG | plain")

    def test_prettyprint_format(self):
        formatter = mylogging.LogFormatter(mode="prettyprint")
        text = formatter.format(self.make_record())
        assert "\n" in text
        assert json.loads(text)["message"] == "Test Message"

    def test_setup_replaces_handler(self):
        logger = logging.getLogger()
        config = {"logging": {"mode": "json", "level": "WARNING"}}
        mylogging.setup(config, "finola.tests.unit")
        mylogging.setup(config, "finola.tests.unit")
        handlers = [h for h in logger.handlers if isinstance(h.formatter, mylogging.LogFormatter)]
        assert len(handlers) == 1
        assert handlers[0].formatter.mode == "json"
        assert logger.level == logging.WARNING
        mylogging.setup({"logging": {"mode": "console", "level": "INFO"}}, "finola.tests.unit")

    def test_console_carries_run_fields(self):
        formatter = mylogging.LogFormatter(mode="console")
        record = self.make_record("loss 0.1")
        record.run_id = "r1"
        record.epoch = 4
        assert formatter.format(record).endswith("| DEBUG | run_id=r1 epoch=4 | loss 0.1")

    def test_unknown_mode(self):
        with pytest.raises(ValueError):
            mylogging.LogFormatter(mode="syslog")


class TestRunLogger:
    def setup_method(self, method):
        self.records = []
        self.logger = logging.getLogger("finola.tests.runlogger")
        self.logger.setLevel(logging.DEBUG)
        self.handler = logging.Handler()
        self.handler.emit = self.records.append
        self.logger.addHandler(self.handler)

    def teardown_method(self, method):
        self.logger.removeHandler(self.handler)

    def test_binds_run_id(self):
        log = mylogging.RunLogger("abc", logger=self.logger)
        log.info("start")
        assert self.records[0].run_id == "abc"
        assert not hasattr(self.records[0], "epoch")

    def test_at_epoch(self):
        log = mylogging.RunLogger("abc", logger=self.logger)
        log.at_epoch(7).warning("step")
        log.info("end")
        assert (self.records[0].run_id, self.records[0].epoch) == ("abc", 7)
        assert not hasattr(self.records[1], "epoch")

    def test_formats_as_json(self):
        log = mylogging.RunLogger("abc", epoch=2, logger=self.logger)
        log.info("hello")
        result = json.loads(mylogging.LogFormatter("json").format(self.records[0]))
        assert result["run_id"] == "abc"
        assert result["epoch"] == 2
        assert result["message"] == "hello"
