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

import csv
import enum
import os


class MetricType(enum.Enum):
    GENERIC = "generic"
    EPOCH = "epoch"
    BENCH = "bench"
    GRAD_CHECK = "grad_check"


class Metric:
    """A sealed record written as one CSV row.

    Subclasses declare their columns, in file order, as `__slots__` and the type of each
    column in `types`, which is what `from_row` parses back with.
    """

    __slots__ = []
    types = {}
    type = MetricType.GENERIC

    def __init__(self, **kwargs):
        for column in self.columns():
            setattr(self, column, None)
        for k, v in kwargs.items():
            setattr(self, k, v)

    @classmethod
    def columns(cls):
        return list(cls.__slots__)

    def row(self):
        return [_format_cell(getattr(self, k)) for k in self.columns()]

    @classmethod
    def from_row(cls, row):
        if len(row) != len(cls.__slots__):
            raise ValueError("{} rows have {} cells, got {}".format(cls.__name__, len(cls.__slots__), len(row)))
        return cls(**{k: _parse_cell(cls.types.get(k, str), v) for k, v in zip(cls.__slots__, row)})

    def as_dict(self):
        return {k: getattr(self, k) for k in self.columns()}

    def __eq__(self, other):
        return type(other) is type(self) and other.as_dict() == self.as_dict()

    def __repr__(self):
        fields = ", ".join("{}={!r}".format(k, v) for k, v in self.as_dict().items())
        return "{}({})".format(type(self).__name__, fields)


class EpochMetric(Metric):

    __slots__ = ["epoch", "lr", "loss", "psnr"]
    types = {"epoch": int, "lr": float, "loss": float, "psnr": float}
    type = MetricType.EPOCH


class BenchMetric(Metric):

    __slots__ = ["workers", "size", "channels", "seconds", "max_abs_diff", "speedup"]
    types = {"workers": int, "size": int, "channels": int, "seconds": float, "max_abs_diff": float, "speedup": float}
    type = MetricType.BENCH


class GradCheckMetric(Metric):

    __slots__ = ["group", "max_rel_error", "checked", "skipped"]
    types = {"group": str, "max_rel_error": float, "checked": int, "skipped": bool}
    type = MetricType.GRAD_CHECK


def _format_cell(value):
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, bool):
        return "true" if value else "false"
    if value is None:
        return ""
    return value


def _parse_cell(kind, text):
    if text == "":
        return None
    if kind is bool:
        if text not in ("true", "false"):
            raise ValueError("Expected true or false, got '{}'".format(text))
        return text == "true"
    return kind(text)


class MetricWriter:
    """Writes metric rows of one type to a CSV file.

    A new file (or any file when `append` is false) starts with `# metric=<type>`, the
    given `# key=value` header lines and the column row. With `append` an existing file
    of the same metric type is continued.
    """

    def __init__(self, path, metric_class, header_lines=(), append=False):
        self.path = path
        self.metric_class = metric_class
        if append and os.path.exists(path) and os.path.getsize(path) > 0:
            found = _metric_type(path)
            if found is not metric_class.type:
                raise TypeError("{} holds {} metrics, not {}".format(path, found, metric_class.type.value))
        else:
            with open(path, "w", newline="") as f:
                f.write("# metric={}\n".format(metric_class.type.value))
                for line in header_lines:
                    f.write("# {}\n".format(line))
                csv.writer(f, lineterminator="\n").writerow(metric_class.columns())

    def write(self, metric):
        if not isinstance(metric, self.metric_class):
            raise TypeError("Expected {}, got {}".format(self.metric_class.__name__, type(metric).__name__))
        with open(self.path, "a", newline="") as f:
            csv.writer(f, lineterminator="\n").writerow(metric.row())


def read_metrics(path, metric_class):
    """Metrics of one type from a file written by MetricWriter; `# ` header lines are skipped."""
    with open(path, newline="") as f:
        rows = [r for r in csv.reader(f) if r and not r[0].startswith("#")]
    if _metric_type(path) not in (None, metric_class.type):
        raise ValueError("{} does not hold {} rows".format(path, metric_class.__name__))
    if not rows or rows[0] != metric_class.columns():
        raise ValueError("{} does not hold {} rows".format(path, metric_class.__name__))
    return [metric_class.from_row(r) for r in rows[1:]]


def _metric_type(path):
    """The type named by the `# metric=` line of a metrics file, None when absent."""
    with open(path) as f:
        for line in f:
            if not line.startswith("#"):
                return None
            key, _, value = line[1:].strip().partition("=")
            if key == "metric":
                return MetricType(value)
    return None
