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

import time

import click
import numpy as np

from ...common.metric import BenchMetric, MetricWriter
from ...core.parallel import propagate_parallel
from ...core.params import FinolaParams
from ...core.propagation import multipath_propagate
from ...core.types import LatentSet
from . import helpers


@click.command(name="bench-parallel", short_help="Time parallel propagation against the sequential generator.")
@click.option("size", "--size", type=int, default=64, show_default=True)
@click.option("channels", "--channels", type=int, default=16, show_default=True)
@click.option("repeats", "--repeats", type=int, default=1, show_default=True)
@click.option("out", "--out", type=click.Path(dir_okay=False), default=None, help="CSV of the timings.")
@click.option(
    "config_files",
    "-c",
    "--config",
    multiple=True,
    type=click.Path(exists=True, dir_okay=False),
    help="YAML run configuration, may be repeated (later files win).",
)
@click.option("seed", "--seed", type=int, default=None, help="Seed of the random parameters and latent.")
@click.option(
    "worker_counts",
    "--workers",
    default="1,8",
    show_default=True,
    envvar="FINOLA_WORKERS",
    help="Comma separated worker counts to time (falls back to FINOLA_WORKERS).",
)
@helpers.reports_errors
def bench_parallel(**kwargs):
    config = helpers.load_run_config(config_files=kwargs["config_files"], seed=kwargs["seed"])
    size, channels = kwargs["size"], kwargs["channels"]
    rng = np.random.default_rng(config.seed)
    params = FinolaParams.random(channels, rng, epsilon=config.epsilon)
    q_set = LatentSet.centered(rng.standard_normal(channels), size, size)

    reference, sequential = _timed(lambda: multipath_propagate(q_set, params, size, size), kwargs["repeats"])
    writer = MetricWriter(kwargs["out"], BenchMetric) if kwargs["out"] else None

    helpers.emit("mode", "workers", "seconds", "max_abs_diff", "speedup")
    helpers.emit("sequential", 1, sequential, 0.0, 1.0)
    equal = True
    scale = float(np.max(np.abs(reference.data)))
    for workers in helpers.int_list(kwargs["worker_counts"]):
        result, seconds = _timed(
            lambda: propagate_parallel(q_set, params, size, size, workers=workers), kwargs["repeats"]
        )
        diff = float(np.max(np.abs(result.data - reference.data)))
        equal = equal and diff <= 1e-6 * scale
        metric = BenchMetric(
            workers=workers,
            size=size,
            channels=channels,
            seconds=seconds,
            max_abs_diff=diff,
            speedup=sequential / seconds,
        )
        if writer is not None:
            writer.write(metric)
        helpers.emit("parallel", workers, seconds, diff, metric.speedup)
    helpers.emit("equal", "true" if equal else "false")


def _timed(function, repeats):
    best, result = None, None
    for _ in range(max(repeats, 1)):
        start = time.perf_counter()
        result = function()
        elapsed = time.perf_counter() - start
        best = elapsed if best is None else min(best, elapsed)
    return result, best
