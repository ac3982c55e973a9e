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

import logging
import os
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from .propagation import Sweep, check_grid, make_advance
from .types import Autoregression, FeatureMap, Ordering


def default_workers():
    return os.cpu_count() or 1


def propagate_parallel(
    q_set,
    params,
    width,
    height,
    workers=None,
    ordering=Ordering.AVERAGED,
    autoregression=Autoregression.NORM_LINEAR,
):
    """Same map as the sequential generator, with the columns (h_first) or rows (v_first)
    of every sweep split into chunks and grown as batches on a thread pool.

    Every element sees the same sequence of floating point operations as in the
    sequential path, so the result is bitwise identical for any worker count.
    """
    check_grid(q_set, params, width, height)
    workers = workers or default_workers()
    advance = make_advance(params, autoregression)
    ordering = Ordering(ordering)
    orderings = [Ordering.H_FIRST, Ordering.V_FIRST] if ordering is Ordering.AVERAGED else [ordering]

    sweeps = []
    for q, origin in q_set.paths():
        q = np.asarray(q, dtype=np.float64)
        sweeps.append([Sweep(q, origin, width, height, advance, o) for o in orderings])

    with ThreadPoolExecutor(workers) as pool:
        seeds = {id(s): pool.submit(s.seed_line) for path in sweeps for s in path}
        futures = []
        for path in sweeps:
            for sweep in path:
                seed = seeds[id(sweep)].result()
                for chunk in np.array_split(np.arange(sweep.line_count), min(workers, sweep.line_count)):
                    futures.append(pool.submit(sweep.fill, seed, chunk))
        for future in futures:
            future.result()

    total = None
    for path in sweeps:
        grid = (path[0].out + path[1].out) * 0.5 if len(path) == 2 else path[0].out
        total = grid if total is None else total + grid

    logging.debug(
        "Parallel propagation of {} paths on a {}x{} grid with {} workers".format(len(q_set), width, height, workers)
    )
    return FeatureMap(total)
