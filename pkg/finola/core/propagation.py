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

"""Whole-map generation from initial conditions.

A single path places q at its origin and fills the grid in two sweeps. With
h_first the origin row is built with right/left steps, then every column is
grown from that row with down/up steps; v_first is the transpose scheme and
averaged is the elementwise mean of the two. The traversal is written against
an ``advance(vectors, direction)`` function so the same code drives z-space
and the transformed (wave) space.
"""

import logging

import numpy as np

from ..common.exceptions import ShapeMismatch, UsageError
from .normalization import matvec, normalize_channels
from .types import Autoregression, Direction, FeatureMap, LatentSet, Ordering


def make_advance(params, autoregression=Autoregression.NORM_LINEAR):
    autoregression = Autoregression(autoregression)

    if autoregression is Autoregression.NORM_NONLINEAR:
        raise UsageError("norm_nonlinear steps carry MLP weights and run only in the trainable layer")

    if autoregression is Autoregression.REPETITION:
        return lambda z, direction: z.copy()

    if autoregression is Autoregression.LINEAR:
        return lambda z, direction: z + matvec(params.direction(direction), z)

    def advance(z, direction):
        return z + matvec(params.direction(direction), normalize_channels(z, params.epsilon))

    return advance


def step(z, direction, params, autoregression=Autoregression.NORM_LINEAR):
    """One generation step: z + M_dir * normalize(z), M_dir in {A, A-, B, B-}."""
    z = np.asarray(z, dtype=np.float64)
    if z.shape[-1] != params.channels:
        raise ShapeMismatch("Vector has {} channels, parameters have {}".format(z.shape[-1], params.channels))
    return make_advance(params, autoregression)(z, Direction(direction))


def fill_line(first, start, length, advance, forward, backward):
    """Grow `first` along one axis: forward steps after `start`, backward steps before it.

    `first` is one vector or a batch of vectors; the result is indexed [position, ...].
    """
    line = np.empty((length,) + first.shape, dtype=first.dtype)
    line[start] = first
    for i in range(start + 1, length):
        line[i] = advance(line[i - 1], forward)
    for i in range(start - 1, -1, -1):
        line[i] = advance(line[i + 1], backward)
    return line


class Sweep:
    """The two-stage traversal of one path under one ordering.

    `seed_line()` builds the origin row (h_first) or column (v_first) sequentially.
    `fill(seed, lines)` grows the given lines, a single index or an index array,
    from the seed and writes them into `out`.
    """

    def __init__(self, q, origin, width, height, advance, ordering):
        self.q = q
        self.x0, self.y0 = origin
        self.width = width
        self.height = height
        self.advance = advance
        self.horizontal_first = Ordering(ordering) is Ordering.H_FIRST
        self.out = np.empty((width, height, q.shape[-1]), dtype=q.dtype)

    @property
    def line_count(self):
        return self.width if self.horizontal_first else self.height

    def seed_line(self):
        if self.horizontal_first:
            return fill_line(self.q, self.x0, self.width, self.advance, Direction.RIGHT, Direction.LEFT)
        return fill_line(self.q, self.y0, self.height, self.advance, Direction.DOWN, Direction.UP)

    def fill(self, seed, lines):
        first = seed[lines]
        if self.horizontal_first:
            grown = fill_line(first, self.y0, self.height, self.advance, Direction.DOWN, Direction.UP)
            self.out[lines] = grown if np.ndim(lines) == 0 else np.swapaxes(grown, 0, 1)
        else:
            grown = fill_line(first, self.x0, self.width, self.advance, Direction.RIGHT, Direction.LEFT)
            self.out[:, lines] = grown

    def run(self):
        seed = self.seed_line()
        for i in range(self.line_count):
            self.fill(seed, i)
        return self.out


def traverse(q, origin, width, height, advance, ordering=Ordering.AVERAGED):
    """Sequential single-path generation, cell by cell."""
    ordering = Ordering(ordering)
    if ordering is Ordering.AVERAGED:
        h = Sweep(q, origin, width, height, advance, Ordering.H_FIRST).run()
        v = Sweep(q, origin, width, height, advance, Ordering.V_FIRST).run()
        return (h + v) * 0.5
    return Sweep(q, origin, width, height, advance, ordering).run()


def check_grid(q_set, params, width, height):
    if width < 1 or height < 1:
        raise ShapeMismatch("Grid must be at least 1x1, got {}x{}".format(width, height))
    if q_set.channels != params.channels:
        raise ShapeMismatch("Latents have {} channels, parameters have {}".format(q_set.channels, params.channels))
    q_set.check_positions(width, height)


def propagate(
    q_set,
    params,
    width,
    height,
    ordering=Ordering.AVERAGED,
    autoregression=Autoregression.NORM_LINEAR,
):
    """Generate a width x height map from a single initial condition."""
    if not isinstance(q_set, LatentSet):
        q_set = LatentSet.centered(q_set, width, height)
    if len(q_set) != 1:
        raise UsageError("propagate takes one path, got {}; use multipath_propagate".format(len(q_set)))
    check_grid(q_set, params, width, height)
    q, origin = next(iter(q_set.paths()))
    advance = make_advance(params, autoregression)
    return FeatureMap(traverse(np.asarray(q, dtype=np.float64), origin, width, height, advance, ordering))


def multipath_propagate(
    q_set,
    params,
    width,
    height,
    ordering=Ordering.AVERAGED,
    autoregression=Autoregression.NORM_LINEAR,
):
    """Sum of single-path maps, one per latent, all sharing `params`. Paths are added in order."""
    check_grid(q_set, params, width, height)
    advance = make_advance(params, autoregression)
    total = None
    for q, origin in q_set.paths():
        grid = traverse(np.asarray(q, dtype=np.float64), origin, width, height, advance, ordering)
        total = grid if total is None else total + grid
    logging.debug("Propagated {} paths on a {}x{} grid".format(len(q_set), width, height))
    return FeatureMap(total)
