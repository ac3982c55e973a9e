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

import enum
import math
from dataclasses import dataclass
from typing import List, Tuple

import numpy as np

from ..common.exceptions import DataError, PositionOutOfRange, ShapeMismatch


class Direction(enum.Enum):
    RIGHT = "right"
    LEFT = "left"
    DOWN = "down"
    UP = "up"


class Ordering(enum.Enum):
    H_FIRST = "h_first"
    V_FIRST = "v_first"
    AVERAGED = "averaged"


class Autoregression(enum.Enum):
    NORM_LINEAR = "norm_linear"
    LINEAR = "linear"
    REPETITION = "repetition"
    NORM_NONLINEAR = "norm_nonlinear"


class Normalization(enum.Enum):
    LAYER = "layer"
    BATCH = "batch"


@dataclass(frozen=True, eq=False)
class FeatureMap:
    """A width x height grid of channel vectors, stored as data[x, y, :]."""

    data: np.ndarray

    def __post_init__(self):
        data = np.asarray(self.data)
        if data.ndim != 3 or min(data.shape) < 1:
            raise ShapeMismatch("Feature map must be (width, height, channels), got {}".format(data.shape))
        if not np.all(np.isfinite(data)):
            raise DataError("Feature map has non-finite entries")
        object.__setattr__(self, "data", data)

    @property
    def width(self):
        return self.data.shape[0]

    @property
    def height(self):
        return self.data.shape[1]

    @property
    def channels(self):
        return self.data.shape[2]

    @property
    def field(self):
        return "complex" if np.iscomplexobj(self.data) else "real"

    def astype32(self):
        dtype = np.complex64 if self.field == "complex" else np.float32
        return FeatureMap(self.data.astype(dtype))

    def __getitem__(self, position):
        x, y = position
        return self.data[x, y]


@dataclass(frozen=True, eq=False)
class LatentSet:
    """M initial conditions and the grid cells they are placed at."""

    vectors: np.ndarray
    positions: Tuple[Tuple[int, int], ...]

    def __post_init__(self):
        vectors = np.atleast_2d(np.asarray(self.vectors))
        if vectors.ndim != 2 or vectors.shape[0] < 1:
            raise ShapeMismatch("Latents must be an (M, C) array with M >= 1, got {}".format(vectors.shape))
        positions = tuple((int(x), int(y)) for x, y in self.positions)
        if len(positions) != vectors.shape[0]:
            raise ShapeMismatch("{} latents but {} positions".format(vectors.shape[0], len(positions)))
        object.__setattr__(self, "vectors", vectors)
        object.__setattr__(self, "positions", positions)

    def __len__(self):
        return self.vectors.shape[0]

    @property
    def channels(self):
        return self.vectors.shape[1]

    def paths(self):
        return zip(self.vectors, self.positions)

    def check_positions(self, width, height):
        for x, y in self.positions:
            if not (0 <= x < width and 0 <= y < height):
                raise PositionOutOfRange("Position ({}, {}) is outside the {}x{} grid".format(x, y, width, height))

    @classmethod
    def centered(cls, vectors, width, height):
        vectors = np.atleast_2d(vectors)
        return cls(vectors, [(width // 2, height // 2)] * vectors.shape[0])

    @classmethod
    def scattered(cls, vectors, width, height):
        vectors = np.atleast_2d(vectors)
        return cls(vectors, scatter_positions(vectors.shape[0], width, height))


def scatter_positions(count, width, height) -> List[Tuple[int, int]]:
    """Spread `count` initial conditions over the grid: centres of the cells of the smallest
    near-square g x h tiling (g >= h) with at least `count` cells, taken row by row."""
    if count < 1:
        raise ShapeMismatch("Need at least one position")
    g = math.ceil(math.sqrt(count))
    h = math.ceil(count / g)
    positions = [
        (((2 * i + 1) * width) // (2 * g), ((2 * j + 1) * height) // (2 * h)) for j in range(h) for i in range(g)
    ]
    return positions[:count]
