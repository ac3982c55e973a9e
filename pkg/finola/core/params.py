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

from dataclasses import dataclass

import numpy as np

from ..common.exceptions import DataError, ShapeMismatch
from .types import Direction


@dataclass(frozen=True, eq=False)
class FinolaParams:
    """The four direction matrices of the recursion and the normalization guard.

    A steps right, A_minus left, B down and B_minus up.
    """

    A: np.ndarray
    B: np.ndarray
    A_minus: np.ndarray
    B_minus: np.ndarray
    epsilon: float = 1e-12

    def __post_init__(self):
        shape = None
        for name in ("A", "B", "A_minus", "B_minus"):
            m = np.array(getattr(self, name), dtype=np.float64)
            if m.ndim != 2 or m.shape[0] != m.shape[1]:
                raise ShapeMismatch("{} must be a square matrix, got shape {}".format(name, m.shape))
            if shape is not None and m.shape != shape:
                raise ShapeMismatch("{} has shape {}, expected {}".format(name, m.shape, shape))
            if not np.all(np.isfinite(m)):
                raise DataError("{} has non-finite entries".format(name))
            shape = m.shape
            m.setflags(write=False)
            object.__setattr__(self, name, m)
        if self.epsilon < 0:
            raise DataError("epsilon must be non-negative")
        object.__setattr__(self, "epsilon", float(self.epsilon))

    @property
    def channels(self):
        return self.A.shape[0]

    def direction(self, direction):
        direction = Direction(direction)
        return {
            Direction.RIGHT: self.A,
            Direction.LEFT: self.A_minus,
            Direction.DOWN: self.B,
            Direction.UP: self.B_minus,
        }[direction]

    def matrices(self):
        return {"A": self.A, "B": self.B, "A_minus": self.A_minus, "B_minus": self.B_minus}

    @classmethod
    def random(cls, channels, rng, scale=None, epsilon=1e-12):
        """Entries uniform in (-scale, scale), scale defaulting to 1/sqrt(C)."""
        scale = 1.0 / np.sqrt(channels) if scale is None else scale
        A, B, A_minus, B_minus = (rng.uniform(-scale, scale, size=(channels, channels)) for _ in range(4))
        return cls(A, B, A_minus, B_minus, epsilon)

    @classmethod
    def zeros(cls, channels, epsilon=1e-12):
        z = np.zeros((channels, channels))
        return cls(z, z, z, z, epsilon)
