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

"""Differentiable FINOLA propagation.

The layer maps latents (N, M, C) to a feature map (N, C, H, W). Every path is
grown with the same ordering scheme as finola.core.propagation; the images of
a batch are processed together and each sweep steps all columns (or rows) of
the batch at once.
"""

import math

import torch
from torch import nn

from ..core.types import Autoregression, Normalization, Ordering, scatter_positions
from ..wave.constrained import ConstraintMode

DIRECTIONS = ("A", "B", "A_minus", "B_minus")


def normalize(z, epsilon, normalization=Normalization.LAYER):
    """Layer: per cell over channels. Batch: per channel over the batch and the current line."""
    if normalization is Normalization.BATCH:
        dims = tuple(range(z.dim() - 1))
    else:
        dims = (-1,)
    mean = z.mean(dim=dims, keepdim=True)
    centered = z - mean
    std = torch.sqrt((centered * centered).mean(dim=dims, keepdim=True))
    return centered / (std + epsilon)


class FinolaLayer(nn.Module):
    def __init__(
        self,
        channels,
        paths,
        width,
        height,
        ordering=Ordering.AVERAGED,
        constraint=ConstraintMode.COMPLEX_FREE,
        autoregression=Autoregression.NORM_LINEAR,
        normalization=Normalization.LAYER,
        epsilon=1e-6,
        scatter=False,
    ):
        super().__init__()
        self.channels = channels
        self.paths = paths
        self.width = width
        self.height = height
        self.ordering = Ordering(ordering)
        self.constraint = ConstraintMode(constraint)
        self.autoregression = Autoregression(autoregression)
        self.normalization = Normalization(normalization)
        self.epsilon = epsilon
        if scatter:
            self.positions = scatter_positions(paths, width, height)
        else:
            self.positions = [(width // 2, height // 2)] * paths

        bound = 1.0 / math.sqrt(channels)

        def square():
            return nn.Parameter(torch.empty(channels, channels).uniform_(-bound, bound))

        def speeds():
            return nn.Parameter(torch.empty(channels).uniform_(0.5, 1.5))

        if self.autoregression is Autoregression.NORM_NONLINEAR:
            # two layers with GELU in between, one per direction
            self.mlps = nn.ModuleDict(
                (name, nn.Sequential(nn.Linear(channels, channels), nn.GELU(), nn.Linear(channels, channels)))
                for name in DIRECTIONS
            )
        elif self.constraint is ConstraintMode.COMPLEX_FREE:
            self.A, self.B, self.A_minus, self.B_minus = square(), square(), square(), square()
        elif self.constraint is ConstraintMode.REAL_SPEED:
            self.P = square()
            self.alpha, self.beta, self.alpha_minus, self.beta_minus = speeds(), speeds(), speeds(), speeds()
        else:
            self.P = square()

    def matrices(self):
        """The step map of every direction: a matrix, or the direction's MLP for norm_nonlinear."""
        if self.autoregression is Autoregression.NORM_NONLINEAR:
            return dict(self.mlps.items())
        if self.constraint is ConstraintMode.COMPLEX_FREE:
            return {"A": self.A, "B": self.B, "A_minus": self.A_minus, "B_minus": self.B_minus}
        if self.constraint is ConstraintMode.REAL_SPEED:
            return {
                "A": self.P * self.alpha,
                "B": self.P * self.beta,
                "A_minus": self.P * self.alpha_minus,
                "B_minus": self.P * self.beta_minus,
            }
        return {"A": self.P, "B": self.P, "A_minus": self.P, "B_minus": self.P}

    def _advance(self, z, matrix):
        if self.autoregression is Autoregression.REPETITION:
            return z
        if self.autoregression is Autoregression.LINEAR:
            return z + z @ matrix.T
        normalized = normalize(z, self.epsilon, self.normalization)
        if self.autoregression is Autoregression.NORM_NONLINEAR:
            return z + matrix(normalized)
        return z + normalized @ matrix.T

    def _line(self, first, start, length, forward, backward):
        values = [None] * length
        values[start] = first
        for i in range(start + 1, length):
            values[i] = self._advance(values[i - 1], forward)
        for i in range(start - 1, -1, -1):
            values[i] = self._advance(values[i + 1], backward)
        return torch.stack(values, dim=1)

    def _sweep(self, q, origin, ordering, m):
        """One path under one ordering, returned as (N, H, W, C)."""
        x0, y0 = origin
        if ordering is Ordering.H_FIRST:
            row = self._line(q, x0, self.width, m["A"], m["A_minus"])
            return self._line(row, y0, self.height, m["B"], m["B_minus"])
        column = self._line(q, y0, self.height, m["B"], m["B_minus"])
        return self._line(column, x0, self.width, m["A"], m["A_minus"]).transpose(1, 2)

    def forward(self, latents):
        m = self.matrices()
        if self.ordering is Ordering.AVERAGED:
            orderings = [Ordering.H_FIRST, Ordering.V_FIRST]
        else:
            orderings = [self.ordering]
        total = None
        for path, origin in enumerate(self.positions):
            q = latents[:, path]
            maps = [self._sweep(q, origin, o, m) for o in orderings]
            grid = maps[0] if len(maps) == 1 else (maps[0] + maps[1]) * 0.5
            total = grid if total is None else total + grid
        return total.permute(0, 3, 1, 2)
