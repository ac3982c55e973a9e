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

from ..core.types import FeatureMap, LatentSet, Ordering


@dataclass(frozen=True)
class WaveResidualReport:
    """|dx zeta_k - lambda_k dy zeta_k| statistics over exact generation cells and over the whole grid."""

    exact_max: float
    exact_mean: float
    exact_cells: int
    all_max: float
    all_mean: float
    all_cells: int

    def rows(self):
        return [
            ("exact", self.exact_cells, self.exact_max, self.exact_mean),
            ("all", self.all_cells, self.all_max, self.all_mean),
        ]


def generation_mask(width, height, origin, ordering):
    """Cells (x, y) at which both forward differences are single generation steps from (x, y),
    so that dx z = Q dy z holds exactly.

    h_first: the origin row from the origin rightwards. v_first: the origin column
    downwards. averaged: the origin cell only.
    """
    x0, y0 = origin
    ordering = Ordering(ordering)
    mask = np.zeros((width, height), dtype=bool)
    if x0 >= width - 1 or y0 >= height - 1:
        return mask
    if ordering is Ordering.H_FIRST:
        mask[x0 : width - 1, y0] = True
    elif ordering is Ordering.V_FIRST:
        mask[x0, y0 : height - 1] = True
    else:
        mask[x0, y0] = True
    return mask


def latent_generation_mask(q_set: LatentSet, width, height, ordering):
    """Intersection of the per-path masks: a sum of maps is exact where every term is."""
    mask = np.ones((width, height), dtype=bool)
    for origin in q_set.positions:
        mask &= generation_mask(width, height, origin, ordering)
    return mask


def wave_residual(zeta, values, mask=None):
    data = zeta.data if isinstance(zeta, FeatureMap) else np.asarray(zeta)
    values = np.asarray(values)
    width, height = data.shape[:2]
    if width < 2 or height < 2:
        return WaveResidualReport(0.0, 0.0, 0, 0.0, 0.0, 0)

    dx = data[1:, :-1] - data[:-1, :-1]
    dy = data[:-1, 1:] - data[:-1, :-1]
    residual = np.abs(dx - values * dy)

    exact_max, exact_mean, exact_cells = 0.0, 0.0, 0
    if mask is not None:
        selected = residual[np.asarray(mask)[:-1, :-1]]
        exact_cells = selected.shape[0]
        if exact_cells:
            exact_max, exact_mean = float(selected.max()), float(selected.mean())

    return WaveResidualReport(
        exact_max=exact_max,
        exact_mean=exact_mean,
        exact_cells=exact_cells,
        all_max=float(residual.max()),
        all_mean=float(residual.mean()),
        all_cells=(width - 1) * (height - 1),
    )


def spectrum_table(basis):
    """(index, re, im, modulus) per latent speed, in the basis order."""
    return [(k, float(v.real), float(v.imag), float(abs(v))) for k, v in enumerate(basis.values)]


def conjugate_pairs(values, tolerance=1e-8):
    """Index pairs (i, j), i < j, with values[j] the conjugate of values[i] and a nonzero imaginary part."""
    values = np.asarray(values)
    scale = max(1.0, float(np.abs(values).max())) if values.size else 1.0
    used = set()
    pairs = []
    for i, v in enumerate(values):
        if i in used or abs(v.imag) <= tolerance * scale:
            continue
        for j in range(i + 1, values.shape[0]):
            if j not in used and abs(values[j] - np.conj(v)) <= tolerance * scale:
                pairs.append((i, j))
                used.update((i, j))
                break
    return pairs
