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

import os
from dataclasses import dataclass

import numpy as np

from ..common.exceptions import ShapeMismatch, UsageError
from ..common.io.image import save_image
from ..core.types import FeatureMap


@dataclass(frozen=True, eq=False)
class CurvatureField:
    """Gaussian curvature kappa[x, y, k] of every channel surface, with a per-channel score
    sqrt((peak_pos**2 + peak_neg**2) / 2) and channels ranked by descending score."""

    kappa: np.ndarray
    scores: np.ndarray
    ranking: np.ndarray


def _second_difference(f, spacing, axis):
    f = np.moveaxis(f, axis, 0)
    out = np.empty_like(f)
    out[1:-1] = (f[2:] - 2.0 * f[1:-1] + f[:-2]) / spacing**2
    # the border reuses the one-sided stencil, which is the neighbouring interior stencil
    out[0] = out[1]
    out[-1] = out[-2]
    return np.moveaxis(out, 0, axis)


def gaussian_curvature(z, spacing=1.0):
    """kappa = (z_xx z_yy - z_xy**2) / (1 + z_x**2 + z_y**2)**2 per channel.

    First derivatives are central inside and one-sided on the border; z_xy is the
    y-derivative of z_x.
    """
    data = z.data if isinstance(z, FeatureMap) else np.asarray(z, dtype=np.float64)
    if data.ndim == 2:
        data = data[:, :, None]
    if data.shape[0] < 3 or data.shape[1] < 3:
        raise ShapeMismatch("Curvature needs at least a 3x3 grid, got {}x{}".format(*data.shape[:2]))
    data = data.astype(np.float64)

    z_x = np.gradient(data, spacing, axis=0)
    z_y = np.gradient(data, spacing, axis=1)
    z_xx = _second_difference(data, spacing, axis=0)
    z_yy = _second_difference(data, spacing, axis=1)
    z_xy = np.gradient(z_x, spacing, axis=1)

    kappa = (z_xx * z_yy - z_xy**2) / (1.0 + z_x**2 + z_y**2) ** 2
    scores = peak_scores(kappa)
    return CurvatureField(kappa=kappa, scores=scores, ranking=rank_channels(scores))


def peak_scores(kappa):
    positive = np.maximum(kappa.max(axis=(0, 1)), 0.0)
    negative = np.maximum(-kappa.min(axis=(0, 1)), 0.0)
    return np.sqrt((positive**2 + negative**2) / 2.0)


def rank_channels(field):
    scores = field.scores if isinstance(field, CurvatureField) else np.asarray(field)
    return np.argsort(-scores, kind="stable")


def curvature_to_pgm(field, channel, path):
    """Heatmap of one channel, min to black and max to white; min/max go to `path`.txt."""
    if not 0 <= channel < field.kappa.shape[2]:
        raise UsageError("Channel {} out of range [0, {})".format(channel, field.kappa.shape[2]))
    values = field.kappa[:, :, channel]
    low, high = float(values.min()), float(values.max())
    scaled = (values - low) / (high - low) if high > low else np.zeros_like(values)
    # maps are indexed [x, y], images [row, column]
    save_image(path, scaled.T)
    with open(os.path.splitext(path)[0] + ".txt", "w") as f:
        f.write("channel={}\nmin={!r}\nmax={!r}\n".format(channel, low, high))
