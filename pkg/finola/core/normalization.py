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

"""Per-position channel normalization and the fixed-order kernels shared by every propagation path.

Reductions over channels are accumulated left to right with elementwise array
operations, so a vector gives bit-identical results whether it is processed
alone or as one row of a batch.
"""

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class NormContext:
    mean: np.ndarray
    std: np.ndarray


def channel_sum(v):
    total = v[..., 0].copy()
    for c in range(1, v.shape[-1]):
        total = total + v[..., c]
    return total


def matvec(m, v):
    """m @ v over the last axis of v, accumulated column by column."""
    out = m[:, 0] * v[..., 0:1]
    for j in range(1, m.shape[1]):
        out = out + m[:, j] * v[..., j : j + 1]
    return out


def channel_stats(v):
    v = np.asarray(v, dtype=np.float64)
    c = v.shape[-1]
    mean = channel_sum(v) / c
    centered = v - np.asarray(mean)[..., None]
    std = np.sqrt(channel_sum(centered * centered) / c)
    return NormContext(mean=mean, std=std)


def normalize_channels(v, epsilon):
    """(v - mean) / (std + epsilon) over the last axis, population statistics.

    Constant vectors map to exactly zero for any epsilon.
    """
    v = np.asarray(v, dtype=np.float64)
    stats = channel_stats(v)
    centered = v - np.asarray(stats.mean)[..., None]
    denominator = np.asarray(stats.std + epsilon)[..., None]
    varying = np.asarray(v.max(axis=-1) != v.min(axis=-1))[..., None] & (denominator > 0)
    return np.divide(centered, denominator, out=np.zeros_like(centered), where=varying)
