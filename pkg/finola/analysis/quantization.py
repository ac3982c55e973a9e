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

from ..common.exceptions import ShapeMismatch, UsageError
from ..core.types import LatentSet


@dataclass(frozen=True, eq=False)
class QuantSpec:
    """Uniform quantizer per channel: 2**bits levels spanning [low, high]."""

    bits: int
    low: np.ndarray
    high: np.ndarray

    def __post_init__(self):
        if not 1 <= self.bits <= 16:
            raise UsageError("bits must be in [1, 16], got {}".format(self.bits))
        low = np.atleast_1d(np.asarray(self.low, dtype=np.float64))
        high = np.atleast_1d(np.asarray(self.high, dtype=np.float64))
        if low.shape != high.shape:
            raise ShapeMismatch("low and high ranges differ in shape")
        if np.any(high <= low):
            raise UsageError("Every channel range needs high > low")
        object.__setattr__(self, "low", low)
        object.__setattr__(self, "high", high)

    @property
    def levels(self):
        return 2**self.bits

    @property
    def step(self):
        return (self.high - self.low) / (self.levels - 1)

    @classmethod
    def from_data(cls, latents, bits):
        """Ranges from the per-channel min and max over every vector."""
        data = _as_array(latents)
        flat = data.reshape(-1, data.shape[-1])
        low, high = flat.min(axis=0), flat.max(axis=0)
        flat_channels = high <= low
        low = np.where(flat_channels, low - 0.5, low)
        high = np.where(flat_channels, high + 0.5, high)
        return cls(bits, low, high)


@dataclass(frozen=True, eq=False)
class QuantResult:
    codes: np.ndarray
    dequantized: np.ndarray
    bits_per_pixel: float


def _as_array(latents):
    if isinstance(latents, LatentSet):
        return latents.vectors
    return np.asarray(latents, dtype=np.float64)


def quantize_uniform(latents, spec, image_width, image_height):
    """Quantize every channel on its own grid, clamping values outside the range.

    Latents are (M, C) for one image or (N, M, C) for a batch; bits per pixel counts
    the M * C codes of one image.
    """
    data = _as_array(latents)
    if data.shape[-1] != spec.low.shape[0] and spec.low.shape[0] != 1:
        raise ShapeMismatch("Latents have {} channels, spec has {}".format(data.shape[-1], spec.low.shape[0]))
    step = spec.step
    clipped = np.clip(data, spec.low, spec.high)
    codes = np.rint((clipped - spec.low) / step).astype(np.uint32)
    codes = np.minimum(codes, spec.levels - 1)
    dequantized = spec.low + codes * step

    per_image = data.shape[-1] * (data.shape[-2] if data.ndim >= 2 else 1)
    bits_per_pixel = per_image * spec.bits / float(image_width * image_height)
    dequantized = LatentSet(dequantized, latents.positions) if isinstance(latents, LatentSet) else dequantized
    return QuantResult(codes=codes, dequantized=dequantized, bits_per_pixel=bits_per_pixel)
