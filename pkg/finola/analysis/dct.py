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

import numpy as np
import scipy.fft

from ..common.exceptions import UsageError

BLOCK = 8


def zigzag_order(n=BLOCK):
    """(row, col) pairs of an n x n block in JPEG zig-zag order."""
    order = []
    for s in range(2 * n - 1):
        rows = range(max(0, s - n + 1), min(s, n - 1) + 1)
        if s % 2 == 0:
            rows = reversed(rows)
        order.extend((r, s - r) for r in rows)
    return order


def keep_mask(keep, n=BLOCK):
    if not 1 <= keep <= n * n:
        raise UsageError("Number of kept coefficients must be in [1, {}], got {}".format(n * n, keep))
    mask = np.zeros((n, n), dtype=bool)
    for r, c in zigzag_order(n)[:keep]:
        mask[r, c] = True
    return mask


def dct_baseline(image, keep):
    """Orthonormal 8x8 block DCT-II, keep the first `keep` zig-zag coefficients, invert.

    Sizes that are not multiples of 8 are padded by mirroring and cropped afterwards.
    Accepts (height, width) or (height, width, channels) images.
    """
    image = np.asarray(image, dtype=np.float64)
    squeeze = image.ndim == 2
    if squeeze:
        image = image[:, :, None]
    height, width, channels = image.shape
    pad_h, pad_w = -height % BLOCK, -width % BLOCK
    padded = np.pad(image, ((0, pad_h), (0, pad_w), (0, 0)), mode="symmetric")

    h, w = padded.shape[0] // BLOCK, padded.shape[1] // BLOCK
    blocks = padded.reshape(h, BLOCK, w, BLOCK, channels).transpose(0, 2, 4, 1, 3)
    coefficients = scipy.fft.dctn(blocks, type=2, axes=(-2, -1), norm="ortho")
    coefficients = coefficients * keep_mask(keep)
    restored = scipy.fft.idctn(coefficients, type=2, axes=(-2, -1), norm="ortho")
    restored = restored.transpose(0, 3, 1, 4, 2).reshape(padded.shape)[:height, :width]
    return restored[:, :, 0] if squeeze else restored
