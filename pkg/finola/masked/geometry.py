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

"""Quadrant block masking.

One W/2 x H/2 block of the grid stays visible; the block may sit at any offset
(ox, oy) with 0 <= ox <= W/2 and 0 <= oy <= H/2. Each visible cell (x, y)
predicts three masked cells, its translates by half the grid (wrapping):
horizontal (x + W/2, y), vertical (x, y + H/2) and diagonal (both). A
horizontal jump that does not wrap goes right and uses A, one that wraps goes
left and uses A-; vertical jumps use B or B- the same way, and a diagonal target
applies the horizontal step followed by the vertical one. Visible cells sharing a
sign pattern form a group: a block in a corner has one group, on an edge two,
in the middle four.
"""

import enum
from dataclasses import dataclass
from typing import Tuple

import numpy as np
import torch

from ..common.exceptions import ShapeMismatch, UsageError
from ..common.io.image import save_image
from ..core.propagation import make_advance
from ..core.types import Autoregression, Direction, FeatureMap
from ..model.loss import loss_l2


class LocationClass(enum.Enum):
    CORNER = "corner"
    EDGE = "edge"
    MIDDLE = "middle"


@dataclass(frozen=True)
class MaskGroup:
    horizontal: Direction
    vertical: Direction
    sources: Tuple[Tuple[int, int], ...]
    # (horizontal, vertical, diagonal) target cell per source
    targets: Tuple[Tuple[Tuple[int, int], Tuple[int, int], Tuple[int, int]], ...]


@dataclass(frozen=True)
class QuadrantMask:
    width: int
    height: int
    offset: Tuple[int, int]

    def __post_init__(self):
        if self.width % 2 or self.height % 2 or self.width < 2 or self.height < 2:
            raise UsageError("Quadrant masks need even grid sizes, got {}x{}".format(self.width, self.height))
        ox, oy = self.offset
        if not (0 <= ox <= self.width // 2 and 0 <= oy <= self.height // 2):
            raise UsageError(
                "Offset {} puts the block outside the {}x{} grid".format(self.offset, self.width, self.height)
            )

    @property
    def block_size(self):
        return self.width // 2, self.height // 2

    @property
    def location_class(self):
        ox, oy = self.offset
        touched = (ox == 0 or ox == self.width // 2) + (oy == 0 or oy == self.height // 2)
        return {2: LocationClass.CORNER, 1: LocationClass.EDGE, 0: LocationClass.MIDDLE}[touched]

    def sources(self):
        ox, oy = self.offset
        bw, bh = self.block_size
        return [(x, y) for x in range(ox, ox + bw) for y in range(oy, oy + bh)]

    def targets(self, source):
        x, y = source
        bw, bh = self.block_size
        tx, ty = (x + bw) % self.width, (y + bh) % self.height
        return (tx, y), (x, ty), (tx, ty)

    def directions(self, source):
        x, y = source
        horizontal = Direction.RIGHT if x < self.width // 2 else Direction.LEFT
        vertical = Direction.DOWN if y < self.height // 2 else Direction.UP
        return horizontal, vertical

    @property
    def groups(self):
        grouped = {}
        for source in self.sources():
            grouped.setdefault(self.directions(source), []).append(source)
        return [
            MaskGroup(
                horizontal=h,
                vertical=v,
                sources=tuple(cells),
                targets=tuple(self.targets(c) for c in cells),
            )
            for (h, v), cells in sorted(grouped.items(), key=lambda item: (item[0][0].value, item[0][1].value))
        ]


def sample_mask(width, height, rng):
    """Block offset drawn uniformly from every valid placement."""
    ox = int(rng.integers(0, width // 2 + 1))
    oy = int(rng.integers(0, height // 2 + 1))
    return QuadrantMask(width, height, (ox, oy))


def enumerate_masks(width, height):
    return [QuadrantMask(width, height, (ox, oy)) for ox in range(width // 2 + 1) for oy in range(height // 2 + 1)]


def mask_array(mask):
    """(W, H) array, 1 on the visible block and 0 on the masked region."""
    out = np.zeros((mask.width, mask.height), dtype=np.uint8)
    ox, oy = mask.offset
    bw, bh = mask.block_size
    out[ox : ox + bw, oy : oy + bh] = 1
    return out


def mask_to_pgm(mask, path):
    save_image(path, mask_array(mask).T.astype(np.float64))


def predict_masked(z_unmasked, mask, params, autoregression=Autoregression.NORM_LINEAR):
    """Full-grid map: visible cells keep their features, every masked cell holds the
    prediction from its source.

    `z_unmasked` is either the visible block (W/2, H/2, C) or a full (W, H, C) grid of
    which only the visible block is read.
    """
    data = z_unmasked.data if isinstance(z_unmasked, FeatureMap) else np.asarray(z_unmasked, dtype=np.float64)
    bw, bh = mask.block_size
    ox, oy = mask.offset
    if data.shape[:2] == (bw, bh):
        block = data
    elif data.shape[:2] == (mask.width, mask.height):
        block = data[ox : ox + bw, oy : oy + bh]
    else:
        raise ShapeMismatch(
            "Features of shape {} match neither the block nor the {}x{} grid".format(
                data.shape, mask.width, mask.height
            )
        )
    if data.shape[2] != params.channels:
        raise ShapeMismatch("Features have {} channels, parameters have {}".format(data.shape[2], params.channels))

    advance = make_advance(params, autoregression)
    out = np.zeros((mask.width, mask.height, data.shape[2]), dtype=np.float64)
    out[ox : ox + bw, oy : oy + bh] = block
    for group in mask.groups:
        sources = np.stack([block[x - ox, y - oy] for x, y in group.sources]).astype(np.float64)
        horizontal = advance(sources, group.horizontal)
        vertical = advance(sources, group.vertical)
        diagonal = advance(horizontal, group.vertical)
        for i, (h, v, d) in enumerate(group.targets):
            out[h] = horizontal[i]
            out[v] = vertical[i]
            out[d] = diagonal[i]
    return FeatureMap(out)


def masked_loss(reconstruction, target, mask):
    """L2 loss restricted to the image pixels under masked grid cells.

    Images are (N, ch, H_img, W_img) tensors; the grid mask is upsampled by
    repetition to the image size.
    """
    reconstruction = torch.as_tensor(reconstruction)
    image_height, image_width = reconstruction.shape[-2:]
    if image_width % mask.width or image_height % mask.height:
        raise ShapeMismatch(
            "Image {}x{} is not a multiple of the {}x{} grid".format(image_width, image_height, mask.width, mask.height)
        )
    masked = 1 - mask_array(mask).T
    pixels = np.kron(masked, np.ones((image_height // mask.height, image_width // mask.width), dtype=np.uint8))
    return loss_l2(reconstruction, target, torch.as_tensor(pixels))
