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

import math
from dataclasses import dataclass
from typing import Tuple

from torch import nn

from ..common.exceptions import ShapeMismatch

UP_CONV = "up_conv"
RES_CONV = "res_conv"


@dataclass(frozen=True)
class DecoderSpec:
    """Blocks applied in order to a (C, map_height, map_width) feature map, then a final
    3x3 convolution to the image channels. Each up_conv doubles the resolution."""

    input_channels: int
    map_size: Tuple[int, int]
    blocks: Tuple[Tuple[str, int], ...]
    image_channels: int

    @property
    def output_size(self):
        ups = sum(1 for kind, _ in self.blocks if kind == UP_CONV)
        return (self.map_size[0] * 2**ups, self.map_size[1] * 2**ups)

    @classmethod
    def for_sizes(cls, channels, map_width, map_height, image_width, image_height, width, image_channels):
        """Enough up_conv blocks to reach the image size, then one res_conv."""
        if image_width % map_width or image_height % map_height:
            raise ShapeMismatch("Image size must be a multiple of the map size")
        factor = image_width // map_width
        if factor != image_height // map_height or factor & (factor - 1):
            raise ShapeMismatch(
                "Map {}x{} cannot be upsampled to {}x{} by doubling".format(
                    map_width, map_height, image_width, image_height
                )
            )
        ups = int(math.log2(factor))
        blocks = tuple([(UP_CONV, width)] * ups + [(RES_CONV, width)])
        return cls(channels, (map_width, map_height), blocks, image_channels)


class UpConv(nn.Module):
    def __init__(self, in_channels, out_channels):
        super().__init__()
        self.upsample = nn.Upsample(scale_factor=2, mode="nearest")
        self.conv = nn.Conv2d(in_channels, out_channels, 3, padding=1)
        self.act = nn.GELU()

    def forward(self, x):
        return self.act(self.conv(self.upsample(x)))


class ResConv(nn.Module):
    def __init__(self, in_channels, out_channels):
        super().__init__()
        self.conv1 = nn.Conv2d(in_channels, out_channels, 3, padding=1)
        self.conv2 = nn.Conv2d(out_channels, out_channels, 3, padding=1)
        self.act = nn.GELU()
        self.skip = nn.Identity() if in_channels == out_channels else nn.Conv2d(in_channels, out_channels, 1)

    def forward(self, x):
        return self.skip(x) + self.conv2(self.act(self.conv1(x)))


class Decoder(nn.Module):
    def __init__(self, spec):
        super().__init__()
        self.spec = spec
        blocks = []
        previous = spec.input_channels
        for kind, channels in spec.blocks:
            if kind == UP_CONV:
                blocks.append(UpConv(previous, channels))
            elif kind == RES_CONV:
                blocks.append(ResConv(previous, channels))
            else:
                raise ValueError("Unknown decoder block {}".format(kind))
            previous = channels
        self.blocks = nn.Sequential(*blocks)
        self.final = nn.Conv2d(previous, spec.image_channels, 3, padding=1)

    def forward(self, z):
        if z.shape[1] != self.spec.input_channels or tuple(z.shape[2:]) != self.spec.map_size[::-1]:
            raise ShapeMismatch(
                "Decoder expects (N, {}, {}, {}), got {}".format(
                    self.spec.input_channels, self.spec.map_size[1], self.spec.map_size[0], tuple(z.shape)
                )
            )
        return self.final(self.blocks(z))
