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

import torch
from torch import nn


class Encoder(nn.Module):
    """Stride-2 3x3 convolutions with GELU, global mean pool, then a linear map to M x C latents."""

    def __init__(self, image_channels, widths, channels, paths):
        super().__init__()
        self.channels = channels
        self.paths = paths
        layers = []
        previous = image_channels
        for width in widths:
            layers.append(nn.Conv2d(previous, width, 3, stride=2, padding=1))
            layers.append(nn.GELU())
            previous = width
        self.features = nn.Sequential(*layers)
        self.head = nn.Linear(previous, channels * paths)

    def forward(self, images):
        x = self.features(images)
        x = torch.mean(x, dim=(2, 3))
        return self.head(x).view(images.shape[0], self.paths, self.channels)
