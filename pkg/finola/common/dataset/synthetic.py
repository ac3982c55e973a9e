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

from . import dataset


class SyntheticDataset(dataset.Dataset):
    """Seeded smooth images: a few oriented sinusoids plus Gaussian blobs, rescaled to [0, 1].

    Image i depends only on (seed, i), so any subset can be regenerated independently.
    """

    def __init__(self, config, width, height, channels):
        self.type = "synthetic"
        self.count = int(config.get("count", 512))
        self.seed = int(config.get("seed", 0))
        self.width = width
        self.height = height
        self.channels = channels
        self._cache = {}

    def get_type(self):
        return self.type

    def __len__(self):
        return self.count

    def __getitem__(self, index):
        if not 0 <= index < self.count:
            raise IndexError("image index {} out of range [0, {})".format(index, self.count))
        if index not in self._cache:
            self._cache[index] = self._render(index)
        return self._cache[index]

    def _render(self, index):
        rng = np.random.default_rng([self.seed, index])
        y, x = np.meshgrid(
            np.linspace(0.0, 1.0, self.height), np.linspace(0.0, 1.0, self.width), indexing="ij"
        )
        image = np.empty((self.height, self.width, self.channels))
        for c in range(self.channels):
            field = np.zeros_like(x)
            for _ in range(2):
                theta = rng.uniform(0.0, np.pi)
                frequency = rng.uniform(0.5, 2.5)
                phase = rng.uniform(0.0, 2 * np.pi)
                field += rng.uniform(0.3, 1.0) * np.sin(
                    2 * np.pi * frequency * (x * np.cos(theta) + y * np.sin(theta)) + phase
                )
            for _ in range(2):
                cx, cy = rng.uniform(0.0, 1.0, size=2)
                width = rng.uniform(0.1, 0.3)
                field += rng.uniform(-1.0, 1.0) * np.exp(-((x - cx) ** 2 + (y - cy) ** 2) / (2 * width**2))
            low, high = field.min(), field.max()
            image[:, :, c] = (field - low) / (high - low) if high > low else 0.5
        return image
