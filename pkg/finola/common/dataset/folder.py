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

import logging
import os

import numpy as np

from ..exceptions import ShapeMismatch, UsageError
from ..io.image import load_image, png_supported
from . import dataset


class FolderDataset(dataset.Dataset):
    """Every PGM/PPM (and PNG with Pillow) file of a directory, in name order."""

    def __init__(self, config, width, height, channels):
        self.type = "folder"
        self.path = config["path"]
        self.resize = bool(config.get("resize", False))
        self.width = width
        self.height = height
        self.channels = channels

        if not os.path.isdir(self.path):
            raise UsageError("Dataset folder {} does not exist".format(self.path))

        extensions = (".pgm", ".ppm", ".png") if png_supported() else (".pgm", ".ppm")
        self.files = sorted(
            os.path.join(self.path, f) for f in os.listdir(self.path) if f.lower().endswith(extensions)
        )
        if not self.files:
            raise UsageError("No images found in {}".format(self.path))
        logging.debug("Found {} images in {}".format(len(self.files), self.path))

    def get_type(self):
        return self.type

    def __len__(self):
        return len(self.files)

    def __getitem__(self, index):
        image = load_image(self.files[index])
        if image.shape[:2] != (self.height, self.width):
            if not self.resize:
                raise ShapeMismatch(
                    "{} is {}x{}, expected {}x{}".format(
                        self.files[index], image.shape[1], image.shape[0], self.width, self.height
                    )
                )
            image = resize_nearest(image, self.width, self.height)
        return _match_channels(image, self.channels)


def resize_nearest(image, width, height):
    rows = (np.arange(height) * image.shape[0]) // height
    cols = (np.arange(width) * image.shape[1]) // width
    return image[rows][:, cols]


def _match_channels(image, channels):
    if image.shape[2] == channels:
        return image
    if channels == 1:
        return image.mean(axis=2, keepdims=True)
    return np.repeat(image, channels, axis=2)
