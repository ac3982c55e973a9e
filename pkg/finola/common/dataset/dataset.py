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
from abc import ABC
from importlib import import_module

import numpy as np

#######################################################


class Dataset(ABC):
    """An indexable collection of images, each a float64 (height, width, channels) array in [0, 1]."""

    def __init__(self, config, width, height, channels):
        """Instantiate a dataset producing images of the given size"""
        raise NotImplementedError()

    def __len__(self) -> int:
        raise NotImplementedError()

    def __getitem__(self, index) -> np.ndarray:
        raise NotImplementedError()

    def get_type(self) -> str:
        """Returns a string stating the type of this object (e.g. synthetic, folder)"""
        raise NotImplementedError()

    def as_array(self):
        """Stack every image into one (N, height, width, channels) array"""
        return np.stack([self[i] for i in range(len(self))])


#######################################################

type_to_class_map = {
    "synthetic": "SyntheticDataset",
    "folder": "FolderDataset",
}


def create_dataset(config, width, height, channels):
    """Build the dataset named by the single key of the `dataset` config mapping"""

    if isinstance(config, str):
        config = {config: {}}
    if len(config) != 1:
        raise KeyError("Expected exactly one dataset type, got {}".format(sorted(config)))

    type = next(iter(config))
    module = import_module("finola.common.dataset." + type)
    dataset_class = type_to_class_map[type]

    constructor = getattr(module, dataset_class)
    dataset = constructor(config[type] or {}, width, height, channels)

    logging.info("Dataset {} initialized [{}], {} images.".format(type, dataset_class, len(dataset)))

    return dataset
