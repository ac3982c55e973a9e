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

import tempfile

import numpy as np
import pytest
import yaml

import finola.common.config as finola_config
import finola.common.logging as logging

tmp = tempfile.NamedTemporaryFile(suffix=".yaml")
with open(tmp.name, "w") as tf:
    test_conf = {
        "channels": 6,
        "paths": 1,
        "map_width": 4,
        "map_height": 4,
        "image_width": 8,
        "image_height": 8,
        "encoder_widths": [4, 4, 4],
        "decoder_width": 4,
        "batch_size": 4,
        "warmup_epochs": 1,
        "total_epochs": 3,
        "dataset": {"synthetic": {"count": 8, "seed": 3}},
        "logging": {"mode": "console", "level": "INFO"},
    }
    tf.write(yaml.dump(test_conf))
pytest.basic_config = [tmp.name]

c = finola_config.ConfigParser()
config = c.read(pytest.basic_config)
logging.setup(config, source_name="finola.tests.unit")


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture
def desk_config():
    """The small graph used by model tests: 8x8 images, C=6, 4x4 map."""
    return finola_config.RunConfig.from_dict(finola_config.ConfigParser().read(pytest.basic_config))
