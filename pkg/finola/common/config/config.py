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

import copy
import logging
import os

import pykwalify
import yaml
from pykwalify.core import Core

from .. import config as finola_config
from ..exceptions import InvalidConfig

DEFAULTS = {
    "channels": 16,
    "paths": 1,
    "map_width": 4,
    "map_height": 4,
    "image_width": 16,
    "image_height": 16,
    "image_channels": 1,
    "ordering": "averaged",
    "epsilon": 1e-6,
    "constraint": "complex_free",
    "autoregression": "norm_linear",
    "normalization": "layer",
    "position_embedding": False,
    "scatter_positions": False,
    "decoder_width": 32,
    "encoder_widths": [16, 32, 64],
    "base_lr": 1.5e-4,
    "weight_decay": 0.1,
    "batch_size": 128,
    "warmup_epochs": 10,
    "total_epochs": 100,
    "schedule": "cosine",
    "beta1": 0.9,
    "beta2": 0.999,
    "grad_clip": 0.0,
    "checkpoint_every": 0,
    "dataset": {"synthetic": {}},
    "seed": 0,
    "workers": 1,
    "logging": {"mode": "console", "level": "INFO"},
}

# keys naming exactly one alternative: a later layer replaces them instead of merging into them
SINGLE_SOURCE_KEYS = ("dataset",)

SCHEMA_FILE = os.path.join(os.path.dirname(os.path.abspath(__file__)), "schema.yaml")


def merge(*configs):
    """Merge mappings left to right. Nested mappings merge, any other value (lists
    included) is replaced, and a None value deletes the key."""
    result = {}
    for layer in configs:
        result = _overlay(result, layer)
    return result


def _overlay(base, layer):
    if not isinstance(layer, dict):
        return copy.deepcopy(layer)
    result = copy.deepcopy(base) if isinstance(base, dict) else {}
    for key, value in layer.items():
        if value is None:
            result.pop(key, None)
        elif isinstance(result.get(key), dict) and isinstance(value, dict):
            result[key] = _overlay(result[key], value)
        else:
            result[key] = copy.deepcopy(value)
    return result


def expand_env(value):
    """`$VAR` and `~` expanded in every string of a nested mapping or list"""
    if isinstance(value, dict):
        return {k: expand_env(v) for k, v in value.items()}
    if isinstance(value, list):
        return [expand_env(v) for v in value]
    if isinstance(value, str):
        return os.path.expanduser(os.path.expandvars(value))
    return value


class ConfigParser:
    """Layers defaults, YAML run files (FINOLA_CONFIG first, then the given ones) and
    command line overrides, then validates the result against schema.yaml."""

    def read(self, additional_yaml=None, overrides=None, with_defaults=True):
        self.yaml_files = list(additional_yaml or [])
        env_file = os.environ.get("FINOLA_CONFIG")
        if env_file and os.path.isfile(env_file):
            self.yaml_files.insert(0, env_file)

        layers = [DEFAULTS] if with_defaults else []
        for path in self.yaml_files:
            layers += self._load(path)
        if overrides:
            layers.append({k: v for k, v in overrides.items() if v is not None})

        config = merge(*layers)
        for key in SINGLE_SOURCE_KEYS:
            chosen = [layer[key] for layer in layers if layer.get(key)]
            if chosen:
                config[key] = copy.deepcopy(chosen[-1])
        self.config = expand_env(config)
        self._validate()
        finola_config.global_config = self.config
        return self.config

    def list_config_files(self):
        return self.yaml_files

    def dump(self):
        return yaml.safe_dump(self.config, default_flow_style=False, sort_keys=True)

    @staticmethod
    def _load(path):
        with open(path, "r") as f:
            documents = [d for d in yaml.safe_load_all(f) if d is not None]
        for document in documents:
            if not isinstance(document, dict):
                raise InvalidConfig("Run configuration {} is not a key: value mapping".format(path))
        logging.debug("Read {} document(s) from {}".format(len(documents), path))
        return documents

    def _validate(self):
        core = Core(source_data=self.config, schema_files=[SCHEMA_FILE], extensions=[])
        try:
            pykwalify.init_logging(0)
            core.validate(raise_exception=True)
        except pykwalify.errors.SchemaError:
            # the log handler may not be installed yet, so the errors also travel in the exception
            errors = "; ".join(core.validation_errors)
            logging.error("Run configuration rejected: {}".format(errors))
            raise InvalidConfig("Run configuration rejected: {}".format(errors))
