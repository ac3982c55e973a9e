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

from dataclasses import asdict, dataclass, field
from typing import Any, Dict, Tuple

from ..exceptions import InvalidConfig

FLOAT_KEYS = ("epsilon", "base_lr", "weight_decay", "beta1", "beta2", "grad_clip")


@dataclass(frozen=True)
class RunConfig:
    """Validated, typed view of a merged run configuration."""

    channels: int = 16
    paths: int = 1
    map_width: int = 4
    map_height: int = 4
    image_width: int = 16
    image_height: int = 16
    image_channels: int = 1
    ordering: str = "averaged"
    epsilon: float = 1e-6
    constraint: str = "complex_free"
    autoregression: str = "norm_linear"
    normalization: str = "layer"
    position_embedding: bool = False
    scatter_positions: bool = False
    decoder_width: int = 32
    encoder_widths: Tuple[int, ...] = (16, 32, 64)
    base_lr: float = 1.5e-4
    weight_decay: float = 0.1
    batch_size: int = 128
    warmup_epochs: int = 10
    total_epochs: int = 100
    schedule: str = "cosine"
    beta1: float = 0.9
    beta2: float = 0.999
    grad_clip: float = 0.0
    checkpoint_every: int = 0
    seed: int = 0
    workers: int = 1
    dataset: Dict[str, Any] = field(default_factory=lambda: {"synthetic": {}})
    logging: Dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        if self.warmup_epochs >= self.total_epochs:
            raise InvalidConfig(
                "warmup_epochs ({}) must be smaller than total_epochs ({})".format(
                    self.warmup_epochs, self.total_epochs
                )
            )
        if not 0 <= self.seed < 2**64:
            raise InvalidConfig("seed must be an unsigned 64-bit integer, got {}".format(self.seed))
        if self.autoregression == "norm_nonlinear" and self.constraint != "complex_free":
            raise InvalidConfig("norm_nonlinear has no direction matrices to constrain, use complex_free")
        if self.epsilon < 0:
            raise InvalidConfig("epsilon must be non-negative")
        for size, name in ((self.image_width, "image_width"), (self.image_height, "image_height")):
            if size % 8:
                # the encoder halves three times
                raise InvalidConfig("{} must be a multiple of 8, got {}".format(name, size))
        if self.image_width < self.map_width or self.image_height < self.map_height:
            raise InvalidConfig("feature map cannot be larger than the image")

    @classmethod
    def from_dict(cls, config):
        known = set(cls.__dataclass_fields__)
        unknown = sorted(set(config) - known)
        if unknown:
            raise InvalidConfig("Unknown configuration keys: {}".format(", ".join(unknown)))
        values = dict(config)
        for key in FLOAT_KEYS:
            if key in values:
                try:
                    values[key] = float(values[key])
                except (TypeError, ValueError):
                    raise InvalidConfig("'{}' must be a number, got {!r}".format(key, values[key]))
        if "encoder_widths" in values:
            values["encoder_widths"] = tuple(int(w) for w in values["encoder_widths"])
        return cls(**values)

    @property
    def scaled_lr(self):
        """lr = base_lr x batch_size / 256"""
        return self.base_lr * self.batch_size / 256.0

    def serialize(self):
        result = asdict(self)
        result["encoder_widths"] = list(self.encoder_widths)
        return result

    def header_lines(self):
        """Flattened key=value lines echoed at the top of metric files."""
        lines = []
        for key, value in sorted(self.serialize().items()):
            if isinstance(value, dict):
                for sub, subvalue in sorted(_flatten(value).items()):
                    lines.append("{}.{}={}".format(key, sub, subvalue))
            else:
                lines.append("{}={}".format(key, value))
        return lines


def _flatten(d, prefix=""):
    out = {}
    for k, v in d.items():
        name = "{}{}".format(prefix, k)
        if isinstance(v, dict) and v:
            out.update(_flatten(v, name + "."))
        else:
            out[name] = v
    return out
