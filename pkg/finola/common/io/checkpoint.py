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

import json
import logging
import struct
from collections import OrderedDict
from dataclasses import dataclass, field
from typing import Any, Dict

import numpy as np

from ..exceptions import CheckpointError, MalformedHeader, TruncatedPayload

MAGIC = b"FNLA"
VERSION = 1

_PREFIX = struct.Struct("<4sH")
_DIMS = struct.Struct("<IIIIIIII")
_STATE = struct.Struct("<QI")


@dataclass
class Checkpoint:
    """Parameters of a trained graph plus the dimensions and config needed to rebuild it.

    Tensors are stored as little-endian float64 whatever precision they were trained in.
    """

    channels: int
    paths: int
    map_width: int
    map_height: int
    image_width: int
    image_height: int
    image_channels: int
    seed: int = 0
    epoch: int = 0
    tensors: Dict[str, np.ndarray] = field(default_factory=OrderedDict)
    config: Dict[str, Any] = field(default_factory=dict)

    def dims(self):
        return (
            self.channels,
            self.paths,
            self.map_width,
            self.map_height,
            self.image_width,
            self.image_height,
            self.image_channels,
        )


def dumps(checkpoint):
    out = [_PREFIX.pack(MAGIC, VERSION)]
    out.append(_DIMS.pack(*checkpoint.dims(), len(checkpoint.tensors)))
    out.append(_STATE.pack(checkpoint.seed, checkpoint.epoch))
    config = json.dumps(checkpoint.config, sort_keys=True).encode("utf-8")
    out.append(struct.pack("<I", len(config)))
    out.append(config)
    for name, tensor in checkpoint.tensors.items():
        array = np.ascontiguousarray(tensor, dtype="<f8")
        encoded = name.encode("utf-8")
        out.append(struct.pack("<H", len(encoded)))
        out.append(encoded)
        out.append(struct.pack("<B", array.ndim))
        out.append(struct.pack("<{}I".format(array.ndim), *array.shape))
        out.append(array.tobytes())
    return b"".join(out)


def loads(raw):
    reader = _Reader(raw)
    magic, version = reader.unpack(_PREFIX)
    if magic != MAGIC:
        raise MalformedHeader("Not a checkpoint file (magic {!r})".format(magic))
    if version != VERSION:
        raise CheckpointError("Unsupported checkpoint version {} (expected {})".format(version, VERSION))
    *dims, count = reader.unpack(_DIMS)
    seed, epoch = reader.unpack(_STATE)
    (config_length,) = reader.unpack(struct.Struct("<I"))
    try:
        config = json.loads(reader.take(config_length).decode("utf-8"))
    except ValueError as e:
        raise MalformedHeader("Checkpoint config block is not valid JSON: {}".format(e))
    if not isinstance(config, dict):
        raise MalformedHeader("Checkpoint config block must be a JSON object, got {}".format(type(config).__name__))

    tensors = OrderedDict()
    for _ in range(count):
        (name_length,) = reader.unpack(struct.Struct("<H"))
        try:
            name = reader.take(name_length).decode("utf-8")
        except UnicodeDecodeError as e:
            raise MalformedHeader("Tensor name {} is not valid UTF-8: {}".format(len(tensors), e))
        if name in tensors:
            raise MalformedHeader("Tensor {} appears twice".format(name))
        (ndim,) = reader.unpack(struct.Struct("<B"))
        shape = reader.unpack(struct.Struct("<{}I".format(ndim))) if ndim else ()
        size = int(np.prod(shape, dtype=np.int64)) if ndim else 1
        payload = reader.take(8 * size)
        tensors[name] = np.frombuffer(payload, dtype="<f8").reshape(shape).astype(np.float64)
    if reader.remaining():
        raise CheckpointError("{} trailing bytes after the last tensor".format(reader.remaining()))

    return Checkpoint(*dims, seed=seed, epoch=epoch, tensors=tensors, config=config)


def save_checkpoint(path, checkpoint):
    with open(path, "wb") as f:
        f.write(dumps(checkpoint))
    logging.info("Checkpoint written to {} ({} tensors)".format(path, len(checkpoint.tensors)))


def load_checkpoint(path):
    with open(path, "rb") as f:
        return loads(f.read())


class _Reader:
    def __init__(self, raw):
        self.raw = raw
        self.offset = 0

    def take(self, n):
        if self.offset + n > len(self.raw):
            raise TruncatedPayload("Checkpoint ends after {} bytes, needed {}".format(len(self.raw), self.offset + n))
        chunk = self.raw[self.offset : self.offset + n]
        self.offset += n
        return chunk

    def unpack(self, fmt):
        return fmt.unpack(self.take(fmt.size))

    def remaining(self):
        return len(self.raw) - self.offset
