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
from collections import OrderedDict

import numpy as np
import torch
from torch import nn

from ..common.config.run_config import RunConfig
from ..common.exceptions import CheckpointError, GraphNotEvaluated, InvalidConfig, ShapeMismatch, UsageError
from ..common.io.checkpoint import Checkpoint
from ..core.params import FinolaParams
from ..core.types import Autoregression, FeatureMap, LatentSet, Normalization
from .decoder import Decoder, DecoderSpec
from .encoder import Encoder
from .finola_layer import FinolaLayer


class FinolaAutoencoder(nn.Module):
    """image -> latents (N, M, C) -> FINOLA feature map (N, C, H, W) -> image"""

    def __init__(self, config):
        super().__init__()
        self.config = config
        self.encoder = Encoder(config.image_channels, config.encoder_widths, config.channels, config.paths)
        self.finola = FinolaLayer(
            config.channels,
            config.paths,
            config.map_width,
            config.map_height,
            ordering=config.ordering,
            constraint=config.constraint,
            autoregression=config.autoregression,
            normalization=config.normalization,
            epsilon=config.epsilon,
            scatter=config.scatter_positions,
        )
        if config.position_embedding:
            self.pos_embedding = nn.Parameter(torch.zeros(1, config.channels, config.map_height, config.map_width))
        else:
            self.pos_embedding = None
        self.decoder = Decoder(
            DecoderSpec.for_sizes(
                config.channels,
                config.map_width,
                config.map_height,
                config.image_width,
                config.image_height,
                config.decoder_width,
                config.image_channels,
            )
        )

    def feature_map(self, latents):
        z = self.finola(latents)
        if self.pos_embedding is not None:
            z = z + self.pos_embedding
        return z

    def forward(self, images):
        return self.decoder(self.feature_map(self.encoder(images)))


class ModelGraph:
    """A module together with its optimizer state and an evaluation flag.

    `forward` must run before `backward`; backward clears the flag again.
    """

    def __init__(self, module, config=None, seed=0):
        self.module = module
        self.config = config
        self.seed = seed
        self.epoch = 0
        self.evaluated = False
        self.optimizer = None

    @property
    def topology(self):
        return [name for name, _ in self.module.named_children()]

    @property
    def dtype(self):
        return next(self.module.parameters()).dtype

    def parameters(self):
        return OrderedDict(self.module.named_parameters())

    def gradients(self):
        return OrderedDict((name, p.grad) for name, p in self.module.named_parameters())

    def forward(self, inputs):
        output = self.module(inputs)
        self.evaluated = True
        return output

    def images_to_tensor(self, images):
        """(N, H, W, ch) or (H, W, ch) arrays in [0, 1] to an (N, ch, H, W) tensor."""
        images = np.asarray(images)
        if images.ndim == 3:
            images = images[None]
        if self.config is not None:
            expected = (self.config.image_height, self.config.image_width, self.config.image_channels)
            if images.shape[1:] != expected:
                raise ShapeMismatch("Expected images of shape {}, got {}".format(expected, images.shape[1:]))
        return torch.as_tensor(images.transpose(0, 3, 1, 2).copy(), dtype=self.dtype)

    def reconstruct(self, images):
        """Reconstructions clamped to [0, 1], as (N, H, W, ch) float64 arrays."""
        with torch.no_grad():
            output = self.module(self.images_to_tensor(images)).clamp(0.0, 1.0)
        return output.permute(0, 2, 3, 1).double().numpy()

    def render(self, latents):
        """Decode the (M, C) latents of one image to a clamped (H, W, ch) array."""
        vectors = latents.vectors if isinstance(latents, LatentSet) else np.asarray(latents)
        with torch.no_grad():
            tensor = torch.as_tensor(vectors[None], dtype=self.dtype)
            image = self.module.decoder(self.module.feature_map(tensor)).clamp(0.0, 1.0)
        return image[0].permute(1, 2, 0).double().numpy()


def build_graph(config, seed=None):
    seed = config.seed if seed is None else seed
    torch.manual_seed(seed)
    graph = ModelGraph(FinolaAutoencoder(config), config=config, seed=seed)
    logging.info(
        "Built graph with {} parameters ({})".format(
            sum(p.numel() for p in graph.module.parameters()), ", ".join(graph.topology)
        )
    )
    return graph


def encode(graph, image):
    """Latents of one (H, W, ch) image, placed at the layer's initial positions."""
    with torch.no_grad():
        latents = graph.module.encoder(graph.images_to_tensor(image))[0]
    return LatentSet(latents.double().numpy(), graph.module.finola.positions)


def decode(z, decoder):
    """Decode a FeatureMap (indexed [x, y, c]) to an unclamped (H, W, ch) image."""
    data = z.data if isinstance(z, FeatureMap) else np.asarray(z)
    dtype = next(decoder.parameters()).dtype
    tensor = torch.as_tensor(data.transpose(2, 1, 0)[None].copy(), dtype=dtype)
    with torch.no_grad():
        image = decoder(tensor)[0]
    return image.permute(1, 2, 0).double().numpy()


def backward(graph, loss):
    """Fill the gradient buffer of every parameter; unused parameters get zeros."""
    if not graph.evaluated:
        raise GraphNotEvaluated("backward called before a forward pass")
    graph.module.zero_grad(set_to_none=False)
    loss.backward()
    graph.evaluated = False
    for p in graph.module.parameters():
        if p.grad is None:
            p.grad = torch.zeros_like(p)
    return graph.gradients()


def export_params(graph):
    """The trained direction matrices as 64-bit FinolaParams."""
    layer = graph.module.finola
    if layer.autoregression is Autoregression.NORM_NONLINEAR or layer.normalization is Normalization.BATCH:
        raise UsageError(
            "Only norm_linear layers with layer normalization export to FinolaParams, got {} with {}".format(
                layer.autoregression.value, layer.normalization.value
            )
        )
    with torch.no_grad():
        matrices = {k: v.detach().double().numpy().copy() for k, v in layer.matrices().items()}
    return FinolaParams(epsilon=layer.epsilon, **matrices)


def to_checkpoint(graph):
    config = graph.config
    tensors = OrderedDict(
        (name, tensor.detach().double().numpy().copy()) for name, tensor in graph.module.state_dict().items()
    )
    return Checkpoint(
        channels=config.channels,
        paths=config.paths,
        map_width=config.map_width,
        map_height=config.map_height,
        image_width=config.image_width,
        image_height=config.image_height,
        image_channels=config.image_channels,
        seed=graph.seed,
        epoch=graph.epoch,
        tensors=tensors,
        config=config.serialize(),
    )


def from_checkpoint(checkpoint):
    if not isinstance(checkpoint.config, dict):
        raise CheckpointError("Checkpoint carries no run config mapping")
    try:
        config = RunConfig.from_dict(checkpoint.config)
    except (InvalidConfig, TypeError, ValueError) as e:
        raise CheckpointError("Checkpoint run config cannot be used: {}".format(e))
    graph = build_graph(config, seed=checkpoint.seed)
    state = graph.module.state_dict()
    missing = sorted(set(state) - set(checkpoint.tensors))
    if missing:
        raise ShapeMismatch("Checkpoint lacks tensors: {}".format(", ".join(missing)))
    loaded = OrderedDict()
    for name, current in state.items():
        value = checkpoint.tensors[name]
        if tuple(value.shape) != tuple(current.shape):
            raise ShapeMismatch("Tensor {} has shape {}, expected {}".format(name, value.shape, tuple(current.shape)))
        loaded[name] = torch.as_tensor(value, dtype=current.dtype)
    graph.module.load_state_dict(loaded)
    graph.epoch = checkpoint.epoch
    return graph
