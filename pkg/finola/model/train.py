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

import os
import random
import uuid
from dataclasses import dataclass

import numpy as np
import torch

from ..analysis.metrics import PSNR_CAP, psnr
from ..common.dataset import create_dataset
from ..common.io.checkpoint import save_checkpoint
from ..common.logging import RunLogger
from ..common.metric import EpochMetric, MetricWriter
from .graph import backward, build_graph, to_checkpoint
from .loss import loss_l2
from .optim import optimizer_step


@dataclass
class TrainResult:
    final_loss: float
    final_psnr: float
    baseline_psnr: float
    epochs: int
    checkpoint: str = None


def seed_everything(seed):
    random.seed(seed)
    np.random.seed(seed % 2**32)
    torch.manual_seed(seed)


class Trainer:
    """Owns the training loop of one run: data, graph, schedule, metrics and checkpoints."""

    def __init__(self, config, output_dir=None, dataset=None):
        self.config = config
        self.output_dir = output_dir
        self.run_id = str(uuid.uuid4())
        self.log = RunLogger(self.run_id)
        seed_everything(config.seed)
        torch.set_num_threads(config.workers)

        if dataset is None:
            dataset = create_dataset(config.dataset, config.image_width, config.image_height, config.image_channels)
        self.dataset = dataset
        self.rng = np.random.default_rng(config.seed)
        self.graph = build_graph(config)
        self.images = self.graph.images_to_tensor(dataset.as_array())

        self.writer = None
        if output_dir is not None:
            os.makedirs(output_dir, exist_ok=True)
            self.writer = MetricWriter(
                os.path.join(output_dir, "metrics.csv"), EpochMetric, header_lines=config.header_lines()
            )

    def batches(self):
        order = self.rng.permutation(self.images.shape[0])
        for start in range(0, order.shape[0], self.config.batch_size):
            yield torch.as_tensor(order[start : start + self.config.batch_size])

    def train_epoch(self, epoch):
        steps = -(-self.images.shape[0] // self.config.batch_size)
        total, count, lr = 0.0, 0, 0.0
        for step, indices in enumerate(self.batches()):
            batch = self.images[indices]
            loss = loss_l2(self.graph.forward(batch), batch)
            backward(self.graph, loss)
            lr = optimizer_step(self.graph, self.config, epoch + step / steps)
            total += loss.item() * batch.shape[0]
            count += batch.shape[0]
        return total / count, lr

    def run(self):
        loss = float("nan")
        for epoch in range(self.config.total_epochs):
            loss, lr = self.train_epoch(epoch)
            self.graph.epoch = epoch + 1
            metric = EpochMetric(epoch=epoch + 1, lr=lr, loss=loss, psnr=_psnr_from_mse(loss))
            if self.writer is not None:
                self.writer.write(metric)
            self.log.at_epoch(epoch + 1).info("loss {:.6f} psnr {:.2f} lr {:.3e}".format(loss, metric.psnr, lr))
            every = self.config.checkpoint_every
            if self.output_dir is not None and every and (epoch + 1) % every == 0:
                self.save(os.path.join(self.output_dir, "checkpoint_{:04d}.fnla".format(epoch + 1)))

        result = TrainResult(
            final_loss=loss,
            final_psnr=self.evaluate(),
            baseline_psnr=self.baseline(),
            epochs=self.config.total_epochs,
        )
        if self.output_dir is not None:
            result.checkpoint = os.path.join(self.output_dir, "checkpoint.fnla")
            self.save(result.checkpoint)
        self.log.info(
            "Training finished: psnr {:.2f} dB, constant-mean baseline {:.2f} dB".format(
                result.final_psnr, result.baseline_psnr
            ),
        )
        return result

    def evaluate(self):
        """PSNR of clamped reconstructions over the whole dataset."""
        images = self.images.permute(0, 2, 3, 1).double().numpy()
        return psnr(self.graph.reconstruct(images), images)

    def baseline(self):
        """PSNR of predicting the dataset's mean image for every image."""
        images = self.images.permute(0, 2, 3, 1).double().numpy()
        mean = np.broadcast_to(images.mean(axis=0), images.shape)
        return psnr(mean, images)

    def save(self, path):
        save_checkpoint(path, to_checkpoint(self.graph))


def _psnr_from_mse(mse):
    return float(PSNR_CAP if mse == 0 else 10.0 * np.log10(1.0 / mse))
