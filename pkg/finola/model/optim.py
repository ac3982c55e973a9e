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

import math

import torch


def learning_rate(config, epoch):
    """Linear warmup from 0 to the scaled rate, then cosine decay to 0 at total_epochs.

    `epoch` may be fractional (per-step schedules).
    """
    peak = config.scaled_lr
    if epoch < config.warmup_epochs:
        return peak * epoch / config.warmup_epochs
    progress = (epoch - config.warmup_epochs) / (config.total_epochs - config.warmup_epochs)
    progress = min(max(progress, 0.0), 1.0)
    return peak * 0.5 * (1.0 + math.cos(math.pi * progress))


def optimizer_step(graph, config, epoch):
    """One AdamW update with decoupled weight decay at the scheduled learning rate."""
    lr = learning_rate(config, epoch)
    if graph.optimizer is None:
        graph.optimizer = torch.optim.AdamW(
            graph.module.parameters(),
            lr=lr,
            betas=(config.beta1, config.beta2),
            weight_decay=config.weight_decay,
        )
    for group in graph.optimizer.param_groups:
        group["lr"] = lr
    if config.grad_clip > 0:
        torch.nn.utils.clip_grad_norm_(graph.module.parameters(), config.grad_clip)
    graph.optimizer.step()
    return lr
