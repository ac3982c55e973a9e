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
from dataclasses import dataclass, field
from typing import List

import torch

from ..common.exceptions import GradientMismatch
from ..common.metric import GradCheckMetric
from .graph import backward
from .loss import loss_l2

STEP = 1e-4
# gradients smaller than this are compared in absolute terms
FLOOR = 1e-4


@dataclass
class GradCheckReport:
    metrics: List[GradCheckMetric] = field(default_factory=list)
    tolerance: float = 1e-3

    @property
    def max_rel_error(self):
        checked = [m.max_rel_error for m in self.metrics if not m.skipped]
        return max(checked) if checked else 0.0

    @property
    def passed(self):
        return self.max_rel_error < self.tolerance


def _group(name):
    return name.split(".", 1)[0]


def grad_check(
    graph,
    inputs,
    targets=None,
    tolerance=1e-3,
    max_per_tensor=None,
    generator=None,
    raise_on_failure=False,
):
    """Compare analytic gradients with central finite differences in 64-bit.

    Parameters are grouped by their top-level module (encoder, finola, decoder,
    pos_embedding for the autoencoder). Groups whose parameters are all frozen are
    reported as skipped. With `max_per_tensor` a random subset of each tensor's
    entries is checked.
    """
    module = graph.module
    original_dtype = graph.dtype
    module.double()
    try:
        inputs = torch.as_tensor(inputs).double()
        targets = inputs if targets is None else torch.as_tensor(targets).double()

        def evaluate():
            with torch.no_grad():
                return loss_l2(module(inputs), targets).item()

        loss = loss_l2(graph.forward(inputs), targets)
        backward(graph, loss)

        groups = OrderedDict()
        for name, p in module.named_parameters():
            groups.setdefault(_group(name), []).append((name, p))

        report = GradCheckReport(tolerance=tolerance)
        for group, members in groups.items():
            trainable = [(n, p) for n, p in members if p.requires_grad]
            if not trainable:
                report.metrics.append(GradCheckMetric(group=group, max_rel_error=0.0, checked=0, skipped=True))
                continue
            worst, checked = 0.0, 0
            for name, p in trainable:
                analytic = p.grad.detach().clone().view(-1)
                flat = p.data.view(-1)
                indices = range(flat.numel())
                if max_per_tensor is not None and flat.numel() > max_per_tensor:
                    indices = torch.randperm(flat.numel(), generator=generator)[:max_per_tensor].tolist()
                for i in indices:
                    saved = flat[i].item()
                    flat[i] = saved + STEP
                    plus = evaluate()
                    flat[i] = saved - STEP
                    minus = evaluate()
                    flat[i] = saved
                    numeric = (plus - minus) / (2 * STEP)
                    a = analytic[i].item()
                    worst = max(worst, abs(a - numeric) / max(abs(a), abs(numeric), FLOOR))
                    checked += 1
            report.metrics.append(GradCheckMetric(group=group, max_rel_error=worst, checked=checked, skipped=False))
            logging.info("Gradient check {}: {} entries, max relative error {:.3e}".format(group, checked, worst))
    finally:
        module.to(original_dtype)

    if raise_on_failure and not report.passed:
        raise GradientMismatch(
            "Analytic and numeric gradients differ by {:.3e} (tolerance {:.0e})".format(
                report.max_rel_error, tolerance
            )
        )
    return report
