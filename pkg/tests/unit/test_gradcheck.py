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

import pytest
import torch
from torch import nn

from finola.common.dataset import create_dataset
from finola.common.exceptions import GradientMismatch
from finola.model.gradcheck import grad_check
from finola.model.graph import ModelGraph, build_graph


class Shift(nn.Module):
    def __init__(self):
        super().__init__()
        self.bias = nn.Parameter(torch.zeros(1, 1, 2, 2))

    def forward(self, x):
        return x + self.bias


class Broken(nn.Module):
    """Scales the gradient of its weight by 2 through a custom backward."""

    class _Double(torch.autograd.Function):
        @staticmethod
        def forward(ctx, x):
            return x.clone()

        @staticmethod
        def backward(ctx, grad):
            return 2 * grad

    def __init__(self):
        super().__init__()
        self.weight = nn.Parameter(torch.ones(1, 1, 2, 2))

    def forward(self, x):
        return x * self._Double.apply(self.weight)


def desk_images(config, count=2):
    dataset = create_dataset(config.dataset, config.image_width, config.image_height, config.image_channels)
    return torch.as_tensor(dataset.as_array()[:count].transpose(0, 3, 1, 2).copy())


class TestGradCheck:
    def test_identity_graph_is_exact(self):
        graph = ModelGraph(Shift())
        inputs = torch.arange(8, dtype=torch.float32).reshape(2, 1, 2, 2) / 8
        report = grad_check(graph, inputs, targets=torch.zeros(2, 1, 2, 2))
        assert [m.group for m in report.metrics] == ["bias"]
        assert report.metrics[0].checked == 4
        assert report.max_rel_error < 1e-8
        assert report.passed
        assert graph.dtype == torch.float32

    def test_sampled_desk_graph(self, desk_config):
        graph = build_graph(desk_config)
        report = grad_check(
            graph, desk_images(desk_config), max_per_tensor=8, generator=torch.Generator().manual_seed(0)
        )
        assert [m.group for m in report.metrics] == ["encoder", "finola", "decoder"]
        assert all(m.checked > 0 for m in report.metrics)
        assert report.max_rel_error < 1e-3
        assert graph.dtype == torch.float32

    def test_frozen_group_is_skipped(self, desk_config):
        graph = build_graph(desk_config)
        for p in graph.module.encoder.parameters():
            p.requires_grad_(False)
        report = grad_check(graph, desk_images(desk_config, 1), max_per_tensor=2)
        encoder = [m for m in report.metrics if m.group == "encoder"][0]
        assert encoder.skipped
        assert encoder.checked == 0
        assert report.passed

    def test_wrong_gradient_detected(self):
        graph = ModelGraph(Broken())
        inputs = torch.ones(1, 1, 2, 2) * 0.5
        report = grad_check(graph, inputs, targets=torch.zeros(1, 1, 2, 2))
        assert report.max_rel_error == pytest.approx(0.5)
        assert not report.passed
        with pytest.raises(GradientMismatch):
            grad_check(graph, inputs, targets=torch.zeros(1, 1, 2, 2), raise_on_failure=True)

    @pytest.mark.slow
    def test_every_parameter_of_desk_graph(self, desk_config):
        graph = build_graph(desk_config)
        report = grad_check(graph, desk_images(desk_config))
        total = sum(p.numel() for p in graph.module.parameters())
        assert sum(m.checked for m in report.metrics) == total
        assert report.max_rel_error < 1e-3
