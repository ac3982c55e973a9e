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

import click
import torch

from ...analysis.metrics import psnr
from ...common.dataset import create_dataset
from ...common.exceptions import GradientMismatch
from ...common.io.checkpoint import load_checkpoint
from ...common.io.image import load_image, save_image
from ...common.metric import GradCheckMetric, MetricWriter
from ...model.gradcheck import grad_check
from ...model.graph import build_graph, from_checkpoint
from ...model.train import Trainer
from . import helpers


@click.command(short_help="Train the autoencoder on the configured dataset.")
@click.option(
    "out", "--out", required=True, type=click.Path(file_okay=False), help="Directory for metrics and checkpoints."
)
@click.option("total_epochs", "--epochs", type=int, default=None, help="Override total_epochs.")
@click.option("channels", "--channels", type=int, default=None, help="Override the latent channel count C.")
@click.option("paths", "--paths", type=int, default=None, help="Override the number of paths M.")
@helpers.run_options
@helpers.reports_errors
def train(**kwargs):
    run_args, other_args = helpers.filter_run_args(**kwargs)
    out = other_args.pop("out")
    config = helpers.load_run_config(**run_args, **other_args)
    result = Trainer(config, output_dir=out).run()
    helpers.emit("psnr_db", result.final_psnr)
    helpers.emit("baseline_psnr_db", result.baseline_psnr)
    helpers.emit("checkpoint", result.checkpoint)


@click.command(short_help="Reconstruct an image through a trained checkpoint.")
@click.option("checkpoint", "--checkpoint", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("image", "--image", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("out", "--out", type=click.Path(dir_okay=False), default=None, help="Where to write the reconstruction.")
@click.option("show_psnr", "--psnr", is_flag=True, help="Print psnr_db,<value>.")
@helpers.run_options
@helpers.reports_errors
def reconstruct(**kwargs):
    run_args, other_args = helpers.filter_run_args(**kwargs)
    helpers.load_run_config(**run_args)
    graph = from_checkpoint(load_checkpoint(other_args["checkpoint"]))
    image = load_image(other_args["image"])
    output = graph.reconstruct(image)[0]
    if other_args["out"]:
        save_image(other_args["out"], output)
    if other_args["show_psnr"]:
        helpers.emit("psnr_db", psnr(output, image))


@click.command(short_help="Compare analytic and finite-difference gradients of the desk graph.")
@click.option("image_size", "--image-size", type=int, default=8, show_default=True)
@click.option("channels", "--channels", type=int, default=6, show_default=True)
@click.option("map_size", "--map-size", type=int, default=4, show_default=True)
@click.option("tolerance", "--tolerance", type=float, default=1e-3, show_default=True)
@click.option("max_per_tensor", "--max-per-tensor", type=int, default=None, help="Check a random subset per tensor.")
@click.option("out", "--out", type=click.Path(dir_okay=False), default=None, help="CSV report.")
@helpers.run_options
@helpers.reports_errors
def gradcheck(**kwargs):
    run_args, other_args = helpers.filter_run_args(**kwargs)
    size, map_size = other_args["image_size"], other_args["map_size"]
    config = helpers.load_run_config(
        **run_args,
        image_width=size,
        image_height=size,
        map_width=map_size,
        map_height=map_size,
        channels=other_args["channels"],
    )
    graph = build_graph(config)
    dataset = create_dataset(config.dataset, size, size, config.image_channels)
    images = graph.images_to_tensor(dataset[0])
    generator = torch.Generator().manual_seed(config.seed)
    report = grad_check(
        graph,
        images,
        tolerance=other_args["tolerance"],
        max_per_tensor=other_args["max_per_tensor"],
        generator=generator,
    )

    if other_args["out"]:
        writer = MetricWriter(other_args["out"], GradCheckMetric, header_lines=config.header_lines())
        for metric in report.metrics:
            writer.write(metric)
    for metric in report.metrics:
        helpers.emit(*metric.row())
    logging.info("Gradient check max relative error {:.3e}".format(report.max_rel_error))
    if not report.passed:
        raise GradientMismatch(
            "max relative error {:.3e} exceeds {:.0e}".format(report.max_rel_error, other_args["tolerance"])
        )
