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

import click
import numpy as np

from ...analysis.curvature import curvature_to_pgm, gaussian_curvature
from ...analysis.dct import dct_baseline
from ...analysis.latent import latent_interpolate, latent_mean, latent_mirror, latent_pca, latent_sample
from ...analysis.metrics import psnr
from ...analysis.quantization import QuantSpec, quantize_uniform
from ...common.dataset import create_dataset
from ...common.exceptions import UsageError
from ...common.io.checkpoint import load_checkpoint
from ...common.io.image import load_image, save_image
from ...common.io.tables import write_csv
from ...core.parallel import propagate_parallel
from ...core.types import LatentSet
from ...model.graph import encode, export_params, from_checkpoint
from . import helpers


def _load_graph(path):
    return from_checkpoint(load_checkpoint(path))


def _dataset_images(config, count):
    dataset = create_dataset(config.dataset, config.image_width, config.image_height, config.image_channels)
    return [dataset[i] for i in range(min(count, len(dataset)))]


def _image_name(directory, stem, image):
    return os.path.join(directory, stem + (".pgm" if image.shape[2] == 1 else ".ppm"))


@click.command(short_help="Gaussian curvature of every channel of a generated feature map.")
@click.option("checkpoint", "--checkpoint", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("image", "--image", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("size", "--size", type=int, default=None, help="Grid size of the generated map (default: map size).")
@click.option("out", "--out", required=True, type=click.Path(dir_okay=False), help="Channel ranking CSV.")
@click.option("heatmaps", "--heatmaps", type=click.Path(file_okay=False), default=None, help="Directory for PGMs.")
@helpers.run_options
@helpers.reports_errors
def curvature(**kwargs):
    run_args, other_args = helpers.filter_run_args(**kwargs)
    run_config = helpers.load_run_config(**run_args)
    graph = _load_graph(other_args["checkpoint"])
    config = graph.config
    latents = encode(graph, load_image(other_args["image"]))
    width = other_args["size"] or config.map_width
    height = other_args["size"] or config.map_height
    place = LatentSet.scattered if config.scatter_positions else LatentSet.centered
    latents = place(latents.vectors, width, height)

    z = propagate_parallel(
        latents,
        export_params(graph),
        width,
        height,
        workers=run_config.workers,
        ordering=config.ordering,
        autoregression=config.autoregression,
    )
    field = gaussian_curvature(z)
    rows = [(rank, int(channel), float(field.scores[channel])) for rank, channel in enumerate(field.ranking)]
    write_csv(other_args["out"], ["rank", "channel", "score"], rows)
    if other_args["heatmaps"]:
        for channel in range(z.channels):
            curvature_to_pgm(field, channel, os.path.join(other_args["heatmaps"], "channel_{:03d}.pgm".format(channel)))
    helpers.emit("top_channel", int(field.ranking[0]))


@click.command(short_help="Reconstruct from uniformly quantized latents and report PSNR and bits per pixel.")
@click.option("checkpoint", "--checkpoint", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("image", "--image", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("bits", "--bits", type=int, default=8, show_default=True)
@click.option(
    "calibration",
    "--calibration",
    type=int,
    default=32,
    show_default=True,
    help="Dataset images whose latents set the per-channel ranges (0: the image itself).",
)
@click.option("out", "--out", type=click.Path(dir_okay=False), default=None)
@helpers.run_options
@helpers.reports_errors
def compress(**kwargs):
    run_args, other_args = helpers.filter_run_args(**kwargs)
    helpers.load_run_config(**run_args)
    graph = _load_graph(other_args["checkpoint"])
    config = graph.config
    image = load_image(other_args["image"])
    latents = encode(graph, image)

    if other_args["calibration"] > 0:
        reference = np.stack([encode(graph, i).vectors for i in _dataset_images(config, other_args["calibration"])])
    else:
        reference = latents.vectors
    spec = QuantSpec.from_data(reference, other_args["bits"])
    result = quantize_uniform(latents, spec, config.image_width, config.image_height)
    output = graph.render(result.dequantized)
    if other_args["out"]:
        save_image(other_args["out"], output)
    helpers.emit("bits", other_args["bits"])
    helpers.emit("bpp", result.bits_per_pixel)
    helpers.emit("psnr_db", psnr(output, image))


@click.command(name="baseline-dct", short_help="PSNR of the 8x8 zig-zag DCT baseline for several K.")
@click.option("images", "--image", multiple=True, type=click.Path(exists=True, dir_okay=False))
@click.option("count", "--count", type=int, default=20, show_default=True, help="Dataset images when no --image.")
@click.option("keep", "--keep", default="1,3,6,10,64", show_default=True, help="Kept coefficients per block.")
@click.option("out", "--out", type=click.Path(dir_okay=False), default=None)
@helpers.run_options
@helpers.reports_errors
def baseline_dct(**kwargs):
    run_args, other_args = helpers.filter_run_args(**kwargs)
    config = helpers.load_run_config(**run_args)
    if other_args["images"]:
        images = [load_image(path) for path in other_args["images"]]
    else:
        images = _dataset_images(config, other_args["count"])
    rows = []
    for keep in helpers.int_list(other_args["keep"]):
        value = float(np.mean([psnr(dct_baseline(image, keep), image) for image in images]))
        rows.append((keep, value))
        helpers.emit(keep, value)
    if other_args["out"]:
        write_csv(other_args["out"], ["keep", "psnr_db"], rows)


@click.command(name="latent-study", short_help="Interpolation, mean, mirror, PCA and sampling in latent space.")
@click.option("checkpoint", "--checkpoint", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("out", "--out", required=True, type=click.Path(file_okay=False))
@click.option("count", "--count", type=int, default=16, show_default=True, help="Dataset images to encode.")
@click.option("keep", "--keep", default="1,2,4,8", show_default=True, help="PCA components to keep.")
@click.option("samples", "--samples", type=int, default=4, show_default=True)
@helpers.run_options
@helpers.reports_errors
def latent_study(**kwargs):
    run_args, other_args = helpers.filter_run_args(**kwargs)
    run_config = helpers.load_run_config(**run_args)
    graph = _load_graph(other_args["checkpoint"])
    images = _dataset_images(graph.config, other_args["count"])
    if len(images) < 2:
        raise UsageError("The latent study needs at least two images")
    latents = np.stack([encode(graph, image).vectors for image in images])
    out = other_args["out"]
    os.makedirs(out, exist_ok=True)

    for alpha in (0.0, 0.25, 0.5, 0.75, 1.0):
        mixed = latent_interpolate(latents[0], latents[1], alpha)
        output = graph.render(mixed)
        save_image(_image_name(out, "interpolate_{:.2f}".format(alpha), output), output)
    mean = latent_mean(latents)
    for stem, vectors in (("mean", mean), ("mirror", latent_mirror(latents[0], mean))):
        output = graph.render(vectors)
        save_image(_image_name(out, stem, output), output)

    rows = []
    dims = latents[0].size
    for keep in helpers.int_list(other_args["keep"]):
        keep = min(keep, dims)
        pca = latent_pca(latents, keep)
        value = float(np.mean([psnr(graph.render(r), image) for r, image in zip(pca.reconstructions, images)]))
        rows.append((keep, value))
        helpers.emit("pca", keep, value)
    write_csv(os.path.join(out, "pca.csv"), ["keep", "psnr_db"], rows)

    rng = np.random.default_rng(run_config.seed)
    for i, vectors in enumerate(latent_sample(latents, other_args["samples"], rng)):
        output = graph.render(vectors)
        save_image(_image_name(out, "sample_{:02d}".format(i), output), output)
