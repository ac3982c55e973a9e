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
import numpy as np

from ...common.io.checkpoint import load_checkpoint
from ...common.io.tables import write_csv
from ...core.params import FinolaParams
from ...core.propagation import propagate
from ...core.types import LatentSet, Ordering
from ...model.graph import export_params, from_checkpoint
from ...wave.basis import build_wave_basis
from ...wave.diagnostics import conjugate_pairs, generation_mask, spectrum_table, wave_residual
from ...wave.projection import project_map
from . import helpers


@click.command(short_help="Latent speeds of Q = A B^-1 and the wave-equation residual.")
@click.option("checkpoint", "--checkpoint", type=click.Path(exists=True, dir_okay=False), default=None)
@click.option("channels", "--channels", type=int, default=None, help="Channels of random parameters (no checkpoint).")
@click.option("out", "--out", required=True, type=click.Path(dir_okay=False), help="Spectrum CSV.")
@click.option("residual", "--residual", type=click.Path(dir_okay=False), default=None, help="Residual report CSV.")
@click.option("size", "--size", type=int, default=None, help="Grid size of the residual maps.")
@helpers.run_options
@helpers.reports_errors
def waves(**kwargs):
    run_args, other_args = helpers.filter_run_args(**kwargs)
    config = helpers.load_run_config(**run_args)
    rng = np.random.default_rng(config.seed)
    if other_args["checkpoint"]:
        params = export_params(from_checkpoint(load_checkpoint(other_args["checkpoint"])))
    else:
        params = FinolaParams.random(other_args["channels"] or config.channels, rng, epsilon=config.epsilon)

    basis = build_wave_basis(params)
    write_csv(other_args["out"], ["index", "re", "im", "modulus"], spectrum_table(basis))
    logging.info("{} conjugate pairs among {} speeds".format(len(conjugate_pairs(basis.values)), params.channels))

    if other_args["residual"]:
        size = other_args["size"] or max(config.map_width, config.map_height)
        q = LatentSet.centered(rng.standard_normal(params.channels), size, size)
        rows = []
        for ordering in Ordering:
            zeta = project_map(propagate(q, params, size, size, ordering), basis)
            mask = generation_mask(size, size, q.positions[0], ordering)
            report = wave_residual(zeta, basis.values, mask)
            rows.extend((ordering.value,) + row for row in report.rows())
        write_csv(other_args["residual"], ["ordering", "region", "cells", "max", "mean"], rows)

    helpers.emit("speeds", params.channels)
