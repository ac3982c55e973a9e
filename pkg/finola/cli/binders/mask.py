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

import click
import numpy as np

from ...common.exceptions import UsageError
from ...masked.geometry import QuadrantMask, mask_to_pgm, sample_mask
from . import helpers


@click.command(short_help="Write a quadrant mask as PGM (visible 255, masked 0).")
@click.option("width", "--width", type=int, default=8, show_default=True)
@click.option("height", "--height", type=int, default=8, show_default=True)
@click.option("offset", "--offset", default=None, help="Block offset 'ox,oy'; drawn from --seed when omitted.")
@click.option("out", "--out", required=True, type=click.Path(dir_okay=False))
@helpers.run_options
@helpers.reports_errors
def mask(**kwargs):
    run_args, other_args = helpers.filter_run_args(**kwargs)
    config = helpers.load_run_config(**run_args)
    width, height = other_args["width"], other_args["height"]
    if other_args["offset"]:
        offset = helpers.int_list(other_args["offset"])
        if len(offset) != 2:
            raise UsageError("--offset takes two integers 'ox,oy'")
        quadrant = QuadrantMask(width, height, tuple(offset))
    else:
        quadrant = sample_mask(width, height, np.random.default_rng(config.seed))
    mask_to_pgm(quadrant, other_args["out"])
    helpers.emit("offset", *quadrant.offset)
    helpers.emit("location_class", quadrant.location_class.value)
    helpers.emit("groups", len(quadrant.groups))
