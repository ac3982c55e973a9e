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

"""Command line interface to the finola library. Every subcommand prints
machine-parsable comma separated lines and reports errors as
`error,<Class>,<message>` with exit code 2 (usage), 3 (data) or 4 (numerical)."""

import click

from ..version import __version__
from . import binders

CONTEXT_SETTINGS = dict(help_option_names=["-h", "--help"])


@click.group(context_settings=CONTEXT_SETTINGS)
@click.version_option(version=__version__)
def cli():
    pass


cli.add_command(binders.train.train, name="train")
cli.add_command(binders.train.reconstruct, name="reconstruct")
cli.add_command(binders.train.gradcheck, name="gradcheck")
cli.add_command(binders.waves.waves, name="waves")
cli.add_command(binders.analysis.curvature, name="curvature")
cli.add_command(binders.analysis.compress, name="compress")
cli.add_command(binders.analysis.baseline_dct, name="baseline-dct")
cli.add_command(binders.analysis.latent_study, name="latent-study")
cli.add_command(binders.bench.bench_parallel, name="bench-parallel")
cli.add_command(binders.mask.mask, name="mask")

if __name__ == "__main__":
    cli()
