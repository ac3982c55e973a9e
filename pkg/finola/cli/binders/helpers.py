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

import sys
from functools import wraps

import click

from ...common import logging as finola_logging
from ...common.config import ConfigParser, RunConfig
from ...common.exceptions import FinolaError


def run_options(function):
    """Options shared by every subcommand: configuration files, seed and worker count."""

    @click.option(
        "config_files",
        "-c",
        "--config",
        multiple=True,
        type=click.Path(exists=True, dir_okay=False),
        help="YAML run configuration, may be repeated (later files win).",
    )
    @click.option("seed", "--seed", type=int, default=None, help="Seed for every random choice of the command.")
    @click.option(
        "workers",
        "--workers",
        type=int,
        default=None,
        envvar="FINOLA_WORKERS",
        help="Worker threads (falls back to FINOLA_WORKERS).",
    )
    @wraps(function)
    def decorated(**kwargs):
        return function(**kwargs)

    return decorated


def filter_run_args(**kwargs):
    all_args = {**kwargs}
    run_args = {}
    for name in ["config_files", "seed", "workers"]:
        run_args[name] = all_args.pop(name)
    return run_args, all_args


def load_run_config(config_files=(), seed=None, workers=None, **overrides):
    """Merge defaults, files and command line values into a validated RunConfig and set up logging."""
    values = dict(overrides)
    values.update(seed=seed, workers=workers)
    config = ConfigParser().read(additional_yaml=list(config_files), overrides=values)
    finola_logging.setup(config, "finola")
    return RunConfig.from_dict(config)


def reports_errors(function):
    """Turn library errors into one `error,<Class>,<message>` line on stderr and the error's exit code."""

    @wraps(function)
    def decorated(**kwargs):
        try:
            return function(**kwargs)
        except FinolaError as e:
            message = " ".join(str(e).split())
            click.echo("error,{},{}".format(type(e).__name__, message), err=True)
            sys.exit(e.exit_code)

    return decorated


def emit(*fields):
    click.echo(",".join(_cell(f) for f in fields))


def _cell(value):
    return repr(value) if isinstance(value, float) else str(value)


def int_list(text):
    try:
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise click.BadParameter("expected a comma separated list of integers, got {!r}".format(text))
