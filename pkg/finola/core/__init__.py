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

from .normalization import NormContext, channel_stats, normalize_channels  # noqa: F401
from .parallel import propagate_parallel  # noqa: F401
from .params import FinolaParams  # noqa: F401
from .propagation import make_advance, multipath_propagate, propagate, step, traverse  # noqa: F401
from .types import (  # noqa: F401
    Autoregression,
    Direction,
    FeatureMap,
    LatentSet,
    Normalization,
    Ordering,
    scatter_positions,
)
