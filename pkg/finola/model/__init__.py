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

from .decoder import Decoder, DecoderSpec  # noqa: F401
from .encoder import Encoder  # noqa: F401
from .finola_layer import FinolaLayer  # noqa: F401
from .gradcheck import GradCheckReport, grad_check  # noqa: F401
from .graph import (  # noqa: F401
    FinolaAutoencoder,
    ModelGraph,
    backward,
    build_graph,
    decode,
    encode,
    export_params,
    from_checkpoint,
    to_checkpoint,
)
from .loss import loss_l2  # noqa: F401
from .optim import learning_rate, optimizer_step  # noqa: F401
from .train import Trainer, TrainResult  # noqa: F401
