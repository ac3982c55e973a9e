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

from .curvature import CurvatureField, curvature_to_pgm, gaussian_curvature, rank_channels  # noqa: F401
from .dct import dct_baseline, zigzag_order  # noqa: F401
from .latent import latent_interpolate, latent_mean, latent_mirror, latent_pca, latent_sample  # noqa: F401
from .metrics import PSNR_CAP, mse, psnr  # noqa: F401
from .quantization import QuantResult, QuantSpec, quantize_uniform  # noqa: F401
