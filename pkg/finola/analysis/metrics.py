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

import numpy as np

from ..common.exceptions import ShapeMismatch, UsageError

PSNR_CAP = 99.0


def mse(a, b):
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape:
        raise ShapeMismatch("Cannot compare shapes {} and {}".format(a.shape, b.shape))
    return float(np.mean((a - b) ** 2))


def psnr(a, b, peak=1.0):
    """10 log10(peak^2 / MSE) in dB; identical inputs give PSNR_CAP."""
    if peak <= 0:
        raise UsageError("peak must be positive, got {}".format(peak))
    error = mse(a, b)
    if error == 0.0:
        return PSNR_CAP
    return float(10.0 * np.log10(peak * peak / error))
