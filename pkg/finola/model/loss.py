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

import torch

from ..common.exceptions import EmptyMask, ShapeMismatch


def loss_l2(reconstruction, target, mask=None):
    """Mean squared error over the elements selected by `mask` (all of them when None).

    The mask is broadcast against the inputs; nonzero entries select.
    """
    reconstruction = torch.as_tensor(reconstruction)
    target = torch.as_tensor(target, dtype=reconstruction.dtype)
    if reconstruction.shape != target.shape:
        raise ShapeMismatch(
            "Reconstruction {} and target {} differ".format(tuple(reconstruction.shape), tuple(target.shape))
        )
    squared = (reconstruction - target) ** 2
    if mask is None:
        return squared.mean()
    mask = torch.as_tensor(mask).to(squared.dtype)
    try:
        mask = mask.expand_as(squared)
    except RuntimeError:
        raise ShapeMismatch("Mask {} does not broadcast to {}".format(tuple(mask.shape), tuple(squared.shape)))
    selected = mask.sum()
    if selected.item() == 0:
        raise EmptyMask("Loss mask selects no pixels")
    return (squared * mask).sum() / selected
