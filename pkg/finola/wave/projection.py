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

"""Propagation in the eigenbasis of Q.

With zeta = V^-1 z every step of the recursion becomes
    psi + H_dir * n(psi),
where n is the normalization rewritten in terms of psi:
    n(psi) = (C I - J) V psi / (sqrt(psi^T V^T (C I - J) V psi) + C eps)
(I identity, J all-ones). The quadratic form uses the plain transpose. For
psi = V^-1 phi this equals (phi - mean) / (std + eps), the z-space
normalization, exactly.
"""

import numpy as np

from ..common.exceptions import DegenerateDenominator, ShapeMismatch
from ..core.normalization import channel_sum, matvec
from ..core.propagation import check_grid, traverse
from ..core.types import FeatureMap, LatentSet, Ordering

ROUNDING = 8 * np.finfo(np.float64).eps


def project_map(z, basis):
    """zeta(x, y) = V^-1 z(x, y) at every cell."""
    data = _map_data(z, basis)
    return FeatureMap(data @ basis.V_inv.T)


def unproject_map(zeta, basis):
    data = _map_data(zeta, basis)
    return FeatureMap(data @ basis.V.T)


def _map_data(z, basis):
    data = z.data if isinstance(z, FeatureMap) else np.asarray(z)
    if data.shape[-1] != basis.channels:
        raise ShapeMismatch("Map has {} channels, basis has {}".format(data.shape[-1], basis.channels))
    return data.astype(np.complex128)


def transformed_normalize(psi, basis, epsilon=0.0):
    psi = np.asarray(psi, dtype=np.complex128)
    if psi.shape[-1] != basis.channels:
        raise ShapeMismatch("Vector has {} channels, basis has {}".format(psi.shape[-1], basis.channels))
    c = psi.shape[-1]
    r = matvec(basis.V, psi)
    # centred first: C*sum(r^2) - (sum r)^2 == C*sum(d^2) without the cancellation
    d = r - np.asarray(channel_sum(r) / c)[..., None]
    quadratic = c * channel_sum(d * d)

    # rounding bound of V psi, per channel
    noise = ROUNDING * c * np.max(matvec(np.abs(basis.V), np.abs(psi)).real, axis=-1)
    degenerate = np.abs(quadratic) <= np.maximum(epsilon**2, (c * noise) ** 2)
    if np.any(degenerate):
        raise DegenerateDenominator("Quadratic form vanishes: the represented vector is constant over channels")
    return c * d / np.asarray(np.sqrt(quadratic) + c * epsilon)[..., None]


def make_projected_advance(basis, epsilon):
    def advance(psi, direction):
        return psi + matvec(basis.direction(direction), transformed_normalize(psi, basis, epsilon))

    return advance


def propagate_projected(q, basis, params, width, height, ordering=Ordering.AVERAGED):
    """Generate the map directly in the eigenbasis, starting from V^-1 q.

    `q` is one vector (placed at the grid centre) or a LatentSet, in which case the
    transformed paths are summed in order.
    """
    q_set = q if isinstance(q, LatentSet) else LatentSet.centered(q, width, height)
    check_grid(q_set, params, width, height)
    advance = make_projected_advance(basis, params.epsilon)
    total = None
    for vector, origin in q_set.paths():
        psi = basis.V_inv @ np.asarray(vector, dtype=np.complex128)
        grid = traverse(psi, origin, width, height, advance, ordering)
        total = grid if total is None else total + grid
    return FeatureMap(total)
