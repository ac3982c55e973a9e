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
from dataclasses import dataclass

import numpy as np

from ..common.exceptions import Defective, NoConvergence
from ..core.types import Direction
from ..linalg import EigenDecomposition, complex_invert, eig_real_nonsymmetric, inf_norm, invert

RESIDUAL_LIMIT = 1e-6
INVERSE_LIMIT = 1e-8
# Q within this relative distance of s*I is treated as exactly s*I
SCALAR_TOLERANCE = 1e-12


@dataclass(frozen=True, eq=False)
class WaveBasis:
    """Q = A B^-1, its eigendecomposition Q V = V diag(values), and the direction
    matrices expressed in the eigenbasis (H_A = V^-1 A and so on)."""

    Q: np.ndarray
    eig: EigenDecomposition
    V_inv: np.ndarray
    H_A: np.ndarray
    H_B: np.ndarray
    H_A_minus: np.ndarray
    H_B_minus: np.ndarray

    @property
    def values(self):
        return self.eig.values

    @property
    def V(self):
        return self.eig.vectors

    @property
    def channels(self):
        return self.Q.shape[0]

    def direction(self, direction):
        direction = Direction(direction)
        return {
            Direction.RIGHT: self.H_A,
            Direction.LEFT: self.H_A_minus,
            Direction.DOWN: self.H_B,
            Direction.UP: self.H_B_minus,
        }[direction]


def build_wave_basis(params):
    Q = params.A @ invert(params.B)
    Q = _snap_scalar(Q)
    eig = eig_real_nonsymmetric(Q)
    if eig.residual > RESIDUAL_LIMIT:
        raise NoConvergence("Eigendecomposition residual {:.3e} exceeds {:.0e}".format(eig.residual, RESIDUAL_LIMIT))

    V_inv = complex_invert(eig.vectors)
    round_trip = inf_norm(eig.vectors @ V_inv - np.eye(Q.shape[0]))
    if round_trip > INVERSE_LIMIT:
        raise Defective("Eigenvector matrix cannot be inverted accurately (error {:.3e})".format(round_trip))

    logging.info(
        "Wave basis of {} channels: residual {:.3e}, condition {:.3e}".format(Q.shape[0], eig.residual, eig.condition)
    )
    return WaveBasis(
        Q=Q,
        eig=eig,
        V_inv=V_inv,
        H_A=V_inv @ params.A,
        H_B=V_inv @ params.B,
        H_A_minus=V_inv @ params.A_minus,
        H_B_minus=V_inv @ params.B_minus,
    )


def _snap_scalar(Q):
    # eigenvectors of s*I + rounding noise are the eigenvectors of the noise
    s = np.trace(Q) / Q.shape[0]
    if inf_norm(Q - s * np.eye(Q.shape[0])) <= SCALAR_TOLERANCE * max(inf_norm(Q), 1.0):
        return s * np.eye(Q.shape[0])
    return Q
