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

import enum
from dataclasses import dataclass
from typing import Optional

import numpy as np

from ..common.exceptions import ShapeMismatch, UsageError, ZeroBeta
from ..core.params import FinolaParams


class ConstraintMode(enum.Enum):
    COMPLEX_FREE = "complex_free"
    REAL_SPEED = "real_speed"
    ALL_ONE = "all_one"


@dataclass(frozen=True, eq=False)
class ConstrainedParams:
    """Direction matrices sharing one matrix P.

    real_speed: A = P diag(alpha), B = P diag(beta), with the same form for the
    minus directions (alpha_minus, beta_minus default to alpha, beta). Q then has
    real eigenvalues alpha / beta.
    all_one: A = B = A- = B- = P, every speed is 1.
    complex_free: no constraint, `free` holds the matrices.
    """

    mode: ConstraintMode
    P: Optional[np.ndarray] = None
    alpha: Optional[np.ndarray] = None
    beta: Optional[np.ndarray] = None
    alpha_minus: Optional[np.ndarray] = None
    beta_minus: Optional[np.ndarray] = None
    free: Optional[FinolaParams] = None
    epsilon: float = 1e-12

    def speeds(self):
        mode = ConstraintMode(self.mode)
        if mode is ConstraintMode.REAL_SPEED:
            _check_beta(self.beta)
            return np.asarray(self.alpha, dtype=np.float64) / np.asarray(self.beta, dtype=np.float64)
        if mode is ConstraintMode.ALL_ONE:
            return np.ones(np.asarray(self.P).shape[0])
        raise UsageError("Speeds are only fixed by the real_speed and all_one constraints")


def _check_beta(beta):
    if beta is not None and np.any(np.asarray(beta) == 0):
        raise ZeroBeta("beta has a zero entry at index {}".format(int(np.flatnonzero(np.asarray(beta) == 0)[0])))


def materialize_constrained(c):
    mode = ConstraintMode(c.mode)
    if mode is ConstraintMode.COMPLEX_FREE:
        if c.free is None:
            raise UsageError("complex_free constraint needs the free matrices")
        return c.free

    P = np.asarray(c.P, dtype=np.float64)
    if P.ndim != 2 or P.shape[0] != P.shape[1]:
        raise ShapeMismatch("P must be square, got shape {}".format(P.shape))
    if mode is ConstraintMode.ALL_ONE:
        return FinolaParams(P, P, P, P, c.epsilon)

    alpha = np.asarray(c.alpha, dtype=np.float64)
    beta = np.asarray(c.beta, dtype=np.float64)
    alpha_minus = alpha if c.alpha_minus is None else np.asarray(c.alpha_minus, dtype=np.float64)
    beta_minus = beta if c.beta_minus is None else np.asarray(c.beta_minus, dtype=np.float64)
    for name, v in (("alpha", alpha), ("beta", beta), ("alpha_minus", alpha_minus), ("beta_minus", beta_minus)):
        if v.shape != (P.shape[0],):
            raise ShapeMismatch("{} must have {} entries, got shape {}".format(name, P.shape[0], v.shape))
    _check_beta(beta)
    _check_beta(beta_minus)
    # P diag(v) scales the columns of P
    return FinolaParams(P * alpha, P * beta, P * alpha_minus, P * beta_minus, c.epsilon)
