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

"""Dense real and complex matrix kernels.

All computation is carried out in 64-bit (float64 / complex128) whatever the
input precision.
"""

import warnings

import numpy as np
import scipy.linalg

from ..common.exceptions import DataError, ShapeMismatch, Singular

PIVOT_TOLERANCE = 1e-12


def as_matrix(m, dtype=np.float64, square=False, name="matrix"):
    m = np.asarray(m, dtype=dtype)
    if m.ndim != 2:
        raise ShapeMismatch("{} must be two-dimensional, got shape {}".format(name, m.shape))
    if square and m.shape[0] != m.shape[1]:
        raise ShapeMismatch("{} must be square, got shape {}".format(name, m.shape))
    if not np.all(np.isfinite(m)):
        raise DataError("{} has non-finite entries".format(name))
    return m


def inf_norm(m):
    """Maximum absolute row sum."""
    return float(np.abs(m).sum(axis=1).max()) if m.size else 0.0


def frobenius_norm(m):
    return float(np.linalg.norm(m))


def _lu(m):
    with warnings.catch_warnings():
        # exact zero pivots are reported through Singular below
        warnings.simplefilter("ignore", scipy.linalg.LinAlgWarning)
        lu, piv = scipy.linalg.lu_factor(m, check_finite=False)
    norm = inf_norm(m)
    smallest = np.abs(np.diag(lu)).min()
    if norm == 0.0 or smallest < PIVOT_TOLERANCE * norm:
        raise Singular("Matrix is singular to working precision (pivot {:.3e}, norm {:.3e})".format(smallest, norm))
    return lu, piv


def invert(m):
    """Inverse by LU factorization with partial pivoting."""
    m = as_matrix(m, square=True)
    lu, piv = _lu(m)
    return scipy.linalg.lu_solve((lu, piv), np.eye(m.shape[0]), check_finite=False)


def solve(m, b):
    """Solve m x = b for a vector or a stack of right-hand-side columns."""
    m = as_matrix(m, dtype=np.result_type(m, b, np.float64), square=True)
    b = np.asarray(b, dtype=m.dtype)
    if b.shape[0] != m.shape[0]:
        raise ShapeMismatch("Right-hand side has {} rows, matrix has {}".format(b.shape[0], m.shape[0]))
    return scipy.linalg.lu_solve(_lu(m), b, check_finite=False)


def complex_matvec(m, x):
    m = as_matrix(m, dtype=np.complex128)
    x = np.asarray(x, dtype=np.complex128)
    if x.ndim != 1 or x.shape[0] != m.shape[1]:
        raise ShapeMismatch("Cannot multiply {} matrix by vector of shape {}".format(m.shape, x.shape))
    return m @ x


def complex_matmul(a, b):
    a = as_matrix(a, dtype=np.complex128, name="left operand")
    b = as_matrix(b, dtype=np.complex128, name="right operand")
    if a.shape[1] != b.shape[0]:
        raise ShapeMismatch("Cannot multiply {} by {}".format(a.shape, b.shape))
    return a @ b


def complex_invert(m):
    m = as_matrix(m, dtype=np.complex128, square=True)
    lu, piv = _lu(m)
    return scipy.linalg.lu_solve((lu, piv), np.eye(m.shape[0], dtype=np.complex128), check_finite=False)
