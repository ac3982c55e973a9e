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

"""Eigendecomposition of real nonsymmetric matrices.

The matrix is balanced, reduced to real Schur form (Hessenberg reduction
followed by Francis double-shift QR, both in LAPACK), and eigenvectors are
recovered by back-substitution on the complex triangular form. Eigenvalues of
2x2 Schur blocks are formed in closed form so that conjugate pairs are exact
conjugates, and the eigenvector of each pair's lower member is the conjugate
of the upper one.
"""

import logging
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from ..common.exceptions import Defective, NoConvergence, ShapeMismatch
from .dense import as_matrix, frobenius_norm

MAX_ORDER = 4096
CONDITION_LIMIT = 1e12


@dataclass(frozen=True)
class EigenDecomposition:
    """values[k] and vectors[:, k] form the k-th eigenpair, ordered by descending modulus
    (ties: descending real part, then descending imaginary part)."""

    values: np.ndarray
    vectors: np.ndarray
    residual: float
    condition: float

    @property
    def order(self):
        return self.values.shape[0]


def eig_real_nonsymmetric(m):
    m = as_matrix(m, square=True)
    n = m.shape[0]
    if n == 0:
        raise ShapeMismatch("Cannot decompose an empty matrix")
    if n > MAX_ORDER:
        raise ShapeMismatch("Matrix order {} exceeds the supported maximum {}".format(n, MAX_ORDER))

    balanced, transform = scipy.linalg.matrix_balance(m, permute=True, scale=True)
    try:
        t, z = scipy.linalg.schur(balanced, output="real")
    except (scipy.linalg.LinAlgError, ValueError) as e:
        raise NoConvergence("QR iteration did not converge: {}".format(e))

    values, partner = _schur_eigenvalues(t)
    vectors = transform @ _schur_eigenvectors(t, z, values, partner)
    vectors = _normalize_columns(vectors, values, partner)

    order = np.lexsort((-values.imag, -values.real, -np.abs(values)))
    values = values[order]
    vectors = vectors[:, order]

    norm = frobenius_norm(m)
    error = frobenius_norm(m @ vectors - vectors * values[None, :])
    residual = error / norm if norm > 0 else error
    condition = float(np.linalg.cond(vectors))
    if not np.isfinite(condition) or condition > CONDITION_LIMIT:
        raise Defective("Eigenvector matrix is ill-conditioned (condition {:.3e})".format(condition))

    logging.debug("Eigendecomposition of order {}: residual {:.3e}, condition {:.3e}".format(n, residual, condition))
    return EigenDecomposition(values=values, vectors=vectors, residual=residual, condition=condition)


def _schur_eigenvalues(t):
    n = t.shape[0]
    values = np.empty(n, dtype=np.complex128)
    partner = np.full(n, -1)
    i = 0
    while i < n:
        if i + 1 < n and t[i + 1, i] != 0.0:
            # standardized block [[a, b], [c, a]] with b*c < 0
            a, b, c, d = t[i, i], t[i, i + 1], t[i + 1, i], t[i + 1, i + 1]
            re = 0.5 * (a + d)
            im = np.sqrt(abs(b)) * np.sqrt(abs(c))
            values[i] = complex(re, im)
            values[i + 1] = complex(re, -im)
            partner[i], partner[i + 1] = i + 1, i
            i += 2
        else:
            values[i] = t[i, i]
            i += 1
    return values, partner


def _schur_eigenvectors(t, z, values, partner):
    tc, zc = scipy.linalg.rsf2csf(t, z)
    n = t.shape[0]
    smin = max(np.finfo(np.float64).eps * np.abs(tc).max(), np.finfo(np.float64).tiny)
    y = np.zeros((n, n), dtype=np.complex128)
    for k in range(n):
        if partner[k] >= 0 and partner[k] < k:
            continue
        y[k, k] = 1.0
        if k == 0:
            continue
        shift = tc[k, k]
        u = tc[:k, :k] - shift * np.eye(k)
        diagonal = np.diag(u).copy()
        small = np.abs(diagonal) < smin
        diagonal[small] = smin
        np.fill_diagonal(u, diagonal)
        y[:k, k] = scipy.linalg.solve_triangular(u, -tc[:k, k], check_finite=False)
    vectors = zc @ y
    for k in range(n):
        if partner[k] > k and (tc[k, k].imag < 0) != (values[k].imag < 0):
            # the triangular form may hold the pair in the other order
            vectors[:, k] = np.conj(vectors[:, k])
    for k in range(n):
        if partner[k] >= 0 and partner[k] < k:
            vectors[:, k] = np.conj(vectors[:, partner[k]])
    return vectors


def _normalize_columns(vectors, values, partner):
    """Unit length, largest component real and positive; real eigenvalues get real vectors."""
    vectors = vectors / np.linalg.norm(vectors, axis=0)[None, :]
    n = vectors.shape[0]
    for k in range(n):
        if partner[k] >= 0 and partner[k] < k:
            continue
        column = vectors[:, k]
        pivot = column[np.argmax(np.abs(column))]
        column = column * (np.abs(pivot) / pivot)
        if values[k].imag == 0.0:
            column = column.real.astype(np.complex128)
        vectors[:, k] = column
    for k in range(n):
        if partner[k] >= 0 and partner[k] < k:
            vectors[:, k] = np.conj(vectors[:, partner[k]])
    return vectors
