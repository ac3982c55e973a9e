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

"""Studies of the latent space: interpolation, mean and mirrored embeddings,
PCA truncation and Gaussian sampling."""

from dataclasses import dataclass

import numpy as np

from ..common.exceptions import ShapeMismatch


def _pair(a, b):
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape:
        raise ShapeMismatch("Latents differ in shape: {} and {}".format(a.shape, b.shape))
    return a, b


def latent_interpolate(q1, q2, alpha):
    """alpha q1 + (1 - alpha) q2"""
    q1, q2 = _pair(q1, q2)
    return alpha * q1 + (1.0 - alpha) * q2


def latent_mean(latents):
    latents = np.asarray(latents, dtype=np.float64)
    if latents.shape[0] < 1:
        raise ShapeMismatch("Need at least one latent")
    return latents.mean(axis=0)


def latent_mirror(q, q_mean):
    """2 q - mean: the point at alpha = 2 on the line from the mean through q."""
    q, q_mean = _pair(q, q_mean)
    return 2.0 * q - q_mean


@dataclass(frozen=True, eq=False)
class LatentPCA:
    mean: np.ndarray
    components: np.ndarray
    variances: np.ndarray
    reconstructions: np.ndarray


def _flatten(latents):
    latents = np.asarray(latents, dtype=np.float64)
    if latents.ndim < 2 or latents.shape[0] < 2:
        raise ShapeMismatch("PCA needs at least two samples, got shape {}".format(latents.shape))
    return latents.reshape(latents.shape[0], -1)


def latent_pca(latents, keep):
    """Project onto the top `keep` eigenvectors of the sample covariance and reconstruct.

    Latents of any per-sample shape are flattened; reconstructions have the input shape.
    """
    latents = np.asarray(latents, dtype=np.float64)
    flat = _flatten(latents)
    if not 1 <= keep <= flat.shape[1]:
        raise ShapeMismatch("keep must be in [1, {}], got {}".format(flat.shape[1], keep))
    mean = flat.mean(axis=0)
    covariance = np.cov(flat, rowvar=False).reshape(flat.shape[1], flat.shape[1])
    variances, vectors = np.linalg.eigh(covariance)
    order = np.argsort(-variances, kind="stable")[:keep]
    components = vectors[:, order]
    centered = flat - mean
    reconstructions = mean + (centered @ components) @ components.T
    return LatentPCA(
        mean=mean,
        components=components,
        variances=variances[order],
        reconstructions=reconstructions.reshape(latents.shape),
    )


def latent_sample(latents, count, rng):
    """Draw embeddings from a Gaussian fitted to the latents (sample mean and covariance)."""
    latents = np.asarray(latents, dtype=np.float64)
    flat = _flatten(latents)
    covariance = np.cov(flat, rowvar=False).reshape(flat.shape[1], flat.shape[1])
    samples = rng.multivariate_normal(flat.mean(axis=0), covariance, size=count, method="eigh")
    return samples.reshape((count,) + latents.shape[1:])
