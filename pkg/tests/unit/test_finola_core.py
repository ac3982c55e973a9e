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
import pytest

from finola.common.exceptions import PositionOutOfRange, ShapeMismatch, UsageError
from finola.core import (
    Autoregression,
    Direction,
    FinolaParams,
    LatentSet,
    Ordering,
    multipath_propagate,
    normalize_channels,
    propagate,
    scatter_positions,
    step,
)


def scalar_normalize(v, epsilon):
    c = len(v)
    mean = 0.0
    for x in v:
        mean += x
    mean /= c
    var = 0.0
    for x in v:
        var += (x - mean) ** 2
    std = (var / c) ** 0.5
    return [(x - mean) / (std + epsilon) for x in v]


def scalar_step(z, m, epsilon):
    n = scalar_normalize(list(z), epsilon)
    return [z[i] + sum(m[i][j] * n[j] for j in range(len(z))) for i in range(len(z))]


class TestNormalize:
    def test_constant_vector(self):
        assert normalize_channels([1.0, 1.0, 1.0, 1.0], 1e-6).tolist() == [0.0, 0.0, 0.0, 0.0]

    def test_constant_vector_without_epsilon(self):
        assert normalize_channels([2.5, 2.5], 0.0).tolist() == [0.0, 0.0]

    def test_two_values(self):
        assert normalize_channels([1.0, 3.0], 0.0).tolist() == [-1.0, 1.0]

    def test_random_against_two_pass_statistics(self, rng):
        v = rng.standard_normal(16) * 3.0 + 1.0
        epsilon = 1e-3
        out = normalize_channels(v, epsilon)
        sigma = np.sqrt(np.mean((v - np.mean(v)) ** 2))
        assert abs(out.mean()) < 1e-12
        assert np.isclose(out.std(), sigma / (sigma + epsilon), atol=1e-12)

    def test_batch_matches_single(self, rng):
        batch = rng.standard_normal((5, 7))
        for row, single in zip(normalize_channels(batch, 1e-12), batch):
            assert np.array_equal(row, normalize_channels(single, 1e-12))


class TestStep:
    def test_zero_matrix_repeats(self, rng):
        z = rng.standard_normal(6)
        assert np.array_equal(step(z, Direction.RIGHT, FinolaParams.zeros(6)), z)

    def test_constant_vector_is_fixed_point(self, rng):
        params = FinolaParams.random(5, rng)
        z = np.full(5, 0.7)
        for direction in Direction:
            assert np.array_equal(step(z, direction, params), z)

    def test_against_scalar_loop(self, rng):
        params = FinolaParams.random(6, rng, epsilon=1e-6)
        z = rng.standard_normal(6)
        for direction in Direction:
            expected = scalar_step(z, params.direction(direction).tolist(), 1e-6)
            assert np.allclose(step(z, direction, params), expected, rtol=0, atol=1e-12)

    def test_direction_matrices(self):
        a, b, am, bm = (np.full((2, 2), float(k)) for k in range(1, 5))
        params = FinolaParams(a, b, am, bm)
        assert params.direction("right") is params.A
        assert params.direction(Direction.LEFT) is params.A_minus
        assert params.direction("down") is params.B
        assert params.direction("up") is params.B_minus

    def test_linear_and_repetition(self, rng):
        params = FinolaParams.random(4, rng)
        z = rng.standard_normal(4)
        assert np.allclose(step(z, "right", params, Autoregression.LINEAR), z + params.A @ z, atol=1e-14)
        assert np.array_equal(step(z, "right", params, Autoregression.REPETITION), z)

    def test_norm_nonlinear_needs_the_trainable_layer(self, rng):
        with pytest.raises(UsageError):
            step(np.ones(4), "right", FinolaParams.random(4, rng), Autoregression.NORM_NONLINEAR)

    def test_channel_mismatch(self, rng):
        with pytest.raises(ShapeMismatch):
            step(np.ones(3), "right", FinolaParams.random(4, rng))

    def test_params_are_read_only(self, rng):
        params = FinolaParams.random(3, rng)
        with pytest.raises(ValueError):
            params.A[0, 0] = 1.0


class TestPropagate:
    def setup_method(self, method):
        self.rng = np.random.default_rng(7)
        self.params = FinolaParams.random(4, self.rng)
        self.q = self.rng.standard_normal(4)

    def test_zero_matrices_give_constant_map(self):
        z = propagate(self.q, FinolaParams.zeros(4), 6, 5)
        assert z.data.shape == (6, 5, 4)
        assert np.array_equal(z.data, np.broadcast_to(self.q, (6, 5, 4)))

    def test_single_cell(self):
        z = propagate(self.q, self.params, 1, 1)
        assert np.array_equal(z[0, 0], self.q)

    def test_origin_holds_q(self):
        for ordering in Ordering:
            z = propagate(self.q, self.params, 5, 5, ordering=ordering)
            assert np.allclose(z[2, 2], self.q, atol=0)

    @pytest.mark.parametrize("seed", range(10))
    def test_h_first_recursion(self, seed):
        rng = np.random.default_rng(seed)
        p = FinolaParams.random(8, rng)
        z = propagate(rng.standard_normal(8), p, 16, 16, ordering=Ordering.H_FIRST).data
        x0, y0 = 8, 8

        def hat(v):
            return normalize_channels(v, p.epsilon)

        for x in range(x0, 15):
            assert np.allclose(z[x + 1, y0] - z[x, y0], p.A @ hat(z[x, y0]), atol=1e-10)
        for x in range(1, x0 + 1):
            assert np.allclose(z[x - 1, y0] - z[x, y0], p.A_minus @ hat(z[x, y0]), atol=1e-10)
        for x in range(16):
            for y in range(y0, 15):
                assert np.allclose(z[x, y + 1] - z[x, y], p.B @ hat(z[x, y]), atol=1e-10)
            for y in range(1, y0 + 1):
                assert np.allclose(z[x, y - 1] - z[x, y], p.B_minus @ hat(z[x, y]), atol=1e-10)

    def test_v_first_recursion(self):
        z = propagate(self.q, self.params, 5, 4, ordering=Ordering.V_FIRST).data
        p = self.params
        x0, y0 = 2, 2
        for y in range(y0, 3):
            assert np.allclose(z[x0, y + 1] - z[x0, y], p.B @ normalize_channels(z[x0, y], p.epsilon), atol=1e-10)
        for y in range(4):
            for x in range(x0, 4):
                assert np.allclose(
                    z[x + 1, y] - z[x, y], p.A @ normalize_channels(z[x, y], p.epsilon), atol=1e-10
                )

    def test_averaged_is_mean_of_orderings(self):
        h = propagate(self.q, self.params, 6, 4, ordering=Ordering.H_FIRST).data
        v = propagate(self.q, self.params, 6, 4, ordering=Ordering.V_FIRST).data
        a = propagate(self.q, self.params, 6, 4).data
        assert np.array_equal(a, (h + v) * 0.5)

    def test_q_relation_on_origin_row(self):
        z = propagate(self.q, self.params, 6, 6, ordering=Ordering.H_FIRST).data
        Q = self.params.A @ np.linalg.inv(self.params.B)
        y0 = 3
        for x in range(3, 5):
            dx = z[x + 1, y0] - z[x, y0]
            dy = z[x, y0 + 1] - z[x, y0]
            assert np.allclose(dx, Q @ dy, atol=1e-8)

    def test_shift_equivariance(self):
        big = propagate(LatentSet(self.q[None], [(4, 3)]), self.params, 9, 7, ordering=Ordering.H_FIRST).data
        small = propagate(LatentSet(self.q[None], [(2, 1)]), self.params, 5, 4, ordering=Ordering.H_FIRST).data
        assert np.allclose(big[2:7, 2:6], small, atol=1e-12)

    def test_deterministic(self):
        a = propagate(self.q, self.params, 7, 7).data
        b = propagate(self.q.copy(), self.params, 7, 7).data
        assert np.array_equal(a, b)

    def test_position_out_of_range(self):
        with pytest.raises(PositionOutOfRange):
            propagate(LatentSet(self.q[None], [(5, 0)]), self.params, 5, 5)

    def test_several_paths_rejected(self):
        with pytest.raises(UsageError):
            propagate(LatentSet.centered(np.stack([self.q, self.q]), 5, 5), self.params, 5, 5)

    def test_float32_cast(self):
        z = propagate(self.q, self.params, 3, 3)
        assert z.astype32().data.dtype == np.float32


class TestMultipath:
    def setup_method(self, method):
        self.rng = np.random.default_rng(11)
        self.params = FinolaParams.random(4, self.rng)

    def test_single_path_matches_propagate(self):
        q = self.rng.standard_normal((1, 4))
        latents = LatentSet(q, [(1, 2)])
        assert np.array_equal(
            multipath_propagate(latents, self.params, 5, 5).data, propagate(latents, self.params, 5, 5).data
        )

    def test_cancellation(self):
        q = self.rng.standard_normal(4)
        latents = LatentSet(np.stack([q, -q]), [(2, 2), (2, 2)])
        z = multipath_propagate(latents, FinolaParams.zeros(4), 5, 5)
        assert np.array_equal(z.data, np.zeros((5, 5, 4)))

    def test_scattered_against_loop(self):
        q = self.rng.standard_normal((4, 4))
        latents = LatentSet.scattered(q, 8, 8)
        assert latents.positions == ((2, 2), (6, 2), (2, 6), (6, 6))
        expected = np.zeros((8, 8, 4))
        for vector, position in latents.paths():
            expected = expected + propagate(LatentSet(vector[None], [position]), self.params, 8, 8).data
        assert np.allclose(multipath_propagate(latents, self.params, 8, 8).data, expected, atol=1e-12)

    def test_path_order_does_not_matter(self):
        q = self.rng.standard_normal((3, 4))
        positions = [(0, 0), (3, 1), (5, 4)]
        forward = multipath_propagate(LatentSet(q, positions), self.params, 6, 5).data
        backward = multipath_propagate(LatentSet(q[::-1], positions[::-1]), self.params, 6, 5).data
        assert np.allclose(forward, backward, atol=1e-10)

    def test_channel_mismatch(self):
        with pytest.raises(ShapeMismatch):
            multipath_propagate(LatentSet.centered(np.ones((1, 3)), 4, 4), self.params, 4, 4)


class TestScatterPositions:
    def test_single(self):
        assert scatter_positions(1, 8, 6) == [(4, 3)]

    def test_non_square_count(self):
        assert scatter_positions(3, 8, 8) == [(2, 2), (6, 2), (2, 6)]

    def test_all_inside(self):
        for m in range(1, 20):
            positions = scatter_positions(m, 16, 16)
            assert len(positions) == m
            assert all(0 <= x < 16 and 0 <= y < 16 for x, y in positions)
