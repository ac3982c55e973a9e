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

import dataclasses

import numpy as np
import pytest

from finola.common.exceptions import DegenerateDenominator, ShapeMismatch, Singular, UsageError, ZeroBeta
from finola.core import FinolaParams, LatentSet, Ordering, multipath_propagate, normalize_channels, propagate
from finola.wave import (
    ConstrainedParams,
    ConstraintMode,
    build_wave_basis,
    conjugate_pairs,
    generation_mask,
    latent_generation_mask,
    materialize_constrained,
    project_map,
    propagate_projected,
    spectrum_table,
    transformed_normalize,
    unproject_map,
    wave_residual,
)


def random_basis(channels, seed):
    rng = np.random.default_rng(seed)
    params = FinolaParams.random(channels, rng)
    return params, build_wave_basis(params)


class TestBasis:
    def test_equal_matrices(self, rng):
        a = rng.standard_normal((5, 5)) + 5.0 * np.eye(5)
        basis = build_wave_basis(FinolaParams(a, a, a, a))
        assert np.allclose(basis.values, 1.0, atol=1e-10)
        assert np.allclose(basis.V @ basis.V_inv, np.eye(5), atol=1e-10)

    def test_diagonal(self):
        a, b = np.diag([2.0, 6.0]), np.diag([1.0, 2.0])
        basis = build_wave_basis(FinolaParams(a, b, a, b))
        assert np.allclose(basis.Q, np.diag([2.0, 3.0]))
        assert np.allclose(basis.values, [3.0, 2.0])

    def test_invariants(self):
        params, basis = random_basis(8, 3)
        q_norm = np.linalg.norm(basis.Q)
        assert np.linalg.norm(basis.Q @ basis.V - basis.V * basis.values) / q_norm <= 1e-6
        assert np.abs(basis.V @ basis.V_inv - np.eye(8)).sum(axis=1).max() <= 1e-8
        assert np.allclose(basis.H_A, basis.V_inv @ params.A)
        assert np.allclose(basis.direction("up"), basis.V_inv @ params.B_minus)

    def test_singular_b(self, rng):
        a = rng.standard_normal((3, 3))
        with pytest.raises(Singular):
            build_wave_basis(FinolaParams(a, np.zeros((3, 3)), a, a))

    def test_spectrum_table(self):
        _, basis = random_basis(6, 4)
        table = spectrum_table(basis)
        assert [row[0] for row in table] == list(range(6))
        for (_, re, im, modulus), value in zip(table, basis.values):
            assert (re, im) == (value.real, value.imag)
            assert np.isclose(modulus, abs(value))


class TestProjection:
    def test_identity_basis(self, rng):
        a = np.diag([8.0, 6.0, 4.0, 2.0])
        basis = build_wave_basis(FinolaParams(a, np.eye(4), a, np.eye(4)))
        assert np.allclose(basis.V, np.eye(4))
        z = rng.standard_normal((3, 2, 4))
        assert np.allclose(project_map(z, basis).data, z)

    def test_single_cell(self, rng):
        _, basis = random_basis(5, 5)
        q = rng.standard_normal(5)
        zeta = project_map(q[None, None], basis)
        assert np.allclose(zeta[0, 0], basis.V_inv @ q, atol=1e-12)

    def test_unproject(self, rng):
        _, basis = random_basis(6, 6)
        z = rng.standard_normal((4, 3, 6))
        back = unproject_map(project_map(z, basis), basis).data
        assert np.allclose(back.imag, 0.0, atol=1e-12)
        assert np.allclose(back.real, z, atol=1e-12)

    def test_conjugate_channels(self, rng):
        _, basis = random_basis(8, 7)
        zeta = project_map(rng.standard_normal((3, 3, 8)), basis).data
        pairs = conjugate_pairs(basis.values)
        assert pairs
        for i, j in pairs:
            assert np.allclose(zeta[:, :, j], np.conj(zeta[:, :, i]), atol=1e-8)

    def test_channel_mismatch(self, rng):
        _, basis = random_basis(4, 8)
        with pytest.raises(ShapeMismatch):
            project_map(rng.standard_normal((2, 2, 3)), basis)


class TestTransformedNormalize:
    def test_equals_z_space_normalization(self, rng):
        for seed in range(5):
            _, basis = random_basis(8, seed)
            phi = rng.standard_normal(8)
            for epsilon in (0.0, 1e-6):
                psi = basis.V_inv @ phi
                result = transformed_normalize(psi, basis, epsilon)
                assert np.allclose(result.imag, 0.0, atol=1e-10)
                assert np.allclose(result.real, normalize_channels(phi, epsilon), atol=1e-10)

    def test_identity_basis_closed_form(self, rng):
        a = np.diag([5.0, 4.0, 3.0, 2.0, 1.0])
        basis = build_wave_basis(FinolaParams(a, np.eye(5), a, np.eye(5)))
        psi = rng.standard_normal(5)
        c = 5
        centering = c * np.eye(c) - np.ones((c, c))
        closed_form = centering @ psi / np.sqrt(psi @ centering @ psi)
        assert np.allclose(transformed_normalize(psi, basis), closed_form, atol=1e-12)
        assert np.allclose(closed_form, normalize_channels(psi, 0.0), atol=1e-12)

    def test_constant_vector_is_degenerate(self):
        _, basis = random_basis(6, 9)
        with pytest.raises(DegenerateDenominator):
            transformed_normalize(basis.V_inv @ np.full(6, 2.0), basis)

    def test_batch(self, rng):
        _, basis = random_basis(4, 10)
        psi = project_map(rng.standard_normal((2, 3, 4)), basis).data
        out = transformed_normalize(psi, basis)
        assert out.shape == psi.shape
        assert np.array_equal(out[1, 2], transformed_normalize(psi[1, 2], basis))


class TestPropagateProjected:
    def test_dual_space_equivalence(self):
        for seed in range(10):
            rng = np.random.default_rng(100 + seed)
            params = FinolaParams.random(8, rng)
            basis = build_wave_basis(params)
            q = rng.standard_normal(8)
            direct = project_map(propagate(q, params, 9, 9), basis).data
            dual = propagate_projected(q, basis, params, 9, 9).data
            assert np.linalg.norm(dual - direct) <= 1e-6 * np.linalg.norm(direct)

    def test_large_mean_small_spread(self):
        params = FinolaParams.random(4, np.random.default_rng(21), epsilon=1e-6)
        basis = build_wave_basis(params)
        q = 1000.0 + 1e-4 * np.array([1.0, -1.0, 2.0, -2.0])

        psi = basis.V_inv @ q
        assert np.allclose(transformed_normalize(psi, basis, 1e-6).real, normalize_channels(q, 1e-6), atol=1e-6)

        direct = propagate(q, params, 3, 3, Ordering.H_FIRST).data
        dual = unproject_map(propagate_projected(q, basis, params, 3, 3, Ordering.H_FIRST), basis).data
        assert np.max(np.abs(dual - direct)) <= 1e-6 * np.max(np.abs(direct))

    def test_zero_direction_matrices(self, rng):
        params, basis = random_basis(5, 11)
        zero = np.zeros((5, 5), dtype=np.complex128)
        basis = dataclasses.replace(basis, H_A=zero, H_B=zero, H_A_minus=zero, H_B_minus=zero)
        q = rng.standard_normal(5)
        zeta = propagate_projected(q, basis, params, 4, 3).data
        assert np.allclose(zeta, np.broadcast_to(basis.V_inv @ q, zeta.shape), atol=0)

    def test_single_cell(self, rng):
        params, basis = random_basis(5, 12)
        q = rng.standard_normal(5)
        assert np.array_equal(propagate_projected(q, basis, params, 1, 1)[0, 0], basis.V_inv @ q)

    def test_multipath(self, rng):
        params, basis = random_basis(6, 13)
        latents = LatentSet.scattered(rng.standard_normal((2, 6)), 6, 6)
        direct = project_map(multipath_propagate(latents, params, 6, 6), basis).data
        dual = propagate_projected(latents, basis, params, 6, 6).data
        assert np.allclose(dual, direct, atol=1e-8)


class TestResidual:
    def test_exact_cells_of_single_orderings(self):
        params, basis = random_basis(6, 14)
        q = np.random.default_rng(14).standard_normal(6)
        for ordering in (Ordering.H_FIRST, Ordering.V_FIRST, Ordering.AVERAGED):
            zeta = project_map(propagate(q, params, 8, 8, ordering=ordering), basis)
            mask = generation_mask(8, 8, (4, 4), ordering)
            report = wave_residual(zeta, basis.values, mask)
            assert report.exact_cells == {Ordering.H_FIRST: 3, Ordering.V_FIRST: 3, Ordering.AVERAGED: 1}[ordering]
            assert report.exact_max < 1e-8
            assert np.isfinite(report.all_max)
            assert report.all_cells == 49

    def test_averaged_whole_grid_is_reported(self):
        params, basis = random_basis(6, 15)
        q = np.random.default_rng(15).standard_normal(6)
        zeta = project_map(propagate(q, params, 8, 8), basis)
        report = wave_residual(zeta, basis.values)
        assert report.all_max > 0.0
        assert report.exact_cells == 0
        assert [row[0] for row in report.rows()] == ["exact", "all"]

    def test_constant_map(self):
        zeta = np.ones((5, 4, 3), dtype=np.complex128)
        report = wave_residual(zeta, np.array([1.0, 2.0, 3.0]), np.ones((5, 4), dtype=bool))
        assert report.all_max == 0.0
        assert report.exact_max == 0.0
        assert report.exact_cells == 12

    def test_generation_mask_on_border(self):
        assert not generation_mask(4, 4, (3, 1), Ordering.H_FIRST).any()

    def test_latent_mask_intersection(self):
        latents = LatentSet(np.ones((2, 3)), [(1, 2), (3, 2)])
        mask = latent_generation_mask(latents, 6, 6, Ordering.H_FIRST)
        assert np.flatnonzero(mask[:, 2]).tolist() == [3, 4]
        assert mask.sum() == 2


class TestConstrained:
    def test_all_one_identity(self):
        params = materialize_constrained(ConstrainedParams(ConstraintMode.ALL_ONE, P=np.eye(3)))
        assert np.array_equal(params.A, np.eye(3))
        assert np.array_equal(params.B, np.eye(3))
        assert np.allclose(build_wave_basis(params).values, 1.0)

    def test_real_speed(self, rng):
        P = rng.standard_normal((2, 2)) + 2.0 * np.eye(2)
        c = ConstrainedParams(ConstraintMode.REAL_SPEED, P=P, alpha=[2.0, 3.0], beta=[1.0, 1.0])
        params = materialize_constrained(c)
        assert np.allclose(params.A, P @ np.diag([2.0, 3.0]))
        assert np.array_equal(params.A_minus, params.A)
        values = build_wave_basis(params).values
        assert np.allclose(values, [3.0, 2.0], atol=1e-8)
        assert np.all(np.abs(values.imag) < 1e-8)
        assert np.allclose(c.speeds(), [2.0, 3.0])

    def test_real_speed_recovery(self, rng):
        P = rng.standard_normal((6, 6))
        alpha = rng.uniform(0.5, 1.5, 6)
        beta = rng.uniform(0.5, 1.5, 6)
        values = build_wave_basis(
            materialize_constrained(ConstrainedParams(ConstraintMode.REAL_SPEED, P=P, alpha=alpha, beta=beta))
        ).values
        assert np.all(np.abs(values.imag) < 1e-8)
        assert np.allclose(np.sort(values.real), np.sort(alpha / beta), atol=1e-8)

    def test_zero_beta(self):
        with pytest.raises(ZeroBeta):
            materialize_constrained(
                ConstrainedParams(ConstraintMode.REAL_SPEED, P=np.eye(2), alpha=[1.0, 1.0], beta=[1.0, 0.0])
            )

    def test_complex_free(self, rng):
        free = FinolaParams.random(3, rng)
        assert materialize_constrained(ConstrainedParams(ConstraintMode.COMPLEX_FREE, free=free)) is free
        with pytest.raises(UsageError):
            materialize_constrained(ConstrainedParams(ConstraintMode.COMPLEX_FREE))

    def test_alpha_shape(self):
        with pytest.raises(ShapeMismatch):
            materialize_constrained(
                ConstrainedParams(ConstraintMode.REAL_SPEED, P=np.eye(3), alpha=[1.0, 1.0], beta=[1.0, 1.0, 1.0])
            )
