import math
import time

import numpy as np
import pytest

from povm_shadows import operators as ops
from povm_shadows.errors import (
    DimensionError,
    InvalidStateError,
    NormalizationError,
    NotInformationallyCompleteError,
)
from povm_shadows.norms import (
    average_squared_norm,
    estimator_variance,
    factorized_squared_norm,
    log_factorized_squared_norm,
    max_projection_norm_grid,
    octahedron_bound,
    projection_norms,
    sphere_grid,
    squared_shadow_norm,
)
from povm_shadows.povm import (
    SOLIDS,
    depolarize,
    from_bloch_params,
    inverted,
    platonic,
    random_povm,
    random_uniform_qubit_povm,
    solid_vertices,
    tensor_povm,
    validate,
    vertex_projections,
)
from povm_shadows.shadows import classical_shadows_symmetric

from conftest import P_ZPLUS
from oracles import brute_squared_norm


class TestSquaredShadowNorm:
    def test_tetrahedron_own_projections(self, tetrahedron):
        for P in vertex_projections("tetrahedron"):
            assert squared_shadow_norm(tetrahedron, P).squared_norm == pytest.approx(2, abs=1e-9)

    def test_octahedron_pauli_projections(self, octahedron):
        for P in vertex_projections("octahedron"):
            assert squared_shadow_norm(octahedron, P).squared_norm == pytest.approx(1.5, abs=1e-9)

    def test_inverted_tetrahedron(self, tetrahedron):
        inv = inverted(tetrahedron)
        for P in vertex_projections("tetrahedron"):
            assert squared_shadow_norm(inv, P).squared_norm == pytest.approx(1, abs=1e-9)

    def test_octahedron_sigma_z(self, octahedron):
        assert brute_squared_norm(octahedron.effects, ops.SIGMA_Z) == pytest.approx(3)
        rep = squared_shadow_norm(octahedron, ops.SIGMA_Z)
        assert rep.squared_norm == pytest.approx(3, abs=1e-12)
        # the norm operator is 3 * identity, so ties resolve to |x+>
        np.testing.assert_allclose(rep.worst_state_bloch, [1, 0, 0], atol=1e-12)

    def test_against_oracle(self, rng):
        for d in (2, 3):
            for _ in range(10):
                p = random_povm(rng, d, d * d + 3)
                x = ops.random_hermitian(rng, d)
                assert squared_shadow_norm(p, x).squared_norm == pytest.approx(
                    brute_squared_norm(p.effects, x), rel=1e-9
                )

    def test_worst_state_attains_max(self, rng):
        for _ in range(20):
            p = random_povm(rng, 2, 6)
            x = ops.random_hermitian(rng, 2)
            rep = squared_shadow_norm(p, x)
            sigma = rep.worst_state
            assert np.linalg.eigvalsh(sigma)[0] >= -1e-12
            assert np.trace(sigma).real == pytest.approx(1)
            value = rep.per_outcome_weights @ p.probabilities(sigma)
            assert value == pytest.approx(rep.squared_norm, abs=1e-8)
            for _ in range(50):
                probe = ops.random_density_matrix(rng, 2)
                assert rep.per_outcome_weights @ p.probabilities(probe) <= rep.squared_norm + 1e-8

    def test_scaling(self, rng):
        p = random_povm(rng, 2, 5)
        x = ops.random_hermitian(rng, 2)
        base = squared_shadow_norm(p, x).squared_norm
        for c in (-3.0, 0.5, 7.0):
            assert squared_shadow_norm(p, c * x).squared_norm == pytest.approx(c * c * base, rel=1e-10)

    def test_errors(self, octahedron):
        with pytest.raises(NotInformationallyCompleteError):
            squared_shadow_norm(validate([np.eye(2) / 2] * 2), ops.SIGMA_Z)
        with pytest.raises(DimensionError):
            squared_shadow_norm(octahedron, np.eye(3))


class TestVariance:
    def test_maximally_mixed(self, octahedron):
        assert estimator_variance(octahedron, ops.SIGMA_Z, np.eye(2) / 2) == pytest.approx(3)

    def test_pure(self, octahedron):
        assert estimator_variance(octahedron, ops.SIGMA_Z, P_ZPLUS) == pytest.approx(2)

    @pytest.mark.parametrize("name", SOLIDS)
    def test_identity_has_zero_variance(self, name, rng):
        rho = ops.random_density_matrix(rng, 2)
        assert estimator_variance(platonic(name), np.eye(2), rho) == pytest.approx(0, abs=1e-9)

    def test_invalid_state(self, octahedron):
        with pytest.raises(InvalidStateError):
            estimator_variance(octahedron, ops.SIGMA_Z, np.eye(2))

    def test_bounded_by_norm(self, rng):
        for _ in range(200):
            d = int(rng.choice([2, 3]))
            p = random_povm(rng, d, d * d + int(rng.integers(0, 5)))
            x = ops.random_hermitian(rng, d)
            rho = ops.random_density_matrix(rng, d, rank=int(rng.integers(1, d + 1)))
            assert estimator_variance(p, x, rho) <= squared_shadow_norm(p, x).squared_norm + 1e-9


class TestAverageNorm:
    def test_octahedron(self, octahedron):
        assert average_squared_norm(octahedron, ops.SIGMA_Z / math.sqrt(2)) == pytest.approx(3)

    def test_tetrahedron(self, tetrahedron):
        assert average_squared_norm(tetrahedron, ops.SIGMA_Z / math.sqrt(2)) == pytest.approx(3)

    def test_precondition(self, octahedron):
        with pytest.raises(NormalizationError):
            average_squared_norm(octahedron, P_ZPLUS)


FACTOR_POVMS = ["tetrahedron", "octahedron", "cube"]
FACTOR_OBS = {"x": ops.SIGMA_X, "z": ops.SIGMA_Z, "p": P_ZPLUS}


class TestFactorization:
    def test_single_site(self, rng, tetrahedron):
        x = ops.random_hermitian(rng, 2)
        assert factorized_squared_norm([tetrahedron], [x]) == squared_shadow_norm(tetrahedron, x).squared_norm

    def test_zz_octahedron(self, octahedron):
        joint = tensor_povm([octahedron, octahedron])
        zz = np.kron(ops.SIGMA_Z, ops.SIGMA_Z)
        explicit = squared_shadow_norm(joint, zz).squared_norm
        assert explicit == pytest.approx(9, abs=1e-8)
        assert factorized_squared_norm([octahedron] * 2, [ops.SIGMA_Z] * 2) == pytest.approx(9, abs=1e-12)

    @pytest.mark.parametrize("a", FACTOR_POVMS)
    @pytest.mark.parametrize("b", FACTOR_POVMS)
    @pytest.mark.parametrize("xa", FACTOR_OBS)
    @pytest.mark.parametrize("xb", FACTOR_OBS)
    def test_explicit_tensor(self, a, b, xa, xb):
        pa, pb = platonic(a), platonic(b)
        x, y = FACTOR_OBS[xa], FACTOR_OBS[xb]
        explicit = squared_shadow_norm(tensor_povm([pa, pb]), np.kron(x, y)).squared_norm
        assert factorized_squared_norm([pa, pb], [x, y]) == pytest.approx(explicit, abs=1e-8)

    def test_three_sites(self, rng):
        povms = [random_povm(rng, 2, 5) for _ in range(3)]
        xs = [ops.random_hermitian(rng, 2) for _ in range(3)]
        explicit = squared_shadow_norm(tensor_povm(povms), ops.tensor_all(xs)).squared_norm
        assert factorized_squared_norm(povms, xs) == pytest.approx(explicit, rel=1e-8)

    def test_sixty_sites(self, octahedron):
        t = time.perf_counter()
        log_value = log_factorized_squared_norm([octahedron] * 60, [ops.SIGMA_Z] * 60)
        assert time.perf_counter() - t < 0.01
        assert log_value == pytest.approx(60 * math.log(3), rel=1e-12)
        assert factorized_squared_norm([octahedron] * 60, [ops.SIGMA_Z] * 60) == pytest.approx(3.0**60, rel=1e-12)

    def test_length_mismatch(self, octahedron):
        with pytest.raises(DimensionError):
            factorized_squared_norm([octahedron], [ops.SIGMA_Z] * 2)


class TestOctahedronBound:
    def test_octahedron(self, octahedron):
        assert abs(octahedron_bound(octahedron) - 1.5) <= 1e-12

    def test_tetrahedron_not_tight(self, tetrahedron):
        assert octahedron_bound(tetrahedron) == pytest.approx(1.5, abs=1e-12)
        assert max_projection_norm_grid(tetrahedron, 64) == pytest.approx(2, abs=1e-3)

    def test_shrunk_octahedron(self):
        v = 0.8 * np.vstack([np.eye(3), -np.eye(3)])
        p = from_bloch_params(np.full(6, 1 / 3), v)
        # H = 0.64/3 * 1, so tr H^-1 = 9/0.64
        assert octahedron_bound(p) == pytest.approx((9 + 9 / 0.64) / 12, abs=1e-12)
        assert octahedron_bound(p) > 1.5

    def test_never_below_three_halves(self, rng):
        for _ in range(100):
            p = random_uniform_qubit_povm(rng, int(rng.integers(4, 20)))
            assert octahedron_bound(p) >= 1.5 - 1e-12


class TestGrid:
    def test_grid_nested(self):
        assert len(sphere_grid(9)) == 64 + 81
        np.testing.assert_array_equal(sphere_grid(9)[:64], sphere_grid(8))

    @pytest.mark.parametrize("resolution", [8, 13, 32, 64])
    def test_octahedron_flat(self, octahedron, resolution):
        assert max_projection_norm_grid(octahedron, resolution) == pytest.approx(1.5, abs=1e-9)
        norms = projection_norms(octahedron, sphere_grid(resolution))
        assert np.ptp(norms) <= 1e-9

    def test_monotone(self, rng):
        p = random_uniform_qubit_povm(rng, 5)
        values = [max_projection_norm_grid(p, r) for r in range(8, 40, 3)]
        assert all(b >= a for a, b in zip(values, values[1:]))

    def test_projection_norms_match_general(self, rng):
        p = random_povm(rng, 2, 7)
        dirs = rng.standard_normal((10, 3))
        fast = projection_norms(p, dirs)
        slow = [squared_shadow_norm(p, P).squared_norm for P in ops.bloch_projector(dirs)]
        np.testing.assert_allclose(fast, slow, rtol=1e-10)

    def test_bound_holds(self, rng):
        for _ in range(25):
            p = random_uniform_qubit_povm(rng, int(rng.integers(4, 12)))
            assert max_projection_norm_grid(p, 64) >= octahedron_bound(p) - 1e-6


class TestDepolarizedOctahedron:
    P_VALUES = [0.25, 0.5, 0.9, 1.0]

    @pytest.mark.parametrize("p", P_VALUES)
    def test_direction_independent(self, octahedron, p):
        norms = projection_norms(depolarize(octahedron, p), sphere_grid(16))
        assert np.ptp(norms) <= 1e-9 * norms.max()
        # direct evaluation of the noisy shadows 1/2 + 3/(2p) r.sigma
        assert norms[0] == pytest.approx(0.75 * (1 + 1 / p**2), rel=1e-10)

    def test_decreasing_and_divergent(self, octahedron):
        ps = np.linspace(0.05, 1, 40)
        values = [projection_norms(depolarize(octahedron, p), [[0, 0, 1]])[0] for p in ps]
        assert all(b < a for a, b in zip(values, values[1:]))
        assert values[-1] == pytest.approx(1.5)
        assert values[0] > 100

    @pytest.mark.parametrize("p", [0.25, 0.5, 0.9])
    def test_two_paths(self, octahedron, p):
        povm = depolarize(octahedron, p)
        sym = classical_shadows_symmetric(povm)
        P = ops.bloch_projector([0.3, -0.4, 0.866])
        t = sym.expectations(P)
        via_sym = np.linalg.eigvalsh(np.einsum("k,kij->ij", t**2, povm.effects))[-1]
        assert squared_shadow_norm(povm, P).squared_norm == pytest.approx(via_sym, abs=1e-9)
