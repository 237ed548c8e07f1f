import numpy as np
import pytest

from povm_shadows import operators as ops
from povm_shadows.errors import (
    NotInformationallyCompleteError,
    NotRigidlySymmetricError,
    NotUniformError,
    SingularHError,
)
from povm_shadows.povm import (
    SOLIDS,
    QubitPovmParams,
    depolarize,
    from_bloch_params,
    platonic,
    random_povm,
    random_uniform_qubit_povm,
    solid_vertices,
    validate,
)
from povm_shadows.shadows import (
    bloch_least_squares,
    classical_shadows,
    classical_shadows_symmetric,
    frame_operator,
    least_squares_estimate,
    shadows_by_method,
)

from conftest import P_ZPLUS
from oracles import brute_apply, brute_shadows

TRIVIAL = [np.eye(2) / 2, np.eye(2) / 2]


def stretched_cube(a=0.8, b=0.5):
    """Uniform (equal alpha, beta, gamma) but not rigidly symmetric."""
    c = np.sqrt(1 - a * a - b * b)
    v = [(sx * a, sy * b, sz * c) for sx in (1, -1) for sy in (1, -1) for sz in (1, -1)]
    return from_bloch_params(np.full(8, 0.25), v)


class TestFrameOperator:
    def test_identity_octahedron(self, octahedron):
        np.testing.assert_allclose(frame_operator(octahedron).apply(np.eye(2)), np.eye(2) / 3, atol=1e-15)

    def test_trivial_rank_one(self):
        f = frame_operator(validate(TRIVIAL))
        assert np.linalg.matrix_rank(f.matrix, tol=1e-12) == 1
        assert not f.is_invertible

    def test_tetrahedron_sigma_z(self, tetrahedron):
        np.testing.assert_allclose(frame_operator(tetrahedron).apply(ops.SIGMA_Z), ops.SIGMA_Z / 6, atol=1e-15)

    def test_matches_definition(self, rng):
        for d, n in [(2, 5), (3, 12), (4, 20)]:
            p = random_povm(rng, d, n)
            f = frame_operator(p)
            np.testing.assert_allclose(f.matrix, f.matrix.T, atol=1e-10)
            assert f.eigenvalues[0] > -1e-12
            x = ops.random_hermitian(rng, d)
            np.testing.assert_allclose(f.apply(x), brute_apply(p.effects, x), atol=1e-12)

    def test_inversion_round_trip(self, rng):
        for _ in range(100):
            n = int(rng.integers(4, 11))
            p = random_povm(rng, 2, n)
            x = ops.random_hermitian(rng, 2)
            f = frame_operator(p)
            np.testing.assert_allclose(f.apply(f.apply_inverse(x)), x, atol=1e-9)


class TestClassicalShadows:
    def test_octahedron(self, octahedron):
        s = classical_shadows(octahedron)
        assert octahedron.labels[0] == "z+"
        np.testing.assert_allclose(s[0], 3 * P_ZPLUS - np.eye(2), atol=1e-12)
        np.testing.assert_allclose(s.shadows, brute_shadows(octahedron.effects), atol=1e-12)

    def test_tetrahedron(self, tetrahedron):
        r = solid_vertices("tetrahedron")
        expected = ops.from_bloch(np.hstack([np.ones((4, 1)), 3 * r]))
        np.testing.assert_allclose(classical_shadows(tetrahedron).shadows, expected, atol=1e-12)
        np.testing.assert_allclose(expected, brute_shadows(tetrahedron.effects), atol=1e-12)

    def test_not_ic(self):
        with pytest.raises(NotInformationallyCompleteError):
            classical_shadows(validate(TRIVIAL))

    def test_inverts_frame(self, rng):
        p = random_povm(rng, 3, 15)
        s = classical_shadows(p)
        np.testing.assert_allclose(frame_operator(p).apply(s.shadows), p.effects, atol=1e-9)

    def test_cached(self, octahedron):
        assert classical_shadows(octahedron) is classical_shadows(octahedron)

    @pytest.mark.parametrize("d, trials", [(2, 100), (4, 20), (3, 10)])
    def test_reconstruction_identity(self, rng, d, trials):
        for _ in range(trials):
            p = random_povm(rng, d, int(rng.integers(d * d, d * d + 8)))
            rho = ops.random_density_matrix(rng, d)
            rec = classical_shadows(p).reconstruct(p.probabilities(rho))
            assert np.max(np.abs(rec - rho)) <= 1e-9

    def test_unit_trace_for_uniform(self, rng):
        for _ in range(20):
            p = random_uniform_qubit_povm(rng, int(rng.integers(4, 12)))
            np.testing.assert_allclose(np.trace(classical_shadows(p).shadows, axis1=1, axis2=2), 1, atol=1e-9)


class TestSymmetricShadows:
    def test_octahedron(self, octahedron):
        sym = classical_shadows_symmetric(octahedron)
        assert (sym.coefficients.a, sym.coefficients.b) == pytest.approx((9, -1))
        np.testing.assert_allclose(sym.shadows, classical_shadows(octahedron).shadows, atol=1e-10)

    def test_depolarized_octahedron(self, octahedron):
        p = depolarize(octahedron, 0.5)
        np.testing.assert_allclose(
            classical_shadows_symmetric(p).shadows, classical_shadows(p).shadows, atol=1e-10
        )

    @pytest.mark.parametrize("name", SOLIDS)
    @pytest.mark.parametrize("p", [0.25, 0.5, 0.9, 1.0])
    def test_solids(self, name, p):
        povm = depolarize(platonic(name), p)
        np.testing.assert_allclose(
            classical_shadows_symmetric(povm).shadows, classical_shadows(povm).shadows, atol=1e-9
        )

    def test_not_rigid(self):
        p = stretched_cube()
        # uniform, so the closed form exists ...
        from povm_shadows.povm import symmetry_coefficients

        symmetry_coefficients(p)
        # ... but it does not invert the frame
        with pytest.raises(NotRigidlySymmetricError):
            classical_shadows_symmetric(p)

    def test_not_uniform(self, rng):
        with pytest.raises(NotUniformError):
            classical_shadows_symmetric(random_povm(rng, 2, 6))


class TestLeastSquares:
    def test_exact_statistics(self, octahedron):
        p = [1 / 3, 0, 1 / 6, 1 / 6, 1 / 6, 1 / 6]
        np.testing.assert_allclose(octahedron.probabilities(P_ZPLUS), p, atol=1e-15)
        np.testing.assert_allclose(least_squares_estimate(octahedron, p), P_ZPLUS, atol=1e-10)

    def test_one_hot_is_shadow(self, rng):
        p = random_povm(rng, 2, 7)
        s = classical_shadows(p)
        for k in range(7):
            np.testing.assert_allclose(least_squares_estimate(p, np.eye(7)[k]), s[k], atol=1e-10)

    def test_uniform(self, octahedron):
        np.testing.assert_allclose(least_squares_estimate(octahedron, np.full(6, 1 / 6)), np.eye(2) / 2, atol=1e-12)

    def test_linearity(self, rng):
        povm = random_povm(rng, 3, 11)
        for _ in range(20):
            p, q = rng.random(11), rng.random(11)
            lam, mu = rng.standard_normal(2)
            lhs = least_squares_estimate(povm, lam * p + mu * q)
            rhs = lam * least_squares_estimate(povm, p) + mu * least_squares_estimate(povm, q)
            np.testing.assert_allclose(lhs, rhs, atol=1e-10)

    def test_minimizes_residual(self, rng):
        povm = random_povm(rng, 2, 6)
        p = rng.random(6)
        est = least_squares_estimate(povm, p)
        base = np.sum((povm.probabilities(est) - p) ** 2)
        for _ in range(50):
            tau = est + 1e-3 * ops.random_hermitian(rng, 2)
            assert np.sum((povm.probabilities(tau) - p) ** 2) >= base - 1e-15

    def test_not_ic(self):
        with pytest.raises(NotInformationallyCompleteError):
            least_squares_estimate(validate(TRIVIAL), [0.5, 0.5])


class TestBlochLeastSquares:
    def test_octahedron(self, octahedron):
        b = bloch_least_squares(octahedron)
        np.testing.assert_allclose(b.h, np.eye(3) / 3, atol=1e-15)
        r = QubitPovmParams.from_povm(octahedron).directions
        np.testing.assert_allclose(b.shadow_columns, np.hstack([np.ones((6, 1)), 3 * r]), atol=1e-12)
        np.testing.assert_allclose(b.shadows()[0], 3 * P_ZPLUS - np.eye(2), atol=1e-12)

    def test_tetrahedron(self, tetrahedron):
        np.testing.assert_allclose(bloch_least_squares(tetrahedron).h, np.eye(3) / 3, atol=1e-15)

    def test_coplanar(self):
        v = [[1, 0, 0], [-1, 0, 0], [0, 1, 0], [0, -1, 0]]
        with pytest.raises(SingularHError):
            bloch_least_squares(from_bloch_params([0.5] * 4, v))

    def test_agrees_with_general(self, rng):
        for _ in range(50):
            p = random_uniform_qubit_povm(rng, int(rng.integers(4, 15)))
            np.testing.assert_allclose(
                bloch_least_squares(p).shadows(), classical_shadows(p).shadows, atol=1e-10
            )

    def test_requires_uniform(self, rng):
        with pytest.raises(NotUniformError):
            bloch_least_squares(random_povm(rng, 2, 5))


@pytest.mark.parametrize("method", ["general", "symmetric", "bloch"])
def test_methods(method, tetrahedron):
    np.testing.assert_allclose(
        shadows_by_method(tetrahedron, method).shadows, classical_shadows(tetrahedron).shadows, atol=1e-10
    )
