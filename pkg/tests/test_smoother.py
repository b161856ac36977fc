import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nsamg import probgen
from nsamg.bspace import BSpace
from nsamg.errors import (
    NotBNormal,
    SingularErrorOperator,
    SingularSmoother,
    SmoothingAssumptionViolated,
)
from nsamg.kernel import fro, hermitian_eig, repeated_power
from nsamg.smoother import (
    build_smoother,
    eigen_map,
    reduce_steps,
    smoothing_report,
    spectrum_in_unit_interval,
)

from conftest import random_complex, random_hpd


@pytest.fixture
def reference():
    fx = probgen.paper_counterexample()
    space = BSpace(fx.B)
    return space, fx.A, build_smoother(space, fx.A, fx.Minv)


def normal_context(seed, n=8, radius=0.9, rim=False):
    recipe = probgen.b_normal_recipe(n, seed, radius=radius, rim=rim)
    space = BSpace(recipe.weight())
    ma = recipe.iteration_matrix()
    return recipe, space, build_smoother(space, ma, np.eye(n, dtype=complex))


class TestBuildSmoother:
    def test_reference_hat_diagonal(self, reference):
        _, _, ctx = reference
        np.testing.assert_allclose(
            np.diag(ctx.hat_minv_b).real, [7 / 16, 3 / 4, 15 / 16], atol=1e-14
        )
        np.testing.assert_allclose(
            np.diag(np.eye(3) - ctx.hat_minv_b).real,
            [9 / 16, 1 / 4, 1 / 16],
            atol=1e-14,
        )

    def test_symmetrized_matrices_are_hermitian(self, rng):
        n = 7
        A = random_complex(rng, n, n) + 3.0 * np.eye(n)
        space = BSpace(random_hpd(rng, n))
        minv = probgen.make_smoother(A, "jacobi", omega=0.5)
        ctx = build_smoother(space, A, minv)
        assert fro(ctx.tilde_minv - ctx.tilde_minv.conj().T) <= 1e-10
        assert fro(ctx.hat_minv - ctx.hat_minv.conj().T) <= 1e-10

    def test_defining_identities(self, rng):
        n = 6
        A = random_complex(rng, n, n) + 3.0 * np.eye(n)
        space = BSpace(random_hpd(rng, n))
        ctx = build_smoother(space, A, probgen.make_smoother(A, "jacobi", omega=0.4))
        eye = np.eye(n)
        lhs = ctx.tilde_minv_b
        rhs = ctx.ma + ctx.ma_adj - ctx.ma_adj @ ctx.ma
        assert fro(lhs - rhs) <= 1e-10 * max(1.0, fro(rhs))
        tilde_err = fro(
            (eye - ctx.tilde_minv_b) - ctx.error_matrix_adjoint() @ ctx.error_matrix()
        )
        hat_err = fro(
            (eye - ctx.hat_minv_b) - ctx.error_matrix() @ ctx.error_matrix_adjoint()
        )
        assert tilde_err <= 1e-10 * max(1.0, fro(ctx.tilde_minv_b))
        assert hat_err <= 1e-10 * max(1.0, fro(ctx.hat_minv_b))

    def test_energy_norm_reduction(self, rng):
        # with the weight equal to the HPD system matrix, the symmetrized
        # smoother collapses to M^{-H} (M + M^H - A) M^{-1}
        A = random_hpd(rng, 6)
        space = BSpace(A)
        minv = probgen.make_smoother(A, "gauss_seidel")
        ctx = build_smoother(space, A, minv)
        M = np.linalg.inv(minv)
        expected = minv.conj().T @ (M + M.conj().T - A) @ minv
        assert fro(ctx.tilde_minv - expected) <= 1e-9 * max(1.0, fro(expected))

    def test_rejects_singular_smoother(self, rng):
        A = np.eye(3, dtype=complex)
        with pytest.raises(SingularSmoother):
            build_smoother(BSpace(np.eye(3)), A, np.zeros((3, 3), dtype=complex))


class TestSmoothingReport:
    def test_reference_values(self, reference):
        _, _, ctx = reference
        rep = smoothing_report(ctx)
        assert rep.assumption_holds
        np.testing.assert_allclose(rep.spectrum_hat, [7 / 16, 3 / 4, 15 / 16],
                                   atol=1e-12)
        assert rep.b_normal_ma
        assert rep.b_norm_of_error == pytest.approx(0.75, abs=1e-12)

    def test_scaled_inverse_smoother_converges(self, rng):
        A = random_complex(rng, 5, 5) + 3.0 * np.eye(5)
        space = BSpace(random_hpd(rng, 5))
        ctx = build_smoother(space, A, 0.5 * np.linalg.inv(A))
        rep = smoothing_report(ctx)
        assert rep.assumption_holds
        np.testing.assert_allclose(rep.spectrum_hat, np.full(5, 0.75), atol=1e-10)

    def test_overrelaxed_inverse_smoother_diverges(self, rng):
        A = random_complex(rng, 5, 5) + 3.0 * np.eye(5)
        space = BSpace(random_hpd(rng, 5))
        rep = smoothing_report(build_smoother(space, A, 2.5 * np.linalg.inv(A)))
        assert not rep.assumption_holds
        assert rep.b_norm_of_error == pytest.approx(1.5, abs=1e-10)
        assert set(rep.equivalence_flags()) == {False}

    @pytest.mark.parametrize("radius,expected", [(0.7, True), (1.2, False)])
    def test_equivalence_cluster_both_sides(self, radius, expected):
        for seed in range(5):
            _, _, ctx = normal_context(seed, radius=radius, rim=True)
            flags = set(smoothing_report(ctx).equivalence_flags())
            assert flags == {expected}
            spec = probgen.ProblemSpec(
                family="random_nonnormal", n=8, seed=seed, radius=radius
            )
            A, B, minv = probgen.generate(spec)
            ctx2 = build_smoother(BSpace(B), A, minv)
            assert set(smoothing_report(ctx2).equivalence_flags()) == {expected}

    def test_symmetrized_matrices_self_adjoint_real_spectrum(self, rng):
        A = random_complex(rng, 7, 7) + 3.0 * np.eye(7)
        space = BSpace(random_hpd(rng, 7))
        ctx = build_smoother(space, A, probgen.make_smoother(A, "jacobi", omega=0.5))
        for M in (ctx.tilde_minv_b, ctx.hat_minv_b):
            assert space.classify(M).is_b_orthogonal

    def test_normal_iteration_matrix_merges_both_forms(self):
        _, _, ctx = normal_context(3)
        assert fro(ctx.tilde_minv - ctx.hat_minv) <= 1e-10 * max(
            1.0, fro(ctx.hat_minv)
        )

    def test_radius_equals_norm_for_normal(self):
        _, _, ctx = normal_context(4)
        rep = smoothing_report(ctx)
        assert rep.rho_error == pytest.approx(rep.b_norm_of_error, abs=1e-9)


class TestEigenMap:
    def test_fixed_point(self):
        assert eigen_map(1.0) == pytest.approx(1.0)

    def test_half(self):
        assert eigen_map(0.5) == pytest.approx(0.75)

    def test_boundary(self):
        assert eigen_map(2.0) == pytest.approx(0.0)

    @settings(max_examples=100, deadline=None)
    @given(st.complex_numbers(max_magnitude=10.0, allow_nan=False,
                              allow_infinity=False))
    def test_upper_bound(self, lam):
        assert eigen_map(lam) <= 1.0

    def test_eigenpairs_carry_over(self):
        recipe, space, ctx = normal_context(6)
        for lam, col in zip(recipe.values, recipe.W.T):
            target = eigen_map(lam)
            residual = np.linalg.norm(ctx.hat_minv_b @ col - target * col)
            assert residual <= 1e-8 * np.linalg.norm(col)


class TestReduceSteps:
    def test_single_step_is_hat_matrix(self):
        _, _, ctx = normal_context(7)
        xhat_b, x_a = reduce_steps(ctx, 1)
        assert fro(xhat_b - ctx.hat_minv_b) <= 1e-12 * max(1.0, fro(ctx.hat_minv_b))
        assert fro(x_a - ctx.ma) <= 1e-12 * max(1.0, fro(ctx.ma))

    def test_reference_two_steps(self, reference):
        _, _, ctx = reference
        xhat_b, _ = reduce_steps(ctx, 2)
        np.testing.assert_allclose(
            np.diag(np.eye(3) - xhat_b).real,
            [81 / 256, 1 / 16, 1 / 256],
            atol=1e-13,
        )

    def test_scalar_three_steps(self):
        A = np.array([[0.5]], dtype=complex)
        space = BSpace(np.eye(1))
        ctx = build_smoother(space, A, np.eye(1, dtype=complex))
        xhat_b, _ = reduce_steps(ctx, 3)
        assert (1.0 - xhat_b[0, 0]).real == pytest.approx(0.25**3, abs=1e-14)

    def test_power_identities(self):
        _, space, ctx = normal_context(8)
        nu = 3
        xhat_b, x_a = reduce_steps(ctx, nu)
        eye = np.eye(ctx.n)
        assert fro((eye - x_a) - repeated_power(ctx.error_matrix(), nu)) <= 1e-10
        assert fro((eye - xhat_b) - repeated_power(eye - ctx.hat_minv_b, nu)) <= 1e-10
        assert space.classify(x_a).is_b_normal
        assert space.classify(xhat_b).is_b_orthogonal
        spectrum = hermitian_eig(space.transform(xhat_b)).eigenvalues
        assert np.all(spectrum > 0.0) and np.all(spectrum < 1.0)
        # reduced smoother inverse stays HPD
        xhat_inv = 0.5 * (xhat_b @ space.inv + (xhat_b @ space.inv).conj().T)
        vals = hermitian_eig(space.sqrt @ xhat_inv @ space.sqrt).eigenvalues
        assert vals[0] > 0.0

    def test_rejects_nonnormal(self, rng):
        spec = probgen.ProblemSpec(family="random_nonnormal", n=6, seed=1, radius=0.9)
        A, B, minv = probgen.generate(spec)
        ctx = build_smoother(BSpace(B), A, minv)
        with pytest.raises(NotBNormal):
            reduce_steps(ctx, 2)

    def test_rejects_diverging_smoother(self):
        _, _, ctx = normal_context(9, radius=1.2, rim=True)
        with pytest.raises(SmoothingAssumptionViolated):
            reduce_steps(ctx, 2)

    def test_rejects_singular_error_operator(self):
        space = BSpace(np.eye(3))
        A = np.eye(3, dtype=complex)
        ctx = build_smoother(space, A, np.eye(3, dtype=complex))
        with pytest.raises(SingularErrorOperator):
            reduce_steps(ctx, 2)

    def test_nu_cap(self):
        _, _, ctx = normal_context(10)
        with pytest.raises(ValueError):
            reduce_steps(ctx, 9)
        with pytest.raises(ValueError):
            reduce_steps(ctx, 0)


def test_spectrum_in_unit_interval_thresholds():
    assert spectrum_in_unit_interval([0.5, 1.0])
    assert spectrum_in_unit_interval([0.5, 1.0 + 5e-11])
    assert not spectrum_in_unit_interval([0.5, 1.01])
    assert not spectrum_in_unit_interval([-0.1, 0.5])
    assert not spectrum_in_unit_interval([0.0, 0.5])
