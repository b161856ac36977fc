import numpy as np
import pytest

from nsamg import probgen
from nsamg.bspace import BSpace
from nsamg.errors import (
    NotBOrthogonal,
    RankDeficientTransfer,
    SingularCoarseMatrix,
)
from nsamg.kernel import fro, hermitian_eig
from nsamg.transfer import (
    TransferPair,
    build_correction,
    change_of_basis,
    complete_interpolation,
    complete_restriction,
    max_angle_sin,
    nullspace,
    orthogonality_report,
    orthonormal_basis,
    subspace_contained,
    subspaces_equal,
)

from conftest import random_complex, random_hpd


@pytest.fixture
def fixture3():
    return probgen.paper_counterexample()


def compatible_instance(seed, n=10, n_c=4):
    rng = np.random.default_rng(seed)
    A = random_complex(rng, n, n) + 3.0 * np.eye(n)
    space = BSpace(random_hpd(rng, n))
    R = probgen.make_coarsening(n, n_c, "random_orthonormal", seed=seed + 1)
    P = complete_interpolation(space, A, R)
    pair = TransferPair.build(space, A, P, R)
    return space, A, R, P, pair


class TestSubspaceHelpers:
    def test_equality_is_basis_independent(self, rng):
        X = random_complex(rng, 8, 3)
        mix = random_complex(rng, 3, 3) + 2.0 * np.eye(3)
        assert subspaces_equal(X, X @ mix)

    def test_containment(self, rng):
        X = random_complex(rng, 8, 4)
        assert subspace_contained(X[:, :2], X)
        assert not subspace_contained(X, X[:, :2])

    def test_nullspace_is_kernel(self, rng):
        X = random_complex(rng, 3, 7)
        N = nullspace(X)
        assert N.shape[1] == 4
        assert fro(X @ N) <= 1e-10


class TestTransferPair:
    def test_full_coarse_space_gives_identity(self, rng):
        n = 5
        A = random_complex(rng, n, n) + 3.0 * np.eye(n)
        space = BSpace(np.eye(n))
        pair = TransferPair.build(space, A, np.eye(n), np.eye(n))
        cgc = build_correction(space, A, pair)
        np.testing.assert_allclose(cgc.pi, np.eye(n), atol=1e-9)

    def test_reference_complements(self, fixture3):
        space = BSpace(fixture3.B)
        for P, R, expected in (
            (fixture3.P, fixture3.R, fixture3.complement_small),
            (fixture3.P_big, fixture3.R_big, fixture3.complement_big),
        ):
            pair = TransferPair.build(space, fixture3.A, P, R)
            cgc = build_correction(space, fixture3.A, pair)
            np.testing.assert_allclose(cgc.complement, expected, atol=1e-13)
            assert not cgc.b_orthogonal
            assert fro(cgc.pi @ cgc.pi - cgc.pi) <= 1e-9

    def test_rank_deficient_rejected(self, rng):
        A = random_complex(rng, 6, 6) + 3.0 * np.eye(6)
        space = BSpace(np.eye(6))
        P = np.ones((6, 2), dtype=complex)
        with pytest.raises(RankDeficientTransfer):
            TransferPair.build(space, A, P, P)

    def test_singular_coarse_matrix_rejected(self):
        # antisymmetric A makes e1^H A e1 = 0
        A = np.array([[0.0, 1.0], [-1.0, 0.0]], dtype=complex)
        space = BSpace(np.eye(2))
        e1 = np.eye(2, dtype=complex)[:, :1]
        with pytest.raises(SingularCoarseMatrix):
            TransferPair.build(space, A, e1, e1)


class TestCompatiblePairs:
    def test_unit_norm_correction(self):
        space, A, R, P, pair = compatible_instance(0)
        cgc = build_correction(space, A, pair)
        assert cgc.b_orthogonal
        assert space.op_norm(cgc.pi) == pytest.approx(1.0, abs=1e-9)
        assert space.op_norm(cgc.complement) == pytest.approx(1.0, abs=1e-9)

    def test_seven_conditions_true(self):
        space, A, R, P, pair = compatible_instance(1)
        report = orthogonality_report(space, A, pair)
        assert report.all_true and report.consistent

    def test_seven_conditions_false_on_reference(self, fixture3):
        space = BSpace(fixture3.B)
        pair = TransferPair.build(space, fixture3.A, fixture3.P, fixture3.R)
        report = orthogonality_report(space, fixture3.A, pair)
        assert report.all_false and report.consistent

    def test_hpd_case_with_matching_transfers(self, rng):
        A = random_hpd(rng, 8)
        space = BSpace(A)
        P = probgen.make_coarsening(8, 3, "random_orthonormal", seed=4)
        pair = TransferPair.build(space, A, P, P)
        report = orthogonality_report(space, A, pair)
        assert report.all_true


class TestCompletions:
    def test_interpolation_hpd_case(self, rng):
        A = random_hpd(rng, 7)
        space = BSpace(A)
        R = probgen.make_coarsening(7, 3, "random_orthonormal", seed=2)
        np.testing.assert_allclose(complete_interpolation(space, A, R), R, atol=1e-10)

    def test_interpolation_euclidean_case(self, rng):
        A = random_complex(rng, 7, 7) + 3.0 * np.eye(7)
        space = BSpace(np.eye(7))
        R = probgen.make_coarsening(7, 3, "random_orthonormal", seed=3)
        np.testing.assert_allclose(
            complete_interpolation(space, A, R), A.conj().T @ R, atol=1e-12
        )

    def test_interpolation_matches_weighted_projector(self):
        space, A, R, P, pair = compatible_instance(5)
        cgc = build_correction(space, A, pair)
        projector = P @ np.linalg.solve(P.conj().T @ space.B @ P,
                                        P.conj().T @ space.B)
        assert fro(cgc.pi - projector) <= 1e-9 * max(1.0, fro(cgc.pi))

    def test_restriction_hpd_case(self, rng):
        A = random_hpd(rng, 7)
        space = BSpace(A)
        P = probgen.make_coarsening(7, 3, "random_orthonormal", seed=6)
        np.testing.assert_allclose(complete_restriction(space, A, P), P, atol=1e-10)

    def test_restriction_euclidean_case(self, rng):
        A = random_complex(rng, 6, 6) + 3.0 * np.eye(6)
        space = BSpace(np.eye(6))
        P = probgen.make_coarsening(6, 2, "random_orthonormal", seed=7)
        expected = np.linalg.solve(A.conj().T, P)
        np.testing.assert_allclose(
            complete_restriction(space, A, P), expected, atol=1e-10
        )

    def test_restriction_gives_orthogonal_correction(self, rng):
        A = random_complex(rng, 9, 9) + 3.0 * np.eye(9)
        space = BSpace(random_hpd(rng, 9))
        P = probgen.make_coarsening(9, 4, "random_orthonormal", seed=8)
        R_star = complete_restriction(space, A, P)
        pair = TransferPair.build(space, A, P, R_star)
        assert build_correction(space, A, pair).b_orthogonal


class TestChangeOfBasis:
    def test_identity_for_exact_completion(self):
        space, A, R, P, pair = compatible_instance(9)
        S = change_of_basis(space, A, pair)
        np.testing.assert_allclose(S, np.eye(pair.n_c), atol=1e-9)

    def test_scaling(self):
        space, A, R, P, pair = compatible_instance(10)
        scaled = TransferPair.build(space, A, 2.0 * P, R)
        S = change_of_basis(space, A, scaled)
        np.testing.assert_allclose(S, 2.0 * np.eye(pair.n_c), atol=1e-9)

    def test_random_basis_change_recovered(self, rng):
        space, A, R, P, pair = compatible_instance(11)
        mix = random_complex(rng, pair.n_c, pair.n_c) + 2.0 * np.eye(pair.n_c)
        mixed = TransferPair.build(space, A, P @ mix, R)
        S = change_of_basis(space, A, mixed)
        assert fro(mixed.P - P @ S) <= 1e-9 * max(1.0, fro(mixed.P))
        coupling = fro(mixed.A_c - np.linalg.solve(S.conj().T, mixed.B_c))
        assert coupling <= 1e-9 * max(1.0, fro(mixed.A_c))

    def test_rejects_oblique_pair(self, fixture3):
        space = BSpace(fixture3.B)
        pair = TransferPair.build(space, fixture3.A, fixture3.P, fixture3.R)
        with pytest.raises(NotBOrthogonal):
            change_of_basis(space, fixture3.A, pair)


class TestProjectionNormLemma:
    def test_norm_equals_complement_norm(self, rng):
        for seed in range(5):
            local = np.random.default_rng(seed)
            n, n_c = 9, 3
            A = random_complex(local, n, n) + 3.0 * np.eye(n)
            space = BSpace(random_hpd(local, n))
            P = random_complex(local, n, n_c)
            R = random_complex(local, n, n_c)
            pair = TransferPair.build(space, A, P, R)
            cgc = build_correction(space, A, pair)
            norm_pi = space.op_norm(cgc.pi)
            norm_comp = space.op_norm(cgc.complement)
            assert norm_pi == pytest.approx(norm_comp, abs=1e-9 * max(1.0, norm_pi))

    def test_norm_squared_sup_form(self, rng):
        n, n_c = 8, 3
        A = random_complex(rng, n, n) + 3.0 * np.eye(n)
        space = BSpace(random_hpd(rng, n))
        P = random_complex(rng, n, n_c)
        R = random_complex(rng, n, n_c)
        pair = TransferPair.build(space, A, P, R)
        cgc = build_correction(space, A, pair)

        T = space.transform(cgc.pi)
        W = nullspace(orthonormal_basis(space.sqrt @ pair.P).conj().T)
        compressed = (T @ W).conj().T @ (T @ W)
        sup_exact = float(hermitian_eig(compressed).eigenvalues[-1])
        norm_sq = space.op_norm(cgc.pi) ** 2
        assert norm_sq == pytest.approx(1.0 + sup_exact, abs=1e-8 * max(1.0, norm_sq))

        # sampled lower bound with power refinement lands within 1e-2
        local = np.random.default_rng(0)
        X = local.standard_normal((W.shape[1], 1000)) + 1j * local.standard_normal(
            (W.shape[1], 1000)
        )
        scores = np.real(np.einsum("ij,ij->j", X.conj(), compressed @ X)) / np.real(
            np.einsum("ij,ij->j", X.conj(), X)
        )
        x = X[:, int(np.argmax(scores))]
        for _ in range(60):
            y = compressed @ x
            x = y / np.linalg.norm(y)
        sampled = float(np.real(x.conj() @ (compressed @ x)))
        assert sampled <= sup_exact + 1e-8
        assert 1.0 + sampled >= norm_sq * (1.0 - 1e-2)

    def test_unit_norm_iff_orthogonal(self):
        space, A, R, P, pair = compatible_instance(12)
        cgc = build_correction(space, A, pair)
        assert space.op_norm(cgc.pi) == pytest.approx(1.0, abs=1e-9)

    def test_completion_always_passes_equivalence(self):
        for seed in range(4):
            space, A, R, P, pair = compatible_instance(20 + seed)
            assert orthogonality_report(space, A, pair).all_true


def test_nesting_detection(fixture3):
    assert max_angle_sin(fixture3.P, fixture3.P_big) <= 1e-12
    assert max_angle_sin(fixture3.R, fixture3.R_big) <= 1e-12
