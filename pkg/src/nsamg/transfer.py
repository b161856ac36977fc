"""Coarse-grid corrections and compatible transfer operators.

A pair of full-rank transfer operators ``P, R`` (interpolation and
restriction) induces the projection ``Pi = P (R^H A P)^{-1} R^H A`` onto
the range of ``P`` along the kernel of ``R^H A``.  The pair is called
compatible when that projection is self-adjoint in the weighted inner
product; one-sided completions ``P* = B^{-1} A^H R`` and
``R* = A^{-H} B P`` always produce compatible pairs.
"""

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from . import kernel
from .bspace import BSpace
from .errors import (
    DimensionMismatch,
    NotBOrthogonal,
    RankDeficientTransfer,
    SingularCoarseMatrix,
)
from .kernel import as_matrix, fro

#: Largest sine of a principal angle at which two subspaces count as equal.
ANGLE_TOL = 1e-8

#: Condition-estimate ceiling for the coarse matrix R^H A P.
COARSE_COND_LIMIT = 1e12


def orthonormal_basis(X):
    """Rank-revealing orthonormal basis of the column span of ``X``."""
    X = as_matrix(X, "X")
    return scipy.linalg.orth(X)


def nullspace(X):
    """Orthonormal basis of the kernel of ``X``."""
    X = as_matrix(X, "X")
    return scipy.linalg.null_space(X)


def max_angle_sin(X, Y):
    """Sine of the largest principal angle from ``span(X)`` into ``span(Y)``.

    Zero iff ``span(X)`` is contained in ``span(Y)``; computed as
    ``||(I - Q_Y Q_Y^H) Q_X||_2`` which stays accurate for tiny angles.
    """
    QX = orthonormal_basis(X)
    QY = orthonormal_basis(Y)
    resid = QX - QY @ (QY.conj().T @ QX)
    return float(np.linalg.norm(resid, 2))


def subspace_contained(X, Y, tol=ANGLE_TOL):
    """``span(X) subseteq span(Y)`` up to the angle tolerance."""
    return max_angle_sin(X, Y) <= tol


def subspaces_equal(X, Y, tol=ANGLE_TOL):
    """Equality of column spans via principal angles (basis independent)."""
    QX = orthonormal_basis(X)
    QY = orthonormal_basis(Y)
    if QX.shape[1] != QY.shape[1]:
        return False
    return max_angle_sin(QX, QY) <= tol and max_angle_sin(QY, QX) <= tol


def subspaces_perpendicular(X, Y, tol=ANGLE_TOL):
    """All principal angles between the spans are right angles."""
    QX = orthonormal_basis(X)
    QY = orthonormal_basis(Y)
    if QX.size == 0 or QY.size == 0:
        return True
    return float(np.linalg.norm(QX.conj().T @ QY, 2)) <= tol


@dataclass(frozen=True)
class TransferPair:
    """Validated transfer operators with their coarse matrices.

    ``A_c = R^H A P`` and ``B_c = P^H B P``; ``S`` optionally records the
    change of basis onto the compatible completion (see
    :func:`change_of_basis`).
    """

    P: np.ndarray
    R: np.ndarray
    A_c: np.ndarray
    B_c: np.ndarray
    S: np.ndarray | None = field(default=None)

    @property
    def n(self):
        return self.P.shape[0]

    @property
    def n_c(self):
        return self.P.shape[1]

    @classmethod
    def build(cls, space: BSpace, A, P, R):
        """Validate shapes, column ranks and coarse-matrix conditioning."""
        A = as_matrix(A, "A")
        P = as_matrix(P, "P")
        R = as_matrix(R, "R")
        n = space.n
        if A.shape != (n, n):
            raise DimensionMismatch(f"A has shape {A.shape}, expected {(n, n)}")
        if P.shape[0] != n or R.shape[0] != n or P.shape[1] != R.shape[1]:
            raise DimensionMismatch(
                f"transfer shapes {P.shape}, {R.shape} do not fit dimension {n}"
            )
        if not 1 <= P.shape[1] <= n:
            raise DimensionMismatch(f"coarse size {P.shape[1]} out of range")
        for name, X in (("P", P), ("R", R)):
            sing = np.linalg.svd(X, compute_uv=False)
            if sing[-1] <= 1e-10 * sing[0]:
                raise RankDeficientTransfer(
                    f"{name}: smallest singular value {sing[-1]:.3e} "
                    f"vs largest {sing[0]:.3e}"
                )
        A_c = R.conj().T @ A @ P
        cond = float(np.linalg.cond(A_c, 2))
        if not np.isfinite(cond) or cond > COARSE_COND_LIMIT:
            raise SingularCoarseMatrix(f"condition estimate {cond:.3e}")
        B_c = P.conj().T @ space.B @ P
        return cls(P=P, R=R, A_c=A_c, B_c=B_c)


@dataclass(frozen=True)
class CoarseGridCorrection:
    """The projection ``Pi`` induced by a transfer pair, its complement,
    and whether it is self-adjoint in the weighted inner product."""

    pi: np.ndarray
    complement: np.ndarray
    b_orthogonal: bool
    range_dim: int


def build_correction(space: BSpace, A, pair: TransferPair):
    """Assemble ``Pi = P A_c^{-1} R^H A`` and classify it.

    :raises SingularCoarseMatrix: if the defining identities
        ``Pi P = P`` and ``R^H A (I - Pi) = 0`` fail at 1e-9, which only
        happens when ``A_c`` is effectively too ill conditioned.
    """
    A = as_matrix(A, "A")
    pi = pair.P @ kernel.solve(pair.A_c, pair.R.conj().T @ A)
    eye = np.eye(space.n)
    complement = eye - pi
    scale = max(1.0, fro(pi))
    if fro(pi @ pair.P - pair.P) > 1e-9 * scale * max(1.0, fro(pair.P)):
        raise SingularCoarseMatrix("projection does not reproduce the range of P")
    if fro(pair.R.conj().T @ A @ complement) > 1e-9 * scale * max(
        1.0, fro(pair.R.conj().T @ A)
    ):
        raise SingularCoarseMatrix("projection kernel misses the kernel of R^H A")
    b_orth = space.classify(pi).is_b_orthogonal
    return CoarseGridCorrection(
        pi=pi, complement=complement, b_orthogonal=b_orth, range_dim=pair.n_c
    )


@dataclass(frozen=True)
class OrthogonalityEquivalence:
    """Seven numerically independent tests that are all equivalent to the
    coarse-grid correction being self-adjoint in the weighted product."""

    complement_matches_kernel: bool
    adjoint_equal: bool
    range_perp_kernel: bool
    norms_equal_one: bool
    weighted_range_match: bool
    range_match: bool
    kernel_match: bool

    def as_tuple(self):
        return (
            self.complement_matches_kernel,
            self.adjoint_equal,
            self.range_perp_kernel,
            self.norms_equal_one,
            self.weighted_range_match,
            self.range_match,
            self.kernel_match,
        )

    @property
    def consistent(self):
        return len(set(self.as_tuple())) == 1

    @property
    def all_true(self):
        return all(self.as_tuple())

    @property
    def all_false(self):
        return not any(self.as_tuple())


def orthogonality_report(space: BSpace, A, pair: TransferPair):
    """Evaluate all seven equivalent compatibility conditions.

    Subspace tests use principal angles (largest angle at most 1e-8 rad)
    so they do not depend on the bases chosen for the ranges.
    """
    A = as_matrix(A, "A")
    cgc = build_correction(space, A, pair)
    pi, comp = cgc.pi, cgc.complement

    range_basis = orthonormal_basis(pair.P)
    kernel_basis = nullspace(pair.R.conj().T @ A)

    # transformed frame: weighted angles become Euclidean angles
    t_range = space.sqrt @ range_basis
    t_kernel = space.sqrt @ kernel_basis
    t_complement = nullspace(t_range.conj().T)

    complement_matches_kernel = subspaces_equal(t_complement, t_kernel)
    adjoint_equal = cgc.b_orthogonal
    range_perp_kernel = subspaces_perpendicular(t_range, t_kernel)
    norm_pi = space.op_norm(pi)
    norm_comp = space.op_norm(comp)
    norms_equal_one = abs(norm_pi - 1.0) <= 1e-8 and abs(norm_comp - 1.0) <= 1e-8
    weighted_range_match = subspaces_equal(space.B @ pair.P, A.conj().T @ pair.R)
    range_match = subspaces_equal(pair.P, space.solve(A.conj().T @ pair.R))
    kernel_match = subspaces_equal(
        nullspace(pair.R.conj().T @ A), nullspace(pair.P.conj().T @ space.B)
    )
    return OrthogonalityEquivalence(
        complement_matches_kernel=complement_matches_kernel,
        adjoint_equal=adjoint_equal,
        range_perp_kernel=range_perp_kernel,
        norms_equal_one=norms_equal_one,
        weighted_range_match=weighted_range_match,
        range_match=range_match,
        kernel_match=kernel_match,
    )


def complete_interpolation(space: BSpace, A, R):
    """Compatible interpolation ``P* = B^{-1} A^H R`` for a given ``R``."""
    A = as_matrix(A, "A")
    R = as_matrix(R, "R")
    P_star = space.solve(A.conj().T @ R)
    sing = np.linalg.svd(P_star, compute_uv=False)
    if sing[-1] <= 1e-10 * sing[0]:
        raise RankDeficientTransfer("B^{-1} A^H R lost column rank")
    return P_star


def complete_restriction(space: BSpace, A, P):
    """Compatible restriction ``R* = A^{-H} B P`` for a given ``P``."""
    A = as_matrix(A, "A")
    P = as_matrix(P, "P")
    R_star = kernel.solve(A.conj().T, space.B @ P)
    sing = np.linalg.svd(R_star, compute_uv=False)
    if sing[-1] <= 1e-10 * sing[0]:
        raise RankDeficientTransfer("A^{-H} B P lost column rank")
    return R_star


def change_of_basis(space: BSpace, A, pair: TransferPair):
    """Recover the nonsingular ``S`` with ``P = B^{-1} A^H R S``.

    Only compatible pairs admit such an ``S``; it ties the coarse
    matrices together as ``A_c = S^{-H} B_c``.

    :raises NotBOrthogonal: if the pair is not compatible or the
        recovered ``S`` fails the defining identities at 1e-9.
    """
    A = as_matrix(A, "A")
    cgc = build_correction(space, A, pair)
    if not cgc.b_orthogonal:
        raise NotBOrthogonal("coarse-grid correction is not self-adjoint")
    P_star = space.solve(A.conj().T @ pair.R)
    S, *_ = np.linalg.lstsq(P_star, pair.P, rcond=None)
    recovery = fro(pair.P - P_star @ S)
    if recovery > 1e-9 * max(fro(pair.P), 1.0):
        raise NotBOrthogonal(
            f"basis-change recovery residual {recovery:.3e} exceeds tolerance"
        )
    if np.linalg.cond(S) > COARSE_COND_LIMIT:
        raise NotBOrthogonal("recovered change of basis is singular")
    coupling = fro(pair.A_c - np.linalg.solve(S.conj().T, pair.B_c))
    if coupling > 1e-9 * max(1.0, fro(pair.A_c)):
        raise NotBOrthogonal(
            f"coarse coupling residual {coupling:.3e} exceeds tolerance"
        )
    return S
