"""Geometry of a weighted inner product ``<x,y> = y^H B x``.

An HPD matrix ``B`` induces a vector norm, an operator norm, an adjoint
``A^+ = B^{-1} A^H B`` and with it the notions of weighted-normal,
weighted-self-adjoint ("B-orthogonal") and weighted-unitary matrices.
:class:`BSpace` caches the square root and inverse square root of ``B``
so that every computation can be carried out in the transformed frame
``A ~ B^{1/2} A B^{-1/2}`` where the weighted inner product becomes the
Euclidean one.
"""

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from . import kernel
from .errors import (
    ComplexSpectrum,
    DimensionMismatch,
    NegativeSpectrum,
    NotBNormal,
)
from .kernel import as_matrix, as_vector, fro, hermitian_eig, require_square

#: Residual threshold (relative, see :func:`BSpace.classify`) below which a
#: classification flag is set.
CLASSIFY_TOL = 1e-10


@dataclass(frozen=True)
class BNormalityReport:
    """Classification of a matrix against the weighted geometry.

    Residuals are Frobenius norms in the transformed frame divided by
    ``max(1, ||A~||_F^2)``; a flag is set when its residual is at most
    1e-10.  Self-adjointness implies normality, and the constructor in
    :func:`BSpace.classify` enforces that implication on the flags.
    """

    is_b_normal: bool
    commutator_residual: float
    is_b_orthogonal: bool
    adjoint_residual: float
    is_b_unitary: bool
    unitary_residual: float


class BSpace:
    """An HPD matrix ``B`` with cached spectral factorizations.

    Immutable after construction; all methods are pure, so instances can
    be shared freely between threads.
    """

    def __init__(self, B):
        B = as_matrix(B, "B")
        require_square(B, "B")
        eig = hermitian_eig(B)
        w = eig.eigenvalues
        lam_max = float(w[-1])
        if lam_max <= 0.0 or np.any(w <= 1e-12 * lam_max):
            from .errors import NotHPD

            raise NotHPD(
                f"eigenvalue {w[0]:.6e} is not positive (max {lam_max:.6e})"
            )
        V = eig.eigenvectors
        self._B = B
        self._eig = eig
        sq = np.sqrt(w)
        self._sqrt = _hermitize((V * sq) @ V.conj().T)
        self._inv_sqrt = _hermitize((V * (1.0 / sq)) @ V.conj().T)
        self._inv = _hermitize((V * (1.0 / w)) @ V.conj().T)
        self._lu = scipy.linalg.lu_factor(B)

    @property
    def n(self):
        return self._B.shape[0]

    @property
    def B(self):
        return self._B

    @property
    def eig(self):
        return self._eig

    @property
    def sqrt(self):
        return self._sqrt

    @property
    def inv_sqrt(self):
        return self._inv_sqrt

    @property
    def inv(self):
        return self._inv

    def solve(self, X):
        """Solve ``B Y = X`` using the cached LU factorization."""
        return scipy.linalg.lu_solve(self._lu, X)

    def transform(self, C):
        """Map ``C`` to the frame where the weighted product is Euclidean."""
        C = as_matrix(C, "C")
        self._check_op(C)
        return self._sqrt @ C @ self._inv_sqrt

    def untransform(self, C):
        """Inverse of :func:`transform`."""
        C = as_matrix(C, "C")
        self._check_op(C)
        return self._inv_sqrt @ C @ self._sqrt

    def inner(self, x, y):
        """Weighted inner product ``y^H B x``."""
        x = as_vector(x, "x")
        y = as_vector(y, "y")
        if x.shape[0] != self.n or y.shape[0] != self.n:
            raise DimensionMismatch(
                f"vectors of length {x.shape[0]}, {y.shape[0]} in dimension {self.n}"
            )
        return complex(y.conj() @ (self._B @ x))

    def vec_norm(self, x):
        """Weighted vector norm, clamped to be exactly nonnegative."""
        value = self.inner(x, x)
        return float(np.sqrt(max(value.real, 0.0)))

    def op_norm(self, C):
        """Weighted operator norm: the largest singular value of the
        transformed matrix."""
        return float(np.linalg.norm(self.transform(C), 2))

    def adjoint(self, A):
        """Weighted adjoint ``B^{-1} A^H B``."""
        A = as_matrix(A, "A")
        self._check_op(A)
        return self.solve(A.conj().T @ self._B)

    def classify(self, A):
        """Report whether ``A`` is weighted-normal / self-adjoint / unitary.

        Normality is decided through the transformed commutator
        ``||T T^H - T^H T||_F`` with ``T = B^{1/2} A B^{-1/2}``, which is
        numerically symmetric and independent of the basis.
        """
        T = self.transform(A)
        scale = max(1.0, fro(T) ** 2)
        commutator = fro(T @ T.conj().T - T.conj().T @ T) / scale
        adjoint = fro(T - T.conj().T) / scale
        gram = A.conj().T @ self._B @ A
        unitary = fro(gram - np.eye(self.n)) / scale
        is_orth = adjoint <= CLASSIFY_TOL
        is_unit = unitary <= CLASSIFY_TOL
        # self-adjointness and unitarity each imply normality exactly
        is_norm = commutator <= CLASSIFY_TOL or is_orth or is_unit
        return BNormalityReport(
            is_b_normal=is_norm,
            commutator_residual=commutator,
            is_b_orthogonal=is_orth,
            adjoint_residual=adjoint,
            is_b_unitary=is_unit,
            unitary_residual=unitary,
        )

    def unitary_diagonalization(self, A):
        """Diagonalize a weighted-normal matrix by a weighted-unitary one.

        Returns ``(U, d)`` with ``U^H B U = I`` and ``A = U diag(d) U^{-1}``.
        The transformed matrix is Hermitian-diagonalized when it is
        Hermitian and run through a complex Schur form otherwise.

        :raises NotBNormal: if ``A`` fails the normality test or the
            reconstruction residual exceeds ``1e-9 ||A||_F``.
        """
        A = as_matrix(A, "A")
        report = self.classify(A)
        if not report.is_b_normal:
            raise NotBNormal(
                f"commutator residual {report.commutator_residual:.3e}"
            )
        T = self.transform(A)
        if fro(T - T.conj().T) <= kernel.rtol(T, 1e-10):
            eig = hermitian_eig(T)
            d = eig.eigenvalues.astype(np.complex128)
            Q = eig.eigenvectors
        else:
            Tschur, Q = scipy.linalg.schur(T, output="complex")
            d = np.diag(Tschur).copy()
        order = np.lexsort((d.imag, d.real))
        d = d[order]
        Q = Q[:, order]
        U = self._inv_sqrt @ Q
        Uinv = Q.conj().T @ self._sqrt
        residual = fro(U @ np.diag(d) @ Uinv - A)
        if residual > kernel.rtol(A, 1e-9):
            raise NotBNormal(
                f"diagonalization residual {residual:.3e} exceeds tolerance; "
                "input is only borderline normal"
            )
        return U, d

    def norm_vs_spectral_radius(self, A):
        """Weighted norm, spectral radius, and whether they coincide.

        The two agree (to ``1e-9 * max(1, rho)``) exactly for
        weighted-normal matrices; callers assert equality on such inputs.
        """
        norm = self.op_norm(A)
        spectrum = kernel.general_spectrum(A)
        rho = float(np.max(np.abs(spectrum.values)))
        equal = abs(norm - rho) <= 1e-9 * max(1.0, rho)
        return norm, rho, equal

    def _check_op(self, C):
        if C.shape != (self.n, self.n):
            raise DimensionMismatch(
                f"operator of shape {C.shape} in dimension {self.n}"
            )


def _hermitize(M):
    return 0.5 * (M + M.conj().T)


def real_spectrum(values, rel=1e-8):
    """Return the real parts of a spectrum promised to be real.

    :raises ComplexSpectrum: if an imaginary part exceeds
        ``rel * max(1, max|values|)``.
    """
    values = np.asarray(values, dtype=np.complex128).reshape(-1)
    scale = max(1.0, float(np.max(np.abs(values))) if values.size else 1.0)
    worst = float(np.max(np.abs(values.imag))) if values.size else 0.0
    if worst > rel * scale:
        raise ComplexSpectrum(
            f"imaginary part {worst:.3e} exceeds {rel * scale:.3e}"
        )
    return values.real.copy()


def zero_threshold(values):
    """Declared cutoff separating zero eigenvalues from positive ones:
    ``1e-10 * max(1, lambda_max)``."""
    values = np.asarray(values, dtype=np.float64).reshape(-1)
    lam_max = float(np.max(values)) if values.size else 0.0
    return 1e-10 * max(1.0, lam_max)


def lambda_min_plus(values):
    """Smallest strictly positive eigenvalue of a real spectrum.

    Eigenvalues within the declared zero threshold count as zero;
    anything below ``-threshold`` is an error because every use site
    promises a nonnegative spectrum.

    :raises NegativeSpectrum: on an eigenvalue below ``-threshold``.
    :raises ValueError: if no positive eigenvalue remains.
    """
    values = np.asarray(values, dtype=np.float64).reshape(-1)
    tau = zero_threshold(values)
    if np.any(values < -tau):
        raise NegativeSpectrum(
            f"eigenvalue {float(np.min(values)):.3e} below -{tau:.3e}"
        )
    positive = values[values > tau]
    if positive.size == 0:
        raise ValueError("spectrum has no strictly positive eigenvalue")
    return float(np.min(positive))
