"""Dense complex-matrix primitives used by every other module.

All tolerances are relative to the Frobenius norm of the input with an
absolute floor of 1e-14, so every check is invariant under rescaling of
the data.
"""

import warnings
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import (
    ConvergenceFailure,
    DimensionMismatch,
    NonFinite,
    NonHermitian,
    NotHPD,
    Singular,
)

#: Absolute floor below which no relative tolerance is allowed to drop.
ABS_FLOOR = 1e-14

#: Condition-number estimate above which linear solves emit a warning.
COND_WARN = 1e12


def as_matrix(a, name="matrix"):
    """Return ``a`` as a C-contiguous complex128 2-d array.

    Raises :class:`NonFinite` if any entry is NaN or Inf and
    :class:`DimensionMismatch` if ``a`` is not 2-dimensional with
    positive sizes.
    """
    m = np.ascontiguousarray(a, dtype=np.complex128)
    if m.ndim != 2 or m.shape[0] < 1 or m.shape[1] < 1:
        raise DimensionMismatch(f"{name}: expected a 2-d array, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise NonFinite(f"{name} contains non-finite entries")
    return m


def as_vector(x, name="vector"):
    """Return ``x`` as a 1-d complex128 array, rejecting non-finite entries."""
    v = np.asarray(x, dtype=np.complex128).reshape(-1)
    if not np.all(np.isfinite(v)):
        raise NonFinite(f"{name} contains non-finite entries")
    return v


def require_square(m, name="matrix"):
    if m.shape[0] != m.shape[1]:
        raise DimensionMismatch(f"{name} must be square, got shape {m.shape}")


def fro(a):
    """Frobenius norm."""
    return float(np.linalg.norm(a, "fro"))


def rtol(a, rel):
    """Relative tolerance ``rel * ||a||_F`` with the absolute floor applied."""
    return max(rel * fro(a), ABS_FLOOR)


@dataclass(frozen=True)
class HermitianEigen:
    """Eigendecomposition of a Hermitian matrix.

    ``eigenvalues`` are real and ascending; ``eigenvectors`` holds the
    corresponding unitary matrix column by column, so that
    ``V @ diag(w) @ V^H`` reconstructs the input.
    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray


@dataclass(frozen=True)
class Spectrum:
    """All eigenvalues of a square matrix, with algebraic multiplicity.

    Values are sorted ascending by (real part, imaginary part) so that
    spectra are directly comparable across runs.
    """

    values: np.ndarray


def sort_complex(values):
    """Sort complex values ascending by (real part, imaginary part)."""
    v = np.asarray(values, dtype=np.complex128).reshape(-1)
    order = np.lexsort((v.imag, v.real))
    return v[order]


def hermitian_eig(H):
    """Eigendecomposition of a Hermitian matrix.

    The input must satisfy ``||H - H^H||_F <= 1e-10 ||H||_F``; it is
    symmetrized as ``(H + H^H)/2`` before decomposing so the result is
    exactly the decomposition of a Hermitian matrix.

    :raises NonHermitian: if the symmetry precondition fails.
    :raises NonFinite: on NaN or Inf entries.
    """
    H = as_matrix(H, "H")
    require_square(H, "H")
    asym = fro(H - H.conj().T)
    if asym > rtol(H, 1e-10):
        raise NonHermitian(
            f"asymmetry {asym:.3e} exceeds tolerance {rtol(H, 1e-10):.3e}"
        )
    Hs = 0.5 * (H + H.conj().T)
    w, V = np.linalg.eigh(Hs)
    return HermitianEigen(eigenvalues=w, eigenvectors=V)


def general_spectrum(C):
    """All eigenvalues of a square matrix, sorted by (real, imag).

    :raises ConvergenceFailure: if the QR iteration does not converge.
    """
    C = as_matrix(C, "C")
    require_square(C, "C")
    try:
        vals = np.linalg.eigvals(C)
    except np.linalg.LinAlgError as exc:
        raise ConvergenceFailure(str(exc)) from exc
    return Spectrum(values=sort_complex(vals))


def hpd_sqrt(B):
    """Hermitian positive definite square root of an HPD matrix.

    Returns the unique Hermitian ``S`` with ``S @ S = B``.  Positive
    definiteness requires every eigenvalue to exceed
    ``1e-12 * lambda_max``.

    :raises NotHPD: listing the offending eigenvalue.
    """
    B = as_matrix(B, "B")
    require_square(B, "B")
    eig = hermitian_eig(B)
    w = eig.eigenvalues
    lam_max = float(w[-1])
    if lam_max <= 0.0 or np.any(w <= 1e-12 * lam_max):
        raise NotHPD(f"eigenvalue {w[0]:.6e} is not positive (max {lam_max:.6e})")
    V = eig.eigenvectors
    S = (V * np.sqrt(w)) @ V.conj().T
    return 0.5 * (S + S.conj().T)


def solve(C, X):
    """Solve ``C Y = X`` for a square nonsingular ``C``.

    Emits a warning when the condition estimate exceeds 1e12.

    :raises Singular: if an LU pivot falls below ``1e-14 ||C||_F``.
    """
    C = as_matrix(C, "C")
    require_square(C, "C")
    X = as_matrix(X, "X") if np.ndim(X) == 2 else as_vector(X, "X")
    if X.shape[0] != C.shape[0]:
        raise DimensionMismatch(
            f"operand rows {X.shape[0]} do not match system size {C.shape[0]}"
        )
    with warnings.catch_warnings():
        # the pivot check below raises our own structured error
        warnings.simplefilter("ignore", scipy.linalg.LinAlgWarning)
        lu, piv = scipy.linalg.lu_factor(C)
    pivots = np.abs(np.diag(lu))
    threshold = 1e-14 * max(fro(C), ABS_FLOOR)
    if np.min(pivots) < threshold:
        raise Singular(
            f"pivot {np.min(pivots):.3e} below threshold {threshold:.3e}"
        )
    cond = np.max(pivots) / np.min(pivots)
    if cond > COND_WARN:
        warnings.warn(
            f"solve: condition estimate {cond:.3e} exceeds {COND_WARN:.1e}",
            RuntimeWarning,
            stacklevel=2,
        )
    return scipy.linalg.lu_solve((lu, piv), X)


def repeated_power(M, nu):
    """``M ** nu`` by repeated multiplication (``nu`` small, >= 0)."""
    M = as_matrix(M, "M")
    require_square(M, "M")
    if nu < 0:
        raise ValueError("exponent must be nonnegative")
    out = np.eye(M.shape[0], dtype=np.complex128)
    for _ in range(int(nu)):
        out = out @ M
    return out
