"""Smoothing iterations and their symmetrized companions.

For a nonsingular smoother ``M^{-1}`` the iteration matrix is
``M^{-1} A``.  Two Hermitian matrices capture its symmetrized behavior
in the weighted geometry:

    tilde:  I - tilde_minv @ B = (I - M^{-1}A)^+ (I - M^{-1}A)
    hat:    I - hat_minv @ B   = (I - M^{-1}A) (I - M^{-1}A)^+

The smoothing assumption ``||I - M^{-1}A||_B < 1`` is equivalent to
either of them being HPD, and to their spectra lying in ``(0, 1]``.
"""

from dataclasses import dataclass

import numpy as np

from . import kernel
from .bspace import BSpace, lambda_min_plus, zero_threshold
from .errors import (
    NotBNormal,
    SingularErrorOperator,
    SingularSmoother,
    SmoothingAssumptionViolated,
)
from .kernel import as_matrix, fro, hermitian_eig, repeated_power


@dataclass(frozen=True)
class SmootherContext:
    """Smoother data shared by the two-grid and multilevel modules.

    ``ma`` is the iteration matrix ``M^{-1} A`` and ``ma_adj`` its
    weighted adjoint; ``tilde_minv``/``hat_minv`` are the Hermitian
    symmetrized smoother inverses and ``tilde_minv_b``/``hat_minv_b``
    their products with ``B``.  ``nu_max`` caps the number of smoothing
    steps accepted by power-form reductions.
    """

    space: BSpace
    A: np.ndarray
    minv: np.ndarray
    ma: np.ndarray
    ma_adj: np.ndarray
    tilde_minv: np.ndarray
    hat_minv: np.ndarray
    tilde_minv_b: np.ndarray
    hat_minv_b: np.ndarray
    nu_max: int = 8

    @property
    def n(self):
        return self.space.n

    def error_matrix(self):
        """Single-step error operator ``I - M^{-1} A``."""
        return np.eye(self.n) - self.ma

    def error_matrix_adjoint(self):
        """Weighted adjoint of the single-step error operator."""
        return np.eye(self.n) - self.ma_adj


def build_smoother(space: BSpace, A, minv, nu_max=8):
    """Assemble a :class:`SmootherContext` from ``A`` and ``M^{-1}``.

    :raises SingularSmoother: if ``M^{-1}`` is singular or its condition
        estimate exceeds 1e12.
    """
    A = as_matrix(A, "A")
    minv = as_matrix(minv, "minv")
    if A.shape != (space.n, space.n) or minv.shape != (space.n, space.n):
        from .errors import DimensionMismatch

        raise DimensionMismatch("A and minv must match the space dimension")
    cond = float(np.linalg.cond(minv, 2))
    if not np.isfinite(cond) or cond > 1e12:
        raise SingularSmoother(f"condition estimate {cond:.3e}")
    ma = minv @ A
    ma_adj = space.adjoint(ma)
    tilde_minv_b = ma + ma_adj - ma_adj @ ma
    hat_minv_b = ma + ma_adj - ma @ ma_adj
    tilde_minv = _hermitize(tilde_minv_b @ space.inv)
    hat_minv = _hermitize(hat_minv_b @ space.inv)
    return SmootherContext(
        space=space,
        A=A,
        minv=minv,
        ma=ma,
        ma_adj=ma_adj,
        tilde_minv=tilde_minv,
        hat_minv=hat_minv,
        tilde_minv_b=tilde_minv_b,
        hat_minv_b=hat_minv_b,
        nu_max=int(nu_max),
    )


@dataclass(frozen=True)
class SmoothingReport:
    """Evaluation of the smoothing assumption and its equivalent forms.

    ``assumption_holds`` records ``||I - M^{-1}A||_B < 1``.  When it
    does, both spectra lie in ``(0, 1]``; the spectra are real because
    the symmetrized matrices are self-adjoint in the weighted product.
    """

    b_norm_of_error: float
    assumption_holds: bool
    tilde_hpd: bool
    hat_hpd: bool
    spectrum_tilde: np.ndarray
    spectrum_hat: np.ndarray
    b_normal_ma: bool
    rho_error: float

    @property
    def tilde_spectrum_in_unit_interval(self):
        return spectrum_in_unit_interval(self.spectrum_tilde)

    @property
    def hat_spectrum_in_unit_interval(self):
        return spectrum_in_unit_interval(self.spectrum_hat)

    @property
    def spectra_in_unit_interval(self):
        return self.tilde_spectrum_in_unit_interval and (
            self.hat_spectrum_in_unit_interval
        )

    def equivalence_flags(self):
        """The five equivalent forms of the smoothing assumption, in the
        order: norm < 1, tilde HPD, tilde spectrum in (0,1], hat HPD,
        hat spectrum in (0,1]."""
        return (
            self.assumption_holds,
            self.tilde_hpd,
            self.tilde_spectrum_in_unit_interval,
            self.hat_hpd,
            self.hat_spectrum_in_unit_interval,
        )


def spectrum_in_unit_interval(values):
    """``values`` in ``(0, 1]`` with the declared thresholds: upper bound
    closed at ``1 + 1e-10``, lower bound open at ``1e-12 * lambda_max``."""
    values = np.asarray(values, dtype=np.float64)
    lo = 1e-12 * max(1.0, float(np.max(np.abs(values))))
    return bool(np.all(values > lo) and np.all(values <= 1.0 + 1e-10))


def smoothing_report(ctx: SmootherContext):
    """Evaluate every equivalent form of the smoothing assumption."""
    space = ctx.space
    b_norm = space.op_norm(ctx.error_matrix())
    spectrum_tilde = hermitian_eig(
        space.sqrt @ ctx.tilde_minv @ space.sqrt
    ).eigenvalues
    spectrum_hat = hermitian_eig(space.sqrt @ ctx.hat_minv @ space.sqrt).eigenvalues
    tilde_hpd = bool(np.all(spectrum_tilde > 1e-12 * max(1.0, spectrum_tilde[-1])))
    hat_hpd = bool(np.all(spectrum_hat > 1e-12 * max(1.0, spectrum_hat[-1])))
    spectrum = kernel.general_spectrum(ctx.error_matrix())
    rho_error = float(np.max(np.abs(spectrum.values)))
    return SmoothingReport(
        b_norm_of_error=b_norm,
        assumption_holds=b_norm < 1.0,
        tilde_hpd=tilde_hpd,
        hat_hpd=hat_hpd,
        spectrum_tilde=spectrum_tilde,
        spectrum_hat=spectrum_hat,
        b_normal_ma=space.classify(ctx.ma).is_b_normal,
        rho_error=rho_error,
    )


def eigen_map(lam):
    """Eigenvalue map from the iteration matrix to its symmetrized
    companion: ``1 - |lam - 1|^2``."""
    return float(1.0 - abs(complex(lam) - 1.0) ** 2)


def reduce_steps(ctx: SmootherContext, nu):
    """Collapse ``nu`` smoothing steps into a single-step form.

    Returns ``(xhat_inv_b, x_inv_a)`` with

        I - x_inv_a    = (I - M^{-1}A)^nu
        I - xhat_inv_b = (I - hat_minv_b)^nu

    both computed by repeated multiplication.  Under the preconditions
    (weighted-normal iteration matrix, nonsingular single-step error,
    smoothing assumption) ``xhat_inv_b`` is self-adjoint in the weighted
    product with spectrum inside ``(0, 1)`` and ``x_inv_a`` is
    weighted-normal.

    :raises NotBNormal: if the iteration matrix is not weighted-normal.
    :raises SingularErrorOperator: if ``I - M^{-1}A`` is singular.
    :raises SmoothingAssumptionViolated: if the smoothing assumption fails.
    """
    if nu < 1 or nu > ctx.nu_max:
        raise ValueError(f"nu must be in [1, {ctx.nu_max}], got {nu}")
    space = ctx.space
    if not space.classify(ctx.ma).is_b_normal:
        raise NotBNormal("iteration matrix is not weighted-normal")
    error = ctx.error_matrix()
    sing = np.linalg.svd(error, compute_uv=False)
    if sing[-1] <= 1e-12 * max(1.0, sing[0]):
        raise SingularErrorOperator(
            f"smallest singular value {sing[-1]:.3e} of the error operator"
        )
    norm = space.op_norm(error)
    if norm >= 1.0:
        raise SmoothingAssumptionViolated(f"error norm {norm:.6f} >= 1")
    eye = np.eye(ctx.n)
    x_inv_a = eye - repeated_power(error, nu)
    xhat_inv_b = eye - repeated_power(eye - ctx.hat_minv_b, nu)
    # consistency check of the two power forms through the symmetrization
    # identity; the tolerance matches the context invariants
    x_adj = space.adjoint(x_inv_a)
    direct = x_inv_a + x_adj - x_inv_a @ x_adj
    if fro(direct - xhat_inv_b) > 1e-9 * max(1.0, fro(xhat_inv_b)):
        raise SingularErrorOperator(
            "power form and symmetrized form of the reduced smoother disagree"
        )
    spectrum = hermitian_eig(
        space.sqrt @ _hermitize(xhat_inv_b @ space.inv) @ space.sqrt
    ).eigenvalues
    tau = zero_threshold(spectrum)
    if np.any(spectrum <= tau) or np.any(spectrum >= 1.0 - 1e-14):
        raise SmoothingAssumptionViolated(
            "reduced smoother spectrum left the open unit interval"
        )
    # lambda_min_plus would raise on a negative spectrum; keep it honest
    lambda_min_plus(spectrum)
    return xhat_inv_b, x_inv_a


def _hermitize(M):
    return 0.5 * (M + M.conj().T)
