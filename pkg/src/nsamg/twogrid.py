"""Two-grid error propagation operators and their sharp norm formulas.

Two operator families are assembled from a smoother context and a
coarse-grid correction ``Pi``:

    adjoint_post:  (I - (M^{-1}A)^+)^{nu2} (I - Pi) (I - M^{-1}A)^{nu1}
    plain:         (I - M^{-1}A)^{nu2}     (I - Pi) (I - M^{-1}A)^{nu1}

When ``Pi`` is self-adjoint in the weighted product, the adjoint_post
norm with ``nu1 = nu2`` splits into squared half norms, and under the
stated hypotheses both families obey the sharp characterizations
``1 - lambda_min_plus(...)`` and ``1 - 1/K``.
"""

from dataclasses import dataclass
from typing import Literal

import numpy as np

from . import kernel
from .bspace import BSpace, lambda_min_plus, zero_threshold
from .errors import (
    ConvergenceFailure,
    HypothesisViolated,
    NestingViolated,
    NotHPD,
    RankDeficientTransfer,
)
from .kernel import (
    as_matrix,
    fro,
    general_spectrum,
    hermitian_eig,
    repeated_power,
    require_square,
)
from .smoother import SmootherContext, reduce_steps
from .transfer import (
    CoarseGridCorrection,
    TransferPair,
    build_correction,
    orthonormal_basis,
    subspace_contained,
)

Kind = Literal["adjoint_post", "plain"]

#: Largest accepted number of smoothing steps per side.
NU_CAP = 8


@dataclass(frozen=True)
class TwoGridOperator:
    """An assembled error propagation matrix with its weighted norm and
    references to the ingredients it was built from."""

    kind: Kind
    nu1: int
    nu2: int
    matrix: np.ndarray
    b_norm: float
    ctx: SmootherContext
    cgc: CoarseGridCorrection

    @property
    def space(self):
        return self.ctx.space


def assemble(ctx: SmootherContext, cgc: CoarseGridCorrection, kind: Kind,
             nu1, nu2):
    """Build the error propagation matrix for the requested family."""
    if kind not in ("adjoint_post", "plain"):
        raise ValueError(f"unknown kind {kind!r}")
    nu1, nu2 = int(nu1), int(nu2)
    if not (0 <= nu1 <= NU_CAP and 0 <= nu2 <= NU_CAP):
        raise ValueError(f"nu1, nu2 must lie in [0, {NU_CAP}]")
    pre = repeated_power(ctx.error_matrix(), nu1)
    if kind == "adjoint_post":
        post = repeated_power(ctx.error_matrix_adjoint(), nu2)
    else:
        post = repeated_power(ctx.error_matrix(), nu2)
    matrix = post @ cgc.complement @ pre
    b_norm = ctx.space.op_norm(matrix)
    return TwoGridOperator(
        kind=kind, nu1=nu1, nu2=nu2, matrix=matrix, b_norm=b_norm,
        ctx=ctx, cgc=cgc,
    )


def norm(op: TwoGridOperator):
    """Weighted norm of the operator, cross-checked two ways.

    The singular-value route through the transformed matrix must agree
    with ``sqrt(lambda_max(E^+ E))`` to 1e-8.

    :raises ConvergenceFailure: if the two routes disagree.
    """
    space = op.space
    T = space.transform(op.matrix)
    by_svd = float(np.linalg.norm(T, 2))
    gram = hermitian_eig(T.conj().T @ T).eigenvalues
    by_eig = float(np.sqrt(max(gram[-1], 0.0)))
    if abs(by_svd - by_eig) > 1e-8 * max(1.0, by_svd):
        raise ConvergenceFailure(
            f"norm cross-check failed: {by_svd!r} vs {by_eig!r}"
        )
    return by_svd


@dataclass(frozen=True)
class SharpBoundReport:
    """All sharp characterizations of the squared two-grid norm.

    ``b_norm_direct`` is the directly computed norm of the assembled
    operator (squared half norms in ``split_norms``); the spectral and
    K-constant routes must agree with it pairwise to 1e-8 whenever the
    hypotheses hold, which ``agreement`` records.
    """

    b_norm_direct: float
    lambda_min_plus: float
    one_minus_lmp: float
    k_constant: float
    one_minus_inv_k: float
    split_norms: tuple[float, float]
    agreement: bool
    product_spectrum: np.ndarray

    def quantities(self):
        return (
            self.b_norm_direct,
            self.split_norms[0],
            self.split_norms[1],
            self.one_minus_lmp,
            self.one_minus_inv_k,
        )


def _hermitize(M):
    return 0.5 * (M + M.conj().T)


def product_spectrum(space: BSpace, smooth_b, cgc: CoarseGridCorrection):
    """Spectrum of ``smooth_b (I - Pi)`` through the Hermitian compression
    ``Q H Q`` in the transformed frame.

    ``smooth_b`` must be self-adjoint in the weighted product and ``Pi``
    weighted-orthogonal, so ``H`` and ``Q`` are Hermitian and the
    compression shares the product's spectrum.
    """
    H = _hermitize(space.transform(smooth_b))
    Q = _hermitize(space.transform(cgc.complement))
    return hermitian_eig(Q @ H @ Q).eigenvalues


def sharp_report(op: TwoGridOperator):
    """Evaluate every applicable sharp characterization of the norm.

    Hypotheses (verified, otherwise :class:`HypothesisViolated` names the
    failing one): the coarse-grid correction is weighted-orthogonal, the
    smoothing assumption holds, and

    * plain kind: the iteration matrix is weighted-normal, the single
      step error is nonsingular, and ``nu1 == nu2 >= 1``;
    * adjoint_post kind: ``nu1 == nu2 == 1`` and ``I - hat_minv_b`` is
      nonsingular.
    """
    ctx, cgc, space = op.ctx, op.cgc, op.space
    if not cgc.b_orthogonal:
        raise HypothesisViolated("coarse-grid correction is not weighted-orthogonal")
    error_norm = space.op_norm(ctx.error_matrix())
    if error_norm >= 1.0:
        raise HypothesisViolated(f"smoothing assumption fails: norm {error_norm:.6f}")
    if op.nu1 != op.nu2 or op.nu1 < 1:
        raise HypothesisViolated("sharp forms need nu1 == nu2 >= 1")
    nu = op.nu1
    if op.kind == "plain":
        if not space.classify(ctx.ma).is_b_normal:
            raise HypothesisViolated("iteration matrix is not weighted-normal")
        # reduce_steps re-verifies nonsingularity of the single-step error
        smooth_b, _ = reduce_steps(ctx, nu)
    else:
        if nu != 1:
            raise HypothesisViolated(
                "adjoint_post sharp forms are stated for nu1 == nu2 == 1"
            )
        one_shift = np.eye(ctx.n) - ctx.hat_minv_b
        sing = np.linalg.svd(one_shift, compute_uv=False)
        if sing[-1] <= 1e-12 * max(1.0, sing[0]):
            raise HypothesisViolated("I - hat_minv_b is singular")
        smooth_b = ctx.hat_minv_b

    b_norm_direct = norm(op)
    pre_only = norm(assemble(ctx, cgc, op.kind, nu, 0)) ** 2
    post_only = norm(assemble(ctx, cgc, op.kind, 0, nu)) ** 2

    spectrum = product_spectrum(space, smooth_b, cgc)
    lmp = lambda_min_plus(spectrum)
    tau = zero_threshold(spectrum)
    if spectrum[-1] >= 1.0 or spectrum[0] < -tau:
        raise HypothesisViolated(
            f"product spectrum [{spectrum[0]:.3e}, {spectrum[-1]:.6f}] "
            "left [0, 1)"
        )

    smooth_inv = _hermitize(smooth_b @ space.inv)
    eig = hermitian_eig(smooth_inv)
    if eig.eigenvalues[0] <= 0.0:
        raise HypothesisViolated("symmetrized smoother is not HPD")
    G = _hermitize(
        (eig.eigenvectors * (1.0 / eig.eigenvalues)) @ eig.eigenvectors.conj().T
    )
    K = k_constant(G, space.B, orthonormal_basis(cgc.pi))

    one_minus_lmp = 1.0 - lmp
    one_minus_inv_k = 1.0 - 1.0 / K
    values = [b_norm_direct, pre_only, post_only, one_minus_lmp, one_minus_inv_k]
    agreement = max(values) - min(values) <= 1e-8
    return SharpBoundReport(
        b_norm_direct=b_norm_direct,
        lambda_min_plus=lmp,
        one_minus_lmp=one_minus_lmp,
        k_constant=K,
        one_minus_inv_k=one_minus_inv_k,
        split_norms=(pre_only, post_only),
        agreement=agreement,
        product_spectrum=spectrum,
    )


def k_constant(G, C, P):
    """Approximation constant ``max_v v^H G (I - Pi_G) v / v^H C v`` where
    ``Pi_G = P (P^H G P)^{-1} P^H G``.

    ``G`` and ``C`` must be HPD and ``P`` of full column rank; the value
    depends only on the span of ``P``.  Evaluated as the largest
    eigenvalue of the Hermitian matrix
    ``C^{-1/2} (G - G P (P^H G P)^{-1} P^H G) C^{-1/2}``.
    """
    G = as_matrix(G, "G")
    C = as_matrix(C, "C")
    P = as_matrix(P, "P")
    require_square(G, "G")
    require_square(C, "C")
    sing = np.linalg.svd(P, compute_uv=False)
    if sing[-1] <= 1e-10 * sing[0]:
        raise RankDeficientTransfer("P lost column rank")
    eigG = hermitian_eig(G)
    if eigG.eigenvalues[0] <= 1e-12 * max(1.0, eigG.eigenvalues[-1]):
        raise NotHPD(f"G eigenvalue {eigG.eigenvalues[0]:.3e} not positive")
    eigC = hermitian_eig(C)
    if eigC.eigenvalues[0] <= 1e-12 * max(1.0, eigC.eigenvalues[-1]):
        raise NotHPD(f"C eigenvalue {eigC.eigenvalues[0]:.3e} not positive")
    GP = G @ P
    gram = P.conj().T @ GP
    complement_form = _hermitize(G - GP @ kernel.solve(gram, GP.conj().T))
    VC = eigC.eigenvectors
    c_inv_sqrt = _hermitize((VC * (1.0 / np.sqrt(eigC.eigenvalues))) @ VC.conj().T)
    reduced = _hermitize(c_inv_sqrt @ complement_form @ c_inv_sqrt)
    top = hermitian_eig(reduced).eigenvalues[-1]
    return float(max(top, 0.0))


@dataclass(frozen=True)
class ComparisonEntry:
    nu1: int
    nu2: int
    norm_small: float
    norm_big: float
    holds: bool


@dataclass(frozen=True)
class MonotonicityVerdict:
    """Norm comparison between a coarse space and an enlarged one."""

    kind: Kind
    nu: int
    entries: tuple[ComparisonEntry, ...]
    hypotheses_ok: bool

    @property
    def holds(self):
        return all(e.holds for e in self.entries)


def compare_coarse_spaces(ctx: SmootherContext, pair_small: TransferPair,
                          pair_big: TransferPair, kind: Kind, nu,
                          enforce_hypotheses=True):
    """Check that enlarging the coarse space does not increase the norm.

    Requires nested ranges (``R(P)`` or ``R(R)`` of the small pair inside
    the big one) and, unless ``enforce_hypotheses`` is off, both
    corrections weighted-orthogonal plus the kind-specific hypotheses.
    With enforcement off the verdict simply reports the measured norms,
    which is how the known counterexample with oblique projections is
    reproduced.

    :raises NestingViolated: when neither range is nested.
    :raises HypothesisViolated: when enforcement is on and a hypothesis
        fails.
    """
    nu = int(nu)
    if nu < 1 or nu > NU_CAP:
        raise ValueError(f"nu must lie in [1, {NU_CAP}]")
    space = ctx.space
    p_nested = subspace_contained(pair_small.P, pair_big.P)
    r_nested = subspace_contained(pair_small.R, pair_big.R)
    if not (p_nested or r_nested):
        raise NestingViolated("neither transfer range is nested")
    cgc_small = build_correction(space, ctx.A, pair_small)
    cgc_big = build_correction(space, ctx.A, pair_big)
    hypotheses_ok = cgc_small.b_orthogonal and cgc_big.b_orthogonal
    if kind == "plain":
        hypotheses_ok = hypotheses_ok and space.classify(ctx.ma).is_b_normal
    else:
        hypotheses_ok = hypotheses_ok and nu == 1
    if enforce_hypotheses and not hypotheses_ok:
        raise HypothesisViolated(
            "comparison hypotheses fail (orthogonality / normality / nu)"
        )
    entries = []
    for nu1, nu2 in ((nu, 0), (0, nu), (nu, nu)):
        n_small = norm(assemble(ctx, cgc_small, kind, nu1, nu2))
        n_big = norm(assemble(ctx, cgc_big, kind, nu1, nu2))
        entries.append(
            ComparisonEntry(
                nu1=nu1, nu2=nu2, norm_small=n_small, norm_big=n_big,
                holds=n_big <= n_small + 1e-10,
            )
        )
    return MonotonicityVerdict(
        kind=kind, nu=nu, entries=tuple(entries), hypotheses_ok=hypotheses_ok
    )


def weyl_check(H1, H2, slack=1e-9):
    """Rank-shift eigenvalue inequality for Hermitian ``H1`` and singular
    Hermitian ``H2``: with ascending eigenvalues and ``r = rank(H2)``,

        lambda_i(H1 + H2) <= lambda_{i+r}(H1)   for i = 1..n-r.

    Returns whether every inequality holds within the slack (scaled by
    the Frobenius norms of the inputs).
    """
    H1 = as_matrix(H1, "H1")
    H2 = as_matrix(H2, "H2")
    require_square(H1, "H1")
    if H1.shape != H2.shape:
        from .errors import DimensionMismatch

        raise DimensionMismatch("H1 and H2 must have the same shape")
    n = H1.shape[0]
    sing = np.linalg.svd(H2, compute_uv=False)
    rank = int(np.sum(sing > 1e-10 * max(1.0, sing[0])))
    if rank >= n:
        raise ValueError("H2 must be singular (numerical rank below n)")
    lam_sum = hermitian_eig(H1 + H2).eigenvalues
    lam_h1 = hermitian_eig(H1).eigenvalues
    budget = slack * max(1.0, fro(H1) + fro(H2))
    return bool(np.all(lam_sum[: n - rank] <= lam_h1[rank:] + budget))


def match_multisets(a, b, tol):
    """Greedy matching of two complex multisets after sorting by real part
    (imaginary part breaks ties); True when every value pairs up within
    ``tol``."""
    a = kernel.sort_complex(a)
    b = kernel.sort_complex(b)
    if a.shape != b.shape:
        return False
    remaining = list(b)
    for value in a:
        gaps = [abs(value - other) for other in remaining]
        best = int(np.argmin(gaps))
        if gaps[best] > tol:
            return False
        remaining.pop(best)
    return True


def spectrum_shift_check(C, Pi, tol=1e-8):
    """Verify that replacing the zero eigenvalues of ``C Pi`` by ones gives
    exactly the spectrum of ``C Pi + (I - Pi)``.

    ``Pi`` must be a projection with nontrivial kernel; the kernel
    dimension many eigenvalues of ``C Pi`` closest to zero must vanish,
    the same count in the shifted matrix must be ones, and the remaining
    multisets must coincide within ``tol`` (scaled).
    """
    C = as_matrix(C, "C")
    Pi = as_matrix(Pi, "Pi")
    require_square(C, "C")
    require_square(Pi, "Pi")
    n = C.shape[0]
    if fro(Pi @ Pi - Pi) > 1e-8 * max(1.0, fro(Pi)):
        raise ValueError("Pi is not a projection")
    sing = np.linalg.svd(Pi, compute_uv=False)
    rank = int(np.sum(sing > 1e-10 * max(1.0, sing[0])))
    n_kernel = n - rank
    if n_kernel == 0 or rank == 0:
        raise ValueError("Pi must be a nontrivial projection")
    product = C @ Pi
    shifted = product + np.eye(n) - Pi
    spec_product = general_spectrum(product).values
    spec_shifted = general_spectrum(shifted).values
    scale = max(1.0, float(np.max(np.abs(spec_product))))
    budget = tol * scale

    def _strip(values, target, count):
        order = np.argsort(np.abs(values - target), kind="stable")
        taken = values[order[:count]]
        if np.any(np.abs(taken - target) > budget):
            return None
        return values[np.sort(order[count:])]

    rest_product = _strip(spec_product, 0.0, n_kernel)
    rest_shifted = _strip(spec_shifted, 1.0, n_kernel)
    if rest_product is None or rest_shifted is None:
        return False
    return match_multisets(rest_product, rest_shifted, budget)
