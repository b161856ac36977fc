"""Multilevel hierarchies and the V-cycle contraction bound.

Levels are built by the compatible recursion: given a restriction
``R_k``, the interpolation is ``P_k = B_k^{-1} A_k^H R_k S_k`` for a
nonsingular change of basis ``S_k``, and

    A_{k+1} = R_k^H A_k P_k,      B_{k+1} = P_k^H B_k P_k,

which makes every coarse-grid correction self-adjoint in its level's
weighted product and couples the coarse matrices as
``A_{k+1} = S_k^{-H} B_{k+1}``.  Error propagators are assembled by the
usual recursion from the coarsest level up; the per-level contraction
constants combine into the multilevel bound
``||E_0|| <= alpha = 1 - 1/C_V``.
"""

from dataclasses import dataclass, replace

import numpy as np

from . import kernel, probgen
from .bspace import BSpace
from .errors import (
    AlphaOutOfRange,
    HypothesisViolated,
    InvalidSize,
    SmoothingAssumptionViolated,
)
from .kernel import as_matrix, fro, hermitian_eig, repeated_power
from .smoother import SmootherContext, build_smoother
from .transfer import TransferPair, build_correction, complete_interpolation
from .twogrid import Kind, k_constant


@dataclass(frozen=True)
class Level:
    """One level: system matrix, weighted geometry, and smoother data.

    The coarsest level is solved exactly, so its ``minv``/``ctx`` are
    ``None``.
    """

    A: np.ndarray
    space: BSpace
    minv: np.ndarray | None
    ctx: SmootherContext | None

    @property
    def n(self):
        return self.A.shape[0]


@dataclass(frozen=True)
class LevelTransfer:
    """Transfer operators between two adjacent levels."""

    pair: TransferPair
    S: np.ndarray
    cgc: object

    @property
    def P(self):
        return self.pair.P

    @property
    def R(self):
        return self.pair.R


@dataclass(frozen=True)
class VCycleHierarchy:
    levels: tuple[Level, ...]
    transfers: tuple[LevelTransfer, ...]

    @property
    def depth(self):
        """Number of coarsening steps L (there are L+1 levels)."""
        return len(self.transfers)


def _auto_weight(space: BSpace, ma):
    """Scale factor making ``||I - w * ma||_B`` smallest on a grid."""
    scale = space.op_norm(ma)
    eye = np.eye(ma.shape[0])

    def sweep(candidates):
        values = [(space.op_norm(eye - w * ma), w) for w in candidates]
        return min(values)

    best_norm, best_w = sweep(np.linspace(0.02, 2.0, 80) / scale)
    window = best_w * np.linspace(0.7, 1.3, 25)
    refined_norm, refined_w = sweep(window)
    if refined_norm < best_norm:
        best_norm, best_w = refined_norm, refined_w
    return best_w, best_norm


def _level_smoother(space, A, spec: probgen.SmootherSpec, level):
    minv = probgen.make_smoother(A, spec.kind, omega=spec.omega)
    norm = space.op_norm(np.eye(space.n) - minv @ A)
    if spec.auto and norm >= 1.0:
        weight, norm = _auto_weight(space, minv @ A)
        minv = weight * minv
    if norm >= 1.0:
        raise SmoothingAssumptionViolated(
            f"level {level}: smoothing error norm {norm:.6f} >= 1"
        )
    return minv


def build_hierarchy(space: BSpace, A, coarsening: probgen.CoarseningSpec,
                    smoothing: probgen.SmootherSpec | None, L,
                    fine_minv=None, restrictions=None):
    """Construct a validated hierarchy with L coarsening steps.

    ``coarsening.sizes`` must list the strictly decreasing level sizes
    ``n_1 > ... > n_L``.  The fine-level smoother may be passed directly
    through ``fine_minv``; coarse levels take theirs from ``smoothing``
    (default: automatically weighted Richardson).  ``restrictions``
    optionally supplies one explicit restriction matrix per level in
    place of the coarsening strategy.

    :raises SmoothingAssumptionViolated: naming the offending level.
    """
    A = as_matrix(A, "A")
    L = int(L)
    if L < 1:
        raise InvalidSize("need at least one coarsening step")
    sizes = tuple(int(s) for s in coarsening.sizes)
    if len(sizes) != L:
        raise InvalidSize(f"expected {L} level sizes, got {len(sizes)}")
    ns = (space.n,) + sizes
    if any(ns[k + 1] >= ns[k] for k in range(L)) or ns[-1] < 1:
        raise InvalidSize(f"level sizes must decrease strictly: {ns}")
    if smoothing is None:
        smoothing = probgen.SmootherSpec(kind="richardson", omega=None, auto=True)

    rng = np.random.default_rng(coarsening.seed)
    levels = []
    transfers = []
    A_k, space_k = A, space
    for k in range(L):
        if k == 0 and fine_minv is not None:
            minv = as_matrix(fine_minv, "fine_minv")
            norm = space_k.op_norm(np.eye(space_k.n) - minv @ A_k)
            if norm >= 1.0:
                raise SmoothingAssumptionViolated(
                    f"level 0: smoothing error norm {norm:.6f} >= 1"
                )
        else:
            minv = _level_smoother(space_k, A_k, smoothing, k)
        ctx = build_smoother(space_k, A_k, minv)
        levels.append(Level(A=A_k, space=space_k, minv=minv, ctx=ctx))

        if restrictions is not None:
            R = as_matrix(restrictions[k], f"restrictions[{k}]")
            if R.shape != (ns[k], ns[k + 1]):
                raise InvalidSize(
                    f"restrictions[{k}] has shape {R.shape}, "
                    f"expected {(ns[k], ns[k + 1])}"
                )
        else:
            R = probgen.make_coarsening(
                ns[k], ns[k + 1], coarsening.strategy,
                seed=coarsening.seed + 7 * k + 1,
            )
        P_raw = complete_interpolation(space_k, A_k, R)
        if coarsening.basis_change == "identity":
            S = np.eye(ns[k + 1], dtype=complex)
        elif coarsening.basis_change == "random":
            scale = np.diag(1.0 / np.linalg.norm(P_raw, axis=0))
            G = rng.standard_normal((ns[k + 1], ns[k + 1])) + 1j * (
                rng.standard_normal((ns[k + 1], ns[k + 1]))
            )
            S = scale @ (np.eye(ns[k + 1]) + 0.3 * G / np.linalg.norm(G, 2))
        else:
            raise InvalidSize(
                f"unknown basis_change {coarsening.basis_change!r}"
            )
        P = P_raw @ S
        pair = replace(TransferPair.build(space_k, A_k, P, R), S=S)
        cgc = build_correction(space_k, A_k, pair)
        if not cgc.b_orthogonal:
            raise HypothesisViolated(
                f"level {k}: coarse-grid correction lost orthogonality"
            )
        _check_level_identities(space_k, pair, cgc, k)
        transfers.append(LevelTransfer(pair=pair, S=S, cgc=cgc))
        A_k = pair.A_c
        space_k = BSpace(pair.B_c)
    levels.append(Level(A=A_k, space=space_k, minv=None, ctx=None))
    return VCycleHierarchy(levels=tuple(levels), transfers=tuple(transfers))


def _check_level_identities(space, pair, cgc, k):
    projector = pair.P @ kernel.solve(pair.B_c, pair.P.conj().T @ space.B)
    if fro(projector - cgc.pi) > 1e-9 * max(1.0, fro(cgc.pi)):
        raise HypothesisViolated(
            f"level {k}: correction differs from its weighted projector form"
        )
    coupling = fro(pair.A_c - np.linalg.solve(pair.S.conj().T, pair.B_c))
    if coupling > 1e-9 * max(1.0, fro(pair.A_c)):
        raise HypothesisViolated(
            f"level {k}: coarse coupling residual {coupling:.3e}"
        )


@dataclass(frozen=True)
class LevelPropagators:
    """Per-level error propagators, their half cycles and weighted norms.

    ``operators[k]`` is the full propagator on level k (zero on the
    coarsest); ``half_up``/``half_down`` are the coarse-to-fine and
    fine-to-coarse halves whose product reproduces it.
    """

    kind: Kind
    nu1: int
    nu2: int
    operators: tuple[np.ndarray, ...]
    half_up: tuple[np.ndarray, ...]
    half_down: tuple[np.ndarray, ...]
    norms: tuple[float, ...]


def assemble_level_propagators(h: VCycleHierarchy, nu1, nu2,
                               kind: Kind = "adjoint_post"):
    """Run the propagator recursion from the coarsest level up."""
    if kind not in ("adjoint_post", "plain"):
        raise ValueError(f"unknown kind {kind!r}")
    nu1, nu2 = int(nu1), int(nu2)
    L = h.depth
    n_last = h.levels[L].n
    operators = {L: np.zeros((n_last, n_last), dtype=complex)}
    half_up = {L: np.zeros((n_last, n_last), dtype=complex)}
    half_down = {L: np.zeros((n_last, n_last), dtype=complex)}
    for k in range(L - 1, -1, -1):
        level = h.levels[k]
        transfer = h.transfers[k]
        eye = np.eye(level.n)
        pre = repeated_power(level.ctx.error_matrix(), nu1)
        if kind == "adjoint_post":
            post = repeated_power(level.ctx.error_matrix_adjoint(), nu2)
        else:
            post = repeated_power(level.ctx.error_matrix(), nu2)
        coarse_to_fine = kernel.solve(h.levels[k + 1].A,
                                      transfer.R.conj().T @ level.A)
        eye_c = np.eye(h.levels[k + 1].n)

        def correct(E_coarse):
            return eye - transfer.P @ (eye_c - E_coarse) @ coarse_to_fine

        operators[k] = post @ correct(operators[k + 1]) @ pre
        half_up[k] = post @ correct(half_up[k + 1])
        half_down[k] = correct(half_down[k + 1]) @ pre
    norms = tuple(
        h.levels[k].space.op_norm(operators[k]) for k in range(L + 1)
    )
    return LevelPropagators(
        kind=kind,
        nu1=nu1,
        nu2=nu2,
        operators=tuple(operators[k] for k in range(L + 1)),
        half_up=tuple(half_up[k] for k in range(L + 1)),
        half_down=tuple(half_down[k] for k in range(L + 1)),
        norms=norms,
    )


@dataclass(frozen=True)
class McCormickReport:
    """Per-level contraction constants and the multilevel bound.

    ``alpha_k = 1 - 1/K_k`` per level, where ``K_k`` is the exact value
    of the constrained supremum behind the smoothing property, evaluated
    in closed form as the approximation constant of the level weight
    against ``B_k hat_minv_k^{-1} B_k`` (equivalently the largest
    eigenvalue of ``B_k^{-1} hat_m_k (I - Pi_k)``).  ``alpha`` is the
    maximum over levels and ``c_v = 1/(1 - alpha)``; ``bound_holds``
    records whether the measured fine-level norm stays below ``alpha``
    and ``sampled_within_bound`` whether a randomized sup over sample
    vectors stayed below every ``alpha_k``.
    """

    alpha_k: tuple[float, ...]
    alpha: float
    c_v: float
    norm_e0: float
    bound_holds: bool
    k_per_level: tuple[float, ...]
    sampled_alpha_k: tuple[float, ...]
    sampled_within_bound: bool


def mccormick_report(h: VCycleHierarchy, props: LevelPropagators,
                     samples=1000, seed=0):
    """Evaluate the multilevel contraction bound for single smoothing steps.

    The per-level constant is computed in closed form through the
    approximation constant ``K`` of the symmetrized smoother against the
    level weight, and only sanity-checked from below by a randomized sup
    over ``samples`` vectors.

    :raises HypothesisViolated: unless ``nu1 == nu2 == 1`` and the
        propagators use the adjoint post-smoothing family.
    :raises AlphaOutOfRange: naming the level whose constant reaches 1.
    """
    if props.kind != "adjoint_post" or props.nu1 != 1 or props.nu2 != 1:
        raise HypothesisViolated("the bound is stated for one adjoint-post step")
    rng = np.random.default_rng(seed)
    alphas = []
    ks = []
    sampled = []
    sampled_ok = True
    for k in range(h.depth):
        level = h.levels[k]
        transfer = h.transfers[k]
        space = level.space
        eig = hermitian_eig(space.sqrt @ level.ctx.hat_minv @ space.sqrt)
        if eig.eigenvalues[0] <= 0.0:
            raise SmoothingAssumptionViolated(
                f"level {k}: symmetrized smoother is not HPD"
            )
        weighted = space.B @ level.ctx.hat_minv @ space.B
        K = k_constant(space.B, 0.5 * (weighted + weighted.conj().T), transfer.P)
        alpha_k = 1.0 - 1.0 / K
        if not 0.0 <= alpha_k < 1.0:
            raise AlphaOutOfRange(f"level {k}: alpha={alpha_k!r}")
        alphas.append(alpha_k)
        ks.append(K)

        E = rng.standard_normal((level.n, samples)) + 1j * (
            rng.standard_normal((level.n, samples))
        )
        adj_err = np.eye(level.n) - level.ctx.ma_adj
        smooth_sq = _col_b_norms_sq(space, adj_err @ E)
        pi_sq = _col_b_norms_sq(space, transfer.cgc.pi @ E)
        comp = transfer.cgc.complement @ E
        comp_sq = _col_b_norms_sq(space, comp)
        keep = comp_sq > 1e-12 * np.max(comp_sq)
        ratios = (smooth_sq[keep] - pi_sq[keep]) / comp_sq[keep]
        sampled_k = float(np.max(ratios))
        sampled.append(sampled_k)
        sampled_ok = sampled_ok and sampled_k <= alpha_k + 1e-8
    alpha = max(alphas)
    c_v = 1.0 / (1.0 - alpha)
    norm_e0 = props.norms[0]
    return McCormickReport(
        alpha_k=tuple(alphas),
        alpha=alpha,
        c_v=c_v,
        norm_e0=norm_e0,
        bound_holds=norm_e0 <= alpha + 1e-8,
        k_per_level=tuple(ks),
        sampled_alpha_k=tuple(sampled),
        sampled_within_bound=sampled_ok,
    )


def _col_b_norms_sq(space: BSpace, X):
    return np.real(np.einsum("ij,ij->j", X.conj(), space.B @ X))
