"""Acceptance suite: every criterion prints one pass/fail line.

Run with ``pytest tests/test_acceptance.py -v -s`` to see the lines as
they are produced.
"""

import time

import numpy as np
import pytest

from nsamg import probgen
from nsamg.bspace import BSpace, lambda_min_plus
from nsamg.kernel import fro, repeated_power
from nsamg.smoother import build_smoother, smoothing_report
from nsamg.transfer import TransferPair, build_correction, complete_interpolation
from nsamg.twogrid import (
    assemble,
    compare_coarse_spaces,
    norm,
    product_spectrum,
    sharp_report,
    spectrum_shift_check,
    weyl_check,
)
from nsamg.vcycle import (
    assemble_level_propagators,
    build_hierarchy,
    mccormick_report,
)


def report(number, ok, detail):
    status = "PASS" if ok else "FAIL"
    print(f"ACCEPTANCE {number} [{status}]: {detail}")
    assert ok, f"criterion {number} failed: {detail}"


def compatible_setup(spec, n_c, coarsen_seed):
    A, B, minv = probgen.generate(spec)
    space = BSpace(B)
    ctx = build_smoother(space, A, minv)
    R = probgen.make_coarsening(spec.n, n_c, "random_orthonormal", seed=coarsen_seed)
    P = complete_interpolation(space, A, R)
    pair = TransferPair.build(space, A, P, R)
    cgc = build_correction(space, A, pair)
    return space, A, ctx, pair, cgc


def test_criterion_1_reference_reproduction():
    start = time.perf_counter()
    fx = probgen.paper_counterexample()
    space = BSpace(fx.B)
    ctx = build_smoother(space, fx.A, fx.Minv)
    hat_err = float(np.max(np.abs(np.diag(ctx.hat_minv_b).real - fx.hat_diag)))
    pair_s = TransferPair.build(space, fx.A, fx.P, fx.R)
    pair_b = TransferPair.build(space, fx.A, fx.P_big, fx.R_big)
    cgc_s = build_correction(space, fx.A, pair_s)
    cgc_b = build_correction(space, fx.A, pair_b)
    sq_s = norm(assemble(ctx, cgc_s, "plain", 1, 1)) ** 2
    sq_b = norm(assemble(ctx, cgc_b, "plain", 1, 1)) ** 2
    elapsed = time.perf_counter() - start
    ok = (
        abs(sq_s - 65.0 / 288.0) <= 1e-12
        and abs(sq_b - 91.0 / 256.0) <= 1e-12
        and hat_err <= 1e-14
        and elapsed < 1.0
    )
    report(
        1,
        ok,
        f"norms ({sq_s:.12f}, {sq_b:.12f}) vs (65/288, 91/256), "
        f"smoother diag error {hat_err:.2e}, runtime {elapsed:.3f}s",
    )


def test_criterion_2_sharp_agreement_normal():
    start = time.perf_counter()
    worst = 0.0
    for seed in range(100):
        rng = np.random.default_rng(seed)
        n = int(rng.integers(6, 33))
        n_c = int(rng.integers(2, n - 1))
        nu = 1 + seed % 3
        spec = probgen.ProblemSpec(family="random_b_normal", n=n, seed=seed)
        space, A, ctx, pair, cgc = compatible_setup(spec, n_c, seed + 1)
        rep = sharp_report(assemble(ctx, cgc, "plain", nu, nu))
        quantities = [
            rep.b_norm_direct,
            rep.split_norms[0],
            rep.split_norms[1],
            rep.one_minus_lmp,
        ]
        if nu == 1:
            quantities.append(rep.one_minus_inv_k)
        worst = max(worst, max(quantities) - min(quantities))
    elapsed = time.perf_counter() - start
    ok = worst <= 1e-8 and elapsed < 30.0
    report(2, ok, f"100 instances, worst spread {worst:.2e}, runtime {elapsed:.1f}s")


def test_criterion_3_adjoint_post_without_normality():
    worst = 0.0
    for seed in range(100):
        rng = np.random.default_rng(seed)
        n = int(rng.integers(6, 33))
        n_c = int(rng.integers(2, n - 1))
        spec = probgen.ProblemSpec(
            family="random_nonnormal", n=n, seed=seed, radius=0.9
        )
        space, A, ctx, pair, cgc = compatible_setup(spec, n_c, seed + 1)
        rep = sharp_report(assemble(ctx, cgc, "adjoint_post", 1, 1))
        quantities = [
            rep.b_norm_direct,
            rep.split_norms[0],
            rep.split_norms[1],
            rep.one_minus_lmp,
        ]
        worst = max(worst, max(quantities) - min(quantities))
    ok = worst <= 1e-8
    report(3, ok, f"100 non-normal instances, worst spread {worst:.2e}")


def test_criterion_4_monotonicity():
    failures = 0
    for seed in range(100):
        rng = np.random.default_rng(seed)
        n = int(rng.integers(8, 25))
        n_c = int(rng.integers(2, n // 2))
        n_c_big = int(rng.integers(n_c + 1, n - 1))
        if seed % 2 == 0:
            spec = probgen.ProblemSpec(family="random_b_normal", n=n, seed=seed)
            kind, nu = "plain", 1 + seed % 3
        else:
            spec = probgen.ProblemSpec(
                family="random_nonnormal", n=n, seed=seed, radius=0.9
            )
            kind, nu = "adjoint_post", 1
        A, B, minv = probgen.generate(spec)
        space = BSpace(B)
        ctx = build_smoother(space, A, minv)
        R_small = probgen.make_coarsening(n, n_c, "random_orthonormal", seed=seed + 2)
        R_big = probgen.make_coarsening(
            n, n_c_big, "random_orthonormal", seed=seed + 3, extend_from=R_small
        )
        pair_small = TransferPair.build(
            space, A, complete_interpolation(space, A, R_small), R_small
        )
        pair_big = TransferPair.build(
            space, A, complete_interpolation(space, A, R_big), R_big
        )
        verdict = compare_coarse_spaces(ctx, pair_small, pair_big, kind, nu)
        if not (verdict.holds and len(verdict.entries) == 3):
            failures += 1

    fx = probgen.paper_counterexample()
    space = BSpace(fx.B)
    ctx = build_smoother(space, fx.A, fx.Minv)
    pair_s = TransferPair.build(space, fx.A, fx.P, fx.R)
    pair_b = TransferPair.build(space, fx.A, fx.P_big, fx.R_big)
    verdict = compare_coarse_spaces(
        ctx, pair_s, pair_b, "plain", 1, enforce_hypotheses=False
    )
    full = [e for e in verdict.entries if (e.nu1, e.nu2) == (1, 1)][0]
    violation_ok = (
        not full.holds
        and abs(full.norm_small**2 - fx.norm_sq_small) <= 1e-12
        and abs(full.norm_big**2 - fx.norm_sq_big) <= 1e-12
    )
    ok = failures == 0 and violation_ok
    report(
        4,
        ok,
        f"100 nested pairs, {failures} failures; oblique counterexample "
        f"violates as expected: {violation_ok}",
    )


def test_criterion_5_smoothing_equivalence():
    radii = (0.7, 0.9, 1.1, 1.2)
    checked = 0
    bad = 0
    for seed in range(13):
        for radius in radii:
            for family in ("rim_normal", "nonnormal"):
                if family == "rim_normal":
                    recipe = probgen.b_normal_recipe(10, seed, radius=radius, rim=True)
                    space = BSpace(recipe.weight())
                    A = recipe.iteration_matrix()
                    minv = np.eye(10, dtype=complex)
                else:
                    spec = probgen.ProblemSpec(
                        family="random_nonnormal", n=10, seed=seed, radius=radius
                    )
                    A, B, minv = probgen.generate(spec)
                    space = BSpace(B)
                rep = smoothing_report(build_smoother(space, A, minv))
                flags = set(rep.equivalence_flags())
                checked += 1
                if len(flags) != 1 or flags != {radius < 1.0}:
                    bad += 1
    ok = bad == 0 and checked >= 100
    report(5, ok, f"{checked} instances across radii {radii}, {bad} inconsistent")


def test_criterion_6_vcycle():
    start = time.perf_counter()
    problems = []
    for n0 in (32, 64):
        for L in (2, 3):
            sizes = tuple(max(2, n0 // (2 ** (k + 1))) for k in range(L))
            problems.append(
                (
                    probgen.ProblemSpec(
                        family="convection_diffusion_1d", n=n0, epsilon=0.1, seed=0
                    ),
                    probgen.CoarseningSpec(
                        strategy="aggregation", sizes=sizes, seed=1,
                        basis_change="random",
                    ),
                    None,
                )
            )
            problems.append(
                (
                    probgen.ProblemSpec(family="random_b_normal", n=n0, seed=2),
                    probgen.CoarseningSpec(
                        strategy="random_orthonormal", sizes=sizes, seed=3,
                        basis_change="random",
                    ),
                    "fine",
                )
            )
    worst_identity = 0.0
    all_bounds = True
    all_samples = True
    for spec, coarsening, fine in problems:
        A, B, minv = probgen.generate(spec)
        space = BSpace(B)
        h = build_hierarchy(
            space, A, coarsening, probgen.SmootherSpec("richardson", auto=True),
            len(coarsening.sizes), fine_minv=minv if fine else None,
        )
        props = assemble_level_propagators(h, 1, 1, "adjoint_post")
        for k in range(h.depth + 1):
            sp_k = h.levels[k].space
            full = props.operators[k]
            resid = fro(full - props.half_up[k] @ props.half_down[k])
            worst_identity = max(worst_identity, resid / max(1.0, fro(full)))
            adj = fro(sp_k.adjoint(props.half_up[k]) - props.half_down[k])
            worst_identity = max(
                worst_identity, adj / max(1.0, fro(props.half_up[k]))
            )
            split = abs(props.norms[k] - sp_k.op_norm(props.half_up[k]) ** 2)
            worst_identity = max(worst_identity, split)
        rep = mccormick_report(h, props, samples=1000, seed=4)
        all_bounds = all_bounds and rep.norm_e0 <= rep.alpha + 1e-8
        all_bounds = all_bounds and abs(rep.alpha - (1.0 - 1.0 / rep.c_v)) <= 1e-10
        all_samples = all_samples and rep.sampled_within_bound
    elapsed = time.perf_counter() - start
    ok = worst_identity <= 1e-8 and all_bounds and all_samples and elapsed < 60.0
    report(
        6,
        ok,
        f"{len(problems)} hierarchies, worst identity residual "
        f"{worst_identity:.2e}, bounds {all_bounds}, sampled sups {all_samples}, "
        f"runtime {elapsed:.1f}s",
    )


def test_criterion_7_hpd_regression():
    n = 32
    A = probgen.laplacian_1d(n)
    minv = probgen.make_smoother(A, "gauss_seidel")
    space = BSpace(A)
    ctx = build_smoother(space, A, minv)
    P = probgen.make_coarsening(n, n // 2, "every_other")
    pair = TransferPair.build(space, A, P, P)
    cgc = build_correction(space, A, pair)
    eye = np.eye(n)
    pi_classical = P @ np.linalg.solve(P.conj().T @ A @ P, P.conj().T @ A)
    worst_entry = 0.0
    for nu1, nu2 in ((1, 1), (2, 1), (1, 2), (2, 2)):
        op = assemble(ctx, cgc, "adjoint_post", nu1, nu2)
        classical = (
            repeated_power(eye - minv.conj().T @ A, nu2)
            @ (eye - pi_classical)
            @ repeated_power(eye - minv @ A, nu1)
        )
        worst_entry = max(worst_entry, float(np.max(np.abs(op.matrix - classical))))
    direct = norm(assemble(ctx, cgc, "adjoint_post", 1, 1))
    lmp = lambda_min_plus(product_spectrum(space, ctx.hat_minv_b, cgc))
    identity_gap = abs(direct - (1.0 - lmp))
    ok = worst_entry <= 1e-12 and identity_gap <= 1e-8
    report(
        7,
        ok,
        f"entrywise error {worst_entry:.2e} vs classical operator, "
        f"sharp identity gap {identity_gap:.2e}",
    )


def test_criterion_8_property_oracles():
    shift_failures = 0
    for seed in range(200):
        rng = np.random.default_rng(10_000 + seed)
        m = int(rng.integers(4, 13))
        C = rng.standard_normal((m, m)) + 1j * rng.standard_normal((m, m))
        r = int(rng.integers(1, m))
        X = rng.standard_normal((m, r)) + 1j * rng.standard_normal((m, r))
        Y = rng.standard_normal((m, r)) + 1j * rng.standard_normal((m, r))
        Pi = X @ np.linalg.solve(Y.conj().T @ X, Y.conj().T)
        if not spectrum_shift_check(C, Pi, tol=1e-8):
            shift_failures += 1
    weyl_failures = 0
    for seed in range(200):
        rng = np.random.default_rng(20_000 + seed)
        m = int(rng.integers(4, 13))
        G = rng.standard_normal((m, m)) + 1j * rng.standard_normal((m, m))
        H1 = 0.5 * (G + G.conj().T)
        r = int(rng.integers(1, m))
        Z = rng.standard_normal((m, r)) + 1j * rng.standard_normal((m, r))
        D = np.diag(rng.uniform(-1.0, 1.0, size=r))
        H2 = Z @ D @ Z.conj().T
        H2 = 0.5 * (H2 + H2.conj().T)
        if not weyl_check(H1, H2, slack=1e-8):
            weyl_failures += 1
    ok = shift_failures == 0 and weyl_failures == 0
    report(
        8,
        ok,
        f"200 spectrum-shift instances ({shift_failures} failures), "
        f"200 rank-shift instances ({weyl_failures} failures)",
    )
