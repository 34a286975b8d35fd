"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

The lines are repeated in the pytest terminal summary; they are also shown
live with ``-s`` or when this file is executed directly.
"""

import time

import numpy as np
import pytest

from rugosity.analytic import residual_check, solve_limit
from rugosity.fem import RobinProblem, l2_norm, solve_limit_discrete, solve_on_mesh
from rugosity.geometry import SlabDomain, build_mesh
from rugosity.homogenize import (Combine, GraphSampler1D, GraphSampler2D, Regime,
                                 homogenize_energy, homogenize_polynomial, ldg_density,
                                 ldg_effective, oseen_frank_effective, polynomial_energy,
                                 rapini_papoular, slab_effective, slab_sampler)
from rugosity.profile import PeriodicProfile, cos_bump, flat, random_profile, validate
from rugosity.study import SweepConfig, refinement_change, run_sweep, weak_conv_check
from rugosity.tensors import TOP_ANCHORING, QTensor2

D = TOP_ANCHORING
SEED = 20240611
# collected for the terminal summary (see conftest.py)
RESULT_LINES = []


def report(label, ok, detail):
    line = f"{'PASS' if ok else 'FAIL'}  criterion {label}: {detail}"
    print(line, flush=True)
    RESULT_LINES.append(line)
    return line


def random_valid_profiles(rng, n, scale=0.5):
    out = []
    while len(out) < n:
        p = random_profile(rng, max_modes=8, scale=scale)
        validate(p)
        out.append(p)
    return out


# 1. flat-profile identities


def test_1_flat_identities():
    t0 = time.perf_counter()
    cg_tol = 1e-10
    eff = slab_effective(flat(), 2.0)
    dev = max(abs(eff.gamma - 1), abs(eff.G1 + 0.5), abs(eff.G2), abs(eff.w_ef - 2.0),
              (eff.Q_ef - D).norm())

    domain = SlabDomain(1.0, 1 / 8, flat())
    mesh = build_mesh(domain, 16, 16)
    fs = solve_on_mesh(mesh, RobinProblem.rugose(domain, 1.0, 2.0), cg_tol)
    disc = solve_limit_discrete(mesh.levels, 1.0, 2.0, eff.w_ef, eff.Q_ef)
    rows = np.repeat(np.arange(mesh.ny + 1), mesh.nx + 1)
    gap = l2_norm(mesh, fs.nodal_q1 - disc[rows, 0], fs.nodal_q2 - disc[rows, 1])

    sweep = run_sweep(SweepConfig(flat(), eps_list=(1 / 4, 1 / 8, 1 / 16, 1 / 32)))
    elapsed = time.perf_counter() - t0
    ok = dev <= 1e-14 and gap <= 10 * cg_tol and sweep.degenerate and elapsed < 10
    report("1", ok, f"coefficient deviation {dev:.1e}, FEM vs discrete limit {gap:.1e} "
                    f"(<= {10 * cg_tol:.0e}), degenerate={sweep.degenerate}, {elapsed:.1f}s")
    assert ok


@pytest.mark.xfail(strict=True, reason="P1 discretisation error is O(h^2), far above 10*cg_tol")
def test_1_flat_fem_against_closed_form():
    # literal reading: compare the flat FEM solve with the closed-form Q_0
    cg_tol = 1e-10
    domain = SlabDomain(1.0, 1 / 8, flat())
    mesh = build_mesh(domain, 16, 16)
    fs = solve_on_mesh(mesh, RobinProblem.rugose(domain, 1.0, 2.0), cg_tol)
    exact = solve_limit(1.0, 2.0, 2.0, 1.0, D, D).components(mesh.nodes[:, 1])
    err = l2_norm(mesh, fs.nodal_q1 - exact[:, 0], fs.nodal_q2 - exact[:, 1])
    ok = err <= 10 * cg_tol
    report("1 (closed form)", ok, f"FEM vs analytic Q_0 {err:.2e} (<= {10 * cg_tol:.0e})")
    assert ok


# 2. coefficient bounds on random profiles


def test_2_coefficient_bounds():
    t0 = time.perf_counter()
    rng = np.random.default_rng(SEED)
    failures = 0
    w0 = 1.0
    for p in random_valid_profiles(rng, 1000):
        eff = slab_effective(p, w0)
        Q = eff.Q_ef.as_matrix()
        good = (eff.gamma >= 1.0 and eff.w_ef >= w0 and np.trace(Q) == 0.0
                and abs(eff.G1) <= eff.gamma / 2 and abs(eff.G2) <= eff.gamma / 2)
        failures += not good
    elapsed = time.perf_counter() - t0
    ok = failures == 0 and elapsed < 60
    report("2", ok, f"1000 random profiles, {failures} failures, {elapsed:.1f}s")
    assert ok


# 3. Landau-de Gennes Jensen bounds


def test_3_ldg_jensen():
    rng = np.random.default_rng(SEED + 3)
    failures = 0
    worst = -np.inf
    for _ in range(200):
        pu, pv = random_valid_profiles(rng, 2)
        combine = Combine.SUM if rng.random() < 0.5 else Combine.PRODUCT
        eff = ldg_effective(GraphSampler2D(pu, pv, combine), 1.0, 1.0)
        lam = eff.Q_ef.eigenvalues()
        good = (lam[-1] <= 2 / 3 + 1e-10 and lam[0] >= -1 / 3 - 1e-10
                and eff.Q_ef.norm() <= np.sqrt(2 / 3) + 1e-10)
        worst = max(worst, lam[-1] - 2 / 3)
        failures += not good
    ok = failures == 0
    report("3", ok, f"200 doubly periodic profiles, {failures} failures, "
                    f"max(lambda_max - 2/3) = {worst:.3e}")
    assert ok


# 4. Oseen-Frank tensor


def test_4_oseen_frank():
    rng = np.random.default_rng(SEED + 4)
    failures = 0
    for _ in range(200):
        pu, pv = random_valid_profiles(rng, 2)
        combine = Combine.SUM if rng.random() < 0.5 else Combine.PRODUCT
        w0 = float(rng.uniform(0.1, 10))
        of = oseen_frank_effective(GraphSampler2D(pu, pv, combine), w0)
        A = of.A_ef
        good = (np.array_equal(A, A.T) and of.eigenvalues[0] >= -1e-12 * w0
                and np.trace(A) / w0 >= 1.0)
        failures += not good
    flat_of = oseen_frank_effective(GraphSampler1D(flat(), dim=3), 2.5)
    flat_ok = (np.allclose(flat_of.eigenvalues, [0.0, 0.0, 2.5], atol=1e-14)
               and flat_of.regime is Regime.DEGENERATE_PLANAR)
    ok = failures == 0 and flat_ok
    report("4", ok, f"200 random profiles, {failures} failures; flat eigenvalues "
                    f"{np.round(flat_of.eigenvalues, 14).tolist()}, regime {flat_of.regime.value}")
    assert ok


# 5. FEM verification on the flat slab


def test_5_fem_order():
    t0 = time.perf_counter()
    sol = solve_limit(1.0, 2.0, 2.0, 1.0, D, D)
    domain = SlabDomain(1.0, 1 / 8, flat())
    errors = []
    for ny in (16, 32, 64):
        mesh = build_mesh(domain, 16, ny)
        fs = solve_on_mesh(mesh, RobinProblem.rugose(domain, 1.0, 2.0))
        exact = sol.components(mesh.nodes[:, 1])
        errors.append(l2_norm(mesh, fs.nodal_q1 - exact[:, 0], fs.nodal_q2 - exact[:, 1]))
    orders = np.log2(np.array(errors[:-1]) / np.array(errors[1:]))
    elapsed = time.perf_counter() - t0
    ok = bool(np.all(orders >= 1.9)) and elapsed < 30
    report("5", ok, f"L2 errors {[f'{e:.3e}' for e in errors]}, observed orders "
                    f"{np.round(orders, 3).tolist()}, {elapsed:.1f}s")
    assert ok


# 6. homogenisation rate


def test_6_rate():
    t0 = time.perf_counter()
    config = SweepConfig(cos_bump(0.15), R=1.0, c=1.0, w0=2.0,
                         eps_list=(1 / 8, 1 / 16, 1 / 32, 1 / 64))
    rep = run_sweep(config)
    errors = rep.errors
    decreasing = bool(np.all(np.diff(errors) < 0))
    change = refinement_change(config)["relative_change"]
    elapsed = time.perf_counter() - t0
    ok = decreasing and rep.fitted_slope >= 0.7 and change < 0.02 and elapsed < 600
    report("6", ok, f"errors {[f'{e:.4e}' for e in errors]}, slope {rep.fitted_slope:.3f} "
                    f"(r^2 {rep.r_squared:.4f}), refinement change {100 * change:.2f}%, "
                    f"{elapsed:.1f}s")
    assert ok


# 7. analytic residuals


def test_7_residuals():
    rng = np.random.default_rng(SEED + 7)
    worst = 0.0
    for _ in range(100):
        c = rng.uniform(0.1, 10)
        w0, w_ef = rng.uniform(0.1, 10, 2)
        R = rng.uniform(0.5, 4)
        sol = solve_limit(c, w_ef, w0, R, QTensor2(*rng.normal(size=2)),
                          QTensor2(*rng.normal(size=2)))
        worst = max(worst, residual_check(sol).max())
    ok = worst <= 1e-11
    report("7", ok, f"100 parameter sets, worst relative residual {worst:.2e}")
    assert ok


# 8. weak convergence of the boundary coefficients


def test_8_weak_convergence():
    eps_list = [1 / 8, 1 / 16, 1 / 32, 1 / 64, 1 / 128]
    rows = weak_conv_check(cos_bump(0.5), np.cos, eps_list)
    d = np.array([r.defect for r in rows])
    ratios = d / np.array(eps_list)
    literal_ratio = ratios.max() / ratios.min() if ratios.min() > 0 else np.inf
    # cos x is orthogonal to every mode of gamma_eps(x/eps), so d vanishes to roundoff and
    # the max/min ratio of d/eps is a ratio of rounding errors; the boundedness clause is
    # therefore checked on the nondegenerate tensor pairing with v(x) = x
    vanishes = bool(np.all(d <= 1e-13))
    tensor = weak_conv_check(cos_bump(0.5), lambda x: x, eps_list)
    t_ratios = np.array([r.tensor_defect_over_eps for r in tensor])
    t_spread = t_ratios.max() / t_ratios.min()
    ok = vanishes and ratios.max() <= 1e-10 and t_spread <= 10
    report("8", ok, f"cos x: max d = {d.max():.1e} (roundoff, literal d/eps spread "
                    f"{literal_ratio:.2f}); v = x tensor defect/eps in "
                    f"[{t_ratios.min():.4f}, {t_ratios.max():.4f}], spread {t_spread:.4f}")
    assert ok


# 9. cross-operation consistency


def test_9_consistency():
    rng = np.random.default_rng(SEED + 9)
    w0 = 2.0
    p = PeriodicProfile(1.0, (0.3, 0.1), (0.2, -0.15))
    eff = slab_effective(p, w0)
    sampler = slab_sampler(p)
    density = ldg_density(w0)
    worst_ldg = 0.0
    for _ in range(50):
        Q = QTensor2(*rng.normal(size=2))
        direct = homogenize_energy(sampler, density, Q.as_matrix())
        model = 0.5 * eff.w_ef * (Q - eff.Q_ef).norm() ** 2 + eff.remainder()
        worst_ldg = max(worst_ldg, abs(direct - model))

    # the 3D Rapini-Papoular density is a pure quadratic with A_2 = (w0/2) n (x) n
    s3 = GraphSampler2D(p, cos_bump(0.2), Combine.SUM)
    coeffs = homogenize_polynomial(s3, [lambda n: 0.5 * w0 * n[:, :, None] * n[:, None, :]])
    rp = rapini_papoular(w0)
    worst_poly = 0.0
    for _ in range(100):
        u = rng.normal(size=3)
        worst_poly = max(worst_poly, abs(polynomial_energy(coeffs, u) - homogenize_energy(s3, rp, u)))
    ok = worst_ldg <= 1e-10 and worst_poly <= 1e-10
    report("9", ok, f"LdG expansion max deviation {worst_ldg:.1e} over 50 Q, polynomial vs "
                    f"direct {worst_poly:.1e} over 100 u")
    assert ok


if __name__ == "__main__":
    import sys

    sys.exit(pytest.main([__file__, "-q", "-s"]))
