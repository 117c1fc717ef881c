"""Acceptance suite: one test per criterion, each printing a pass/fail line
with its measured values and enforcing the stated tolerance and runtime."""

import json
import math
import os
import time
from pathlib import Path

import numpy as np
import pytest
import sympy as sp
from scipy import special

from trivine.estimate import (
    fit_nonsimplified_binned,
    fit_simplified_vine,
    select_structure,
    simplified_approx,
)
from trivine.families import BivariateCopula, Family
from trivine.field import (
    GridSpec,
    IsoMesh,
    ScalarField3D,
    export_mesh,
    marching_cubes,
    read_obj,
    sample_density,
)
from trivine.quadrature import gauss_legendre_unit_clustered
from trivine.scenarios import get


def _report(name: str, ok: bool, detail: str, elapsed: float | None = None):
    stamp = f" [{elapsed:.1f}s]" if elapsed is not None else ""
    print(f"[{'PASS' if ok else 'FAIL'}] {name}: {detail}{stamp}")
    assert ok, f"{name}: {detail}"


# ---------------------------------------------------------------------------
# criterion: Table-1 tau audit


def test_table1_tau_audit():
    t0 = time.time()
    checks = []
    for sid in ("S1", "S2", "S3", "S4", "S5", "S6", "S7", "S8"):
        entry = get(sid)
        for key, actual in (
            ("tau_12", entry.spec.c12.tau()),
            ("tau_23", entry.spec.c23.tau()),
        ):
            checks.append((sid, key, entry.expected[key].value, actual))
        if "tau_cond" in entry.expected:
            actual = entry.spec.c13_2.as_copula().tau()
            checks.append((sid, "tau_cond", entry.expected["tau_cond"].value, actual))
    worst = max(abs(a - e) for _, _, e, a in checks)
    elapsed = time.time() - t0
    bad = [(s, k, e, round(a, 4)) for s, k, e, a in checks if abs(a - e) > 0.005]
    _report(
        "table-1 tau audit",
        not bad and elapsed < 1.0,
        f"{len(checks)} entries, worst |dev| {worst:.4f} (tol 0.005){'; FAILING: ' + str(bad) if bad else ''}",
        elapsed,
    )


# ---------------------------------------------------------------------------
# criterion: Gaussian closure


def test_gaussian_closure():
    t0 = time.time()
    spec = get("S1").spec
    r12, r23, r132 = 0.6, 0.7, 0.5
    r13 = r12 * r23 + r132 * math.sqrt((1 - r12**2) * (1 - r23**2))
    assert get("S1").expected["implied_rho_13"].check(r13)
    R = np.array([[1, r12, r13], [r12, 1, r23], [r13, r23, 1]])
    Rinv, detR = np.linalg.inv(R), np.linalg.det(R)
    rng = np.random.default_rng(7)
    U = rng.uniform(0.01, 0.99, size=(1000, 3))
    Z = special.ndtri(U)
    closed = detR**-0.5 * np.exp(-0.5 * np.einsum("ij,jk,ik->i", Z, Rinv - np.eye(3), Z))
    ours = spec.density_u(U[:, 0], U[:, 1], U[:, 2])
    rel = float(np.max(np.abs(ours / closed - 1.0)))

    gauss13 = BivariateCopula(Family.GAUSSIAN, 0, (r13,))
    g = np.linspace(1 / 22, 21 / 22, 21)
    U1, U3 = np.meshgrid(g, g, indexing="ij")
    marg_err = float(np.max(np.abs(spec.marginal13_pdf(U1, U3) - gauss13.pdf(U1, U3))))
    elapsed = time.time() - t0
    _report(
        "gaussian closure",
        rel <= 1e-6 and marg_err <= 1e-4 and elapsed < 10.0,
        f"density max rel err {rel:.2e} (tol 1e-6); margin max abs err {marg_err:.2e} (tol 1e-4)",
        elapsed,
    )


# ---------------------------------------------------------------------------
# criterion: Clayton closure


def test_clayton_closure():
    t0 = time.time()
    spec = get("S2").spec
    th = 2.0
    rng = np.random.default_rng(8)
    U = rng.uniform(0.01, 0.99, size=(1000, 3))
    s = (U**-th).sum(axis=1) - 2.0
    closed = (1 + th) * (1 + 2 * th) * np.prod(U, axis=1) ** (-th - 1) * s ** (-1 / th - 3)
    ours = spec.density_u(U[:, 0], U[:, 1], U[:, 2])
    err = float(np.max(np.abs(ours - closed)))
    cond_param = spec.c13_2.as_copula().params[0]
    param_ok = get("S2").expected["cond_param"].check(cond_param)
    elapsed = time.time() - t0
    _report(
        "clayton closure",
        err <= 1e-8 and param_ok and elapsed < 5.0,
        f"max abs err {err:.2e} (tol 1e-8); conditional parameter {cond_param:.4f} "
        f"= theta/(theta+1) rounds to 0.67",
        elapsed,
    )


# ---------------------------------------------------------------------------
# criterion: Frank closure


def test_frank_closure():
    t0 = time.time()
    spec = get("S7").spec
    u1s, u2s, u3s = sp.symbols("u1 u2 u3", positive=True)
    th = sp.Rational(8)
    E = sp.exp(-th) - 1
    P = (sp.exp(-th * u1s) - 1) * (sp.exp(-th * u2s) - 1) * (sp.exp(-th * u3s) - 1)
    C = -sp.log(1 + P / E**2) / th
    dens = sp.lambdify((u1s, u2s, u3s), sp.diff(C, u1s, u2s, u3s), modules="numpy")
    rng = np.random.default_rng(9)
    U = rng.uniform(0.01, 0.99, size=(1000, 3))
    closed = dens(U[:, 0], U[:, 1], U[:, 2])
    ours = spec.density_u(U[:, 0], U[:, 1], U[:, 2])
    rel = float(np.max(np.abs(ours / closed - 1.0)))
    elapsed = time.time() - t0
    _report(
        "frank closure",
        rel <= 1e-6 and elapsed < 10.0,
        f"max rel err {rel:.2e} (tol 1e-6) at 1000 points",
        elapsed,
    )


# ---------------------------------------------------------------------------
# criterion: tau-curve extrema


def test_tau_curve_extrema():
    t0 = time.time()
    grid = np.linspace(0.0, 1.0, 514)[1:-1]
    s5 = get("S5").spec.tau_curve(grid)
    s6 = get("S6").spec.tau_curve(grid)
    s8 = get("S8").spec.tau_curve(grid)
    ok5 = abs(s5.min() + 0.71) <= 0.01 and abs(s5.max() - 0.71) <= 0.01
    ok6 = (
        abs(s6.max() - 0.53) <= 0.01
        and abs(grid[s6.argmax()] - 0.5) <= 0.01
        and abs(s6.min()) <= 0.01
    )
    ok8 = abs(s8.min() + 0.39) <= 0.01 and abs(s8.max() - 0.71) <= 0.01
    elapsed = time.time() - t0
    _report(
        "tau-curve extrema",
        ok5 and ok6 and ok8 and elapsed < 5.0,
        f"S5 [{s5.min():.3f}, {s5.max():.3f}]; "
        f"S6 [{s6.min():.3f}, {s6.max():.3f}] peak at {grid[s6.argmax()]:.3f}; "
        f"S8 [{s8.min():.3f}, {s8.max():.3f}]",
        elapsed,
    )


# ---------------------------------------------------------------------------
# criterion: simplified-approximation recovery


def test_simplified_approximation_recovery():
    t0 = time.time()
    details = []
    ok = True

    ap5 = simplified_approx(get("S5").spec, n=100_000, seed=20).c13_2.as_copula()
    e5 = get("S5").expected
    ok5 = (
        ap5.family.value == get("S5").expected_labels["approx_family"]
        and abs(ap5.params[0]) <= 0.05
        and e5["approx_nu"].check(ap5.params[1])
    )
    details.append(f"S5 -> {ap5.family.value}{tuple(round(p, 3) for p in ap5.params)} "
                   f"vs reported (0.01, 2.15)")
    ok &= ok5

    ap8 = simplified_approx(get("S8").spec, n=100_000, seed=21).c13_2.as_copula()
    e8 = get("S8").expected
    ok8 = (
        ap8.family.value == get("S8").expected_labels["approx_family"]
        and e8["approx_rho"].check(ap8.params[0])
        and e8["approx_nu"].check(ap8.params[1])
    )
    details.append(f"S8 -> {ap8.family.value}{tuple(round(p, 3) for p in ap8.params)} "
                   f"vs reported (0.18, 2.6)")
    ok &= ok8

    ap7 = simplified_approx(get("S7").spec, n=100_000, seed=22).c13_2.as_copula()
    tau7 = ap7.tau()
    ok7 = get("S7").expected["approx_tau"].check(tau7)
    details.append(f"S7 -> conditional tau {tau7:.3f} vs reported 0.28")
    ok &= ok7

    elapsed = time.time() - t0
    _report(
        "simplified-approximation recovery",
        ok and elapsed < 300.0,
        "; ".join(details),
        elapsed,
    )


# ---------------------------------------------------------------------------
# criterion: simulation-study pipeline


def test_simulation_study_pipeline():
    t0 = time.time()
    entry = get("SIM5.1")
    d = entry.spec.simulate(3_000, seed=1).data

    fitted = fit_simplified_vine(d)
    c12, c23, cond = fitted.c12, fitted.c23, fitted.c13_2.as_copula()
    ok_structure = fitted.order == (1, 2, 3)
    ok12 = (
        c12.family.value == entry.expected_labels["fit_family_12"]
        and entry.expected["fit_theta_12"].check(c12.params[0])
    )
    ok23 = (
        c23.family.value == entry.expected_labels["fit_family_23"]
        and entry.expected["fit_rho_23"].check(c23.params[0])
        and entry.expected["fit_nu_23"].check(c23.params[1])
    )
    ok_cond = (
        cond.family is Family.STUDENT_T
        and abs(cond.params[0]) < 0.05
        and 2.0 < cond.params[1] < 12.0
    )

    _, curve = fit_nonsimplified_binned(d, bins=8, bootstrap=50, seed=1)
    neg = bool(np.all(curve.tau_hat[curve.grid < 0.4] < 0))
    pos = bool(np.all(curve.tau_hat[curve.grid > 0.6] > 0))
    rng_ok = -0.45 <= curve.tau_hat.min() and curve.tau_hat.max() <= 0.45
    elapsed = time.time() - t0
    _report(
        "simulation-study pipeline",
        ok_structure and ok12 and ok23 and ok_cond and neg and pos and rng_ok
        and elapsed < 300.0,
        f"{c12.family.value}({c12.params[0]:.3f}) vs reported 1.49; "
        f"{c23.family.value}{tuple(round(p, 3) for p in c23.params)} vs reported (0.04, 2.36); "
        f"conditional {cond.family.value}{tuple(round(p, 3) for p in cond.params)}; "
        f"binned tau range [{curve.tau_hat.min():.3f}, {curve.tau_hat.max():.3f}] "
        f"vs reported [-0.36, 0.38], sign split at 0.4/0.6 ok={neg and pos}",
        elapsed,
    )


# ---------------------------------------------------------------------------
# criterion: density bound


def test_density_bound_sim51():
    t0 = time.time()
    fld = sample_density(get("SIM5.1").spec, GridSpec.cube(-3, 3, 96))
    fmax = float(fld.values.max())
    mesh = marching_cubes(fld, 0.11)
    elapsed = time.time() - t0
    _report(
        "density bound",
        0.095 < fmax <= 0.102 and mesh.is_empty and elapsed < 60.0,
        f"96^3 grid max {fmax:.4f} in (0.095, 0.102]; 0.11-level mesh empty={mesh.is_empty}",
        elapsed,
    )


# ---------------------------------------------------------------------------
# criterion: bimodality


def test_bimodality_scenario5():
    t0 = time.time()
    fld = sample_density(get("S5").spec, GridSpec.cube(-3, 3, 96))
    mesh = marching_cubes(fld, 0.075)
    ncomp = mesh.n_components()
    elapsed = time.time() - t0
    _report(
        "bimodality",
        ncomp >= 2 and elapsed < 60.0,
        f"0.075-level mesh has {ncomp} connected components (needs >= 2)",
        elapsed,
    )


# ---------------------------------------------------------------------------
# criterion: property suites (representatives here; full suites live in the
# per-module test files and run with the same pytest invocation)


def test_property_suites_representatives():
    t0 = time.time()
    msgs = []

    # pair-density normalization
    cop = BivariateCopula(Family.BB1, 0, (2.0, 1.5))
    x, w = gauss_legendre_unit_clustered(192)
    mass = float(np.sum((w[:, None] * w[None, :]) * cop.pdf(x[:, None], x[None, :])))
    ok = abs(mass - 1.0) <= 1e-3
    msgs.append(f"pair normalization {mass:.5f}")

    # h-function / derivative consistency
    rng = np.random.default_rng(3)
    u, v = rng.uniform(0.05, 0.95, (2, 100))
    fd = (cop.cdf(u, v + 1e-4) - cop.cdf(u, v - 1e-4)) / 2e-4
    ok &= float(np.max(np.abs(fd - cop.hfunc2(u, v)))) <= 1e-5
    msgs.append("h-derivative consistency 1e-5")

    # hinv round trip
    rt = float(np.max(np.abs(cop.hinv2(cop.hfunc2(u, v), v) - u)))
    ok &= rt <= 1e-8
    msgs.append(f"hinv round trip {rt:.1e}")

    # Frechet bounds
    c = cop.cdf(u, v)
    ok &= bool(np.all(c >= np.maximum(u + v - 1, 0) - 1e-9) and np.all(c <= np.minimum(u, v) + 1e-9))
    msgs.append("Frechet bounds")

    # rotation closure
    ok &= bool(
        np.array_equal(
            BivariateCopula(Family.BB1, (0 + 360) % 360, (2.0, 1.5)).pdf(u, v), cop.pdf(u, v)
        )
    )
    msgs.append("rotation closure")

    # marching-cubes analytic sphere and level nesting
    g = GridSpec.cube(-2, 2, 48)
    X, Y, Z = np.meshgrid(*g.axes(), indexing="ij")
    fld = ScalarField3D(g, np.maximum(1 - np.sqrt(X**2 + Y**2 + Z**2), 0))
    mesh = marching_cubes(fld, 0.5)
    sphere_err = float(np.max(np.abs(np.linalg.norm(mesh.vertices, axis=1) - 0.5)))
    ok &= sphere_err <= g.spacing()[0]
    inner = marching_cubes(fld, 0.7)
    ok &= bool(np.all(fld.interp(inner.vertices) >= 0.5 - 1e-9))
    msgs.append(f"sphere err {sphere_err:.1e} <= h={g.spacing()[0]:.3f}; nesting")

    # mesh OBJ / JSON round trips
    back = read_obj(export_mesh(mesh, "obj"))
    ok &= float(np.max(np.abs(back.vertices - mesh.vertices))) < 1e-5
    back2 = IsoMesh.from_json(json.loads(export_mesh(mesh, "json").decode()))
    ok &= bool(np.array_equal(back2.triangles, mesh.triangles))
    msgs.append("OBJ/JSON round trips")

    elapsed = time.time() - t0
    _report("property suites (representatives)", ok, "; ".join(msgs), elapsed)


def test_property_simulate_then_refit_self_consistency():
    t0 = time.time()
    spec = get("S3").spec
    d = spec.simulate(100_000, seed=23).data
    fitted = fit_simplified_vine(d)
    # compare pair taus of the refitted model against the generator
    tau12 = fitted.c12.tau()
    tau23 = fitted.c23.tau()
    true12, true23 = spec.c12.tau(), spec.c23.tau()
    cond_tau = fitted.c13_2.as_copula().tau()
    true_cond = spec.c13_2.as_copula().tau()
    ok = (
        fitted.order == (1, 2, 3)
        and abs(tau12 - true12) <= 0.02
        and abs(tau23 - true23) <= 0.02
        and abs(cond_tau - true_cond) <= 0.02
    )
    elapsed = time.time() - t0
    _report(
        "simulate-then-refit self-consistency",
        ok and elapsed < 300.0,
        f"taus ({tau12:.3f}, {tau23:.3f}, {cond_tau:.3f}) vs "
        f"({true12:.3f}, {true23:.3f}, {true_cond:.3f}), tol 0.02 at N=1e5",
        elapsed,
    )


# ---------------------------------------------------------------------------
# criterion (conditional): uranium workflow


URANIUM_PATH = Path(os.environ.get("URANIUM_CSV", "tests/data/uranium.csv"))


@pytest.mark.skipif(not URANIUM_PATH.exists(), reason="user-supplied dataset not present")
def test_uranium_workflow():
    from trivine.kde import load_sample_csv, rank_transform

    t0 = time.time()
    raw = load_sample_csv(str(URANIUM_PATH))
    assert raw.shape == (655, 3)
    u = rank_transform(raw)
    center = select_structure(u)
    ok_structure = center == 2  # titanium sits on both unconditional edges

    fitted = fit_simplified_vine(u)
    c12, c23, cond = fitted.c12, fitted.c23, fitted.c13_2.as_copula()
    targets = [(0.74, 8.03), (0.63, 5.93), (0.08, 5.65)]
    fits = [c12, c23, cond]
    ok_fits = all(
        cop.family is Family.STUDENT_T
        and abs(cop.params[0] - rho) <= 0.05
        and abs(cop.params[1] - nu) <= 2.0
        for cop, (rho, nu) in zip(fits, targets)
    )

    _, curve = fit_nonsimplified_binned(u, bins=8, bootstrap=50, seed=2)
    low = curve.tau_hat[curve.grid <= 0.8]
    high = curve.tau_hat[curve.grid > 0.8]
    ok_curve = bool(np.all(low > 0)) and bool(np.all(high < 0)) if high.size else False
    elapsed = time.time() - t0
    _report(
        "uranium workflow",
        ok_structure and ok_fits and ok_curve,
        f"conditions on {center}; fits "
        + "; ".join(f"{c.family.value}{tuple(round(p, 2) for p in c.params)}" for c in fits)
        + f"; binned tau positive below 0.8 / negative above: {ok_curve}",
        elapsed,
    )
