"""Acceptance suite.

Each test realizes one acceptance criterion at its stated tolerance and
runtime budget and prints a one-line PASS report; any assertion failure is
the corresponding FAIL.  Oracles are independent of the code paths they
check: brute-force anticommutators, dense eigendecompositions, exact
rational arithmetic, dense grid searches, finite differences, derivative
factorization, and an adaptive ODE integrator.
"""

import itertools
import time

import numpy as np
from scipy.integrate import solve_ivp

from conftest import a1_hamiltonian, rand_field, random_reduced_point

from cliffpencil.clifford import (Pencil, SkewForm, build_clifford_module,
                                  cliffordize, pencil_from_module, verify_module)
from cliffpencil.fields import (Frame, apply_dirac, l2_inner, l2_norm,
                                mode_spectrum, su2_counterexample_residual)
from cliffpencil.hamiltonians import TrigHamiltonian
from cliffpencil.quaternion import Quaternion, _residual_at
from cliffpencil.reduction import (ReducedProblem, choose_truncation,
                                   fiber_scaling_rows, lemma_quadratic_diagnostic)
from cliffpencil.search import find_critical_points
from cliffpencil.config import presets
from cliffpencil.pipeline import build_problem, run

TWO_PI = 2.0 * np.pi


def _report(num, name, t0, detail=""):
    dt = time.time() - t0
    print(f"\nACCEPTANCE {num} PASS ({dt:.2f}s) {name}" + (f": {detail}" if detail else ""))


# ---------------------------------------------------------------------------
# 1. Algebra suite
# ---------------------------------------------------------------------------

def test_acceptance_01_algebra_suite():
    t0 = time.time()
    for r in (1, 2, 3, 4, 7, 8):
        mod = build_clifford_module(r)
        report = verify_module(mod.generators, mod.metric)
        assert report.ok
        assert report.max_violation == 0.0
    base = pencil_from_module(build_clifford_module(2))
    w1, w2 = base.forms
    perturbed = Pencil(forms=(w1, SkewForm(w1.matrix + w2.matrix)),
                       metric=base.metric)
    mod = cliffordize(perturbed)
    J1, J2 = mod.generators
    assert np.abs(J1 @ J2 + J2 @ J1).max() <= 1e-10
    assert np.abs(J1 @ J1 + np.eye(4)).max() <= 1e-10
    assert np.abs(J2 @ J2 + np.eye(4)).max() <= 1e-10
    assert time.time() - t0 < 1.0
    _report(1, "algebra suite (ranks 1,2,3,4,7,8 exact; cliffordize recovery)", t0)


# ---------------------------------------------------------------------------
# 2. Operator suite
# ---------------------------------------------------------------------------

def test_acceptance_02_operator_suite():
    t0 = time.time()
    rng = np.random.default_rng(2024)
    mod = build_clifford_module(2)
    frame = Frame(np.array([[1.0, 0.4], [-0.2, 0.9]]))
    for _ in range(100):
        f = rand_field(2, 4, 2, rng)
        g = rand_field(2, 4, 2, rng)
        defect = abs(l2_inner(apply_dirac(f, frame, mod), g)
                     - l2_inner(f, apply_dirac(g, frame, mod)))
        assert defect <= 1e-10 * l2_norm(f) * l2_norm(g)

    checked = 0
    mods = {r: build_clifford_module(r) for r in (1, 2, 3)}
    while checked < 1000:
        r = int(rng.integers(1, 4))
        A = rng.uniform(-2.0, 2.0, (r, r))
        if abs(np.linalg.det(A)) < 1e-6:
            continue
        k = rng.integers(-8, 9, size=r)
        if not np.any(k):
            continue
        fr = Frame(A)
        mu = TWO_PI * np.linalg.norm(fr.covector(k))
        spec = mode_spectrum(tuple(k), fr, mods[r])
        dv = mods[r].dim_v
        flat = sorted(v for v, m in spec for _ in range(m))
        expected = sorted([-mu] * (dv // 2) + [mu] * (dv // 2))
        assert np.abs(np.array(flat) - np.array(expected)).max() <= 1e-10 * max(1.0, mu)
        checked += 1
    assert time.time() - t0 < 5.0
    _report(2, "operator suite (self-adjointness x100; spectrum x1000)", t0)


# ---------------------------------------------------------------------------
# 3. SU(2) counterexample
# ---------------------------------------------------------------------------

def test_acceptance_03_su2_counterexample():
    t0 = time.time()
    assert su2_counterexample_residual((2, -1, -1)) == 0.0
    assert _residual_at(Quaternion(1), (1, 1, 1)) == Quaternion(-3)
    assert su2_counterexample_residual((1, 1, 1)) == 3.0
    assert time.time() - t0 < 1.0
    _report(3, "SU(2) pointwise kernel identity (exact rational arithmetic)", t0)


# ---------------------------------------------------------------------------
# 4. Contraction scaling
# ---------------------------------------------------------------------------

def test_acceptance_04_contraction_scaling():
    t0 = time.time()
    H = a1_hamiltonian()
    frame = Frame(np.array([[1.0]]))
    module = build_clifford_module(1)
    # base threshold as chosen for A1 (N0 = 10 pi); working box large
    # enough that the 4 N0 rung keeps excluded modes with tail room
    trunc = choose_truncation(H, frame, cutoff=48, q_max=0.25)
    prob = ReducedProblem(H, frame, module, trunc)
    rng = np.random.default_rng(11)
    slopes = []
    for _ in range(5):
        z = np.zeros(prob.n_dof)
        z[:2] = rng.uniform(0.0, 1.0, 2)
        z[2:] = 1.5 * rng.standard_normal(prob.n_fiber) / np.sqrt(prob.n_fiber)
        g = prob.unpack(z)
        rows = fiber_scaling_rows(H, frame, module, trunc, g)
        slope = np.polyfit(np.log([r["N_excl"] for r in rows]),
                           np.log([r["h_norm"] for r in rows]), 1)[0]
        slopes.append(float(slope))
    for slope in slopes:
        assert -1.3 <= slope <= -0.7
    assert time.time() - t0 < 30.0
    _report(4, "contraction scaling", t0,
            "slopes " + ", ".join(f"{s:.3f}" for s in slopes))


# ---------------------------------------------------------------------------
# 5. Gradient consistency
# ---------------------------------------------------------------------------

def test_acceptance_05_gradient_consistency(a1_problem):
    t0 = time.time()
    rng = np.random.default_rng(5)
    eps = 1e-6
    worst = 0.0
    for _ in range(20):
        z = random_reduced_point(a1_problem, rng, fiber_scale=0.4)
        F, _ = a1_problem.grad_packed(z)
        fd = np.empty_like(F)
        for i in range(a1_problem.n_dof):
            zp, zm = z.copy(), z.copy()
            zp[i] += eps
            zm[i] -= eps
            fd[i] = (a1_problem.phi(a1_problem.unpack(zp))
                     - a1_problem.phi(a1_problem.unpack(zm))) / (2 * eps)
        rel = np.linalg.norm(F - fd) / max(np.linalg.norm(fd), 1e-12)
        worst = max(worst, rel)
        assert rel <= 1e-5
    assert time.time() - t0 < 30.0
    _report(5, "gradient vs central differences (20 probes)", t0,
            f"worst relative error {worst:.2e}")


# ---------------------------------------------------------------------------
# 6. Instance A1
# ---------------------------------------------------------------------------

def test_acceptance_06_instance_a1():
    t0 = time.time()
    bundle = run(presets()["classical-T2"])
    assert bundle.error is None
    assert bundle.verdict["verdict"] == "PASS"
    assert bundle.verdict["count"] == 4
    assert bundle.verdict["SB"] == 4
    assert bundle.verdict["nondegenerate_case"]
    halves = {0.0, 0.5}
    for rec in bundle.records:
        assert rec["residual"] <= 1e-8
        assert rec["nondegenerate"]
        assert all(min(abs(c - h) for h in halves) <= 1e-8 for c in rec["x"])
    # oracle: hess H stays below the spectral gap, so solutions are exactly
    # the constants at critical points of H, enumerated on a dense grid
    H = a1_hamiltonian()
    xs = np.linspace(0.0, 1.0, 201)[:-1]
    tzero = np.zeros(1)
    hess_sup = max(np.linalg.norm(H.hess_x(tzero, np.array([a, b])), 2)
                   for a in xs[::4] for b in xs[::4])
    assert hess_sup < TWO_PI
    grid_crit = {(round(float(a), 4), round(float(b), 4))
                 for a in xs for b in xs
                 if np.linalg.norm(H.grad_x(tzero, np.array([a, b]))) < 1e-2}
    exact = {(a, b) for a in (0.0, 0.5) for b in (0.0, 0.5)}
    assert exact <= grid_crit
    assert all(any(abs(p[0] - e[0]) < 0.01 and abs(p[1] - e[1]) < 0.01
                   for e in exact) for p in grid_crit)
    assert time.time() - t0 < 60.0
    _report(6, "instance A1 classical T^2", t0, "4 records, PASS vs SB=4")


# ---------------------------------------------------------------------------
# 7. Instance A2
# ---------------------------------------------------------------------------

def test_acceptance_07_instance_a2():
    t0 = time.time()
    cfg = presets()["hyperkahler-T4"]
    assert cfg.cutoff <= 6
    bundle = run(cfg)
    assert bundle.error is None
    assert bundle.verdict["verdict"] == "PASS"
    assert bundle.verdict["count"] == 16
    assert bundle.verdict["SB"] == 16
    assert bundle.verdict["nondegenerate_case"]
    found = sorted(tuple(np.round(rec["x"], 6)) for rec in bundle.records)
    expected = sorted(tuple(float(v) for v in p)
                      for p in itertools.product((0.0, 0.5), repeat=4))
    assert found == expected
    # same oracle as A1 on the T^4 instance
    H = TrigHamiltonian(3, 4, cfg.hamiltonian)
    hess_sup = 0.05 * 4 * np.pi ** 2   # diagonal hessian, entries bounded by this
    assert hess_sup < TWO_PI
    assert time.time() - t0 < 600.0
    _report(7, "instance A2 hyperkahler T^4", t0, "16 records, PASS vs SB=16")


# ---------------------------------------------------------------------------
# 8. Instance A3
# ---------------------------------------------------------------------------

def test_acceptance_08_instance_a3():
    t0 = time.time()
    bundle = run(presets()["degenerate-T1"])
    assert bundle.error is None
    assert bundle.verdict["verdict"] == "PASS"
    assert bundle.verdict["count"] == 3
    assert bundle.verdict["CL_plus_1"] == 2
    assert not bundle.verdict["nondegenerate_case"]
    xs = sorted(rec["x"][0] for rec in bundle.records)
    assert abs(xs[0] - 0.0) < 1e-4
    assert abs(xs[1] - 1.0 / 3.0) < 1e-8
    assert abs(xs[2] - 2.0 / 3.0) < 1e-8
    flags = {round(rec["x"][0], 3): rec["nondegenerate"] for rec in bundle.records}
    assert flags[0.0] is False
    assert flags[round(1 / 3, 3)] is True
    assert flags[round(2 / 3, 3)] is True
    # oracle: H' is proportional to cos(2 pi x) - cos(4 pi x), which factors
    # exactly as 2 sin(pi x) sin(3 pi x): roots 0, 1/3, 2/3 with x = 0 double
    roots = sorted({0.0, 1.0 / 3.0, 2.0 / 3.0})
    for x in roots:
        assert abs(np.cos(TWO_PI * x) - np.cos(2 * TWO_PI * x)) < 1e-12
        assert abs(2 * np.sin(np.pi * x) * np.sin(3 * np.pi * x)
                   - (np.cos(TWO_PI * x) - np.cos(2 * TWO_PI * x))) < 1e-12
    # double root at 0: both factors vanish there and nowhere else in [0,1)
    assert np.sin(np.pi * 0.0) == 0.0 and np.sin(3 * np.pi * 0.0) == 0.0
    for x in roots[1:]:
        assert abs(np.sin(np.pi * x)) > 0.1
    assert time.time() - t0 < 30.0
    _report(8, "instance A3 degenerate T^1", t0,
            "3 records, double root flagged, PASS vs CL+1=2")


# ---------------------------------------------------------------------------
# 9. Time-dependent smoke test
# ---------------------------------------------------------------------------

def test_acceptance_09_time_dependent():
    t0 = time.time()
    cfg = presets()["timedep-T2"]
    assert cfg.starts == 200
    module, frame, H, trunc, problem, torus = build_problem(cfg)
    result = find_critical_points(problem, budget=cfg.starts, seed=cfg.seed,
                                  torus=torus, fiber_radius=cfg.fiber_radius)
    assert len(result.records) >= 4
    for rec in result.records:
        assert rec.residual <= 1e-8
        assert rec.lifted_residual <= 1e-8
    # independent oracle on a few records: integrate x' = -J grad H(t, x)
    # with an adaptive one-step method and match the lifted field over a
    # full period
    J = module.generators[0]
    for rec in result.records[:3]:
        g = rec.fiber.with_base(rec.x)
        f = g + problem.solve_fiber(g).h
        M = 64
        vals = f.grid_values(M)
        times = np.append(np.arange(M) / M, 1.0)
        sol = solve_ivp(lambda t, x: -J @ H.grad_x(np.array([t]), x),
                        (0.0, 1.0), vals[0], rtol=1e-11, atol=1e-12,
                        t_eval=times)
        assert sol.success
        assert np.abs(sol.y[:, :-1].T - vals).max() <= 1e-6
        assert np.abs(sol.y[:, -1] - vals[0]).max() <= 2e-6   # closes up
    assert time.time() - t0 < 300.0
    _report(9, "time-dependent smoke test", t0,
            f"{len(result.records)} records verified against ODE integration")


# ---------------------------------------------------------------------------
# 10. Quadratic-at-infinity diagnostic
# ---------------------------------------------------------------------------

def test_acceptance_10_lemma_quadratic(a1_problem):
    t0 = time.time()
    radii = [0.02 * 2 ** j for j in range(9)]     # 0.02 .. 5.12
    report = lemma_quadratic_diagnostic(a1_problem, radii, n_dirs=4, seed=3)
    crossover = report["crossover"]
    assert crossover is not None
    # fresh samples at radii beyond the reported crossover all satisfy the
    # inequality strictly
    confirm = lemma_quadratic_diagnostic(
        a1_problem, [r for r in radii if r >= crossover], n_dirs=6, seed=77)
    assert all(row["holds"] for row in confirm["rows"])
    assert time.time() - t0 < 60.0
    _report(10, "quadratic-at-infinity diagnostic on A1", t0,
            f"crossover radius {crossover}")
