"""Acceptance criteria, one test per criterion, at their stated tolerances.

Each test prints a single PASS/FAIL line (run with ``pytest -s`` to see
them live) and asserts both the tolerance and the runtime budget.
"""

import itertools
import math
import time

import numpy as np
import pytest

from blidkit import (
    CohomologicalProblem,
    GridFunction,
    HomPolyMap,
    JetSpec,
    PoleOnGrid,
    Projector,
    SingularResonance,
    blid_c01,
    c01_blid_map,
    check_resonances,
    continuity_bound,
    euclidean_blid_map,
    eval_multilinear,
    extend_germ,
    flat_split,
    globalize,
    hompoly_derivative,
    hompoly_eval,
    integral_functional,
    jet_extract,
    jet_scale_factors,
    make_cutoff,
    monomial_basis,
    polarize,
    realize_jet,
    restricted_blid_map,
    scalar_hompoly,
    solve_cohomological,
    solve_formal,
    solve_series,
    split_hyperbolic,
    sup_norm,
    taylor_term,
    vanishing_split,
)
from blidkit.errors import OutsideValidity
from blidkit.fd import directional_derivative, nth_derivative
from blidkit.germ import GridSpace, LocalMap

TAU = make_cutoff(1.0 / 3.0, 1.0 / 2.0)


def _report(num, label, passed, detail, elapsed, budget):
    status = "PASS" if passed and elapsed < budget else "FAIL"
    print(f"{status} criterion {num} ({label}): {detail} [{elapsed:.2f}s / {budget:.0f}s]")
    assert passed, f"criterion {num}: {detail}"
    assert elapsed < budget, f"criterion {num} exceeded runtime budget ({elapsed:.2f}s)"


def test_criterion_1_extension_agreement():
    start = time.perf_counter()
    g = 200
    f_local = LocalMap(lambda x: integral_functional(x), 0.5, GridSpace(g))
    F = extend_germ(f_local, c01_blid_map(TAU))
    threshold = F.agreement_radius
    rng = np.random.default_rng(101)
    worst = 0.0
    for _ in range(500):
        x = GridFunction(g, rng.uniform(-1.0, 1.0, g + 1) * 0.999 * threshold)
        assert sup_norm(x) < threshold
        worst = max(worst, abs(F(x) - integral_functional(x)))
    ten = GridFunction.constant(g, 10.0)
    extended_finite = math.isfinite(F(ten))
    raw_undefined = False
    try:
        integral_functional(ten)
    except PoleOnGrid:
        raw_undefined = True
    elapsed = time.perf_counter() - start
    passed = worst == 0.0 and extended_finite and raw_undefined
    _report(1, "extension agreement", passed, f"max |F-f| = {worst:.1e}, F(10) finite", elapsed, 1.0)


def test_criterion_2_blid_bounds():
    start = time.perf_counter()
    rng = np.random.default_rng(202)
    worst_bound = 0.0
    identity_exact = True
    checked_small = 0
    for _ in range(1000):
        scale = math.exp(rng.uniform(math.log(1e-3), math.log(100.0)))
        x = GridFunction(50, rng.uniform(-1.0, 1.0, 51) * scale)
        out = blid_c01(TAU, x)
        worst_bound = max(worst_bound, sup_norm(out))
        if sup_norm(x) < 1.0 / 3.0:
            checked_small += 1
            identity_exact &= np.array_equal(out.values, x.values)
    elapsed = time.perf_counter() - start
    passed = worst_bound <= 0.5 and identity_exact and checked_small > 50
    _report(
        2,
        "blid bounds",
        passed,
        f"sup H <= {worst_bound:.4f}, identity exact on {checked_small} small inputs",
        elapsed,
        1.0,
    )


def test_criterion_3_polynomial_calculus():
    start = time.perf_counter()
    rng = np.random.default_rng(314159)
    worst_diag = worst_deriv = worst_zdep = 0.0
    for _ in range(200):
        m = int(rng.integers(1, 4))
        j = int(rng.integers(1, 5))
        n = int(rng.integers(1, j + 1))
        P = scalar_hompoly(m, j, {p: rng.uniform(-1, 1) for p in monomial_basis(m, j)})
        z = rng.uniform(-1, 1, m)
        x = rng.uniform(-1, 1, m)
        g = polarize(P)
        diag = eval_multilinear(g, [x] * j)[0]
        direct = hompoly_eval(P, x)[0]
        worst_diag = max(worst_diag, abs(diag - direct) / max(abs(direct), 1e-12))
        formula = hompoly_derivative(P, z, x, n)[0]
        fdval, _ = nth_derivative(lambda s: hompoly_eval(P, z + s * x)[0], 0.0, n, 0.4)
        worst_deriv = max(worst_deriv, abs(formula - fdval) / max(abs(formula), 1e-12))
        a = hompoly_derivative(P, rng.normal(size=m), x, j)[0]
        b = hompoly_derivative(P, rng.normal(size=m), x, j)[0]
        worst_zdep = max(worst_zdep, abs(a - b))
    elapsed = time.perf_counter() - start
    passed = worst_diag <= 1e-10 and worst_deriv <= 1e-6 and worst_zdep <= 1e-12
    _report(
        3,
        "polynomial calculus",
        passed,
        f"diag {worst_diag:.1e}, deriv-vs-FD {worst_deriv:.1e}, z-dep {worst_zdep:.1e}",
        elapsed,
        5.0,
    )


JET_SCALES = [0.05, 1.0, 0.5, 0.1, 0.01]


def test_criterion_4_borel_lemma():
    start = time.perf_counter()
    rng = np.random.default_rng(42)
    dirs = [
        np.array([math.cos(a), math.sin(a)])
        for a in (2.0 * math.pi * k / 20.0 + 0.05 for k in range(20))
    ]
    worst = 0.0
    bound_ok = True
    for _ in range(3):
        polys = []
        for j in range(5):
            table = {p: JET_SCALES[j] * rng.uniform(-1, 1) for p in monomial_basis(2, j)}
            polys.append(HomPolyMap(2, 1, j, (table,)))
        jet = JetSpec(2, 4, tuple(polys))
        F = realize_jet(jet, TAU)
        for n in range(5):
            got = np.array([jet_extract(F, d, n)[0] for d in dirs])
            exact = np.array([hompoly_eval(jet.polys[n], d)[0] for d in dirs])
            scale = max(float(np.max(np.abs(exact))), 1e-12)
            worst = max(worst, float(np.max(np.abs(got - exact))) / scale)
        for _ in range(20):
            x = rng.normal(size=2)
            x *= 100.0 / np.linalg.norm(x)
            bound_ok &= abs(F(x)[0]) <= F.sup_bound + 1e-12
    elapsed = time.perf_counter() - start
    passed = worst <= 1e-4 and bound_ok
    _report(
        4,
        "Borel lemma",
        passed,
        f"worst extraction err {worst:.1e} (rel. to P_n scale), bounded at |x|=100",
        elapsed,
        10.0,
    )


def test_criterion_5_resonances():
    start = time.perf_counter()
    rng = np.random.default_rng(505)
    all_equal = True
    for _ in range(50):
        m = int(rng.integers(1, 5))
        n_max = int(rng.integers(1, 6))
        eigs = []
        for _ in range(m):
            if rng.random() < 0.3 and eigs:
                eigs.append(1.0 / eigs[-1])
            else:
                eigs.append(complex(rng.uniform(0.2, 3.0), rng.uniform(-0.5, 0.5)))
        got = {p for p, _ in check_resonances(eigs, n_max, 1e-9)}
        brute = set()
        for exps in itertools.product(range(n_max + 1), repeat=m):
            if 1 <= sum(exps) <= n_max:
                val = math.prod(complex(ev) ** e for ev, e in zip(eigs, exps))
                if abs(val - 1.0) <= 1e-9:
                    brute.add(exps)
        all_equal &= got == brute
    saddle = [p for p, _ in check_resonances([2.0, 0.5], 4, 1e-9)]
    elapsed = time.perf_counter() - start
    passed = all_equal and saddle == [(1, 1), (2, 2)]
    _report(5, "resonances", passed, f"50 spectra match brute force, saddle hits {saddle}", elapsed, 2.0)


def test_criterion_6_formal_vs_series():
    start = time.perf_counter()
    A = np.diag([0.5, 1.0 / 3.0])
    P2 = taylor_term(scalar_hompoly(2, 2, {(2, 0): 1.0, (1, 1): 1.0}))
    problem = CohomologicalProblem(A, (P2,), degree_cap=2)
    g, _ = solve_cohomological(problem)
    f = problem.poly_evaluator()
    rng = np.random.default_rng(606)
    worst = 0.0
    for _ in range(50):
        x = rng.normal(size=2)
        x *= rng.uniform(0.0, 1.0) / np.linalg.norm(x)
        series = solve_series(A, f, x, "contraction", tol=1e-12)
        worst = max(worst, abs(g(x) - series.value))
    Q = solve_formal(np.array([[0.5]]), scalar_hompoly(1, 2, {(2,): 1.0}))
    scalar_gap = abs(Q.coeffs[0][(2,)] + 4.0 / 3.0)
    elapsed = time.perf_counter() - start
    passed = worst <= 1e-8 and scalar_gap <= 1e-12
    _report(
        6,
        "formal vs series",
        passed,
        f"max gap {worst:.1e} over 50 points, scalar closed form off by {scalar_gap:.1e}",
        elapsed,
        2.0,
    )


def test_criterion_7_hyperbolic_pipeline():
    start = time.perf_counter()
    A = np.diag([0.5, 2.0])
    P2 = taylor_term(scalar_hompoly(2, 2, {(2, 0): 1.0, (0, 2): 1.0}))
    problem = CohomologicalProblem(A, (P2,), degree_cap=2)
    g, report = solve_cohomological(problem, box_halfwidth=3.0, samples=10000, seed=7)
    residual = report.global_residual

    resonant_ok = False
    hits = []
    try:
        bad = CohomologicalProblem(
            np.diag([2.0, 0.5]),
            (taylor_term(scalar_hompoly(2, 2, {(1, 1): 1.0})),),
            degree_cap=2,
        )
        solve_cohomological(bad)
    except SingularResonance as exc:
        resonant_ok = (1, 1) in exc.multi_indices
        hits = exc.multi_indices
    elapsed = time.perf_counter() - start
    passed = residual <= 1e-10 and resonant_ok
    _report(
        7,
        "hyperbolic pipeline",
        passed,
        f"residual {residual:.1e} at 1e4 points, resonant case reports {hits}",
        elapsed,
        5.0,
    )


def test_criterion_8_vanishing_split_and_globalization():
    start = time.perf_counter()
    A = np.diag([0.5, 2.0])
    split = split_hyperbolic(A)
    delta = 0.3

    def v(x):
        m = split.split_max_norm(x)
        return max(0.0, m - delta) ** 3 * float(np.asarray(x)[0])

    h_minus = restricted_blid_map(
        euclidean_blid_map(make_cutoff(0.0125, 0.05)), Projector(split.proj_minus)
    )
    eps = h_minus.identity_radius
    v_plus, v_minus = vanishing_split(v, delta, split, h_minus)
    rng = np.random.default_rng(808)
    strips_exact = True
    for _ in range(200):
        x = rng.uniform(-4.0, 4.0, 2)
        xp = x.copy()
        xp[0] = rng.uniform(-0.99 * eps, 0.99 * eps)
        strips_exact &= v_plus(xp) == 0.0
        xm = x.copy()
        xm[1] = rng.uniform(-0.99 * eps, 0.99 * eps)
        strips_exact &= v_minus(xm) == 0.0

    P2 = taylor_term(scalar_hompoly(2, 2, {(2, 0): 1.0, (0, 2): 1.0}))
    problem = CohomologicalProblem(A, (P2,), degree_cap=2)

    def g_poly(x):
        return -4.0 / 3.0 * float(x[0]) ** 2 + 1.0 / 3.0 * float(x[1]) ** 2

    def psi(x):
        m = split.split_max_norm(x)
        return max(0.0, m - 2.0 * delta) ** 3 * math.cos(float(np.asarray(x)[0]))

    gamma0 = lambda x: g_poly(x) + psi(x)
    result = globalize(gamma0, problem, split, h_minus, delta, box_halfwidth=5.0, seed=8)
    k0_bound = math.ceil(math.log(5.0 / eps) / math.log(2.0)) + 1
    elapsed = time.perf_counter() - start
    passed = (
        strips_exact
        and result.k0_plus <= k0_bound
        and result.k0_minus <= k0_bound
        and result.residual_sup <= 1e-6
    )
    _report(
        8,
        "vanishing split + globalization",
        passed,
        f"strips exact, k0 = ({result.k0_plus}, {result.k0_minus}) <= {k0_bound}, "
        f"residual {result.residual_sup:.1e}",
        elapsed,
        10.0,
    )


def flat_f0(x):
    x = np.asarray(x, dtype=float)
    r2 = float(x @ x)
    if r2 == 0.0:
        return 0.0
    return math.exp(-1.0 / r2) * float(x[0])


def test_criterion_9_flat_split():
    start = time.perf_counter()
    A = np.diag([0.5, 2.0])
    split = split_hyperbolic(A)
    blid = euclidean_blid_map(TAU)
    dec = flat_split(flat_f0, split, blid, J=3)

    dirs = [np.array([1.0, 0.0]), np.array([0.0, 1.0]), np.array([1.0, 1.0]) / math.sqrt(2.0)]
    worst_deriv = 0.0
    sum_exact = True
    for t in (0.1, 0.2, 0.3, 0.4, -0.25):
        x = np.array([t, 0.0])  # X_+ point inside U
        sum_exact &= dec.f_plus(x) + dec.f_minus(x) == flat_f0(x)
        for d in dirs:
            for order in (1, 2, 3):
                val, _ = directional_derivative(dec.f_plus, x, d, order, 0.05)
                worst_deriv = max(worst_deriv, abs(float(val)))
    rng = np.random.default_rng(909)
    for _ in range(20):
        x = rng.uniform(-2.0, 2.0, 2)
        sum_exact &= dec.f_plus(x) + dec.f_minus(x) == flat_f0(x)
    elapsed = time.perf_counter() - start
    passed = worst_deriv <= 1e-4 and sum_exact
    _report(
        9,
        "flat split",
        passed,
        f"worst f_+ derivative at X_+ {worst_deriv:.1e}, sum identity exact",
        elapsed,
        10.0,
    )


def test_criterion_10_projector_algebra():
    start = time.perf_counter()
    rng = np.random.default_rng(1010)
    worst = 0.0
    contraction_ok = True
    count = 0
    while count < 100:
        m = int(rng.integers(2, 5))
        radii = [
            rng.uniform(0.2, 0.7) if rng.random() < 0.5 else rng.uniform(1.4, 3.5)
            for _ in range(m)
        ]
        signs = rng.choice([-1.0, 1.0], size=m)
        q, _ = np.linalg.qr(rng.normal(size=(m, m)))
        s = q + 0.25 * rng.normal(size=(m, m)) / math.sqrt(m)
        try:
            A = s @ np.diag(signs * np.array(radii)) @ np.linalg.inv(s)
            split = split_hyperbolic(A)
        except Exception:
            continue
        count += 1
        pp, pm = split.proj_plus, split.proj_minus
        worst = max(
            worst,
            float(np.max(np.abs(pp @ pp - pp))),
            float(np.max(np.abs(pm @ pm - pm))),
            float(np.max(np.abs(pp @ pm))),
            float(np.max(np.abs(pp + pm - np.eye(m)))),
            float(np.max(np.abs(A @ pp - pp @ A))),
        )
        x = rng.normal(size=m)
        xp = split.project_plus(x)
        if split.dim_plus > 0 and np.linalg.norm(xp) > 1e-10:
            contraction_ok &= split.adapted_plus_norm(A @ xp) <= split.q * (
                1.0 + 1e-12
            ) * split.adapted_plus_norm(xp)
        xm = split.project_minus(x)
        if split.dim_minus > 0 and np.linalg.norm(xm) > 1e-10:
            contraction_ok &= split.adapted_minus_norm(
                np.linalg.solve(A, xm)
            ) <= split.q * (1.0 + 1e-12) * split.adapted_minus_norm(xm)
    elapsed = time.perf_counter() - start
    passed = worst <= 1e-8 and contraction_ok
    _report(
        10,
        "projector algebra",
        passed,
        f"worst invariant defect {worst:.1e} over 100 matrices, adapted contraction holds",
        elapsed,
        5.0,
    )
