"""Built-in verification suite, runnable from the CLI.

Each check re-derives its expected values from an independent route
(brute-force enumeration, plain finite differences, closed forms) and
reports the worst deviation it saw.  All sampling is seeded, so a given
seed yields byte-identical reports.
"""

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .bump import cutoff_eval, make_cutoff, scalar_blid_eval
from .cohomo import (
    check_resonances,
    solve_formal,
    solve_series,
    split_hyperbolic,
)
from .funcspace import GridFunction, blid_c01, integral_functional, sup_norm
from .polyalg import (
    eval_multilinear,
    hompoly_derivative,
    hompoly_eval,
    ln_matrix,
    monomial_basis,
    polarize,
    scalar_hompoly,
)

__all__ = ["CheckResult", "run_selftest"]


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str

    def to_dict(self):
        return {"name": self.name, "passed": bool(self.passed), "detail": self.detail}


def _random_hompoly(rng, dim, degree):
    return scalar_hompoly(
        dim, degree, {p: rng.uniform(-1.0, 1.0) for p in monomial_basis(dim, degree)}
    )


def _check_cutoff_profile(rng, samples):
    tau = make_cutoff(1.0 / 3.0, 1.0 / 2.0)
    worst = 0.0
    ok = True
    for s in np.linspace(-1.0, 1.0, samples):
        v = cutoff_eval(tau, s)
        ok &= 0.0 <= v <= 1.0
        if abs(s) <= tau.inner_radius:
            ok &= v == 1.0
        if abs(s) >= tau.outer_radius:
            ok &= v == 0.0
        h = scalar_blid_eval(tau, s)
        worst = max(worst, abs(h) - tau.outer_radius)
        if abs(s) <= tau.inner_radius:
            ok &= h == s
    return CheckResult("cutoff_profile", bool(ok and worst <= 0.0), f"blid overshoot {worst:.2e}")


def _check_cutoff_derivative(rng, samples):
    tau = make_cutoff(1.0 / 3.0, 1.0 / 2.0)
    worst = 0.0
    for s in np.linspace(0.0, 1.0, samples):
        h = 1e-4
        fd = (cutoff_eval(tau, s + h) - cutoff_eval(tau, s - h)) / (2.0 * h)
        fd2 = (cutoff_eval(tau, s + h / 2) - cutoff_eval(tau, s - h / 2)) / h
        richardson = (4.0 * fd2 - fd) / 3.0
        worst = max(worst, abs(cutoff_eval(tau, s, 1) - richardson))
    return CheckResult("cutoff_derivative_fd", worst <= 1e-6, f"worst deviation {worst:.2e}")


def _check_grid_blid(rng, samples):
    tau = make_cutoff(1.0 / 3.0, 1.0 / 2.0)
    ok = True
    worst = 0.0
    for _ in range(samples):
        scale = math.exp(rng.uniform(math.log(1e-3), math.log(100.0)))
        x = GridFunction(60, rng.uniform(-1.0, 1.0, 61) * scale)
        out = blid_c01(tau, x)
        worst = max(worst, sup_norm(out))
        if sup_norm(x) < 1.0 / 3.0:
            ok &= np.array_equal(out.values, x.values)
    return CheckResult(
        "grid_blid_bound_identity", bool(ok and worst <= 0.5), f"sup bound seen {worst:.4f}"
    )


def _check_extension_agreement(rng, samples):
    tau = make_cutoff(1.0 / 3.0, 1.0 / 2.0)
    worst = 0.0
    for _ in range(samples):
        x = GridFunction(100, rng.uniform(-1.0, 1.0, 101) * 0.32)
        worst = max(
            worst,
            abs(integral_functional(x) - integral_functional(x, extended=True, h=tau)),
        )
    big = GridFunction.constant(100, 10.0)
    finite = integral_functional(big, extended=True, h=tau) == 1.0
    return CheckResult(
        "extension_agreement", worst == 0.0 and finite, f"worst |F - f| = {worst:.2e}"
    )


def _check_polarization(rng, samples):
    worst = 0.0
    for _ in range(samples):
        dim = int(rng.integers(1, 4))
        degree = int(rng.integers(1, 5))
        P = _random_hompoly(rng, dim, degree)
        g = polarize(P)
        x = rng.uniform(-1.0, 1.0, dim)
        diag = eval_multilinear(g, [x] * degree)[0]
        direct = hompoly_eval(P, x)[0]
        worst = max(worst, abs(diag - direct) / max(1.0, abs(direct)))
    return CheckResult("polarization_diagonal", worst <= 1e-10, f"worst rel err {worst:.2e}")


def _check_derivative_formula(rng, samples):
    worst = 0.0
    for _ in range(samples):
        dim = int(rng.integers(1, 4))
        degree = int(rng.integers(1, 5))
        P = _random_hompoly(rng, dim, degree)
        z = rng.uniform(-1.0, 1.0, dim)
        x = rng.uniform(-1.0, 1.0, dim)
        formula = hompoly_derivative(P, z, x, 1)[0]
        h = 1e-4
        fd = (hompoly_eval(P, z + h * x)[0] - hompoly_eval(P, z - h * x)[0]) / (2.0 * h)
        fd2 = (hompoly_eval(P, z + h / 2 * x)[0] - hompoly_eval(P, z - h / 2 * x)[0]) / h
        richardson = (4.0 * fd2 - fd) / 3.0
        worst = max(worst, abs(formula - richardson) / max(1.0, abs(formula)))
    return CheckResult("derivative_formula_fd", worst <= 1e-6, f"worst rel err {worst:.2e}")


def _check_ln_matrix(rng, samples):
    lams = [0.4, -2.5, 1.7]
    worst = 0.0
    for n in (1, 2, 3):
        L = ln_matrix(np.diag(lams), n)
        expected = sorted(math.prod(l**e for l, e in zip(lams, p)) for p in monomial_basis(3, n))
        got = sorted(np.linalg.eigvals(L).real)
        worst = max(worst, float(np.max(np.abs(np.array(got) - np.array(expected)))))
    return CheckResult("ln_matrix_eigen_monomials", worst <= 1e-10, f"worst gap {worst:.2e}")


def _check_resonances(rng, samples):
    ok = True
    for _ in range(samples):
        m = int(rng.integers(1, 4))
        n_max = int(rng.integers(1, 5))
        eigs = [complex(rng.uniform(0.3, 2.5), rng.uniform(-0.3, 0.3)) for _ in range(m)]
        got = {p for p, _ in check_resonances(eigs, n_max, 1e-9)}
        brute = set()
        for exps in itertools.product(range(n_max + 1), repeat=m):
            if 1 <= sum(exps) <= n_max:
                val = math.prod(ev**e for ev, e in zip(eigs, exps))
                if abs(val - 1.0) <= 1e-9:
                    brute.add(exps)
        ok &= got == brute
    ok &= [p for p, _ in check_resonances([2.0, 0.5], 4, 1e-9)] == [(1, 1), (2, 2)]
    return CheckResult("resonance_enumeration", bool(ok), "matches brute force")


def _check_formal_vs_series(rng, samples):
    A = np.diag([0.5, 1.0 / 3.0])
    P = scalar_hompoly(2, 2, {(2, 0): 1.0, (1, 1): 1.0})
    Q = solve_formal(A, P)
    worst = 0.0
    for _ in range(samples):
        x = rng.normal(size=2)
        x /= max(1.0, float(np.linalg.norm(x)))
        series = solve_series(A, lambda y: hompoly_eval(P, y)[0], x, tol=1e-12)
        worst = max(worst, abs(hompoly_eval(Q, x)[0] - series.value))
    return CheckResult("formal_vs_series", worst <= 1e-8, f"worst gap {worst:.2e}")


def _check_projector_algebra(rng, samples):
    worst = 0.0
    for _ in range(samples):
        m = int(rng.integers(2, 4))
        radii = [rng.uniform(0.2, 0.7) if rng.random() < 0.5 else rng.uniform(1.4, 3.0) for _ in range(m)]
        signs = rng.choice([-1.0, 1.0], size=m)
        q, _ = np.linalg.qr(rng.normal(size=(m, m)))
        s = q + 0.2 * rng.normal(size=(m, m)) / math.sqrt(m)
        A = s @ np.diag(signs * np.array(radii)) @ np.linalg.inv(s)
        split = split_hyperbolic(A)
        pp, pm = split.proj_plus, split.proj_minus
        worst = max(
            worst,
            float(np.max(np.abs(pp @ pp - pp))),
            float(np.max(np.abs(pp + pm - np.eye(m)))),
            float(np.max(np.abs(A @ pp - pp @ A))),
        )
    return CheckResult("projector_algebra", worst <= 1e-8, f"worst defect {worst:.2e}")


_CHECKS = [
    (_check_cutoff_profile, 201),
    (_check_cutoff_derivative, 41),
    (_check_grid_blid, 100),
    (_check_extension_agreement, 50),
    (_check_polarization, 40),
    (_check_derivative_formula, 10),
    (_check_ln_matrix, 1),
    (_check_resonances, 5),
    (_check_formal_vs_series, 20),
    (_check_projector_algebra, 10),
]


def run_selftest(seed=0, samples=None):
    """Run every check; returns the list of :class:`CheckResult`."""
    results = []
    for fn, default_samples in _CHECKS:
        rng = np.random.default_rng(seed)
        results.append(fn(rng, samples or default_samples))
    return results
