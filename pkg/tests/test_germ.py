"""Germ extension and jet realization tests.

Jet fidelity is measured relative to the scale of each degree's
polynomial over the direction set (a pointwise-relative comparison breaks
down near directional roots of P_n, where no finite-difference scheme has
a bounded relative error).
"""

import math

import numpy as np
import pytest

from blidkit import (
    EuclideanSpace,
    GridFunction,
    GridSpace,
    HomPolyMap,
    JetSpec,
    LocalMap,
    OrderTooHigh,
    OutsideValidity,
    SupportExceedsValidity,
    c01_blid_map,
    continuity_bound,
    euclidean_blid_map,
    extend_by_bump,
    extend_germ,
    hompoly_eval,
    integral_functional,
    jet_extract,
    jet_scale_factors,
    make_cutoff,
    monomial_basis,
    realize_jet,
    scalar_hompoly,
    sup_norm,
    zero_hompoly,
)

TAU = make_cutoff(1.0 / 3.0, 1.0 / 2.0)


def test_local_map_guards_validity():
    f = LocalMap(lambda x: x @ x, 1.0, EuclideanSpace(2))
    assert f(np.array([0.5, 0.5])) == pytest.approx(0.5)
    with pytest.raises(OutsideValidity):
        f(np.array([2.0, 0.0]))


def test_extend_by_bump():
    f = LocalMap(lambda x: float(x @ x), 1.0, EuclideanSpace(2))
    F = extend_by_bump(f, TAU)
    assert F(np.zeros(2)) == 0.0
    assert F(np.array([10.0, 0.0])) == 0.0
    # plateau: tau(|x|^2) = 1 exactly, so F = f there
    for r in (0.1, 0.3, 0.5, math.sqrt(1.0 / 3.0) - 1e-9):
        x = np.array([r, 0.0])
        assert F(x) == f(x)
    # transition region: damped but nonzero
    x = np.array([0.65, 0.0])
    assert 0.0 < F(x) < f(x)

    tight = LocalMap(lambda x: float(x @ x), 0.5, EuclideanSpace(2))
    with pytest.raises(SupportExceedsValidity):
        extend_by_bump(tight, TAU)  # support sqrt(1/2) > 0.5


def test_extend_germ_euclidean():
    f = LocalMap(lambda x: float(x @ x), 1.0, EuclideanSpace(2), sup_bound=1.0)
    H = euclidean_blid_map(TAU)
    F = extend_germ(f, H)
    threshold = 1.0 * H.identity_radius / H.bound
    assert F.agreement_radius == pytest.approx(threshold)

    rng = np.random.default_rng(3)
    for _ in range(50):
        x = rng.normal(size=2)
        x *= rng.uniform(0.0, threshold) / np.linalg.norm(x)
        assert F(x) == f(x)  # exact: same code path

    # global bound: never exceeds the sup of f over the validity ball
    for scale in (2.0, 10.0, 100.0):
        x = rng.normal(size=2)
        x *= scale / np.linalg.norm(x)
        assert abs(F(x)) <= 1.0 + 1e-12

    const = LocalMap(lambda x: 7.5, 2.0, EuclideanSpace(2))
    Fc = extend_germ(const, H)
    for scale in (0.0, 1.0, 50.0):
        assert Fc(scale * np.ones(2)) == 7.5


def test_extend_germ_matches_extended_integral_functional():
    g = 200
    f = LocalMap(
        lambda x: integral_functional(x),
        validity_radius=0.5,
        domain=GridSpace(g),
        sup_bound=2.0,
    )
    H = c01_blid_map(TAU)
    F = extend_germ(f, H)
    assert F.agreement_radius == pytest.approx(1.0 / 3.0)

    rng = np.random.default_rng(4)
    # the two routes (germ extension vs composed integrand) agree bit-for-bit
    for scale in (0.1, 0.3, 0.45, 1.0, 10.0):
        x = GridFunction(g, rng.uniform(-1.0, 1.0, g + 1) * scale)
        assert F(x) == integral_functional(x, extended=True, h=TAU)

    ten = GridFunction.constant(g, 10.0)
    assert F(ten) == 1.0  # finite where the raw functional has poles

    small = GridFunction(g, rng.uniform(-1.0, 1.0, g + 1) * 0.32)
    assert sup_norm(small) < 1.0 / 3.0
    assert F(small) == integral_functional(small)


SCALES = [0.05, 1.0, 0.5, 0.1, 0.01]


def random_jet(rng, m=2, J=4):
    polys = []
    for j in range(J + 1):
        table = {p: SCALES[j] * rng.uniform(-1.0, 1.0) for p in monomial_basis(m, j)}
        polys.append(HomPolyMap(m, 1, j, (table,)))
    return JetSpec(m, J, tuple(polys))


def test_realize_jet_constant_only():
    jet = JetSpec(2, 0, (scalar_hompoly(2, 0, {(0, 0): 3.25}),))
    F = realize_jet(jet, TAU)
    for x in (np.zeros(2), np.array([0.1, -0.2]), np.array([40.0, 5.0])):
        assert F(x)[0] == 3.25


def test_realize_jet_linear_term():
    polys = (
        zero_hompoly(2, 1, 0),
        scalar_hompoly(2, 1, {(1, 0): 1.0}),
        zero_hompoly(2, 1, 2),
    )
    F = realize_jet(JetSpec(2, 2, polys), TAU)
    d1 = jet_extract(F, np.array([1.0, 0.0]), 1)[0]
    assert d1 == pytest.approx(1.0, rel=1e-8)
    # off-degree derivatives of the single summand vanish at 0
    assert abs(jet_extract(F, np.array([1.0, 0.0]), 2)[0]) <= 1e-8
    assert abs(jet_extract(F, np.array([1.0, 0.0]), 0)[0]) <= 1e-15


def test_jet_fidelity_and_global_bound():
    rng = np.random.default_rng(42)
    tau = TAU
    jet = random_jet(rng)
    F = realize_jet(jet, tau)
    dirs = [
        np.array([math.cos(a), math.sin(a)])
        for a in (2.0 * math.pi * k / 20.0 + 0.05 for k in range(20))
    ]
    for n in range(5):
        got = np.array([jet_extract(F, d, n)[0] for d in dirs])
        exact = np.array([hompoly_eval(jet.polys[n], d)[0] for d in dirs])
        scale = max(float(np.max(np.abs(exact))), 1e-12)
        assert float(np.max(np.abs(got - exact))) <= 1e-4 * scale

    # global boundedness by the certified summand bounds
    assert F.sup_bound is not None
    for _ in range(50):
        x = rng.normal(size=2)
        x *= 100.0 / np.linalg.norm(x)
        assert abs(F(x)[0]) <= F.sup_bound + 1e-12


def test_summand_bounds():
    rng = np.random.default_rng(5)
    jet = random_jet(rng)
    eps = jet_scale_factors(jet, TAU)
    base = euclidean_blid_map(TAU)
    for j, P in enumerate(jet.polys):
        bound = continuity_bound(P) * (eps[j] * base.bound) ** j
        for _ in range(30):
            x = rng.normal(size=2) * rng.uniform(0.0, 50.0)
            hj = eps[j] * base.evaluate(x / eps[j])
            assert abs(hompoly_eval(P, hj)[0]) <= bound + 1e-12


def test_jet_extract_plain_callable():
    F = lambda x: x[0] ** 2
    e1 = np.array([1.0, 0.0])
    assert jet_extract(F, e1, 2) == pytest.approx(2.0, abs=1e-9)
    assert abs(jet_extract(F, e1, 1)) <= 1e-12
    with pytest.raises(OrderTooHigh):
        jet_extract(F, e1, 6)


def test_jetspec_json_round_trip():
    import json

    rng = np.random.default_rng(6)
    jet = random_jet(rng)
    clone = JetSpec.from_dict(json.loads(json.dumps(jet.to_dict())))
    assert clone.dim == jet.dim and clone.truncation == jet.truncation
    for a, b in zip(clone.polys, jet.polys):
        assert a.coeffs == b.coeffs
