"""Germ extension and jet realization.

A germ at 0 is represented by a :class:`LocalMap` (an evaluator valid on a
closed ball) and extended to the whole space either through a radial bump
(``F = delta * f``, finite dimensions only) or through a blid map
(``F = f o H_1`` with the rescaled blid ``H_1`` mapping everything into
the validity ball).  The blid route works verbatim on grid-function space,
where no smooth bump exists.

``realize_jet`` builds a globally bounded smooth map whose directional
derivatives at 0 reproduce a prescribed finite jet {P_0, ..., P_J}:

    f(x) = sum_j (1/j!) P_j(H_j(x)),      H_j(x) = eps_j H(x / eps_j),

with the scale schedule eps_j chosen from certified coefficient bounds so
that every summand (and each derivative up to the truncation order) is
globally small; near 0 every H_j is the identity and f is literally the
polynomial sum, which is what makes finite-difference jet extraction
exact up to roundoff inside the agreement radius.
"""

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from . import fd
from .bump import ScalarCutoff, cutoff_eval
from .errors import (
    DegreeTooHigh,
    DimensionMismatch,
    OrderTooHigh,
    OutsideValidity,
    SupportExceedsValidity,
)
from .funcspace import BlidMap, GridFunction, euclidean_blid_map, rescale_blid, space_norm
from .polyalg import HomPolyMap, continuity_bound, derivative_continuity_bound, hompoly_eval

__all__ = [
    "EuclideanSpace",
    "GridSpace",
    "LocalMap",
    "GlobalMap",
    "JetSpec",
    "extend_by_bump",
    "extend_germ",
    "jet_scale_factors",
    "realize_jet",
    "jet_extract",
]


@dataclass(frozen=True)
class EuclideanSpace:
    """R^m with the Euclidean norm."""

    dim: int

    def norm(self, x):
        return float(np.linalg.norm(np.asarray(x, dtype=float)))

    def zero(self):
        return np.zeros(self.dim)


@dataclass(frozen=True)
class GridSpace:
    """Discretized C[0,1] with the sup norm."""

    grid_size: int

    def norm(self, x):
        return space_norm(x)

    def zero(self):
        return GridFunction.zeros(self.grid_size)


@dataclass(frozen=True)
class LocalMap:
    """A representative of a germ at 0, valid on the closed validity ball."""

    evaluator: Callable
    validity_radius: float
    domain: object
    sup_bound: Optional[float] = None

    def __post_init__(self):
        if self.validity_radius <= 0.0:
            raise ValueError("validity_radius must be positive")

    def __call__(self, x):
        r = self.domain.norm(x)
        if r > self.validity_radius * (1.0 + 1e-12):
            raise OutsideValidity(
                f"local map queried at norm {r:.6g} > validity {self.validity_radius:.6g}"
            )
        return self.evaluator(x)


@dataclass(frozen=True)
class GlobalMap:
    """A map defined on the whole space.

    ``sup_bound`` is an optional certified bound on the output norm;
    ``agreement_radius`` is the radius within which the map coincides
    exactly with the local data it was built from.
    """

    evaluator: Callable
    sup_bound: Optional[float] = None
    agreement_radius: Optional[float] = None

    def __call__(self, x):
        return self.evaluator(x)


def extend_by_bump(f, tau):
    """Classical bump extension F = tau(|x|^2) f(x), zero outside the support.

    Only available on R^m (a smooth bump needs a smooth squared norm); the
    support radius sqrt(outer) must sit strictly inside the validity ball
    so f is never queried beyond its contract.
    """
    if not isinstance(f.domain, EuclideanSpace):
        raise DimensionMismatch("bump extension is defined on Euclidean domains only")
    support = math.sqrt(tau.outer_radius)
    if support >= f.validity_radius:
        raise SupportExceedsValidity(
            f"bump support {support:.6g} must lie strictly inside validity "
            f"{f.validity_radius:.6g}"
        )
    zero_out = 0.0 * np.asarray(f(f.domain.zero()), dtype=float)

    def evaluate(x):
        x = np.asarray(x, dtype=float)
        r2 = float(x @ x)
        if r2 >= tau.outer_radius:
            return zero_out.copy() if zero_out.ndim else float(zero_out)
        return cutoff_eval(tau, r2) * np.asarray(f(x), dtype=float)

    return GlobalMap(evaluate, agreement_radius=math.sqrt(tau.inner_radius))


def extend_germ(f, H):
    """Global representative F = f(H_1(x)) through the rescaled blid H_1.

    H_1 maps the whole space into the validity ball of f and is the
    identity for norm(x) < eps * n / N, which is where F coincides with f
    (same code path, hence exact equality in floating point).
    """
    eps = f.validity_radius
    h1 = rescale_blid(H, eps)
    agreement = h1.identity_radius

    def evaluate(x):
        return f(h1.evaluate(x))

    return GlobalMap(evaluate, sup_bound=f.sup_bound, agreement_radius=agreement)


@dataclass(frozen=True)
class JetSpec:
    """Finite jet at 0: polynomials P_0..P_J with degree(P_j) = j."""

    dim: int
    truncation: int
    polys: tuple

    def __post_init__(self):
        if len(self.polys) != self.truncation + 1:
            raise DimensionMismatch(
                f"need {self.truncation + 1} polynomials P_0..P_{self.truncation}"
            )
        codims = set()
        for j, P in enumerate(self.polys):
            if P.degree != j:
                raise ValueError(f"polys[{j}] has degree {P.degree}, expected {j}")
            if P.dim != self.dim:
                raise DimensionMismatch(f"polys[{j}] has dim {P.dim}, expected {self.dim}")
            codims.add(P.codim)
        if len(codims) > 1:
            raise DimensionMismatch(f"mixed codomain dimensions {codims}")

    @property
    def codim(self):
        return self.polys[0].codim

    def to_dict(self):
        return {
            "dim": self.dim,
            "J": self.truncation,
            "polys": [P.to_dict() for P in self.polys],
        }

    @classmethod
    def from_dict(cls, data):
        polys = tuple(HomPolyMap.from_dict(p) for p in data["polys"])
        return cls(int(data["dim"]), int(data["J"]), polys)


def jet_scale_factors(jet, tau):
    """Deterministic scale schedule eps_j for the jet summands.

    eps_0 = 1; for j >= 1,

        eps_j = min(1, (2^-j / (1 + max_{n<j} c_hat_{j,n}))^(1/(j - n*)))

    where c_hat_{j,n} is the certified derivative bound of P_j and n* the
    (first) maximizing order.  This keeps the certified bound of every
    summand derivative of order n < j at most 2^-j, so the truncated sum
    and its tested derivatives stay uniformly small.
    """
    eps = [1.0]
    for j in range(1, jet.truncation + 1):
        P = jet.polys[j]
        cands = [derivative_continuity_bound(P, n) for n in range(j)]
        cmax = max(cands)
        nstar = cands.index(cmax)
        exponent = 1.0 / (j - nstar)
        eps.append(min(1.0, (2.0**-j / (1.0 + cmax)) ** exponent))
    return eps


def realize_jet(jet, tau):
    """Globally bounded smooth map whose jet at 0 is the given one.

    Desk-scale caps: dim <= 3 and truncation <= 5.  Returns a
    :class:`GlobalMap` whose ``sup_bound`` is the certified sum of summand
    bounds and whose ``agreement_radius`` is the ball on which the map
    equals the plain polynomial sum sum_j P_j(x) / j!.
    """
    if jet.dim > 3:
        raise DegreeTooHigh(f"jet realization capped at dim 3, got {jet.dim}")
    if jet.truncation > 5:
        raise DegreeTooHigh(f"jet realization capped at truncation 5, got {jet.truncation}")
    base = euclidean_blid_map(tau)
    eps = jet_scale_factors(jet, tau)
    # H_j(x) = eps_j H(x/eps_j) == rescale of the base blid to bound eps_j * N
    blids = [rescale_blid(base, e * base.bound) for e in eps]
    inv_fact = [1.0 / math.factorial(j) for j in range(jet.truncation + 1)]

    def evaluate(x):
        x = np.asarray(x, dtype=float)
        out = np.zeros(jet.codim)
        for j, P in enumerate(jet.polys):
            out += inv_fact[j] * hompoly_eval(P, blids[j].evaluate(x))
        return out

    sup_bound = sum(
        inv_fact[j] * continuity_bound(P) * (eps[j] * base.bound) ** j
        for j, P in enumerate(jet.polys)
    )
    active = [
        eps[j] * base.identity_radius
        for j in range(1, jet.truncation + 1)
        if continuity_bound(jet.polys[j]) > 0.0
    ]
    agreement = min(active) if active else base.identity_radius
    return GlobalMap(evaluate, sup_bound=sup_bound, agreement_radius=agreement)


_STENCIL_REACH = {0: 0, 1: 1, 2: 1, 3: 2, 4: 2, 5: 3}


def jet_extract(F, x_dir, n, h0=None):
    """n-th directional derivative of F at 0 along ``x_dir`` (n <= 5).

    Uses extrapolated central differences on s -> F(s * x_dir).  When F
    carries an ``agreement_radius`` the initial step is sized so all
    stencil points stay inside it, where jet realizations are exactly
    polynomial and the extrapolation bottoms out at roundoff level.
    """
    if n > fd.MAX_ORDER:
        raise OrderTooHigh(f"jet extraction certified up to order {fd.MAX_ORDER}, got {n}")
    direction = np.asarray(x_dir, dtype=float)
    evaluate = F.evaluator if isinstance(F, GlobalMap) else F
    if n == 0:
        return np.asarray(evaluate(0.0 * direction), dtype=float)
    if h0 is None:
        radius = getattr(F, "agreement_radius", None) or 0.4
        dir_norm = float(np.linalg.norm(direction))
        reach = max(_STENCIL_REACH[n], 1)
        h0 = 0.9 * radius / (reach * max(dir_norm, 1e-300))
    value, _ = fd.nth_derivative(lambda s: evaluate(s * direction), 0.0, n, h0)
    return value
