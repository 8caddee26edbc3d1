"""Discretized C[0,1] and the bounded-local-identity map constructions.

Functions on [0,1] are stored as uniform samples (a :class:`GridFunction`
with values at t_i = i/G) under the sup norm.  On top of that sit the
pointwise blid map ``H(x)(t) = h(x(t)) * x(t)``, rescaled blids, blids
restricted through projectors, the segment blid, and the extended
integral functional ``x -> integral dt / (1 - h(x(t)))``.

Vectors in R^m (numpy arrays) are normed with the Euclidean norm and get
their blid from the radial bump ``x -> tau(|x|^2) x``; grid functions use
the sup norm.  ``space_norm`` dispatches between the two.
"""

import csv
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .bump import ScalarCutoff, scalar_blid_eval, cutoff_eval
from .errors import DimensionMismatch, GridMismatch, NotInImage, PoleOnGrid

__all__ = [
    "GridFunction",
    "sup_norm",
    "space_norm",
    "BlidMap",
    "blid_c01",
    "c01_blid_map",
    "euclidean_blid_map",
    "rescale_blid",
    "Projector",
    "restrict_blid",
    "restricted_blid_map",
    "SegmentSpec",
    "blid_at_segment",
    "integral_functional",
]


@dataclass(frozen=True, eq=False)
class GridFunction:
    """Uniform sampling of a function on [0,1]: values at t_i = i/G, i = 0..G."""

    grid_size: int
    values: np.ndarray

    def __post_init__(self):
        if self.grid_size < 2:
            raise ValueError(f"grid_size must be >= 2, got {self.grid_size}")
        vals = np.asarray(self.values, dtype=float)
        if vals.shape != (self.grid_size + 1,):
            raise GridMismatch(
                f"expected {self.grid_size + 1} samples, got shape {vals.shape}"
            )
        if not np.all(np.isfinite(vals)):
            raise ValueError("grid values must be finite")
        object.__setattr__(self, "values", vals)

    @classmethod
    def constant(cls, grid_size, value):
        return cls(grid_size, np.full(grid_size + 1, float(value)))

    @classmethod
    def zeros(cls, grid_size):
        return cls.constant(grid_size, 0.0)

    @classmethod
    def from_callable(cls, grid_size, fn):
        t = np.linspace(0.0, 1.0, grid_size + 1)
        return cls(grid_size, np.array([fn(ti) for ti in t], dtype=float))

    @property
    def nodes(self):
        return np.linspace(0.0, 1.0, self.grid_size + 1)

    def _check_same_grid(self, other):
        if self.grid_size != other.grid_size:
            raise GridMismatch(
                f"grid sizes differ: {self.grid_size} vs {other.grid_size}"
            )

    def __add__(self, other):
        self._check_same_grid(other)
        return GridFunction(self.grid_size, self.values + other.values)

    def __sub__(self, other):
        self._check_same_grid(other)
        return GridFunction(self.grid_size, self.values - other.values)

    def __mul__(self, scalar):
        return GridFunction(self.grid_size, self.values * float(scalar))

    __rmul__ = __mul__

    def __neg__(self):
        return GridFunction(self.grid_size, -self.values)

    def to_dict(self):
        return {"grid_size": self.grid_size, "values": self.values.tolist()}

    @classmethod
    def from_dict(cls, data):
        return cls(int(data["grid_size"]), np.asarray(data["values"], dtype=float))

    def write_csv(self, path):
        """Emit (t_i, v_i) rows for plotting."""
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["t", "value"])
            for t, v in zip(self.nodes, self.values):
                writer.writerow([f"{t:.17g}", f"{v:.17g}"])


def sup_norm(x):
    """max_i |v_i| over the sample grid."""
    return float(np.max(np.abs(x.values)))


def space_norm(x):
    """Sup norm for grid functions, Euclidean norm for R^m vectors."""
    if isinstance(x, GridFunction):
        return sup_norm(x)
    return float(np.linalg.norm(np.asarray(x, dtype=float)))


@dataclass(frozen=True)
class BlidMap:
    """A bounded local-identity map together with its certified radii.

    ``evaluate`` is defined on the whole space, equals the identity for
    ``norm(x) < identity_radius``, and satisfies ``norm(H(x)) <= bound``.
    """

    evaluate: Callable
    bound: float
    identity_radius: float
    norm: Callable = field(default=space_norm)

    def __call__(self, x):
        return self.evaluate(x)


def blid_c01(h, x):
    """Pointwise blid on the grid: H(x)(t_i) = h(x(t_i)) * x(t_i)."""
    return GridFunction(x.grid_size, scalar_blid_eval(h, x.values))


def c01_blid_map(h):
    """Blid map on grid-function space from a scalar cutoff.

    Bound is the cutoff's outer radius, identity radius its inner radius;
    both follow from the pointwise bound |h(s) s| <= b and the exact
    plateau h(s) = 1 for |s| <= a.
    """
    return BlidMap(
        evaluate=lambda x: blid_c01(h, x),
        bound=h.outer_radius,
        identity_radius=h.inner_radius,
        norm=sup_norm,
    )


def euclidean_blid_map(tau):
    """Blid map on R^m from the radial bump: H(x) = tau(|x|^2) x.

    The squared norm keeps the composition smooth (the Euclidean norm
    itself is not differentiable at 0).  Identity radius sqrt(a), bound
    sqrt(b).
    """

    def evaluate(x):
        x = np.asarray(x, dtype=float)
        r2 = float(x @ x)
        return cutoff_eval(tau, r2) * x

    return BlidMap(
        evaluate=evaluate,
        bound=math.sqrt(tau.outer_radius),
        identity_radius=math.sqrt(tau.inner_radius),
        norm=space_norm,
    )


def rescale_blid(H, eps):
    """Rescaled blid H_1(x) = (eps/N) H((N/eps) x).

    The result is again a blid map: bound eps, identity radius
    eps * n / N.  Inside the identity region the argument is returned
    as-is, so the identity holds exactly in floating point as well.
    """
    if eps <= 0.0:
        raise ValueError(f"eps must be positive, got {eps}")
    big_n = H.bound
    new_radius = eps * H.identity_radius / big_n

    def evaluate(x):
        if H.norm(x) < new_radius:
            return x
        return (eps / big_n) * H.evaluate((big_n / eps) * x)

    return BlidMap(evaluate=evaluate, bound=eps, identity_radius=new_radius, norm=H.norm)


@dataclass(frozen=True, eq=False)
class Projector:
    """Bounded projector on R^m: a matrix with pi^2 = pi (entrywise 1e-10)."""

    matrix: np.ndarray

    def __post_init__(self):
        mat = np.asarray(self.matrix, dtype=float)
        if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
            raise DimensionMismatch(f"projector must be square, got {mat.shape}")
        if np.max(np.abs(mat @ mat - mat)) > 1e-10:
            raise ValueError("matrix is not idempotent within 1e-10")
        object.__setattr__(self, "matrix", mat)

    @property
    def dim(self):
        return self.matrix.shape[0]

    def __call__(self, x):
        return self.matrix @ np.asarray(x, dtype=float)


def restrict_blid(H, pi, x):
    """Evaluate the restriction pi(H(.)) at a point x of Im(pi).

    The restriction of a blid through a bounded projector is again a blid
    on the image subspace.
    """
    x = np.asarray(x, dtype=float)
    if np.max(np.abs(pi(x) - x)) > 1e-10:
        raise NotInImage("x is not in the image of the projector")
    return pi(H.evaluate(x))


def restricted_blid_map(H, pi):
    """Blid map on Im(pi) induced by pi(H(.)); bound grows by the projector norm."""
    pi_norm = float(np.linalg.norm(pi.matrix, 2))
    return BlidMap(
        evaluate=lambda x: pi(H.evaluate(np.asarray(x, dtype=float))),
        bound=pi_norm * H.bound,
        identity_radius=H.identity_radius,
        norm=space_norm,
    )


@dataclass(frozen=True, eq=False)
class SegmentSpec:
    """Band around a segment [phi, psi] in C[0,1] plus the cutoff shaping h(t, s).

    The two-variable cutoff is realized as a t-independent scalar cutoff
    applied to the distance from s to the band
    [min(phi,psi)(t) - margin, max(phi,psi)(t) + margin]; it is 1 on the
    band (distance 0 sits deep inside the cutoff plateau) and 0 once the
    distance exceeds the cutoff's outer radius.
    """

    lower: GridFunction
    upper: GridFunction
    cutoff: ScalarCutoff
    margin: float = 0.0

    def __post_init__(self):
        self.lower._check_same_grid(self.upper)
        if self.margin < 0.0:
            raise ValueError("margin must be non-negative")

    def band(self):
        lo = np.minimum(self.lower.values, self.upper.values) - self.margin
        hi = np.maximum(self.lower.values, self.upper.values) + self.margin
        return lo, hi

    def h_values(self, x):
        """h(t_i, x(t_i)) for a grid function x on the same grid."""
        lo, hi = self.band()
        dist = np.maximum(np.maximum(lo - x.values, x.values - hi), 0.0)
        return cutoff_eval(self.cutoff, dist)


def blid_at_segment(spec, y, x):
    """Segment blid H_y(x)(t) = y(t) + h(t, x(t)) (x(t) - y(t)).

    Equals x wherever the graph of x stays in the h = 1 region around the
    band, and y wherever x leaves the support of h(t, .).
    """
    spec.lower._check_same_grid(x)
    x._check_same_grid(y)
    hv = spec.h_values(x)
    blended = y.values + hv * (x.values - y.values)
    # exact identity on the h = 1 plateau, matching the other blids
    return GridFunction(x.grid_size, np.where(hv == 1.0, x.values, blended))


def integral_functional(x, extended=False, h=None):
    """Composite-trapezoid value of integral_0^1 dt / (1 - x(t)).

    With ``extended=True`` the integrand is 1 / (1 - h(x(t))) with the
    scalar blid h, which agrees with the raw functional summand-for-summand
    when sup|x| < inner radius and stays defined for arbitrarily large x
    (the blid collapses large samples to 0).
    """
    vals = x.values
    if extended:
        if h is None:
            raise ValueError("extended evaluation needs a scalar cutoff")
        vals = scalar_blid_eval(h, vals)
    if np.max(vals) >= 1.0 - 1e-12:
        raise PoleOnGrid(
            "integrand 1/(1 - x(t)) undefined: a sample reaches 1"
            + (" after the blid" if extended else "")
        )
    integrand = 1.0 / (1.0 - vals)
    weights = np.ones_like(integrand)
    weights[0] = weights[-1] = 0.5
    return float(np.sum(weights * integrand) / x.grid_size)
