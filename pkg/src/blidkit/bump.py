"""Smooth scalar cutoffs and the scalar bounded-local-identity function.

A :class:`ScalarCutoff` with radii ``0 < a < b`` is an even C-infinity
function equal to 1 on [-a, a], vanishing outside (-b, b), and monotone
non-increasing on [a, b].  The transition is the standard exponential glue
on width-normalized arguments,

    psi(u) = exp(-1/u) for u > 0, else 0
    u_hi = (b^2 - s^2) / (b^2 - a^2),   u_lo = (s^2 - a^2) / (b^2 - a^2)
    tau(s) = psi(u_hi) / (psi(u_hi) + psi(u_lo)),

which is exactly 1 and exactly 0 on the plateau and outside the support
(the branches return the literal constants, so identity regions hold to
the last bit).  Normalizing by the width keeps the two glue arguments
summing to 1, so the denominator never underflows no matter how narrow
the transition is.

``scalar_blid_eval`` is the product ``tau(s) * s``: the identity for
|s| < a, zero for |s| > b, and bounded by b everywhere.  It is the scalar
building block of every bounded local-identity map in the toolkit.
"""

import math
from dataclasses import dataclass

import numpy as np

from . import fd
from .errors import InvalidRadii, OrderTooHigh

__all__ = ["ScalarCutoff", "make_cutoff", "cutoff_eval", "scalar_blid_eval"]

#: highest derivative order cutoff_eval certifies
MAX_CUTOFF_ORDER = 4


@dataclass(frozen=True)
class ScalarCutoff:
    """Even smooth cutoff: 1 on [-a, a], 0 outside [-b, b]."""

    inner_radius: float
    outer_radius: float

    def __post_init__(self):
        a, b = self.inner_radius, self.outer_radius
        if not (math.isfinite(a) and math.isfinite(b)):
            raise InvalidRadii("cutoff radii must be finite")
        if a <= 0.0:
            raise InvalidRadii(f"inner radius must be positive, got {a}")
        if b <= a:
            raise InvalidRadii(f"outer radius must exceed inner radius, got ({a}, {b})")

    def __call__(self, s):
        return cutoff_eval(self, s)


def make_cutoff(a, b):
    """Build a :class:`ScalarCutoff` with plateau radius ``a`` and support radius ``b``."""
    return ScalarCutoff(float(a), float(b))


def _glue(u):
    """exp(-1/u) for u > 0, else 0; array-safe."""
    u = np.asarray(u, dtype=float)
    out = np.zeros_like(u)
    pos = u > 0.0
    with np.errstate(divide="ignore", over="ignore"):
        out[pos] = np.exp(-1.0 / u[pos])
    return out


def _tau_values(tau, s):
    s = np.asarray(s, dtype=float)
    a, b = tau.inner_radius, tau.outer_radius
    width = b * b - a * a
    abss = np.abs(s)
    out = np.zeros_like(s)
    out[abss <= a] = 1.0
    mid = (abss > a) & (abss < b)
    if np.any(mid):
        sm = s[mid]
        up = _glue((b * b - sm * sm) / width)
        down = _glue((sm * sm - a * a) / width)
        out[mid] = up / (up + down)
    return out


def _psi_and_slope(u):
    """(psi(u), psi'(u)) with psi(u) = exp(-1/u); both 0 when psi underflows."""
    if u <= 0.0:
        return 0.0, 0.0
    inv = 1.0 / u
    p = math.exp(-inv)
    if p == 0.0:
        return 0.0, 0.0
    return p, p * inv * inv


def _tau_derivative1(tau, s):
    """Closed-form first derivative; zero on the plateau and outside support."""
    a, b = tau.inner_radius, tau.outer_radius
    absa = abs(float(s))
    if absa <= a or absa >= b:
        return 0.0
    width = b * b - a * a
    psi_b, slope_b = _psi_and_slope((b * b - s * s) / width)
    psi_a, slope_a = _psi_and_slope((s * s - a * a) / width)
    # chain rule through u_hi = (b^2 - s^2)/W and u_lo = (s^2 - a^2)/W
    d_b = slope_b * (-2.0 * s / width)
    d_a = slope_a * (2.0 * s / width)
    denom = psi_a + psi_b
    return (d_b * psi_a - psi_b * d_a) / (denom * denom)


def cutoff_eval(tau, s, order=0):
    """Evaluate ``tau`` or one of its derivatives up to order 4.

    Order 0 accepts scalars or arrays and returns exact 1.0 / 0.0 on the
    plateau and outside the support.  Order 1 uses the closed form of the
    glue ratio; orders 2-4 fall back to extrapolated central differences
    of the order-0 values, which is accurate to ~1e-8 on the transition.
    """
    if order < 0 or order > MAX_CUTOFF_ORDER:
        raise OrderTooHigh(f"cutoff derivatives certified up to order {MAX_CUTOFF_ORDER}, got {order}")
    if order == 0:
        vals = _tau_values(tau, s)
        return float(vals) if np.isscalar(s) or np.ndim(s) == 0 else vals
    s = float(s)
    a, b = tau.inner_radius, tau.outer_radius
    if abs(s) <= a or abs(s) >= b:
        # flat to all orders on both closed regions, including the seams
        return 0.0
    if order == 1:
        return float(_tau_derivative1(tau, s))
    # orders 2..4: nested differences of the closed-form first derivative;
    # the step must resolve the glue's fine structure, hence width/128
    h0 = (b - a) / 128.0
    value, _ = fd.nth_derivative(
        lambda t: _tau_derivative1(tau, t), s, order - 1, h0, levels=12, safe=6.0
    )
    return float(value)


def scalar_blid_eval(tau, s):
    """``tau(s) * s``: identity for |s| < a, zero for |s| > b, bounded by b."""
    vals = _tau_values(tau, s) * np.asarray(s, dtype=float)
    return float(vals) if np.isscalar(s) or np.ndim(s) == 0 else vals
