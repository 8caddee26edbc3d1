"""Central finite differences with Ridders-style Richardson extrapolation.

Used wherever the toolkit needs derivative values it cannot get in closed
form: cutoff derivatives of order >= 2, jet extraction, flatness checks,
and the transverse-derivative coefficients of the flat decomposition.

The order-n central stencils below are second-order accurate with an error
expansion in even powers of h, so a Neville tableau over a shrinking step
(factor 1.4 per level, as in Ridders' classic scheme) extrapolates them to
near machine accuracy on smooth data.  The tableau tracks an error estimate
and stops early when shrinking the step starts to amplify roundoff.
"""

import numpy as np

from .errors import OrderTooHigh

__all__ = ["central_difference", "nth_derivative", "directional_derivative", "MAX_ORDER"]

MAX_ORDER = 5

# offsets (in units of h) and weights of the lowest-width central stencil
# for the n-th derivative, O(h^2) accurate
_STENCILS = {
    0: ((0,), (1.0,)),
    1: ((-1, 1), (-0.5, 0.5)),
    2: ((-1, 0, 1), (1.0, -2.0, 1.0)),
    3: ((-2, -1, 1, 2), (-0.5, 1.0, -1.0, 0.5)),
    4: ((-2, -1, 0, 1, 2), (1.0, -4.0, 6.0, -4.0, 1.0)),
    5: ((-3, -2, -1, 1, 2, 3), (-0.5, 2.0, -2.5, 2.5, -2.0, 0.5)),
}


def central_difference(f, x, n, h):
    """Single order-n central-difference estimate of f^(n)(x) with step h."""
    if n < 0 or n > MAX_ORDER:
        raise OrderTooHigh(f"derivative order {n} not supported (max {MAX_ORDER})")
    if n == 0:
        return f(x)
    offsets, weights = _STENCILS[n]
    acc = None
    for off, w in zip(offsets, weights):
        term = w * np.asarray(f(x + off * h), dtype=float)
        acc = term if acc is None else acc + term
    return acc / h**n


def _absmax(v):
    return float(np.max(np.abs(v)))


def nth_derivative(f, x, n, h0, *, contract=1.4, levels=10, safe=2.0):
    """Extrapolated n-th derivative of ``f`` at ``x``.

    Parameters
    ----------
    f : callable
        Scalar- or vector-valued function of one real variable.
    x : float
        Evaluation point.
    n : int
        Derivative order, 0 <= n <= 5.  Order 0 returns ``f(x)`` directly.
    h0 : float
        Initial step.  The widest stencil point is ``x + 3*h0``; steps only
        shrink from there, so choose ``h0`` with the largest usable value.

    Returns
    -------
    (value, err) : tuple
        Best extrapolated estimate and its error estimate (same shape as the
        values of ``f``; the error is a scalar max-norm estimate).
    """
    if n < 0 or n > MAX_ORDER:
        raise OrderTooHigh(f"derivative order {n} not supported (max {MAX_ORDER})")
    if h0 <= 0:
        raise ValueError("h0 must be positive")
    if n == 0:
        return np.asarray(f(x), dtype=float), 0.0

    con2 = contract * contract
    tableau = {}
    h = h0
    tableau[0, 0] = central_difference(f, x, n, h)
    best = tableau[0, 0]
    best_err = np.inf
    for i in range(1, levels):
        h /= contract
        tableau[0, i] = central_difference(f, x, n, h)
        fac = con2
        for j in range(1, i + 1):
            tableau[j, i] = (tableau[j - 1, i] * fac - tableau[j - 1, i - 1]) / (fac - 1.0)
            fac *= con2
            err = max(
                _absmax(tableau[j, i] - tableau[j - 1, i]),
                _absmax(tableau[j, i] - tableau[j - 1, i - 1]),
            )
            if err <= best_err:
                best_err = err
                best = tableau[j, i]
        if _absmax(tableau[i, i] - tableau[i - 1, i - 1]) >= safe * best_err:
            break
    return best, best_err


def directional_derivative(f, base, direction, n, h0, **kwargs):
    """n-th derivative of ``s -> f(base + s*direction)`` at s = 0."""
    base = np.asarray(base, dtype=float)
    direction = np.asarray(direction, dtype=float)
    return nth_derivative(lambda s: f(base + s * direction), 0.0, n, h0, **kwargs)
