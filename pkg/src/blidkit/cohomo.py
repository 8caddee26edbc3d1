"""Solvers for the cohomological equation g(Ax) - g(x) = f(x), A linear hyperbolic.

The pipeline mirrors the constructive proof structure:

1. ``split_hyperbolic`` computes the invariant splitting X = X_+ (+) X_-
   (contracting / expanding), spectral projectors, and a certified
   contraction factor q < 1 realized by a finite-horizon adapted norm.
2. ``check_resonances`` enumerates the multi-index relations
   lambda^p = 1 that obstruct the degree-n coefficient equations.
3. ``solve_formal`` solves (L_n - id) Q_n = P_n on the monomial basis.
4. ``solve_series`` evaluates the one-sided orbit series
   g(x) = -sum f(A^k x) (contraction) or sum f(A^-k x) (expansion).
5. ``flat_split`` / ``vanishing_split`` decompose a flat (resp. locally
   vanishing) map into pieces flat (resp. vanishing) on the two invariant
   strips, using blid maps to keep everything globally bounded.
6. ``solve_flat_local`` sums the two blid-wrapped orbit series into a
   local solution for a flat right-hand side; ``globalize`` upgrades any
   local solution to a box-certified global one with finitely many terms.
7. ``solve_cohomological`` chains all of the above and reports residuals.

Norm conventions on R^m: subspace components are measured in the
Euclidean norm of their projections; "the delta-ball" for locally
vanishing maps means the splitting max-norm
``max(|pi_+ x|_2, |pi_- x|_2) < delta``, which is what makes the
strip-vanishing of ``vanishing_split`` exact rather than approximate.
"""

import math
from dataclasses import dataclass
from typing import Callable, NamedTuple, Optional

import numpy as np
import scipy.linalg

from . import fd
from .bump import make_cutoff
from .errors import (
    BoundViolation,
    DimensionMismatch,
    LocalResidualTooLarge,
    NotContractive,
    NotExpansive,
    NotHyperbolic,
    ParseError,
    SeriesDiverged,
    Singular,
    SingularResonance,
)
from .funcspace import Projector, euclidean_blid_map, rescale_blid, restricted_blid_map
from .polyalg import (
    HomPolyMap,
    coeff_vector,
    hompoly_eval,
    hompoly_eval_many,
    hompoly_from_coeff_vector,
    hompoly_scale,
    ln_matrix,
    monomial_basis,
)

__all__ = [
    "HyperbolicSplitting",
    "split_hyperbolic",
    "check_resonances",
    "solve_formal",
    "SeriesSolution",
    "solve_series",
    "FlatSplitResult",
    "flat_split",
    "vanishing_split",
    "LocalSolution",
    "solve_flat_local",
    "GlobalizeResult",
    "globalize",
    "CohomologicalProblem",
    "taylor_term",
    "flat_term_from_spec",
    "SolveReport",
    "solve_cohomological",
]

_POWER_CAP = 500


@dataclass(frozen=True, eq=False)
class HyperbolicSplitting:
    """Invariant splitting of a hyperbolic matrix with certified contraction data.

    ``proj_plus`` / ``proj_minus`` are the spectral projectors onto the
    contracting / expanding subspaces; ``q`` is the contraction factor of
    the adapted norms, realized with the finite horizon ``horizon``.
    """

    matrix: np.ndarray
    eigenvalues: tuple
    basis_plus: np.ndarray
    basis_minus: np.ndarray
    proj_plus: np.ndarray
    proj_minus: np.ndarray
    q: float
    horizon: int
    rho_plus: Optional[float]
    rho_minus: Optional[float]
    powers_plus: tuple
    powers_minus: tuple
    equiv_plus: Optional[float]
    equiv_minus: Optional[float]

    @property
    def dim(self):
        return self.matrix.shape[0]

    @property
    def dim_plus(self):
        return self.basis_plus.shape[1]

    @property
    def dim_minus(self):
        return self.basis_minus.shape[1]

    def project_plus(self, x):
        return self.proj_plus @ np.asarray(x, dtype=float)

    def project_minus(self, x):
        return self.proj_minus @ np.asarray(x, dtype=float)

    def adapted_plus_norm(self, v):
        """Adapted norm on X_+ in which A contracts by q; 0 on a trivial side."""
        if self.dim_plus == 0:
            return 0.0
        v = np.asarray(v, dtype=float)
        return max(
            self.rho_plus**-k * float(np.linalg.norm(M @ v))
            for k, M in enumerate(self.powers_plus)
        )

    def adapted_minus_norm(self, v):
        """Adapted norm on X_- in which A^{-1} contracts by q; 0 on a trivial side."""
        if self.dim_minus == 0:
            return 0.0
        v = np.asarray(v, dtype=float)
        return max(
            self.rho_minus**-k * float(np.linalg.norm(M @ v))
            for k, M in enumerate(self.powers_minus)
        )

    def adapted_norm(self, x):
        return max(
            self.adapted_plus_norm(self.project_plus(x)),
            self.adapted_minus_norm(self.project_minus(x)),
        )

    def split_max_norm(self, x):
        """max of the Euclidean norms of the two components."""
        return max(
            float(np.linalg.norm(self.project_plus(x))),
            float(np.linalg.norm(self.project_minus(x))),
        )


def _contraction_data(M, spectral_radius, pi):
    """(rho, K, powers, equivalence constant) for the finite adapted norm of M.

    rho sits 2% of the gap above the spectral radius; K is the first power
    with ||M^K||_2 <= rho^K, which makes ||M v||' <= rho ||v||' for the
    finite max-norm over the stored powers.
    """
    rho = spectral_radius + 0.02 * (1.0 - spectral_radius)
    powers = [np.eye(M.shape[0])]
    k = 1
    Mk = M.copy()
    while float(np.linalg.norm(Mk, 2)) > rho**k:
        powers.append(Mk.copy())
        Mk = Mk @ M
        k += 1
        if k > _POWER_CAP:
            raise NotHyperbolic(
                "adapted-norm horizon exceeded the cap; matrix is too close to "
                "the unit circle for a certified contraction factor"
            )
    equiv = max(
        float(np.linalg.norm(Mp @ pi, 2)) * rho**-j for j, Mp in enumerate(powers)
    )
    return rho, k, tuple(powers), max(equiv, 1.0)


def split_hyperbolic(A, margin=0.05):
    """Hyperbolic splitting of A via an ordered real Schur form.

    Invariant subspaces come from Schur reordering (eigenvalues inside the
    unit circle leading); the spectral projector is assembled from the
    Sylvester equation of the block decomposition, which stays stable when
    eigenvector matrices would be ill-conditioned.

    Raises ``Singular`` for non-invertible A and ``NotHyperbolic`` when
    any eigenvalue modulus lies in [1 - margin, 1 + margin].
    """
    A = np.asarray(A, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise DimensionMismatch(f"A must be square, got {A.shape}")
    m = A.shape[0]
    eigs = np.linalg.eigvals(A)
    moduli = np.abs(eigs)
    if np.min(moduli) <= 1e-14 * max(1.0, np.max(moduli)):
        raise Singular("matrix is numerically singular")
    if np.any((moduli >= 1.0 - margin) & (moduli <= 1.0 + margin)):
        raise NotHyperbolic(
            f"eigenvalue modulus within {margin} of the unit circle: {sorted(moduli)}"
        )
    order = np.lexsort((eigs.imag, eigs.real, moduli))
    eigenvalues = tuple(complex(eigs[i]) for i in order)

    T, Z, k_plus = scipy.linalg.schur(A, output="real", sort="iuc")
    if 0 < k_plus < m:
        T11 = T[:k_plus, :k_plus]
        T12 = T[:k_plus, k_plus:]
        T22 = T[k_plus:, k_plus:]
        Y = scipy.linalg.solve_sylvester(T11, -T22, T12)
        p_hat = np.zeros((m, m))
        p_hat[:k_plus, :k_plus] = np.eye(k_plus)
        p_hat[:k_plus, k_plus:] = Y
        proj_plus = Z @ p_hat @ Z.T
    elif k_plus == m:
        proj_plus = np.eye(m)
    else:
        proj_plus = np.zeros((m, m))
    proj_minus = np.eye(m) - proj_plus

    basis_plus = Z[:, :k_plus].copy()
    _, Z2, k_minus = scipy.linalg.schur(A, output="real", sort="ouc")
    if k_minus != m - k_plus:  # pragma: no cover - guarded by the margin test
        raise NotHyperbolic("inconsistent Schur ordering near the unit circle")
    basis_minus = Z2[:, :k_minus].copy()

    worst = max(
        float(np.max(np.abs(proj_plus @ proj_plus - proj_plus))),
        float(np.max(np.abs(A @ proj_plus - proj_plus @ A))),
    )
    if worst > 1e-8:
        raise NotHyperbolic(
            f"projector computation lost accuracy ({worst:.2e}); "
            "the splitting is too ill-conditioned"
        )

    rho_plus = rho_minus = None
    powers_plus = powers_minus = (np.eye(m),)
    equiv_plus = equiv_minus = None
    qs = []
    if k_plus > 0:
        sr_plus = float(max(abs(ev) for ev in eigenvalues if abs(ev) < 1.0))
        rho_plus, k_hor_p, powers_plus, equiv_plus = _contraction_data(
            A @ proj_plus, sr_plus, proj_plus
        )
        qs.append(rho_plus)
    else:
        k_hor_p = 0
    if k_minus > 0:
        sr_minus = float(max(1.0 / abs(ev) for ev in eigenvalues if abs(ev) > 1.0))
        rho_minus, k_hor_m, powers_minus, equiv_minus = _contraction_data(
            np.linalg.inv(A) @ proj_minus, sr_minus, proj_minus
        )
        qs.append(rho_minus)
    else:
        k_hor_m = 0

    return HyperbolicSplitting(
        matrix=A,
        eigenvalues=eigenvalues,
        basis_plus=basis_plus,
        basis_minus=basis_minus,
        proj_plus=proj_plus,
        proj_minus=proj_minus,
        q=max(qs),
        horizon=max(k_hor_p, k_hor_m),
        rho_plus=rho_plus,
        rho_minus=rho_minus,
        powers_plus=powers_plus,
        powers_minus=powers_minus,
        equiv_plus=equiv_plus,
        equiv_minus=equiv_minus,
    )


def check_resonances(eigenvalues, n_max, tol=1e-9):
    """All multi-indices p with 1 <= |p| <= n_max and |lambda^p - 1| <= tol.

    Exhaustive over the graded enumeration; returns (multi-index, residual)
    pairs in (degree, descending-lex) order.
    """
    if n_max < 1:
        raise ValueError("n_max must be >= 1")
    eigs = [complex(ev) for ev in eigenvalues]
    hits = []
    for n in range(1, n_max + 1):
        for p in monomial_basis(len(eigs), n):
            value = 1.0 + 0.0j
            for ev, e in zip(eigs, p):
                if e:
                    value *= ev**e
            residual = abs(value - 1.0)
            if residual <= tol:
                hits.append((p, residual))
    return hits


def _nearest_resonances(A, n, sigma_min):
    eigs = np.linalg.eigvals(A)
    scored = [(pp, r) for pp, r in check_resonances(eigs, n, tol=np.inf) if sum(pp) == n]
    scored.sort(key=lambda item: item[1])
    best = scored[0][1] if scored else 0.0
    return [pp for pp, r in scored if r <= max(10.0 * best, 10.0 * sigma_min, 1e-12)]


def solve_formal(A, P_n, tol=1e-9):
    """Solve the degree-n coefficient equation Q_n(Ax) - Q_n(x) = P_n(x).

    Works on the monomial coefficient vectors: (L_n - I) q = p with L_n
    the matrix of composition with A.  A (near-)singular operator is not
    by itself fatal: resonances only restrict which P_n are admissible.
    The near-null directions are dropped pseudo-inverse style, and
    ``SingularResonance`` is raised when the remaining residual shows P_n
    actually loads on a resonant direction (reporting the nearest resonant
    multi-indices); this also avoids ever returning a huge Q.
    """
    A = np.asarray(A, dtype=float)
    n = P_n.degree
    if n < 1:
        raise ValueError("formal solver needs degree >= 1")
    L = ln_matrix(A, n, P_n.codim)
    M = L - np.eye(L.shape[0])
    p = coeff_vector(P_n)
    svals = np.linalg.svd(M, compute_uv=False)
    sigma_min = float(svals[-1])
    sigma_max = float(svals[0])
    threshold = tol * (1.0 + float(np.linalg.norm(p)))
    if sigma_min > threshold:
        q = np.linalg.solve(M, p)
    else:
        rcond = threshold / max(sigma_max, 1e-300)
        q = np.linalg.lstsq(M, p, rcond=rcond)[0]
    residual = float(np.max(np.abs(M @ q - p)))
    if residual > max(tol, 1e-10) * (1.0 + float(np.max(np.abs(p)))):
        nearest = _nearest_resonances(A, n, sigma_min)
        raise SingularResonance(
            f"degree-{n} equation is obstructed: P_n loads on a resonant "
            f"direction (residual {residual:.3e}, sigma_min {sigma_min:.3e}); "
            f"nearest resonances: {nearest}",
            degree=n,
            multi_indices=nearest,
            sigma_min=sigma_min,
        )
    return hompoly_from_coeff_vector(P_n.dim, P_n.codim, n, q)


class SeriesSolution(NamedTuple):
    value: float
    terms_used: int


def solve_series(A, f, x, direction="contraction", tol=1e-10, growth_bound=None, k_max=500):
    """Orbit-series solution value at one point.

    ``contraction``: g(x) = -sum_{k>=0} f(A^k x), requires spectral radius
    of A below 1.  ``expansion``: g(x) = sum_{k>=1} f(A^-k x), requires the
    inverse to be a contraction.  The series is truncated once the
    certified geometric tail bound (adapted-norm decay rate times the
    local growth of f, taken from ``growth_bound`` or estimated from the
    observed orbit with a safety factor) drops below ``tol``.
    """
    A = np.asarray(A, dtype=float)
    x = np.asarray(x, dtype=float)
    eigs = np.linalg.eigvals(A)
    if direction == "contraction":
        sr = float(np.max(np.abs(eigs)))
        if sr >= 1.0:
            raise NotContractive(f"spectral radius {sr:.6g} >= 1")
        B = A
        sign = -1.0
        first_k = 0
    elif direction == "expansion":
        if float(np.min(np.abs(eigs))) <= 1e-14:
            raise Singular("matrix is numerically singular")
        sr = float(1.0 / np.min(np.abs(eigs)))
        if sr >= 1.0:
            raise NotExpansive(f"spectral radius of the inverse {sr:.6g} >= 1")
        B = np.linalg.inv(A)
        sign = 1.0
        first_k = 1
    else:
        raise ValueError(f"unknown direction {direction!r}")

    f0 = float(f(np.zeros_like(x)))
    if abs(f0) > 1e-12:
        raise ValueError(f"series solvers need f(0) = 0, got {f0:.3e}")

    rho, _, _, equiv = _contraction_data(B, sr, np.eye(A.shape[0]))
    total = 0.0
    y = x.copy()
    if first_k == 1:
        y = B @ y
    slope = 0.0 if growth_bound is None else float(growth_bound)
    terms = 0
    for k in range(k_max):
        term = float(f(y))
        total += term
        terms += 1
        r = float(np.linalg.norm(y))
        if growth_bound is None and r > 0.0:
            slope = max(slope, 4.0 * abs(term) / r)
        tail = slope * equiv * rho * r / (1.0 - rho)
        if terms >= 3 and tail <= tol:
            return SeriesSolution(sign * total, terms)
        y = B @ y
    raise SeriesDiverged(
        f"series tail bound did not reach {tol:.1e} within {k_max} terms"
    )


@dataclass(frozen=True)
class FlatSplitResult:
    """Decomposition f0 = f_plus + f_minus with strip-flat pieces.

    ``f_minus`` is the truncated transverse-Taylor reconstruction (flat on
    X_- since its coefficients are flat at the origin of X_+); ``f_plus``
    is the difference, with vanishing transverse data on X_+ inside the
    ball of radius ``u_radius`` where the blid is the identity.
    """

    f_plus: Callable
    f_minus: Callable
    u_radius: float


def flat_split(f0, split, blid, J=3, eps_schedule=None, fd_h0=0.05):
    """Split a flat-at-0 map into pieces flat on the two invariant strips.

    The degree-j building block evaluates the j-th transverse derivative
    of ``f0`` after the blid at the X_+ base point, applied to the j-fold
    rescaled-blid image of the X_- component:

        P_j(x) = (d^j/ds^j) f0(H(x_+ + s w_j)) |_{s=0},
        w_j = eps_j H_-(x_- / eps_j),

    a single 1-D finite difference since the multilinear argument repeats.
    ``f_minus = sum_{j<=J} P_j / j!`` carries all transverse Taylor data up
    to order J; ``f_plus = f0 - f_minus`` is transverse-flat to order J on
    X_+ inside ``u_radius``.
    """
    if J > 3:
        raise ValueError("flat_split is certified for J <= 3")
    if eps_schedule is None:
        eps_schedule = [1.0] * (J + 1)
    if len(eps_schedule) < J + 1:
        raise ValueError(f"need {J + 1} scale factors")
    inv_fact = [1.0 / math.factorial(j) for j in range(J + 1)]

    def h_minus(v):
        return split.proj_minus @ blid.evaluate(v)

    def f_minus(x):
        x = np.asarray(x, dtype=float)
        xp = split.project_plus(x)
        xm = split.project_minus(x)
        total = float(f0(blid.evaluate(xp)))
        for j in range(1, J + 1):
            w = eps_schedule[j] * h_minus(xm / eps_schedule[j])
            if float(np.linalg.norm(w)) == 0.0:
                continue
            deriv, _ = fd.nth_derivative(
                lambda s: float(f0(blid.evaluate(xp + s * w))), 0.0, j, fd_h0, levels=7
            )
            total += inv_fact[j] * float(deriv)
        return total

    def f_plus(x):
        return float(f0(x)) - f_minus(x)

    return FlatSplitResult(f_plus=f_plus, f_minus=f_minus, u_radius=blid.identity_radius)


def vanishing_split(v, delta, split, h_minus):
    """Split a map vanishing on the delta-ball into strip-vanishing pieces.

    ``v`` must vanish for ``split_max_norm(x) < delta``;  ``h_minus`` is a
    blid on X_- with bound below delta and identity radius eps < delta.
    Then ``v_plus(x) = v(x_+ + H_-(x_-))`` vanishes exactly on the strip
    |x_+| < eps (the blid collapses the other component into the
    vanishing ball) and ``v_minus = v - v_plus`` vanishes for |x_-| < eps.
    """
    if h_minus.bound >= delta:
        raise BoundViolation(
            f"blid bound {h_minus.bound:.6g} must be below delta {delta:.6g}"
        )
    if h_minus.identity_radius >= delta:
        raise BoundViolation(
            f"blid identity radius {h_minus.identity_radius:.6g} must be below "
            f"delta {delta:.6g}"
        )

    def v_plus(x):
        x = np.asarray(x, dtype=float)
        return v(split.project_plus(x) + h_minus.evaluate(split.project_minus(x)))

    def v_minus(x):
        return v(x) - v_plus(x)

    return v_plus, v_minus


@dataclass(frozen=True)
class LocalSolution:
    """Local solution of w(Ax) - w(x) = f0(x) with a certified radius."""

    evaluate: Callable
    radius: float
    residual_sup: float

    def __call__(self, x):
        return self.evaluate(x)


def _truncated_orbit_sum(term_fn, step, x, tail_tol, k_max, first_k=0, min_terms=10):
    """Sum term_fn over the orbit until terms stay below tail_tol.

    ``min_terms`` guards against the support-sweep hump: on mixed orbits
    the terms can underflow to zero for a few steps and then spike once
    the expanding component crosses the blid's transition shell, so a
    quiet stretch alone is not proof of a dead tail until the orbit has
    had time to clear the support.
    """
    total = 0.0
    y = np.asarray(x, dtype=float).copy()
    for _ in range(first_k):
        y = step @ y
    quiet = 0
    terms = 0
    for _ in range(k_max):
        t = float(term_fn(y))
        total += t
        terms += 1
        quiet = quiet + 1 if abs(t) <= tail_tol else 0
        if quiet >= 3 and terms >= min_terms:
            return total, terms
        y = step @ y
    raise SeriesDiverged(
        f"orbit series terms did not fall below {tail_tol:.1e} within {k_max} terms"
    )


def _check_flat_at_zero(f0, dim, tol=1e-6):
    v0 = abs(float(f0(np.zeros(dim))))
    if v0 > 1e-10:
        raise ValueError(f"f0(0) = {v0:.3e}, expected a flat map")
    for i in range(dim):
        direction = np.zeros(dim)
        direction[i] = 1.0
        for order in (1, 2):
            d, _ = fd.directional_derivative(f0, np.zeros(dim), direction, order, 0.05)
            if abs(float(d)) > tol:
                raise ValueError(
                    f"f0 is not flat at 0: order-{order} derivative along e_{i} "
                    f"is {float(d):.3e}"
                )


def solve_flat_local(
    f0, split, blid, tol=1e-8, J=3, k_max=200, check_samples=20, seed=0
):
    """Local solution of w(Ax) - w(x) = f0(x) for a flat right-hand side.

    Decomposes f0 with :func:`flat_split`, wraps the orbit arguments in a
    rescaled blid whose image stays inside the decomposition neighborhood,
    and sums the strip-flat pieces along the contracting (forward, piece
    flat on X_-) and expanding (backward, piece flat on X_+) orbits.  With
    a trivial side the whole thing collapses to the plain one-sided orbit
    series of f0 itself, which is then a global solution.
    """
    A = split.matrix
    dim = A.shape[0]
    _check_flat_at_zero(f0, dim)

    if split.dim_minus == 0 or split.dim_plus == 0:
        direction = "contraction" if split.dim_minus == 0 else "expansion"

        def w_one_sided(x):
            return solve_series(A, f0, x, direction=direction, tol=tol * 1e-2).value

        rng = np.random.default_rng(seed)
        pts = rng.uniform(-1.0, 1.0, size=(check_samples, dim))
        residual = max(
            abs(w_one_sided(A @ p) - w_one_sided(p) - float(f0(p))) for p in pts
        )
        if residual > tol:
            raise LocalResidualTooLarge(
                f"one-sided residual {residual:.3e} exceeds tol {tol:.1e}"
            )
        return LocalSolution(w_one_sided, math.inf, residual)

    decomposition = flat_split(f0, split, blid, J=J)
    inner = rescale_blid(blid, 0.95 * blid.identity_radius)
    radius = inner.identity_radius
    A_inv = np.linalg.inv(A)
    tail_tol = tol * 1e-3

    def w(x):
        forward, _ = _truncated_orbit_sum(
            lambda y: decomposition.f_minus(inner.evaluate(y)), A, x, tail_tol, k_max
        )
        backward, _ = _truncated_orbit_sum(
            lambda y: decomposition.f_plus(inner.evaluate(y)),
            A_inv,
            x,
            tail_tol,
            k_max,
            first_k=1,
        )
        return -forward + backward

    rng = np.random.default_rng(seed)
    half = 0.9 * radius / math.sqrt(dim)
    pts = rng.uniform(-half, half, size=(check_samples, dim))
    residual = 0.0
    for p in pts:
        residual = max(residual, abs(w(A @ p) - w(p) - float(f0(p))))
    if residual > tol:
        raise LocalResidualTooLarge(
            f"local residual {residual:.3e} exceeds tol {tol:.1e}"
        )
    return LocalSolution(w, radius, residual)


@dataclass(frozen=True)
class GlobalizeResult:
    """Global solution over a box, with the truncation depths that certify it."""

    evaluate: Callable
    k0_plus: int
    k0_minus: int
    residual_sup: float
    box_halfwidth: float

    def __call__(self, x):
        return self.evaluate(x)


def _strip_entry_depth(rho, equiv, reach, eps):
    """Smallest k with equiv * rho^k * reach < eps."""
    if reach <= eps / max(equiv, 1.0):
        return 0
    return max(0, math.ceil(math.log(equiv * reach / eps) / -math.log(rho)))


def _box_reach(split, box_halfwidth, mats, side):
    """sup over the box corners (and their images under mats) of |pi x|_2."""
    dim = split.dim
    proj = split.proj_plus if side == "plus" else split.proj_minus
    corners = np.array(
        [
            [box_halfwidth * s for s in signs]
            for signs in np.ndindex(*(2,) * dim)
        ]
    )
    corners = np.where(corners == 0.0, -box_halfwidth, corners)
    reach = 0.0
    for M in mats:
        pts = corners @ M.T
        reach = max(reach, float(np.max(np.linalg.norm(pts @ proj.T, axis=1))))
    return reach


def globalize(
    gamma0,
    problem,
    split,
    h_minus,
    delta,
    box_halfwidth=5.0,
    samples=400,
    seed=0,
):
    """Upgrade a local solution to a global one over the given box.

    The defect v(x) = f(x) - gamma0(Ax) + gamma0(x) vanishes (up to the
    local residual) on the delta-ball; it is split into strip-vanishing
    pieces and summed along the orbits.  Forward terms die once A^k maps
    the box into the strip |x_+| < eps, so only k0 terms are needed:

        k0 <= ceil(log(reach / eps) / |log rho|),

    and symmetrically backward.  Returns the glued solution together with
    both depths and the sampled residual over the box.
    """
    A = np.asarray(problem.matrix, dtype=float)
    f = problem.full_evaluator()

    def v(x):
        return float(f(x)) - float(gamma0(A @ x)) + float(gamma0(x))

    rng = np.random.default_rng(seed)
    dim = split.dim
    local_pts = []
    for _ in range(10000):
        if len(local_pts) == 24:
            break
        cand = rng.uniform(-delta, delta, size=dim)
        if split.split_max_norm(cand) < 0.98 * delta:
            local_pts.append(cand)
    if not local_pts:
        raise LocalResidualTooLarge(
            "could not sample the delta-ball; projector norms are too large"
        )
    local_residual = max(abs(v(p)) for p in local_pts)
    if local_residual > 1e-9:
        raise LocalResidualTooLarge(
            f"gamma0 residual {local_residual:.3e} on the delta-ball exceeds 1e-9"
        )

    v_plus, v_minus = vanishing_split(v, delta, split, h_minus)
    eps = h_minus.identity_radius
    A_inv = np.linalg.inv(A)

    if split.dim_plus > 0:
        reach_plus = _box_reach(split, box_halfwidth, (np.eye(dim), A), "plus")
        k0_plus = _strip_entry_depth(split.rho_plus, split.equiv_plus, reach_plus, eps)
    else:
        k0_plus = 0
    if split.dim_minus > 0:
        reach_minus = _box_reach(split, box_halfwidth, (np.eye(dim), A_inv), "minus")
        k0_minus = _strip_entry_depth(
            split.rho_minus, split.equiv_minus, reach_minus, eps
        )
    else:
        k0_minus = 0

    cache = {}

    def v_plus_cached(y):
        key = y.tobytes()
        if key not in cache:
            cache[key] = v_plus(y)
        return cache[key]

    cache_m = {}

    def v_minus_cached(y):
        key = y.tobytes()
        if key not in cache_m:
            cache_m[key] = v_minus(y)
        return cache_m[key]

    def evaluate(x):
        x = np.asarray(x, dtype=float)
        h_plus_val = 0.0
        y = x.copy()
        for _ in range(k0_plus + 1):
            h_plus_val -= v_plus_cached(y)
            y = A @ y
        h_minus_val = 0.0
        y = A_inv @ x
        for _ in range(k0_minus):
            h_minus_val += v_minus_cached(y)
            y = A_inv @ y
        return float(gamma0(x)) + h_plus_val + h_minus_val

    pts = rng.uniform(-box_halfwidth, box_halfwidth, size=(samples, dim))
    residual = 0.0
    for p in pts:
        residual = max(residual, abs(evaluate(A @ p) - evaluate(p) - float(f(p))))
    return GlobalizeResult(evaluate, k0_plus, k0_minus, residual, box_halfwidth)


def _flat_exp_inverse_square(axis=0, scale=1.0):
    def term(x):
        x = np.asarray(x, dtype=float)
        r2 = float(x @ x)
        if r2 == 0.0:
            return 0.0
        return scale * math.exp(-1.0 / r2) * float(x[axis])

    return term


_FLAT_KINDS = {"exp_inverse_square": _flat_exp_inverse_square}


def flat_term_from_spec(spec):
    """Build a named flat term from its JSON spec ({"kind": ..., params})."""
    kind = spec.get("kind")
    if kind not in _FLAT_KINDS:
        raise ParseError(f"unknown flat term kind {kind!r}; known: {sorted(_FLAT_KINDS)}")
    params = {k: v for k, v in spec.items() if k != "kind"}
    return _FLAT_KINDS[kind](**params)


@dataclass(frozen=True, eq=False)
class CohomologicalProblem:
    """Right-hand side data for g(Ax) - g(x) = f(x).

    ``terms`` stores the Taylor coefficients P_n = f^(n)(0)(x)^n (so the
    polynomial part of f is sum_n P_n / n!); an optional flat term is a
    plain evaluator, flat at 0.  A nonzero degree-0 term is rejected: the
    equation forces f(0) = 0.
    """

    matrix: np.ndarray
    terms: tuple
    degree_cap: int
    flat_term: Optional[Callable] = None
    flat_term_spec: Optional[dict] = None

    def __post_init__(self):
        A = np.asarray(self.matrix, dtype=float)
        if A.ndim != 2 or A.shape[0] != A.shape[1]:
            raise DimensionMismatch(f"matrix must be square, got {A.shape}")
        object.__setattr__(self, "matrix", A)
        object.__setattr__(self, "terms", tuple(self.terms))
        degrees = set()
        for P in self.terms:
            if P.codim != 1:
                raise DimensionMismatch("cohomological right-hand sides are scalar")
            if P.dim != A.shape[0]:
                raise DimensionMismatch(
                    f"term dimension {P.dim} does not match matrix size {A.shape[0]}"
                )
            if P.degree < 1:
                raise ValueError("degree-0 Taylor term not allowed: f(0) must be 0")
            if P.degree > self.degree_cap:
                raise ValueError(
                    f"term degree {P.degree} exceeds degree cap {self.degree_cap}"
                )
            if P.degree in degrees:
                raise ValueError(f"duplicate Taylor term of degree {P.degree}")
            degrees.add(P.degree)

    def poly_evaluator(self):
        scaled = [hompoly_scale(P, 1.0 / math.factorial(P.degree)) for P in self.terms]

        def f_poly(x):
            return float(sum(hompoly_eval(P, x)[0] for P in scaled)) if scaled else 0.0

        return f_poly

    def full_evaluator(self):
        f_poly = self.poly_evaluator()
        flat = self.flat_term
        if flat is None:
            return f_poly
        return lambda x: f_poly(x) + float(flat(x))

    def to_dict(self):
        return {
            "A": self.matrix.tolist(),
            "terms": [P.to_dict() for P in self.terms],
            "flat_term": self.flat_term_spec,
            "degree_cap": self.degree_cap,
        }

    @classmethod
    def from_dict(cls, data):
        try:
            raw = data.get("A", data.get("matrix"))
            if raw is None:
                raise KeyError("A")
            matrix = np.asarray(raw, dtype=float)
            terms = tuple(HomPolyMap.from_dict(t) for t in data.get("terms", []))
            degree_cap = int(data.get("degree_cap", max((P.degree for P in terms), default=1)))
            spec = data.get("flat_term")
        except (KeyError, TypeError, ValueError) as exc:
            raise ParseError(f"bad problem file: {exc}") from exc
        flat = flat_term_from_spec(spec) if spec else None
        return cls(matrix, terms, degree_cap, flat, spec)


def taylor_term(P):
    """Taylor storage of a plain polynomial piece: P_n = n! * (term of f)."""
    return hompoly_scale(P, float(math.factorial(P.degree)))


@dataclass
class SolveReport:
    """Diagnostics of a :func:`solve_cohomological` run."""

    q: float
    horizon: int
    eigenvalues: list
    resonances: list
    degrees_solved: list
    one_sided: bool
    formal_residual: float
    local_residual: Optional[float] = None
    global_residual: Optional[float] = None
    k0_plus: Optional[int] = None
    k0_minus: Optional[int] = None
    box_halfwidth: float = 0.0
    samples: int = 0
    seed: int = 0

    def to_dict(self):
        return {
            "q": self.q,
            "horizon": self.horizon,
            "eigenvalues": [[ev.real, ev.imag] for ev in self.eigenvalues],
            "resonances": [
                {"multi_index": list(p), "residual": r} for p, r in self.resonances
            ],
            "degrees_solved": self.degrees_solved,
            "one_sided": self.one_sided,
            "formal_residual": self.formal_residual,
            "local_residual": self.local_residual,
            "global_residual": self.global_residual,
            "k0_plus": self.k0_plus,
            "k0_minus": self.k0_minus,
            "box_halfwidth": self.box_halfwidth,
            "samples": self.samples,
            "seed": self.seed,
        }


def _default_pipeline_blids(split, local_radius):
    """Blid on X_- sized so the vanishing-split fits inside the local ball.

    The max-norm delta-ball must sit inside the Euclidean ball where the
    local solution is certified, so delta = 0.45 * local_radius; the blid
    bound stays at 80% of delta and the identity radius at half the bound.
    """
    delta = 0.45 * local_radius
    pi_norm = float(np.linalg.norm(split.proj_minus, 2))
    outer = (0.8 * delta / max(pi_norm, 1.0)) ** 2
    inner = outer / 4.0
    tau = make_cutoff(inner, outer)
    h_minus = restricted_blid_map(euclidean_blid_map(tau), Projector(split.proj_minus))
    return delta, h_minus


def solve_cohomological(
    problem,
    tol=1e-8,
    margin=0.05,
    box_halfwidth=3.0,
    samples=2000,
    seed=0,
    resonance_tol=1e-9,
):
    """Full pipeline: formal solve per degree, then local and global stages.

    For a purely polynomial right-hand side the formal solution is already
    global and only a residual scan is run.  A flat extra term goes through
    ``solve_flat_local`` and ``globalize`` (or directly through the
    one-sided orbit series when one invariant subspace is trivial).

    Raises ``SingularResonance`` (with the offending multi-indices) when
    the resonance scan hits at any degree up to the cap, ``NotHyperbolic``
    / ``Singular`` for bad matrices.
    """
    A = np.asarray(problem.matrix, dtype=float)
    split = split_hyperbolic(A, margin=margin)
    # the scan is diagnostic: a resonance only obstructs degrees that f
    # actually loads, which solve_formal detects from the residual
    hits = check_resonances(split.eigenvalues, problem.degree_cap, tol=resonance_tol)

    solved = []
    q_polys = []
    for P in problem.terms:
        Q = solve_formal(A, P, tol=resonance_tol)
        q_polys.append(hompoly_scale(Q, 1.0 / math.factorial(Q.degree)))
        solved.append(Q.degree)

    def g0(x):
        return float(sum(hompoly_eval(Q, x)[0] for Q in q_polys)) if q_polys else 0.0

    rng = np.random.default_rng(seed)
    dim = A.shape[0]
    pts = rng.uniform(-box_halfwidth, box_halfwidth, size=(samples, dim))
    f_poly = problem.poly_evaluator()
    if q_polys:
        vals = (
            sum(hompoly_eval_many(Q, pts @ A.T)[:, 0] for Q in q_polys)
            - sum(hompoly_eval_many(Q, pts)[:, 0] for Q in q_polys)
            - np.array([f_poly(p) for p in pts])
        )
        formal_residual = float(np.max(np.abs(vals)))
    else:
        formal_residual = 0.0

    report = SolveReport(
        q=split.q,
        horizon=split.horizon,
        eigenvalues=list(split.eigenvalues),
        resonances=hits,
        degrees_solved=solved,
        one_sided=(split.dim_plus == 0 or split.dim_minus == 0),
        formal_residual=formal_residual,
        box_halfwidth=box_halfwidth,
        samples=samples,
        seed=seed,
    )

    if problem.flat_term is None:
        report.global_residual = formal_residual
        return g0, report

    flat = problem.flat_term
    if report.one_sided:
        direction = "contraction" if split.dim_minus == 0 else "expansion"

        def g_one_sided(x):
            return g0(x) + solve_series(A, flat, x, direction=direction, tol=tol * 1e-2).value

        scan = rng.uniform(-box_halfwidth, box_halfwidth, size=(min(samples, 200), dim))
        f_full = problem.full_evaluator()
        residual = max(
            abs(g_one_sided(A @ p) - g_one_sided(p) - float(f_full(p))) for p in scan
        )
        report.global_residual = residual
        return g_one_sided, report

    # the globalize pre-check demands a 1e-9 residual on the delta-ball,
    # so the local stage runs well below that
    blid = euclidean_blid_map(make_cutoff(1.0 / 3.0, 1.0 / 2.0))
    local = solve_flat_local(flat, split, blid, tol=1e-10, seed=seed)
    report.local_residual = local.residual_sup

    gamma_cache = {}

    def gamma0(x):
        x = np.asarray(x, dtype=float)
        key = x.tobytes()
        if key not in gamma_cache:
            gamma_cache[key] = g0(x) + local.evaluate(x)
        return gamma_cache[key]

    delta, h_minus = _default_pipeline_blids(split, local.radius)
    result = globalize(
        gamma0,
        problem,
        split,
        h_minus,
        delta,
        box_halfwidth=box_halfwidth,
        samples=min(samples, 60),
        seed=seed,
    )
    report.global_residual = result.residual_sup
    report.k0_plus = result.k0_plus
    report.k0_minus = result.k0_minus
    return result.evaluate, report
