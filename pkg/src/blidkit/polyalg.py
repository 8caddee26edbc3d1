"""Homogeneous polynomial maps on R^m and their multilinear calculus.

A degree-j homogeneous map P: R^m -> R^d is stored as one monomial
coefficient table per output coordinate.  The module provides evaluation,
polarization to the unique symmetric j-linear form, the derivative formula

    P^(n)(z)(x)^n = j (j-1) ... (j-n+1) g(z, ..., z, x, ..., x)

with j-n copies of z and n of x, composition with linear maps, the matrix
of P -> P o A on the monomial basis, and certified continuity bounds.

Conventions (fixed so coefficient vectors are reproducible bit-for-bit):

* monomial basis in descending lexicographic order of exponent tuples,
  e.g. for m = 2, degree 2: (2,0), (1,1), (0,2);
* coefficient vectors are coordinate-major: all basis coefficients of
  output coordinate 0, then coordinate 1, ...;
* continuity bounds certify |P(x)| <= c ||x||_inf^j in the sup norm on
  R^m (and therefore also in the Euclidean norm, which dominates it).

Desk-scale caps: dimension and degree at most 6 (the polarization identity
sums over 2^j sign patterns, and the basis has binom(m+j-1, j) monomials).
"""

import itertools
import math
from dataclasses import dataclass
from typing import Mapping

import numpy as np

from .errors import DegreeTooHigh, DimensionMismatch

__all__ = [
    "MAX_DEGREE",
    "MAX_DIM",
    "monomial_basis",
    "HomPolyMap",
    "scalar_hompoly",
    "vector_hompoly",
    "zero_hompoly",
    "hompoly_eval",
    "hompoly_eval_many",
    "hompoly_scale",
    "SymMultilinear",
    "polarize",
    "eval_multilinear",
    "hompoly_derivative",
    "compose_linear",
    "ln_matrix",
    "coeff_vector",
    "hompoly_from_coeff_vector",
    "continuity_bound",
    "derivative_continuity_bound",
]

MAX_DEGREE = 6
MAX_DIM = 6


def monomial_basis(dim, degree):
    """All exponent tuples with |p| = degree, in descending lex order."""

    def gen(m, n):
        if m == 1:
            yield (n,)
            return
        for k in range(n, -1, -1):
            for rest in gen(m - 1, n - k):
                yield (k,) + rest

    return tuple(gen(dim, degree))


def _validate_coeffs(dim, degree, coeffs):
    table = {}
    for p, c in coeffs.items():
        p = tuple(int(e) for e in p)
        if len(p) != dim:
            raise DimensionMismatch(f"exponent tuple {p} has length != dim {dim}")
        if any(e < 0 for e in p):
            raise ValueError(f"negative exponent in {p}")
        if sum(p) != degree:
            raise ValueError(f"multi-index {p} has |p| != degree {degree}")
        c = float(c)
        if not math.isfinite(c):
            raise ValueError("coefficients must be finite")
        if c != 0.0:
            table[p] = c
    return table


@dataclass(frozen=True, eq=False)
class HomPolyMap:
    """Degree-j homogeneous polynomial map R^dim -> R^codim."""

    dim: int
    codim: int
    degree: int
    coeffs: tuple  # one {multi-index: coefficient} mapping per output coordinate

    def __post_init__(self):
        if not (1 <= self.dim <= MAX_DIM):
            raise DegreeTooHigh(f"dim must be in 1..{MAX_DIM}, got {self.dim}")
        if not (0 <= self.degree <= MAX_DEGREE):
            raise DegreeTooHigh(f"degree must be in 0..{MAX_DEGREE}, got {self.degree}")
        if self.codim < 1:
            raise DimensionMismatch("codim must be >= 1")
        if len(self.coeffs) != self.codim:
            raise DimensionMismatch("need one coefficient table per output coordinate")
        cleaned = tuple(
            _validate_coeffs(self.dim, self.degree, table) for table in self.coeffs
        )
        object.__setattr__(self, "coeffs", cleaned)

    def to_dict(self):
        """JSON form: scalar maps carry a flat entry list under ``coords``,
        vector maps one list per output coordinate."""
        coords = [
            [{"exponents": list(p), "coeff": c} for p, c in sorted(table.items(), reverse=True)]
            for table in self.coeffs
        ]
        return {
            "dim": self.dim,
            "codim": self.codim,
            "degree": self.degree,
            "coords": coords[0] if self.codim == 1 else coords,
        }

    @classmethod
    def from_dict(cls, data):
        coords = data["coords"]
        if coords and isinstance(coords[0], dict):  # flat scalar form
            coords = [coords]
        coeffs = tuple(
            {tuple(entry["exponents"]): float(entry["coeff"]) for entry in coord}
            for coord in coords
        )
        return cls(int(data["dim"]), int(data["codim"]), int(data["degree"]), coeffs)


def scalar_hompoly(dim, degree, coeffs):
    """Scalar-valued homogeneous polynomial from one coefficient mapping."""
    return HomPolyMap(dim, 1, degree, (dict(coeffs),))


def vector_hompoly(dim, degree, coord_coeffs):
    """Vector-valued homogeneous polynomial from per-coordinate mappings."""
    return HomPolyMap(dim, len(coord_coeffs), degree, tuple(dict(c) for c in coord_coeffs))


def zero_hompoly(dim, codim, degree):
    return HomPolyMap(dim, codim, degree, tuple({} for _ in range(codim)))


def _check_vector(P, x, name="x"):
    x = np.asarray(x, dtype=float)
    if x.shape != (P.dim,):
        raise DimensionMismatch(f"{name} must have shape ({P.dim},), got {x.shape}")
    return x


def hompoly_eval(P, x):
    """Evaluate P at a single point; returns an array of shape (codim,)."""
    x = _check_vector(P, x)
    out = np.zeros(P.codim)
    for i, table in enumerate(P.coeffs):
        acc = 0.0
        for p, c in table.items():
            term = c
            for xv, e in zip(x, p):
                if e:
                    term *= xv**e
            acc += term
        out[i] = acc
    return out


def hompoly_eval_many(P, xs):
    """Evaluate P at rows of ``xs`` (shape (N, dim)); returns shape (N, codim)."""
    xs = np.asarray(xs, dtype=float)
    if xs.ndim != 2 or xs.shape[1] != P.dim:
        raise DimensionMismatch(f"points must have shape (N, {P.dim}), got {xs.shape}")
    out = np.zeros((xs.shape[0], P.codim))
    for i, table in enumerate(P.coeffs):
        for p, c in table.items():
            term = np.full(xs.shape[0], c)
            for k, e in enumerate(p):
                if e:
                    term *= xs[:, k] ** e
            out[:, i] += term
    return out


def hompoly_scale(P, factor):
    scaled = tuple({p: factor * c for p, c in table.items()} for table in P.coeffs)
    return HomPolyMap(P.dim, P.codim, P.degree, scaled)


@dataclass(frozen=True, eq=False)
class SymMultilinear:
    """Symmetric j-linear form, stored on sorted index tuples.

    ``entries[(i_1 <= ... <= i_j)]`` is the (codim,) value on the basis
    vectors e_{i_1}, ..., e_{i_j}; values on unsorted tuples follow by
    symmetry.
    """

    dim: int
    codim: int
    order: int
    entries: Mapping

    def __call__(self, *args):
        return eval_multilinear(self, args)


def polarize(P):
    """Symmetric multilinear form with diagonal P, via the polarization identity.

    For each sorted index tuple the entry is recovered from the
    alternating-sign sum over the 2^j sign patterns:

        g(e_{s_1},...,e_{s_j})
            = (1 / (2^j j!)) sum_eps (prod eps) P(sum_k eps_k e_{s_k}).
    """
    j = P.degree
    if j < 1:
        raise DegreeTooHigh("polarization needs degree >= 1")
    if j > MAX_DEGREE:
        raise DegreeTooHigh(f"polarization capped at degree {MAX_DEGREE}")
    scale = 1.0 / (2**j * math.factorial(j))
    entries = {}
    for s in itertools.combinations_with_replacement(range(P.dim), j):
        acc = np.zeros(P.codim)
        for eps in itertools.product((1.0, -1.0), repeat=j):
            vec = np.zeros(P.dim)
            for e, idx in zip(eps, s):
                vec[idx] += e
            sign = math.prod(eps)
            acc += sign * hompoly_eval(P, vec)
        entries[s] = acc * scale
    return SymMultilinear(P.dim, P.codim, j, entries)


def eval_multilinear(g, args):
    """Evaluate the symmetric form on ``args`` (a sequence of ``order`` vectors)."""
    if len(args) != g.order:
        raise DimensionMismatch(f"expected {g.order} arguments, got {len(args)}")
    vecs = [np.asarray(a, dtype=float) for a in args]
    for v in vecs:
        if v.shape != (g.dim,):
            raise DimensionMismatch(f"arguments must have shape ({g.dim},)")
    out = np.zeros(g.codim)
    for idx in itertools.product(range(g.dim), repeat=g.order):
        entry = g.entries.get(tuple(sorted(idx)))
        if entry is None:
            continue
        weight = 1.0
        for k, i in enumerate(idx):
            weight *= vecs[k][i]
        if weight:
            out += weight * entry
    return out


def hompoly_derivative(P, z, x, n):
    """Value of the n-th derivative of P at z, applied to the n-fold x.

    Returns j(j-1)...(j-n+1) g(z,...,z,x,...,x) with j-n copies of z; in
    particular 0 for n > j, and j! P(x) (z-independent) for n = j.
    """
    if n < 0:
        raise ValueError("derivative order must be >= 0")
    z = _check_vector(P, z, "z")
    x = _check_vector(P, x, "x")
    j = P.degree
    if n > j:
        return np.zeros(P.codim)
    if n == 0:
        return hompoly_eval(P, z)
    g = polarize(P)
    falling = 1.0
    for k in range(n):
        falling *= j - k
    return falling * eval_multilinear(g, [z] * (j - n) + [x] * n)


def _poly_mul(d1, d2):
    out = {}
    for p1, c1 in d1.items():
        for p2, c2 in d2.items():
            key = tuple(a + b for a, b in zip(p1, p2))
            out[key] = out.get(key, 0.0) + c1 * c2
    return out


def _linear_power(row, k, dim):
    """Expansion of (sum_i row_i x_i)^k as a multi-index table."""
    if k == 0:
        return {(0,) * dim: 1.0}
    out = {}
    fact_k = math.factorial(k)
    for q in monomial_basis(dim, k):
        coeff = fact_k
        for e in q:
            coeff //= math.factorial(e)
        val = float(coeff)
        for r, e in zip(row, q):
            if e:
                val *= r**e
        if val != 0.0:
            out[q] = val
    return out


def _substitute_monomial(rows, p, dim):
    """Table of prod_i (row_i . x)^{p_i}."""
    acc = {(0,) * dim: 1.0}
    for row, e in zip(rows, p):
        if e:
            acc = _poly_mul(acc, _linear_power(row, e, dim))
    return acc


def compose_linear(P, A):
    """The homogeneous map Q(x) = P(A x), by monomial substitution."""
    A = np.asarray(A, dtype=float)
    if A.shape != (P.dim, P.dim):
        raise DimensionMismatch(f"A must be {P.dim}x{P.dim}, got {A.shape}")
    rows = [A[i, :] for i in range(P.dim)]
    new_coeffs = []
    for table in P.coeffs:
        acc = {}
        for p, c in table.items():
            for q, v in _substitute_monomial(rows, p, P.dim).items():
                acc[q] = acc.get(q, 0.0) + c * v
        new_coeffs.append(acc)
    return HomPolyMap(P.dim, P.codim, P.degree, tuple(new_coeffs))


def ln_matrix(A, n, d=1):
    """Matrix of P -> P o A on degree-n maps R^m -> R^d, monomial basis.

    The scalar block acts on coefficient vectors in descending-lex basis
    order; for d > 1 the full matrix is block-diagonal with d identical
    blocks (coordinate-major vector layout).  For diagonal A the block is
    diagonal with entries lambda^p.
    """
    A = np.asarray(A, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise DimensionMismatch(f"A must be square, got {A.shape}")
    if n < 1:
        raise ValueError("ln_matrix needs degree n >= 1")
    m = A.shape[0]
    basis = monomial_basis(m, n)
    index = {p: i for i, p in enumerate(basis)}
    rows = [A[i, :] for i in range(m)]
    block = np.zeros((len(basis), len(basis)))
    for col, p in enumerate(basis):
        for q, v in _substitute_monomial(rows, p, m).items():
            block[index[q], col] = v
    if d == 1:
        return block
    return np.kron(np.eye(d), block)


def coeff_vector(P):
    """Coefficients of P as a flat vector (coordinate-major, basis order)."""
    basis = monomial_basis(P.dim, P.degree)
    parts = [np.array([table.get(p, 0.0) for p in basis]) for table in P.coeffs]
    return np.concatenate(parts)


def hompoly_from_coeff_vector(dim, codim, degree, vec):
    """Inverse of :func:`coeff_vector`."""
    basis = monomial_basis(dim, degree)
    vec = np.asarray(vec, dtype=float)
    if vec.shape != (codim * len(basis),):
        raise DimensionMismatch(
            f"expected coefficient vector of length {codim * len(basis)}, got {vec.shape}"
        )
    tables = []
    for i in range(codim):
        chunk = vec[i * len(basis) : (i + 1) * len(basis)]
        tables.append({p: c for p, c in zip(basis, chunk) if c != 0.0})
    return HomPolyMap(dim, codim, degree, tuple(tables))


def continuity_bound(P):
    """Certified c with ||P(x)||_inf <= c ||x||_inf^degree.

    The l1 norm of the coefficients per output coordinate works because
    every monomial satisfies |x^p| <= ||x||_inf^degree on R^m.
    """
    if P.codim == 0:
        return 0.0
    return max(sum(abs(c) for c in table.values()) if table else 0.0 for table in P.coeffs)


def derivative_continuity_bound(P, n):
    """Certified sup-norm bound for the n-th derivative polynomial of P.

    Bounds ||P^(n)(z)(x)^n|| over ||z||_inf <= 1, ||x||_inf <= 1 by
    j(j-1)...(j-n+1) times the l1 coefficient mass, using that the
    symmetric form g of P satisfies sum over all index tuples of |g| =
    l1(P) per coordinate.
    """
    j = P.degree
    if n > j:
        return 0.0
    falling = 1.0
    for k in range(n):
        falling *= j - k
    return falling * continuity_bound(P)
