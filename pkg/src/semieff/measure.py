"""Numerical integration and the centered-L2 calculus under a density.

All function-space objects are materialised as vectors of values on the
nodes of one :class:`IntegrationScheme`.  Inner products are weighted dot
products

    <f, g>_p = sum_i w_i f(x_i) g(x_i) p(x_i)

where ``w`` discretises the dominating measure (Lebesgue on an interval,
counting on a lattice, or an importance-weighted empirical measure for
Monte-Carlo schemes).  Projections onto finite spans are small linear
solves against the Gram matrix.

Everything here is immutable and purely functional; concurrent read-only
use needs no synchronisation.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy.linalg import cho_factor, cho_solve

from .config import DEFAULT_TOL, Tolerances
from .errors import ConfigurationError, NumericalError


# ---------------------------------------------------------------------------
# Integration schemes
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class IntegrationScheme:
    """Nodes and weights defining every integral in one analysis.

    ``weights`` follow the stated convention per kind: quadrature weights
    for ``gauss-legendre-on-interval``, all ones for ``discrete-lattice``
    and all ``1/N`` for ``monte-carlo``.  For Monte-Carlo nodes drawn from
    ``draw_density`` the effective weights against the dominating measure
    are ``weights / draw_density`` (importance form), exposed via
    :attr:`lambda_weights`.
    """

    kind: str  # gauss-legendre-on-interval | discrete-lattice | monte-carlo
    nodes: np.ndarray  # (N,) scalars or (N, d) lattice points
    weights: np.ndarray  # (N,)
    seed: int | None = None  # monte-carlo only
    truncation: tuple[float, float] | None = None  # continuous only
    draw_density: np.ndarray | None = None  # monte-carlo only

    def __post_init__(self) -> None:
        nodes = np.asarray(self.nodes, dtype=float)
        weights = np.asarray(self.weights, dtype=float)
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "weights", weights)
        if weights.ndim != 1 or len(weights) < 2 or len(weights) != len(nodes):
            raise ConfigurationError(
                "node and weight vectors must have equal length >= 2"
            )
        if np.any(weights < 0):
            raise ConfigurationError("integration weights must be nonnegative")
        if self.kind == "monte-carlo":
            if self.seed is None:
                raise ConfigurationError("monte-carlo scheme requires a seed")
            if not np.allclose(weights, 1.0 / len(weights)):
                raise ConfigurationError("monte-carlo weights must all equal 1/N")
            if self.draw_density is None:
                raise ConfigurationError(
                    "monte-carlo scheme requires the draw density at its nodes"
                )
            object.__setattr__(
                self, "draw_density", np.asarray(self.draw_density, dtype=float)
            )

    @property
    def n_nodes(self) -> int:
        return len(self.weights)

    @property
    def lambda_weights(self) -> np.ndarray:
        """Weights against the dominating measure."""
        if self.kind == "monte-carlo":
            return self.weights / self.draw_density
        return self.weights

    def integrate(self, values: np.ndarray) -> float:
        """Integral of a function (given by node values) against lambda."""
        return float(np.dot(self.lambda_weights, values))


def gauss_legendre_scheme(
    a: float, b: float, n_nodes: int = 201, n_panels: int = 1
) -> IntegrationScheme:
    """Composite Gauss-Legendre rule with ``n_nodes`` per panel on [a, b]."""
    if not b > a:
        raise ConfigurationError(f"empty interval [{a}, {b}]")
    base_x, base_w = np.polynomial.legendre.leggauss(int(n_nodes))
    edges = np.linspace(a, b, int(n_panels) + 1)
    xs, ws = [], []
    for lo, hi in zip(edges[:-1], edges[1:]):
        half = 0.5 * (hi - lo)
        xs.append(half * base_x + 0.5 * (hi + lo))
        ws.append(half * base_w)
    return IntegrationScheme(
        kind="gauss-legendre-on-interval",
        nodes=np.concatenate(xs),
        weights=np.concatenate(ws),
        truncation=(float(a), float(b)),
    )


def lattice_scheme(points: np.ndarray) -> IntegrationScheme:
    """Counting-measure scheme over an explicit list of lattice points."""
    points = np.asarray(points, dtype=float)
    return IntegrationScheme(
        kind="discrete-lattice",
        nodes=points,
        weights=np.ones(len(points)),
    )


def monte_carlo_scheme(
    sampler: Callable[[int, int], np.ndarray],
    density_fn: Callable[[np.ndarray], np.ndarray],
    n_nodes: int,
    seed: int,
) -> IntegrationScheme:
    """Scheme whose nodes are i.i.d. draws from ``density_fn``.

    ``sampler(seed, n)`` must be deterministic in its seed; re-creating
    the scheme with the same arguments is bit-reproducible.
    """
    nodes = np.asarray(sampler(int(seed), int(n_nodes)), dtype=float)
    q = np.asarray(density_fn(nodes), dtype=float)
    if np.any(q <= 0):
        raise ConfigurationError("draw density must be positive at every node")
    return IntegrationScheme(
        kind="monte-carlo",
        nodes=nodes,
        weights=np.full(len(nodes), 1.0 / len(nodes)),
        seed=int(seed),
        draw_density=q,
    )


def check_mass(
    scheme: IntegrationScheme, density: np.ndarray, tol: Tolerances = DEFAULT_TOL
) -> float:
    """Return the mass defect |integral(p) - 1|, raising if above tol.mass."""
    defect = abs(scheme.integrate(np.asarray(density, dtype=float)) - 1.0)
    if defect > tol.mass:
        raise ConfigurationError(
            f"density mass deviates from 1 by {defect:.3e} (> {tol.mass:.1e}); "
            "widen the truncation interval or refine the scheme"
        )
    return defect


# ---------------------------------------------------------------------------
# L2 vectors
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class L2Vec:
    """A function materialised at scheme nodes, tagged with its base density."""

    values: np.ndarray
    base_density: np.ndarray
    scheme: IntegrationScheme

    def __post_init__(self) -> None:
        values = np.asarray(self.values, dtype=float)
        dens = np.asarray(self.base_density, dtype=float)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "base_density", dens)
        if len(values) != self.scheme.n_nodes or len(dens) != self.scheme.n_nodes:
            raise ConfigurationError("L2Vec length must match the scheme nodes")

    def with_values(self, values: np.ndarray) -> "L2Vec":
        return L2Vec(values, self.base_density, self.scheme)

    def norm(self) -> float:
        return float(np.sqrt(max(inner_product(self, self), 0.0)))


def materialise(
    fn: Callable[[np.ndarray], np.ndarray],
    density: np.ndarray,
    scheme: IntegrationScheme,
) -> L2Vec:
    """Evaluate ``fn`` at the scheme nodes and wrap it as an L2Vec."""
    return L2Vec(np.asarray(fn(scheme.nodes), dtype=float), density, scheme)


def _require_compatible(f: L2Vec, g: L2Vec) -> None:
    if f.scheme is not g.scheme:
        raise ConfigurationError("L2Vecs live on different integration schemes")
    if not np.array_equal(f.base_density, g.base_density):
        raise ConfigurationError("L2Vecs carry different base densities")


def inner_product(f: L2Vec, g: L2Vec) -> float:
    """Weighted inner product sum_i w_i f(x_i) g(x_i) p(x_i)."""
    _require_compatible(f, g)
    return float(
        np.dot(f.scheme.lambda_weights * f.base_density, f.values * g.values)
    )


def expectation(f: L2Vec) -> float:
    """E_p[f] under the vector's own base density."""
    return float(
        np.dot(f.scheme.lambda_weights * f.base_density, f.values)
    )


def center(f: L2Vec) -> L2Vec:
    """Subtract the mean under the base density; idempotent."""
    return f.with_values(f.values - expectation(f))


# ---------------------------------------------------------------------------
# Subspaces and projections
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class Subspace:
    """Finite span of L2Vecs sharing one scheme and base density."""

    basis: tuple[L2Vec, ...]
    ridge: float = 0.0
    gram: np.ndarray = field(init=False)

    def __post_init__(self) -> None:
        if len(self.basis) == 0:
            raise ConfigurationError("a subspace needs at least one basis vector")
        first = self.basis[0]
        for b in self.basis[1:]:
            _require_compatible(first, b)
        mat = self.matrix
        wp = first.scheme.lambda_weights * first.base_density
        gram = mat.T @ (wp[:, None] * mat)
        asym = np.max(np.abs(gram - gram.T))
        scale = max(np.max(np.abs(gram)), 1e-300)
        if asym > 1e-12 * scale:
            raise NumericalError("Gram matrix asymmetry exceeds 1e-12 relative")
        object.__setattr__(self, "gram", 0.5 * (gram + gram.T))

    @property
    def scheme(self) -> IntegrationScheme:
        return self.basis[0].scheme

    @property
    def base_density(self) -> np.ndarray:
        return self.basis[0].base_density

    @property
    def dim(self) -> int:
        return len(self.basis)

    @property
    def matrix(self) -> np.ndarray:
        """Node-values matrix with one basis vector per column."""
        return np.column_stack([b.values for b in self.basis])

    def suggested_ridge(self) -> float:
        return 1e-10 * float(np.trace(self.gram)) / self.dim


def span(vectors: Sequence[L2Vec], ridge: float = 0.0) -> Subspace:
    return Subspace(tuple(vectors), ridge=float(ridge))


def _solve_gram(s: Subspace, rhs: np.ndarray) -> np.ndarray:
    g = s.gram + s.ridge * np.eye(s.dim)
    try:
        return cho_solve(cho_factor(g), rhs)
    except np.linalg.LinAlgError as exc:  # pragma: no cover - scipy raises its own
        raise NumericalError(
            "singular Gram matrix; retry with ridge > 0 "
            f"(suggested {s.suggested_ridge():.3e})"
        ) from exc
    except Exception as exc:
        raise NumericalError(
            "Gram factorisation failed; retry with ridge > 0 "
            f"(suggested {s.suggested_ridge():.3e})"
        ) from exc


def project(f: L2Vec, s: Subspace) -> L2Vec:
    """Orthogonal projection of f onto the span, via the Gram solve."""
    _require_compatible(f, s.basis[0])
    rhs = np.array([inner_product(b, f) for b in s.basis])
    coeffs = _solve_gram(s, rhs)
    return f.with_values(s.matrix @ coeffs)


def complement_project(f: L2Vec, s: Subspace) -> L2Vec:
    """Residual of f after projecting onto the span; orthogonal to it."""
    proj = project(f, s)
    return f.with_values(f.values - proj.values)


def orthonormal_basis(s: Subspace, rank_tol: float = 1e-10) -> np.ndarray:
    """Columns: an orthonormal basis of the span in the embedded geometry.

    Embedding x -> x * sqrt(w p) turns <.,.>_p into the Euclidean inner
    product, so an SVD gives the basis; directions with singular value
    below ``rank_tol`` times the largest are dropped.
    """
    wp = s.scheme.lambda_weights * s.base_density
    root = np.sqrt(wp)
    embedded = root[:, None] * s.matrix
    u, sv, _ = np.linalg.svd(embedded, full_matrices=False)
    if sv.size == 0 or sv[0] <= 0.0:
        raise NumericalError("degenerate basis: span has numerical rank 0")
    keep = sv > rank_tol * sv[0]
    if not np.any(keep):
        raise NumericalError("degenerate basis: span has numerical rank 0")
    return u[:, keep]


def principal_angles(s1: Subspace, s2: Subspace) -> np.ndarray:
    """Cosines of the principal angles between two spans, sorted descending."""
    _require_compatible(s1.basis[0], s2.basis[0])
    q1 = orthonormal_basis(s1)
    q2 = orthonormal_basis(s2)
    sv = np.linalg.svd(q1.T @ q2, compute_uv=False)
    return np.clip(np.sort(sv)[::-1], 0.0, 1.0)


def refinement_delta(
    fn: Callable[[np.ndarray], np.ndarray],
    density_fn: Callable[[np.ndarray], np.ndarray],
    a: float,
    b: float,
    n_nodes: int,
) -> float:
    """Diagnostic: change in integral(fn * p) when doubling the node count.

    Discretisation error is not bounded a priori; this surfaces the
    scheme-refinement convergence as an observable quantity.
    """
    coarse = gauss_legendre_scheme(a, b, n_nodes)
    fine = gauss_legendre_scheme(a, b, 2 * n_nodes)
    iv_coarse = coarse.integrate(fn(coarse.nodes) * density_fn(coarse.nodes))
    iv_fine = fine.integrate(fn(fine.nodes) * density_fn(fine.nodes))
    return abs(iv_fine - iv_coarse)
