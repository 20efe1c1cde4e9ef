"""Poisson structures given as point-dependent antisymmetric matrices.

Brackets are ``{F, K}(x) = grad F(x)^T P(x) grad K(x)`` and Hamiltonian
vector fields are ``x' = P(x) grad H(x)``.  With the minus Lie-Poisson
structures below this reproduces the Kirchhoff and Chaplygin-Lamb equations
term by term.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Iterable

import numpy as np

from .algebra import StructureAlgebra
from .extension import AlgebraCocycle2

JACOBI_FD_STEP = 1e-5
JACOBI_TOL = 1e-8


@dataclass(frozen=True)
class PoissonStructure:
    dim: int
    bivector: Callable[[np.ndarray], np.ndarray]
    name: str = ""

    def matrix(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if x.shape != (self.dim,):
            raise ValueError(f"{self.name or 'structure'}: point has shape {x.shape}, expected ({self.dim},)")
        return np.asarray(self.bivector(x), dtype=float)

    def bracket(self, F, K, x) -> float:
        return float(_grad(F, x) @ self.matrix(x) @ _grad(K, x))


@dataclass(frozen=True)
class TestFunction:
    """Quadratic ``c + b.x + 1/2 x^T A x`` with exact gradient ``b + A x``."""

    __test__ = False  # not a pytest class

    const: float
    linear: np.ndarray
    quad: np.ndarray = field(default=None)

    def __post_init__(self):
        b = np.asarray(self.linear, dtype=float)
        A = np.zeros((b.size, b.size)) if self.quad is None else np.asarray(self.quad, dtype=float)
        if A.shape != (b.size, b.size):
            raise ValueError("quadratic coefficients must be square and match the linear part")
        object.__setattr__(self, "linear", b)
        object.__setattr__(self, "quad", 0.5 * (A + A.T))

    @property
    def dim(self) -> int:
        return self.linear.size

    def __call__(self, x) -> float:
        x = np.asarray(x, dtype=float)
        return float(self.const + self.linear @ x + 0.5 * x @ self.quad @ x)

    def gradient(self, x) -> np.ndarray:
        return self.linear + self.quad @ np.asarray(x, dtype=float)

    @classmethod
    def random(cls, dim: int, rng: np.random.Generator) -> "TestFunction":
        return cls(rng.uniform(-1, 1), rng.uniform(-1, 1, dim), rng.uniform(-1, 1, (dim, dim)))

    @classmethod
    def coordinate(cls, i: int, dim: int) -> "TestFunction":
        return cls(0.0, np.eye(dim)[i])


def _grad(F, x) -> np.ndarray:
    if hasattr(F, "gradient"):
        return np.asarray(F.gradient(x), dtype=float)
    return np.asarray(F(x), dtype=float)


def _skew(s) -> np.ndarray:
    s0, s1, s2 = s
    return np.array([[0.0, -s2, s1], [s2, 0.0, -s0], [-s1, s0, 0.0]])


# -- concrete structures -----------------------------------------------------------------

def lp_se2(mu) -> np.ndarray:
    _, p1, p2 = np.asarray(mu, dtype=float)
    return np.array([[0.0, -p2, p1], [p2, 0.0, 0.0], [-p1, 0.0, 0.0]])


def lp_magnetic(mu, params) -> np.ndarray:
    """se(2)* structure with the circulation term ``-sigma . (grad F x grad K)``.

    ``sigma = (rho kappa, -rho beta, rho alpha)``; ``params`` is anything
    with a ``sigma`` attribute (e.g. :class:`geps.models.CirculationParams`).
    """
    return lp_se2(mu) + _skew(params.sigma)


def lp_extended(mu_sigma) -> np.ndarray:
    z = np.asarray(mu_sigma, dtype=float)
    P = np.zeros((6, 6))
    P[:3, :3] = lp_se2(z[:3]) + _skew(z[3:])
    return P


def lp_general(alg: StructureAlgebra, C: AlgebraCocycle2 | None = None, sign: int = -1,
               fiber_dim: int | None = None) -> PoissonStructure:
    """Lie-Poisson structure on ``g* x a*`` of the central extension by ``C``.

    ``{F, K} = sign (<mu, [dF, dK]> + <sigma, C(dF, dK)>)`` with derivatives
    taken in ``mu`` only.  ``C=None`` gives the product structure with a
    ``fiber_dim``-dimensional Casimir block (default 0).
    """
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    n = alg.dim
    if C is None:
        m = fiber_dim or 0
        cten = np.zeros((m, n, n))
    else:
        if fiber_dim is not None and fiber_dim != C.fiber_dim:
            raise ValueError(f"fiber_dim {fiber_dim} does not match cocycle fiber dimension {C.fiber_dim}")
        m = C.fiber_dim
        cten = C.tensor(n)
    c = alg.c

    def bivector(z):
        P = np.zeros((n + m, n + m))
        P[:n, :n] = sign * (np.einsum("k,kij->ij", z[:n], c) + np.einsum("a,aij->ij", z[n:], cten))
        return P

    return PoissonStructure(n + m, bivector, name="lie-poisson")


def reduced_sleigh_structure(point, params) -> np.ndarray:
    """Rank-2 bracket on the (omega, v1) plane for :class:`geps.models.SleighParams`."""
    w, v1 = np.asarray(point, dtype=float)
    I = params.inertia
    D = I.D
    if not D > 0:
        raise ValueError(f"M J - L2^2 = {D} must be positive")
    kt = (I.L1 * w + I.Z * v1 + params.circ.rho * params.circ.alpha) / D
    return np.array([[0.0, -kt], [kt, 0.0]])


def as_structure(bivector: Callable, dim: int, name: str = "") -> PoissonStructure:
    return PoissonStructure(dim, bivector, name=name)


SE2 = PoissonStructure(3, lp_se2, name="se2*")
EXTENDED = PoissonStructure(6, lp_extended, name="extended")


def magnetic_structure(params) -> PoissonStructure:
    return PoissonStructure(3, lambda mu: lp_magnetic(mu, params), name="magnetic")


def reduced_sleigh(params) -> PoissonStructure:
    return PoissonStructure(2, lambda x: reduced_sleigh_structure(x, params), name="reduced-sleigh")


# -- evaluation and checks ---------------------------------------------------------------

def ham_vf(P: PoissonStructure, H, point) -> np.ndarray:
    point = np.asarray(point, dtype=float)
    g = _grad(H, point)
    if g.shape != (P.dim,):
        raise ValueError(f"Hamiltonian gradient has shape {g.shape}, expected ({P.dim},)")
    return P.matrix(point) @ g


def _bracket_gradient_fd(P: PoissonStructure, G, K, x, step: float) -> np.ndarray:
    out = np.empty(P.dim)
    for i in range(P.dim):
        e = np.zeros(P.dim)
        e[i] = step
        out[i] = (P.bracket(G, K, x + e) - P.bracket(G, K, x - e)) / (2.0 * step)
    return out


def jacobi_residual(P: PoissonStructure, point, F, G, K, step: float = JACOBI_FD_STEP) -> float:
    """``|{F,{G,K}} + {G,{K,F}} + {K,{F,G}}|`` at ``point``.

    Inner brackets are exact; the outer one differentiates them by central
    differences with ``step``.
    """
    x = np.asarray(point, dtype=float)
    Px = P.matrix(x)
    total = 0.0
    for a, b, c in ((F, G, K), (G, K, F), (K, F, G)):
        total += _grad(a, x) @ Px @ _bracket_gradient_fd(P, b, c, x, step)
    return abs(float(total))


def antisymmetry_defect(P: PoissonStructure, point) -> float:
    M = P.matrix(point)
    return float(np.max(np.abs(M + M.T)))


def casimir_check(P: PoissonStructure, F, samples: Iterable) -> float:
    """Largest ``|P(x) grad F(x)|`` over ``samples``."""
    worst = 0.0
    for x in samples:
        x = np.asarray(x, dtype=float)
        worst = max(worst, float(np.linalg.norm(P.matrix(x) @ _grad(F, x))))
    return worst


@dataclass(frozen=True)
class AffineMap:
    """``x -> matrix @ x + offset``."""

    matrix: np.ndarray
    offset: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "matrix", np.atleast_2d(np.asarray(self.matrix, dtype=float)))
        object.__setattr__(self, "offset", np.asarray(self.offset, dtype=float))

    def __call__(self, x) -> np.ndarray:
        return self.matrix @ np.asarray(x, dtype=float) + self.offset

    def pull_back(self, F) -> TestFunction:
        """``F o self`` for a quadratic test function ``F``."""
        A, b = self.matrix, self.offset
        return TestFunction(F(b), A.T @ F.gradient(b), A.T @ F.quad @ A)

    @classmethod
    def identity(cls, dim: int) -> "AffineMap":
        return cls(np.eye(dim), np.zeros(dim))


def poisson_map_residual(phi: AffineMap, P_src: PoissonStructure, P_dst: PoissonStructure, F, K, point) -> float:
    """``|{F o phi, K o phi}_src(x) - {F, K}_dst(phi(x))|``."""
    x = np.asarray(point, dtype=float)
    lhs = P_src.bracket(phi.pull_back(F), phi.pull_back(K), x)
    rhs = P_dst.bracket(F, K, phi(x))
    return abs(lhs - rhs)
