"""Euler-Poincare-Suslov equations on a Lie algebra and on its central extensions.

Everything here runs on generic structure constants.  The se(2) models are
just one choice of ``alg``, ``inertia`` and ``cocycle``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .algebra import StructureAlgebra, se2_algebra, trace_ad
from .extension import AlgebraCocycle2, extend_algebra

SPAN_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class ConstraintSet:
    """Linearly independent covectors ``nu_i``; admissible ``xi`` satisfy ``<nu_i, xi> = 0``."""

    covectors: np.ndarray

    def __post_init__(self):
        nu = np.atleast_2d(np.asarray(self.covectors, dtype=float))
        if nu.shape[0] < 1:
            raise ValueError("at least one constraint covector is required")
        if np.linalg.matrix_rank(nu) != nu.shape[0]:
            raise ValueError("constraint covectors are linearly dependent")
        object.__setattr__(self, "covectors", nu)

    @property
    def n(self) -> int:
        return self.covectors.shape[0]


@dataclass(frozen=True, eq=False)
class EPSSystem:
    inertia: np.ndarray
    constraints: ConstraintSet
    alg: StructureAlgebra | None = None
    cocycle: AlgebraCocycle2 | None = None

    def __post_init__(self):
        I = np.asarray(self.inertia, dtype=float)
        alg = self.alg if self.alg is not None else se2_algebra()
        n = alg.dim
        if I.shape != (n, n):
            raise ValueError(f"inertia must be {n}x{n}")
        if not np.allclose(I, I.T, rtol=0, atol=1e-12) or np.linalg.eigvalsh(I).min() <= 0:
            raise ValueError("inertia not positive definite")
        if self.constraints.covectors.shape[1] != n:
            raise ValueError("constraint covectors do not match the algebra dimension")
        object.__setattr__(self, "inertia", I)
        object.__setattr__(self, "alg", alg)
        D = self.constraints.covectors @ np.linalg.solve(I, self.constraints.covectors.T)
        if np.linalg.eigvalsh(0.5 * (D + D.T)).min() <= 0:
            raise ValueError("constraint matrix <nu_i, I^-1 nu_j> is not positive definite")
        object.__setattr__(self, "_D", D)

    @property
    def D(self) -> np.ndarray:
        return self._D

    def velocity(self, mu) -> np.ndarray:
        return np.linalg.solve(self.inertia, np.asarray(mu, dtype=float))

    def _free_rhs(self, mu, sigma=None) -> np.ndarray:
        xi = self.velocity(mu)
        out = self.alg.coadjoint(xi, mu)
        if sigma is not None:
            if self.cocycle is None:
                raise ValueError("system has no extension cocycle")
            out = out + self.cocycle.covector(sigma, xi, self.alg.dim)
        return out

    def _multipliers(self, free) -> np.ndarray:
        nu = self.constraints.covectors
        b = nu @ np.linalg.solve(self.inertia, free)
        return -np.linalg.solve(self.D, b)


def multipliers_base(sys: EPSSystem, mu) -> np.ndarray:
    return sys._multipliers(sys._free_rhs(mu))


def eps_rhs_base(sys: EPSSystem, mu) -> np.ndarray:
    free = sys._free_rhs(mu)
    return free + sys._multipliers(free) @ sys.constraints.covectors


def multipliers_ext(sys: EPSSystem, mu, sigma) -> np.ndarray:
    return sys._multipliers(sys._free_rhs(mu, sigma))


def eps_rhs_ext(sys: EPSSystem, mu, sigma) -> tuple[np.ndarray, np.ndarray]:
    """``(mu', sigma')``; ``sigma'`` is identically zero."""
    free = sys._free_rhs(mu, sigma)
    mudot = free + sys._multipliers(free) @ sys.constraints.covectors
    return mudot, np.zeros_like(np.asarray(sigma, dtype=float))


def extended_state_rhs(sys: EPSSystem):
    """Vector field on the stacked state ``(mu, sigma)`` for the integrators."""
    n = sys.alg.dim

    def rhs(z):
        mudot, sdot = eps_rhs_ext(sys, z[:n], z[n:])
        return np.concatenate([mudot, sdot])

    return rhs


def lifted_system(sys: EPSSystem, fiber_form=None) -> EPSSystem:
    """The same LL system on ``g x R^m``: block inertia, constraints ``(nu_i, 0)``.

    ``fiber_form`` is the positive quadratic form on ``a*`` used in the extended
    Hamiltonian (identity by default); it is inverted into the inertia block.
    """
    if sys.cocycle is None:
        raise ValueError("system has no extension cocycle")
    n, m = sys.alg.dim, sys.cocycle.fiber_dim
    Q = np.eye(m) if fiber_form is None else np.asarray(fiber_form, dtype=float)
    I = np.zeros((n + m, n + m))
    I[:n, :n] = sys.inertia
    I[n:, n:] = np.linalg.inv(Q)
    nu = np.hstack([sys.constraints.covectors, np.zeros((sys.constraints.n, m))])
    return EPSSystem(I, ConstraintSet(nu), extend_algebra(sys.alg, sys.cocycle))


@dataclass(frozen=True)
class MeasureVerdict:
    exists: bool
    c: float | None
    residual: float


def _criterion(alg: StructureAlgebra, inertia, nu, tol: float) -> MeasureVerdict:
    nu = np.asarray(nu, dtype=float)
    if nu.ndim != 1:
        raise ValueError("the invariant-measure criterion is implemented for a single constraint only")
    I = np.asarray(inertia, dtype=float)
    Iinv_nu = np.linalg.solve(I, nu)
    denom = float(nu @ Iinv_nu)
    if not denom > 0:
        raise ValueError("<nu, I^-1 nu> must be positive")
    w = alg.coadjoint(Iinv_nu, nu) / denom + trace_ad(alg)
    c = float(w @ nu) / float(nu @ nu)
    unit = nu / np.linalg.norm(nu)
    residual = float(np.linalg.norm(w - (w @ unit) * unit))
    exists = residual <= tol
    return MeasureVerdict(exists, c if exists else None, residual)


def _single_covector(nu) -> np.ndarray:
    nu = np.asarray(getattr(nu, "covectors", nu), dtype=float)
    if nu.ndim == 2:
        if nu.shape[0] != 1:
            raise ValueError("the invariant-measure criterion for n >= 2 constraints is out of scope")
        nu = nu[0]
    return nu


def measure_criterion(alg: StructureAlgebra, inertia, nu, tol: float = SPAN_TOL) -> MeasureVerdict:
    """Invariant-measure condition ``ad*_{I^-1 nu} nu / <nu, I^-1 nu> + T in span(nu)``."""
    return _criterion(alg, inertia, _single_covector(nu), tol)


def measure_criterion_extended(alg: StructureAlgebra, C: AlgebraCocycle2, inertia, nu,
                               fiber_form=None, tol: float = SPAN_TOL) -> MeasureVerdict:
    """Same condition evaluated directly on the extended algebra with ``nu_hat = (nu, 0)``."""
    nu = _single_covector(nu)
    n, m = alg.dim, C.fiber_dim
    Q = np.eye(m) if fiber_form is None else np.asarray(fiber_form, dtype=float)
    I = np.zeros((n + m, n + m))
    I[:n, :n] = np.asarray(inertia, dtype=float)
    I[n:, n:] = np.linalg.inv(Q)
    return _criterion(extend_algebra(alg, C), I, np.concatenate([nu, np.zeros(m)]), tol)
