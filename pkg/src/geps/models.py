"""Planar rigid bodies in potential flow, the hydrodynamic Chaplygin sleigh
and the charged particle in a magnetic field.

Added masses and circulation constants are inputs; nothing here solves the
fluid boundary-value problems.
"""
from __future__ import annotations

from dataclasses import dataclass, replace
from functools import cached_property

import numpy as np

from .algebra import coadjoint_se2
from .poisson import TestFunction

EQUILIBRIUM_TOL = 1e-10


def _is_positive_definite(m: np.ndarray) -> bool:
    m = np.asarray(m, dtype=float)
    if not np.allclose(m, m.T, rtol=0, atol=1e-12):
        return False
    return all(np.linalg.det(m[:k, :k]) > 0 for k in range(1, m.shape[0] + 1))


@dataclass(frozen=True)
class InertiaTensor:
    """Total inertia ``[[J, -L2, L1], [-L2, M, Z], [L1, Z, N]]``."""

    J: float
    L1: float
    L2: float
    M: float
    Z: float
    N: float

    def __post_init__(self):
        if not _is_positive_definite(self.matrix):
            raise ValueError("inertia not positive definite")

    @property
    def matrix(self) -> np.ndarray:
        return np.array([[self.J, -self.L2, self.L1],
                         [-self.L2, self.M, self.Z],
                         [self.L1, self.Z, self.N]], dtype=float)

    def __array__(self, dtype=None, copy=None):
        return self.matrix if dtype is None else self.matrix.astype(dtype)

    @property
    def det(self) -> float:
        J, L1, L2, M, Z, N = self.J, self.L1, self.L2, self.M, self.Z, self.N
        return J * (M * N - Z * Z) + L2 * (-L2 * N - Z * L1) + L1 * (-L2 * Z - M * L1)

    @property
    def inverse(self) -> np.ndarray:
        """Closed-form adjugate over determinant."""
        J, L1, L2, M, Z, N = self.J, self.L1, self.L2, self.M, self.Z, self.N
        adj = np.array([
            [M * N - Z * Z, Z * L1 + N * L2, -Z * L2 - M * L1],
            [Z * L1 + N * L2, J * N - L1 * L1, -L1 * L2 - J * Z],
            [-Z * L2 - M * L1, -L1 * L2 - J * Z, J * M - L2 * L2],
        ])
        return adj / self.det

    @cached_property
    def _inverse(self) -> np.ndarray:
        # private cache for the vector fields; ``inverse`` hands out fresh copies
        return self.inverse

    @property
    def D(self) -> float:
        return self.M * self.J - self.L2 ** 2

    @classmethod
    def from_matrix(cls, m) -> "InertiaTensor":
        m = np.asarray(m, dtype=float)
        if m.shape != (3, 3) or not np.allclose(m, m.T, rtol=0, atol=1e-12):
            raise ValueError("inertia matrix must be a symmetric 3x3 matrix")
        return cls(J=m[0, 0], L1=m[0, 2], L2=-m[0, 1], M=m[1, 1], Z=m[1, 2], N=m[2, 2])

    @classmethod
    def identity(cls) -> "InertiaTensor":
        return cls(1.0, 0.0, 0.0, 1.0, 0.0, 1.0)


@dataclass(frozen=True)
class BodyParams:
    m: float
    I_cm: float
    a: float = 0.0
    b: float = 0.0

    def __post_init__(self):
        if not (self.m > 0 and self.I_cm > 0):
            raise ValueError("body mass and moment of inertia must be positive")


@dataclass(frozen=True)
class CirculationParams:
    rho: float = 1.0
    kappa: float = 0.0
    alpha: float = 0.0
    beta: float = 0.0

    def __post_init__(self):
        if not self.rho > 0:
            raise ValueError("fluid density must be positive")

    @property
    def sigma(self) -> np.ndarray:
        return np.array([self.rho * self.kappa, -self.rho * self.beta, self.rho * self.alpha])


@dataclass(frozen=True)
class SleighParams:
    inertia: InertiaTensor
    circ: CirculationParams


@dataclass(frozen=True)
class HeisenbergParams:
    mass: np.ndarray
    charge: float = 1.0
    field: float = 1.0

    def __post_init__(self):
        m = np.atleast_2d(np.asarray(self.mass, dtype=float))
        if m.shape == (1, 1):
            m = m[0, 0] * np.eye(2)
        if m.shape != (2, 2) or not _is_positive_definite(m):
            raise ValueError("mass matrix must be a positive definite 2x2 matrix")
        object.__setattr__(self, "mass", m)


# -- inertia assembly --------------------------------------------------------------------

def body_inertia(p: BodyParams) -> np.ndarray:
    m, a, b = p.m, p.a, p.b
    return np.array([[p.I_cm + m * (a * a + b * b), -m * b, m * a],
                     [-m * b, m, 0.0],
                     [m * a, 0.0, m]])


def total_inertia(ib, added) -> InertiaTensor:
    """``I_F + I_B`` as an :class:`InertiaTensor`; rejects non-positive sums."""
    total = np.asarray(ib, dtype=float) + np.asarray(added, dtype=float)
    return InertiaTensor.from_matrix(total)


# -- unconstrained fluid-body equations ---------------------------------------------------

def velocity(mu, inertia: InertiaTensor) -> np.ndarray:
    return inertia._inverse @ np.asarray(mu, dtype=float)


def kirchhoff_rhs(mu, inertia: InertiaTensor) -> np.ndarray:
    return coadjoint_se2(velocity(mu, inertia), mu)


def chaplygin_lamb_rhs(mu, inertia: InertiaTensor, circ: CirculationParams) -> np.ndarray:
    mu = np.asarray(mu, dtype=float)
    k, p1, p2 = mu.tolist()
    w, v1, v2 = (inertia._inverse @ mu).tolist()
    rho, kap, al, be = circ.rho, circ.kappa, circ.alpha, circ.beta
    return np.array([
        v2 * p1 - v1 * p2 - rho * (al * v1 + be * v2),
        w * p2 - kap * rho * v2 + rho * al * w,
        -w * p1 + kap * rho * v1 + rho * be * w,
    ])


def momentum_shift(circ: CirculationParams) -> np.ndarray:
    """``(0, sigma1, sigma2)``: adding it to ``mu`` removes the constants (alpha, beta)."""
    s = circ.sigma
    return np.array([0.0, s[1], s[2]])


def frame_shift(circ: CirculationParams, r: float, s: float) -> CirculationParams:
    """Circulation constants after moving the body origin to (r, s)."""
    return replace(circ, alpha=circ.alpha - r * circ.kappa, beta=circ.beta - s * circ.kappa)


def full_hamiltonian(mu, inertia: InertiaTensor) -> float:
    mu = np.asarray(mu, dtype=float)
    return 0.5 * float(mu @ velocity(mu, inertia))


def hamiltonian_function(inertia: InertiaTensor, fiber_dim: int = 0) -> TestFunction:
    """``1/2 mu I^-1 mu`` on ``se(2)* x R^fiber_dim`` as a quadratic test function."""
    n = 3 + fiber_dim
    A = np.zeros((n, n))
    A[:3, :3] = np.linalg.inv(inertia.matrix)
    return TestFunction(0.0, np.zeros(n), A)


def casimir_fbar(mu, sigma) -> float:
    k, p1, p2 = np.asarray(mu, dtype=float)
    s0, s1, s2 = np.asarray(sigma, dtype=float)
    return p1 * p1 + p2 * p2 + 2 * s0 * k + 2 * s1 * p1 + 2 * s2 * p2


def fbar_function() -> TestFunction:
    """``Fbar`` as a quadratic on the 6-dimensional ``(mu, sigma)`` space."""
    A = np.zeros((6, 6))
    A[1, 1] = A[2, 2] = 2.0
    for i in range(3):
        A[i, 3 + i] = A[3 + i, i] = 2.0
    return TestFunction(0.0, np.zeros(6), A)


def fbar_leaf_kind(sigma) -> str:
    """Shape of the level sets of ``Fbar`` in mu-space at fixed ``sigma``.

    ``Fbar`` restricted to mu has quadratic part ``p1^2 + p2^2`` (rank 2, no k)
    and linear part ``2 sigma``; a nonzero k-coefficient makes the level sets
    elliptic paraboloids, otherwise they are cylinders along k.
    """
    s = np.asarray(sigma, dtype=float)
    quad = np.diag([0.0, 1.0, 1.0])
    lin = 2.0 * s
    null = np.linalg.eigh(quad)[1][:, np.isclose(np.linalg.eigvalsh(quad), 0.0)]
    if np.linalg.matrix_rank(quad) == 2 and abs(float(null[:, 0] @ lin)) > 0:
        return "paraboloid"
    return "cylinder"


# -- hydrodynamic Chaplygin sleigh ----------------------------------------------------------

def _floats(x) -> list[float]:
    # python floats are much cheaper than numpy scalars in the small vector fields
    return np.asarray(x, dtype=float).tolist()


def _factor(w, v1, p: SleighParams) -> float:
    I = p.inertia
    return I.L1 * w + I.Z * v1 + p.circ.rho * p.circ.alpha


def sleigh_reduced_rhs(state, p: SleighParams) -> np.ndarray:
    w, v1 = _floats(state)
    I = p.inertia
    f = _factor(w, v1, p) / I.D
    return np.array([f * (I.L2 * w - I.M * v1), f * (I.J * w - I.L2 * v1)])


def sleigh_divergence(state, p: SleighParams) -> float:
    w, v1 = _floats(state)
    I = p.inertia
    return (I.L1 * (I.L2 * w - I.M * v1) + I.Z * (I.J * w - I.L2 * v1)) / I.D


def sleigh_multiplier_mu(mu, p: SleighParams) -> float:
    """Multiplier keeping ``v2`` constant, at an arbitrary momentum ``mu``."""
    Iinv = p.inertia._inverse
    f = chaplygin_lamb_rhs(mu, p.inertia, p.circ)
    return -float((Iinv @ f)[2]) / Iinv[2, 2]


def sleigh_multiplier(state, p: SleighParams) -> float:
    w, v1 = state
    mu = p.inertia.matrix @ np.array([w, v1, 0.0])
    return sleigh_multiplier_mu(mu, p)


def sleigh_constrained_rhs(mu, p: SleighParams) -> np.ndarray:
    """Chaplygin-Lamb equations plus the reaction ``lambda (0, 0, 1)``."""
    out = chaplygin_lamb_rhs(mu, p.inertia, p.circ)
    Iinv = p.inertia._inverse
    out[2] -= float(Iinv[2] @ out) / Iinv[2, 2]
    return out


def reduced_energy(state, p: SleighParams) -> float:
    w, v1 = _floats(state)
    I = p.inertia
    return 0.5 * (I.J * w * w + I.M * v1 * v1 - 2 * I.L2 * w * v1)


def _energy_form(p: SleighParams) -> np.ndarray:
    I = p.inertia
    return np.array([[I.J, -I.L2], [-I.L2, I.M]])


@dataclass(frozen=True)
class EquilibriumLine:
    """``{(omega, v1) : a . (omega, v1) + c = 0}`` with ``a = (L1, Z)``, ``c = rho alpha``."""

    L1: float
    Z: float
    c: float
    kind: str  # "line", "empty" (no equilibria) or "all" (factor vanishes identically)

    @property
    def normal(self) -> np.ndarray:
        return np.array([self.L1, self.Z])

    def residual(self, point) -> float:
        return float(self.normal @ np.asarray(point, dtype=float) + self.c)

    def distance(self, point) -> float:
        return abs(self.residual(point)) / float(np.linalg.norm(self.normal))

    def point(self, s: float) -> np.ndarray:
        """Point at signed arclength ``s`` from the foot of the origin."""
        a = self.normal
        n2 = float(a @ a)
        return -self.c * a / n2 + s * np.array([-a[1], a[0]]) / np.sqrt(n2)


def equilibria_line(p: SleighParams) -> EquilibriumLine:
    I = p.inertia
    c = p.circ.rho * p.circ.alpha
    if I.L1 == 0 and I.Z == 0:
        kind = "all" if c == 0 else "empty"
    else:
        kind = "line"
    return EquilibriumLine(I.L1, I.Z, c, kind)


def transverse_eigenvalue(point, p: SleighParams) -> float:
    """Nonzero Jacobian eigenvalue of the reduced flow at a point of the line."""
    return sleigh_divergence(point, p)


def classify_equilibrium(point, p: SleighParams, tol: float = EQUILIBRIUM_TOL) -> str:
    line = equilibria_line(p)
    if line.kind != "line" or abs(line.residual(point)) > tol:
        raise ValueError(f"point {tuple(point)} is not on the line of equilibria")
    lam = transverse_eigenvalue(point, p)
    if lam < -tol:
        return "stable"
    if lam > tol:
        return "unstable"
    return "degenerate"


def separatrix_energy(p: SleighParams) -> float | None:
    """Minimum of the reduced energy on the line of equilibria, if the line exists."""
    line = equilibria_line(p)
    if line.kind != "line":
        return None
    a = line.normal
    q = float(a @ np.linalg.solve(_energy_form(p), a))
    return line.c ** 2 / (2.0 * q)


def tangency_point(p: SleighParams) -> np.ndarray | None:
    """Where the energy ellipse ``H = h0`` touches the line."""
    line = equilibria_line(p)
    if line.kind != "line":
        return None
    a = line.normal
    Qa = np.linalg.solve(_energy_form(p), a)
    return -line.c * Qa / float(a @ Qa)


def line_energy_intersections(h: float, p: SleighParams) -> np.ndarray:
    """Points of the line with reduced energy ``h`` (0, 1 or 2 rows)."""
    line = equilibria_line(p)
    if line.kind != "line":
        return np.zeros((0, 2))
    Q = _energy_form(p)
    x0 = line.point(0.0)
    d = line.point(1.0) - x0
    # H(x0 + s d) = 1/2 (d.Qd) s^2 + (x0.Qd) s + H(x0)
    qa, qb, qc = 0.5 * d @ Q @ d, x0 @ Q @ d, 0.5 * x0 @ Q @ x0 - h
    disc = qb * qb - 4 * qa * qc
    if disc < 0:
        return np.zeros((0, 2))
    if disc == 0:
        return np.array([x0 - qb / (2 * qa) * d])
    r = np.sqrt(disc)
    return np.array([x0 + (-qb - r) / (2 * qa) * d, x0 + (-qb + r) / (2 * qa) * d])


# -- charged particle ---------------------------------------------------------------------

def heisenberg_rhs(pvec, params: HeisenbergParams, sigma: float) -> np.ndarray:
    """Lorentz force ``p' = sigma v x B e_z`` with ``v = mass^-1 p``."""
    v1, v2 = np.linalg.solve(params.mass, np.asarray(pvec, dtype=float))
    B = params.field
    return sigma * np.array([v2 * B, -v1 * B])


def heisenberg_hamiltonian(params: HeisenbergParams) -> TestFunction:
    return TestFunction(0.0, np.zeros(2), np.linalg.inv(params.mass))
