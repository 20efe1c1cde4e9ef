"""Cocycles and central extensions of SE(2) and se(2).

The SE(2) extension by R^3 used for circulation is built from

* ``B1(g, h) = 1/2 x . J R_theta x'`` (oscillator group), and
* ``B2(g, h) = R_theta x' - x'`` (an R^2-valued trivial cocycle),

packed as ``B = (B1, B2)``.  Its infinitesimal cocycle is the cross product
``C(xi, eta) = xi x eta`` of coordinate triples.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .algebra import StructureAlgebra, bracket_se2, group_inv, group_mul, rotation

# symplectic matrix of the oscillator cocycle
SYMPLECTIC = np.array([[0.0, 1.0], [-1.0, 0.0]])

FD_STEP = 1e-4
CONSISTENCY_TOL = 1e-6


def _as_fiber(value, m: int) -> np.ndarray:
    out = np.atleast_1d(np.asarray(value, dtype=float))
    if out.shape != (m,):
        raise ValueError(f"cocycle returned shape {out.shape}, expected ({m},)")
    return out


@dataclass(frozen=True)
class GroupCocycle:
    fiber_dim: int
    evaluate: Callable

    def __call__(self, g, h) -> np.ndarray:
        return _as_fiber(self.evaluate(g, h), self.fiber_dim)


@dataclass(frozen=True)
class AlgebraCocycle2:
    """Antisymmetric bilinear map ``g x g -> R^m``."""

    fiber_dim: int
    evaluate: Callable

    def __call__(self, xi, eta) -> np.ndarray:
        return _as_fiber(self.evaluate(xi, eta), self.fiber_dim)

    def tensor(self, dim: int) -> np.ndarray:
        """Components ``t[a, i, j] = C(e_i, e_j)_a``."""
        basis = np.eye(dim)
        t = np.zeros((self.fiber_dim, dim, dim))
        for i in range(dim):
            for j in range(dim):
                t[:, i, j] = self(basis[i], basis[j])
        return t

    def covector(self, sigma, xi, dim: int) -> np.ndarray:
        """``sigma o C(xi, .)``: the covector ``eta -> <sigma, C(xi, eta)>``."""
        return np.einsum("a,aij,i->j", np.asarray(sigma, dtype=float), self.tensor(dim), xi)


@dataclass(frozen=True)
class OneCocycle:
    """Linear map ``g -> R^m`` stored as an ``m x dim`` matrix."""

    matrix: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "matrix", np.atleast_2d(np.asarray(self.matrix, dtype=float)))

    @property
    def fiber_dim(self) -> int:
        return self.matrix.shape[0]

    def __call__(self, xi) -> np.ndarray:
        return self.matrix @ np.asarray(xi, dtype=float)

    def __neg__(self) -> "OneCocycle":
        return OneCocycle(-self.matrix)

    def dual(self, sigma) -> np.ndarray:
        """``A_sigma`` in g*, with ``A_sigma(xi) = <sigma, A(xi)>``."""
        return self.matrix.T @ np.asarray(sigma, dtype=float)


@dataclass(frozen=True)
class Extended:
    """Element of a product ``V x R^m`` (algebra, dual or group side)."""

    base: np.ndarray
    fiber: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "base", np.asarray(self.base, dtype=float))
        object.__setattr__(self, "fiber", np.atleast_1d(np.asarray(self.fiber, dtype=float)))

    @property
    def vector(self) -> np.ndarray:
        return np.concatenate([self.base, self.fiber])

    @classmethod
    def split(cls, vec, base_dim: int) -> "Extended":
        vec = np.asarray(vec, dtype=float)
        return cls(vec[:base_dim], vec[base_dim:])


ExtendedAlgebraElement = Extended
ExtendedDualElement = Extended
ExtendedGroupElement = Extended


# -- closed-form cocycles of the circulation extension --------------------------------

def group_cocycle_B1(g, h) -> float:
    th, x, y = np.asarray(g, dtype=float)
    _, x_, y_ = np.asarray(h, dtype=float)
    return 0.5 * float(np.array([x, y]) @ SYMPLECTIC @ rotation(th) @ np.array([x_, y_]))


def group_cocycle_B2(g, h) -> np.ndarray:
    th = float(np.asarray(g, dtype=float)[0])
    xp = np.asarray(h, dtype=float)[1:]
    return rotation(th) @ xp - xp


def combined_B(g, h) -> np.ndarray:
    return np.concatenate([[group_cocycle_B1(g, h)], group_cocycle_B2(g, h)])


def cocycle_C1(xi, eta) -> float:
    _, v1, v2 = xi
    _, v1_, v2_ = eta
    return float(v1 * v2_ - v2 * v1_)


def cocycle_C(xi, eta) -> np.ndarray:
    return np.cross(np.asarray(xi, dtype=float), np.asarray(eta, dtype=float))


B1 = GroupCocycle(1, group_cocycle_B1)
B2 = GroupCocycle(2, group_cocycle_B2)
B_COMBINED = GroupCocycle(3, combined_B)
C1 = AlgebraCocycle2(1, cocycle_C1)
C_CROSS = AlgebraCocycle2(3, cocycle_C)
# A(omega, v1, v2) = (0, v1, v2)
A_SHIFT = OneCocycle(np.diag([0.0, 1.0, 1.0]))


# -- operations ------------------------------------------------------------------------

def cocycle_identity_residual(B: GroupCocycle, f, g, h) -> np.ndarray:
    """``B(f,g) + B(fg,h) - B(f,gh) - B(g,h)``; zero for a two-cocycle."""
    return B(f, g) + B(group_mul(f, g), h) - B(f, group_mul(g, h)) - B(g, h)


def extended_mul(a: Extended, b: Extended, B: GroupCocycle) -> Extended:
    if a.fiber.shape != (B.fiber_dim,) or b.fiber.shape != (B.fiber_dim,):
        raise ValueError("fiber dimension does not match the cocycle")
    return Extended(np.asarray(group_mul(a.base, b.base)), a.fiber + b.fiber + B(a.base, b.base))


def extended_inv(a: Extended, B: GroupCocycle) -> Extended:
    ginv = np.asarray(group_inv(a.base))
    return Extended(ginv, -a.fiber - B(a.base, ginv))


def infinitesimal_cocycle_fd(B: GroupCocycle, xi, eta, h: float = FD_STEP) -> np.ndarray:
    """Central mixed difference of ``B(g(t), h(s)) - B(h(s), g(t))`` at ``t = s = 0``.

    ``g(t) = t xi`` and ``h(s) = s eta`` are straight lines in (theta, x, y)
    coordinates, so ``g'(0) = xi`` and ``h'(0) = eta`` at the identity.
    Truncation error is O(h^2).
    """
    if not h > 0:
        raise ValueError(f"finite-difference step must be positive, got {h}")
    xi = np.asarray(xi, dtype=float)
    eta = np.asarray(eta, dtype=float)

    def anti(t, s):
        g, k = t * xi, s * eta
        return B(g, k) - B(k, g)

    return (anti(h, h) - anti(h, -h) - anti(-h, h) + anti(-h, -h)) / (4.0 * h * h)


def coboundary(A: OneCocycle, bracket: Callable = bracket_se2) -> AlgebraCocycle2:
    """``delta A (xi, eta) = -A([xi, eta])``."""
    return AlgebraCocycle2(A.fiber_dim, lambda xi, eta: -A(bracket(xi, eta)))


def trivialization_psi(A: OneCocycle, xa: Extended) -> Extended:
    if xa.fiber.shape != (A.fiber_dim,):
        raise ValueError("fiber dimension does not match the one-cocycle")
    return Extended(xa.base, xa.fiber - A(xa.base))


def dual_shift_phi(A: OneCocycle, ms: Extended) -> Extended:
    if ms.fiber.shape != (A.fiber_dim,):
        raise ValueError("fiber dimension does not match the one-cocycle")
    return Extended(ms.base - A.dual(ms.fiber), ms.fiber)


def extended_bracket(x: Extended, y: Extended, C: AlgebraCocycle2, bracket: Callable = bracket_se2) -> Extended:
    if x.fiber.shape != (C.fiber_dim,) or y.fiber.shape != (C.fiber_dim,):
        raise ValueError("fiber dimension does not match the cocycle")
    return Extended(bracket(x.base, y.base), C(x.base, y.base))


def closedness_residual(C: AlgebraCocycle2, xi, eta, zeta, bracket: Callable = bracket_se2) -> np.ndarray:
    """Chevalley-Eilenberg differential ``C([x,y],z) + C([y,z],x) + C([z,x],y)``."""
    return C(bracket(xi, eta), zeta) + C(bracket(eta, zeta), xi) + C(bracket(zeta, xi), eta)


def extend_algebra(alg: StructureAlgebra, C: AlgebraCocycle2) -> StructureAlgebra:
    """Structure constants of ``g x R^m`` with bracket ``([xi, eta], C(xi, eta))``."""
    n, m = alg.dim, C.fiber_dim
    c = np.zeros((n + m, n + m, n + m))
    c[:n, :n, :n] = alg.c
    c[n:, :n, :n] = C.tensor(n)
    return StructureAlgebra(c)
