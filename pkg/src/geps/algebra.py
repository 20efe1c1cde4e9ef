"""se(2), its dual, SE(2) and generic structure-constant Lie algebras.

Algebra elements ``xi = (omega, v1, v2)`` and dual elements
``mu = (k, p1, p2)`` are plain length-3 float arrays in the fixed basis
``e0 = rotation, e1, e2 = body translations``.  Group elements are
``(theta, x, y)`` arrays with ``theta`` kept unwrapped.
"""
from __future__ import annotations

from typing import Callable, NamedTuple

import numpy as np

JACOBI_TOL = 1e-10


class GroupElement(NamedTuple):
    theta: float
    x: float
    y: float


def _vec3(a) -> np.ndarray:
    a = np.asarray(a, dtype=float)
    if a.shape != (3,):
        raise ValueError(f"expected a length-3 coordinate triple, got shape {a.shape}")
    return a


def rotation(theta: float) -> np.ndarray:
    c, s = np.cos(theta), np.sin(theta)
    return np.array([[c, -s], [s, c]])


def bracket_se2(xi, eta) -> np.ndarray:
    w, v1, v2 = _vec3(xi)
    w_, v1_, v2_ = _vec3(eta)
    return np.array([0.0, v2 * w_ - w * v2_, w * v1_ - v1 * w_])


def pairing(mu, xi) -> float:
    return float(np.dot(_vec3(mu), _vec3(xi)))


def coadjoint_se2(xi, mu) -> np.ndarray:
    """``ad*_xi mu``, defined by ``<ad*_xi mu, eta> = <mu, [xi, eta]>``."""
    w, v1, v2 = _vec3(xi)
    _, p1, p2 = _vec3(mu)
    return np.array([p1 * v2 - p2 * v1, w * p2, -w * p1])


def group_mul(g, h) -> GroupElement:
    th, x, y = _vec3(g)
    th_, x_, y_ = _vec3(h)
    tx, ty = rotation(th) @ np.array([x_, y_])
    return GroupElement(th + th_, x + tx, y + ty)


def group_inv(g) -> GroupElement:
    th, x, y = _vec3(g)
    ix, iy = -(rotation(-th) @ np.array([x, y]))
    return GroupElement(-th, ix, iy)


def group_matrix(g) -> np.ndarray:
    """Homogeneous 3x3 matrix of ``g``; the angle is wrapped only here."""
    th, x, y = _vec3(g)
    th = np.remainder(th + np.pi, 2 * np.pi) - np.pi
    m = np.eye(3)
    m[:2, :2] = rotation(th)
    m[:2, 2] = x, y
    return m


def group_exp(xi) -> GroupElement:
    """Matrix exponential of ``xi`` in se(2), written back as (theta, x, y)."""
    w, v1, v2 = _vec3(xi)
    if abs(w) < 1e-8:
        # second-order series of sin(w)/w and (1 - cos(w))/w
        a, b = 1.0 - w * w / 6.0, w / 2.0 - w**3 / 24.0
    else:
        a, b = np.sin(w) / w, (1.0 - np.cos(w)) / w
    return GroupElement(w, a * v1 - b * v2, b * v1 + a * v2)


def body_velocity(g, gdot) -> np.ndarray:
    """Left-trivialized velocity ``g^{-1} gdot`` for ``gdot = (theta', x', y')``."""
    th = _vec3(g)[0]
    dth, dx, dy = _vec3(gdot)
    c, s = np.cos(th), np.sin(th)
    return np.array([dth, dx * c + dy * s, -dx * s + dy * c])


class StructureAlgebra:
    """Finite-dimensional Lie algebra given by structure constants.

    ``c[k, i, j]`` is the ``e_k`` component of ``[e_i, e_j]``.  Construction
    rejects arrays that are not antisymmetric or fail the Jacobi identity.
    """

    def __init__(self, c, tol: float = JACOBI_TOL):
        c = np.asarray(c, dtype=float)
        if c.ndim != 3 or not (c.shape[0] == c.shape[1] == c.shape[2]):
            raise ValueError(f"structure constants must have shape (n, n, n), got {c.shape}")
        if c.shape[0] == 0:
            raise ValueError("algebra dimension must be positive")
        if np.max(np.abs(c + c.transpose(0, 2, 1))) > tol:
            raise ValueError("structure constants are not antisymmetric in the lower indices")
        self.c = c
        res = self.jacobi_defect()
        if res > tol:
            raise ValueError(f"structure constants violate the Jacobi identity (residual {res:.3e})")

    @property
    def dim(self) -> int:
        return self.c.shape[0]

    @classmethod
    def from_bracket(cls, bracket: Callable, dim: int, tol: float = JACOBI_TOL) -> "StructureAlgebra":
        basis = np.eye(dim)
        c = np.zeros((dim, dim, dim))
        for i in range(dim):
            for j in range(dim):
                c[:, i, j] = bracket(basis[i], basis[j])
        return cls(c, tol=tol)

    @classmethod
    def abelian(cls, dim: int) -> "StructureAlgebra":
        return cls(np.zeros((dim, dim, dim)))

    def bracket(self, x, y) -> np.ndarray:
        return np.einsum("kij,i,j->k", self.c, x, y)

    def ad(self, x) -> np.ndarray:
        """Matrix of ``eta -> [x, eta]``."""
        return np.einsum("kij,i->kj", self.c, x)

    def coadjoint(self, x, mu) -> np.ndarray:
        return self.ad(x).T @ np.asarray(mu, dtype=float)

    def jacobi_defect(self) -> float:
        # sum over cyclic (i, j, l) of [e_i, [e_j, e_l]], contracted in structure constants
        cc = np.einsum("mjl,kim->kijl", self.c, self.c)
        total = cc + cc.transpose(0, 2, 3, 1) + cc.transpose(0, 3, 1, 2)
        return float(np.max(np.abs(total))) if total.size else 0.0


def se2_algebra() -> StructureAlgebra:
    return StructureAlgebra.from_bracket(bracket_se2, 3)


def trace_ad(alg: StructureAlgebra) -> np.ndarray:
    """Covector ``T`` with ``<T, xi> = trace(ad_xi)``, i.e. ``T_i = sum_k c^k_{ik}``."""
    return np.einsum("kik->i", alg.c)
