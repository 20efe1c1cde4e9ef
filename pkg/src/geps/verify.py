"""Self-check suite behind ``geps verify``.

Each check evaluates one structural identity on seeded random samples and
reports its worst residual against a fixed tolerance.
"""
from __future__ import annotations

from collections.abc import Callable
from dataclasses import dataclass

import numpy as np

from .algebra import StructureAlgebra, se2_algebra
from .eps import ConstraintSet, EPSSystem, eps_rhs_ext, measure_criterion, measure_criterion_extended
from .extension import (A_SHIFT, B1, B_COMBINED, C_CROSS, AlgebraCocycle2, closedness_residual,
                        coboundary, cocycle_C, cocycle_C1, cocycle_identity_residual,
                        infinitesimal_cocycle_fd)
from .models import (CirculationParams, HeisenbergParams, InertiaTensor, SleighParams,
                     chaplygin_lamb_rhs, fbar_function, hamiltonian_function, heisenberg_rhs,
                     sleigh_constrained_rhs, sleigh_reduced_rhs)
from .poisson import (EXTENDED, SE2, AffineMap, PoissonStructure, TestFunction, casimir_check,
                      ham_vf, jacobi_residual, lp_general, lp_extended, magnetic_structure,
                      poisson_map_residual, reduced_sleigh)


@dataclass(frozen=True)
class CheckResult:
    name: str
    residual: float
    tol: float

    @property
    def passed(self) -> bool:
        return bool(np.isfinite(self.residual) and self.residual <= self.tol)

    def line(self) -> str:
        verdict = "PASS" if self.passed else "FAIL"
        return f"{verdict}  {self.name:<34s} residual={self.residual:.3e}  tol={self.tol:.1e}"


# -- random fixtures ---------------------------------------------------------------------------

def random_inertia(rng: np.random.Generator, spread: float = 0.5) -> InertiaTensor:
    """Random well-conditioned positive definite total inertia."""
    B = rng.uniform(-spread, spread, (3, 3))
    m = B @ B.T + np.diag(rng.uniform(0.5, 2.0, 3))
    return InertiaTensor.from_matrix(0.5 * (m + m.T))


def random_circulation(rng: np.random.Generator) -> CirculationParams:
    kappa, alpha, beta = rng.uniform(-1, 1, 3)
    return CirculationParams(1.0, kappa, alpha, beta)


def random_sleigh(rng: np.random.Generator) -> SleighParams:
    return SleighParams(random_inertia(rng), random_circulation(rng))


def corrupted_extended(z) -> np.ndarray:
    """``lp_extended`` with the sigma0 cocycle entry weighted by p1; breaks Jacobi."""
    P = lp_extended(z)
    extra = z[3] * (z[1] - 1.0)
    P[1, 2] -= extra
    P[2, 1] += extra
    return P


CORRUPTED = PoissonStructure(6, corrupted_extended, name="corrupted")


def heisenberg_cocycle(field: float) -> AlgebraCocycle2:
    return AlgebraCocycle2(1, lambda x, y: field * (x[0] * y[1] - x[1] * y[0]))


def heisenberg_structure(field: float) -> PoissonStructure:
    # plus sign: the minus Lie-Poisson convention would reverse the Lorentz force
    return lp_general(StructureAlgebra.abelian(2), heisenberg_cocycle(field), sign=+1)


# -- checks -----------------------------------------------------------------------------------

def _worst(values) -> float:
    return float(max(values, default=0.0))


def _jacobi(P_of: Callable[[np.random.Generator], tuple[PoissonStructure, np.ndarray]],
            rng: np.random.Generator, samples: int) -> float:
    out = []
    for _ in range(samples):
        P, x = P_of(rng)
        F, G, K = (TestFunction.random(P.dim, rng) for _ in range(3))
        out.append(jacobi_residual(P, x, F, G, K))
    return _worst(out)


def check_jacobi(rng, samples, corrupt=False) -> list[CheckResult]:
    def se2(r):
        return SE2, r.uniform(-1, 1, 3)

    def magnetic(r):
        return magnetic_structure(random_circulation(r)), r.uniform(-1, 1, 3)

    def extended(r):
        return (CORRUPTED if corrupt else EXTENDED), r.uniform(-1, 1, 6)

    def sleigh(r):
        return reduced_sleigh(random_sleigh(r)), r.uniform(-1, 1, 2)

    tol = 1e-8
    return [CheckResult("jacobi.lp_se2", _jacobi(se2, rng, samples), tol),
            CheckResult("jacobi.lp_magnetic", _jacobi(magnetic, rng, samples), tol),
            CheckResult("jacobi.lp_extended", _jacobi(extended, rng, samples), tol),
            CheckResult("jacobi.reduced_sleigh", _jacobi(sleigh, rng, samples), tol)]


def check_casimirs(rng, samples) -> list[CheckResult]:
    fbar = casimir_check(EXTENDED, fbar_function(), rng.uniform(-1, 1, (samples, 6)))
    se2 = casimir_check(SE2, TestFunction(0.0, np.zeros(3), np.diag([0.0, 2.0, 2.0])),
                        rng.uniform(-1, 1, (samples, 3)))
    return [CheckResult("casimir.fbar_extended", fbar, 1e-12),
            CheckResult("casimir.se2", se2, 1e-12)]


def check_chaplygin_lamb(rng, samples) -> list[CheckResult]:
    vf, gen = [], []
    alg = se2_algebra()
    P_gen = lp_general(alg, C_CROSS, sign=-1)
    for _ in range(samples):
        I, circ = random_inertia(rng), random_circulation(rng)
        mu = rng.uniform(-1, 1, 3)
        z = np.concatenate([mu, circ.sigma])
        got = ham_vf(EXTENDED, hamiltonian_function(I, 3), z)
        vf.append(np.max(np.abs(got[:3] - chaplygin_lamb_rhs(mu, I, circ))) + np.max(np.abs(got[3:])))
        gen.append(np.max(np.abs(P_gen.matrix(z) - lp_extended(z))))
    return [CheckResult("oracle.chaplygin_lamb_vf", _worst(vf), 1e-12),
            CheckResult("oracle.lp_general_cross", _worst(gen), 1e-12)]


def check_eps(rng, samples) -> list[CheckResult]:
    full, red, energy = [], [], []
    nu = ConstraintSet(np.array([[0.0, 0.0, 1.0]]))
    for _ in range(samples):
        sp = random_sleigh(rng)
        sys = EPSSystem(sp.inertia.matrix, nu, cocycle=C_CROSS)
        w, v1 = rng.uniform(-1, 1, 2)
        mu = sp.inertia.matrix @ np.array([w, v1, 0.0])
        mudot, _ = eps_rhs_ext(sys, mu, sp.circ.sigma)
        full.append(np.max(np.abs(mudot - sleigh_constrained_rhs(mu, sp))))
        xidot = np.linalg.solve(sp.inertia.matrix, mudot)
        red.append(np.max(np.abs(xidot[:2] - sleigh_reduced_rhs((w, v1), sp))) + abs(xidot[2]))
        I = sp.inertia
        grad = np.array([I.J * w - I.L2 * v1, I.M * v1 - I.L2 * w])
        energy.append(abs(float(grad @ sleigh_reduced_rhs((w, v1), sp))))
    return [CheckResult("oracle.eps_constrained", _worst(full), 1e-12),
            CheckResult("oracle.eps_reduced", _worst(red), 1e-12),
            CheckResult("sleigh.energy_derivative", _worst(energy), 1e-12)]


def _random_group(rng, n):
    g = rng.uniform(-1, 1, (n, 3))
    g[:, 0] *= np.pi
    return g


def check_cocycles(rng, samples) -> list[CheckResult]:
    triples = _random_group(rng, 3 * samples).reshape(samples, 3, 3)
    b1 = _worst(np.max(np.abs(cocycle_identity_residual(B1, *t))) for t in triples)
    bc = _worst(np.max(np.abs(cocycle_identity_residual(B_COMBINED, *t))) for t in triples)
    pairs = rng.uniform(-1, 1, (samples, 2, 3))
    fd = _worst(np.max(np.abs(infinitesimal_cocycle_fd(B_COMBINED, x, y) - cocycle_C(x, y))) for x, y in pairs)
    trip = rng.uniform(-1, 1, (samples, 3, 3))
    closed = _worst(np.max(np.abs(closedness_residual(C_CROSS, *t))) for t in trip)
    return [CheckResult("cocycle.identity_B1", b1, 1e-12),
            CheckResult("cocycle.identity_B", bc, 1e-12),
            CheckResult("cocycle.infinitesimal_fd", fd, 1e-6),
            CheckResult("cocycle.cross_closed", closed, 1e-12)]


# C1 in the first fiber slot, zero elsewhere
C1_PACKED = AlgebraCocycle2(3, lambda x, y: np.array([cocycle_C1(x, y), 0.0, 0.0]))


def _sum_cocycle(a: AlgebraCocycle2, b: AlgebraCocycle2) -> AlgebraCocycle2:
    return AlgebraCocycle2(a.fiber_dim, lambda x, y: a(x, y) + b(x, y))


def check_shift_maps(rng, samples) -> list[CheckResult]:
    alg = se2_algebra()
    # extensions by C and by C + delta A are identified by the dual shift
    P_src = lp_general(alg, _sum_cocycle(C_CROSS, coboundary(A_SHIFT)), sign=-1)
    P_dst = lp_general(alg, C_CROSS, sign=-1)
    phi = AffineMap(np.block([[np.eye(3), -A_SHIFT.matrix.T], [np.zeros((3, 3)), np.eye(3)]]), np.zeros(6))
    res_phi, res_iota = [], []
    for _ in range(samples):
        z = rng.uniform(-1, 1, 6)
        F, K = TestFunction.random(6, rng), TestFunction.random(6, rng)
        res_phi.append(poisson_map_residual(phi, P_src, P_dst, F, K, z))
        circ = random_circulation(rng)
        iota = AffineMap(np.vstack([np.eye(3), np.zeros((3, 3))]), np.concatenate([np.zeros(3), circ.sigma]))
        res_iota.append(poisson_map_residual(iota, magnetic_structure(circ), EXTENDED, F, K, z[:3]))
    # the cross cocycle is C1 plus the trivial part -delta A, removed by mu -> mu + A_sigma
    P_prod = lp_general(alg, C1_PACKED, sign=-1)
    shift = AffineMap(np.block([[np.eye(3), A_SHIFT.matrix.T], [np.zeros((3, 3)), np.eye(3)]]), np.zeros(6))
    res_prod = []
    for _ in range(samples):
        z = rng.uniform(-1, 1, 6)
        F, K = TestFunction.random(6, rng), TestFunction.random(6, rng)
        res_prod.append(poisson_map_residual(shift, EXTENDED, P_prod, F, K, z))
    return [CheckResult("shift.phi_A_poisson", _worst(res_phi), 1e-12),
            CheckResult("shift.cross_to_product", _worst(res_prod), 1e-12),
            CheckResult("shift.iota_sigma_poisson", _worst(res_iota), 1e-12)]


def check_measure(rng, samples) -> list[CheckResult]:
    alg = se2_algebra()
    mismatches = 0
    for _ in range(max(1, samples // 20)):
        I = random_inertia(rng).matrix
        nu = rng.uniform(-1, 1, 3)
        if rng.uniform() < 0.5:
            nu = np.array([0.0, 0.0, 1.0])
        base = measure_criterion(alg, I, nu)
        ext = measure_criterion_extended(alg, C_CROSS, I, nu)
        mismatches += base.exists != ext.exists
    return [CheckResult("measure.base_equals_extended", float(mismatches), 0.0)]


def check_heisenberg(rng, samples) -> list[CheckResult]:
    worst = []
    for _ in range(samples):
        B = rng.uniform(-2, 2)
        m = rng.uniform(0.5, 2.0)
        sigma = rng.uniform(-2, 2)
        hp = HeisenbergParams(m, 1.0, B)
        z = np.concatenate([rng.uniform(-1, 1, 2), [sigma]])
        H = TestFunction(0.0, np.zeros(3), np.block([[np.linalg.inv(hp.mass), np.zeros((2, 1))],
                                                     [np.zeros((1, 3))]]))
        got = ham_vf(heisenberg_structure(B), H, z)
        worst.append(np.max(np.abs(got[:2] - heisenberg_rhs(z[:2], hp, sigma))) + abs(got[2]))
    return [CheckResult("oracle.heisenberg_lorentz", _worst(worst), 1e-12)]


def run_checks(seed: int = 0, samples: int = 200, corrupt: bool = False) -> list[CheckResult]:
    """All checks with one generator seeded by ``seed``; ``corrupt`` swaps in :data:`CORRUPTED`."""
    rng = np.random.default_rng(seed)
    out = []
    out += check_jacobi(rng, samples, corrupt)
    out += check_casimirs(rng, samples)
    out += check_chaplygin_lamb(rng, samples)
    out += check_eps(rng, samples)
    out += check_cocycles(rng, samples)
    out += check_shift_maps(rng, samples)
    out += check_measure(rng, samples)
    out += check_heisenberg(rng, samples)
    return out
